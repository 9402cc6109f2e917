//! Richardson-extrapolated central differences for user-supplied closures.

use crate::linalg::Vec3;

/// Default base step; the extrapolated error is O(h^4) plus round-off of order eps / h.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Derivative of `f` at `x` from central differences at `h` and `h/2`.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Gradient of an n-variable function.
pub fn gradient_n(f: impl Fn(&[f64]) -> f64, q: &[f64], h: f64) -> Vec<f64> {
    (0..q.len())
        .map(|a| {
            derivative(
                |x| {
                    let mut work = q.to_vec();
                    work[a] = x;
                    f(&work)
                },
                q[a],
                h,
            )
        })
        .collect()
}

pub fn gradient(f: impl Fn(Vec3) -> f64, p: Vec3, h: f64) -> Vec3 {
    [0, 1, 2].map(|a| {
        derivative(
            |x| {
                let mut q = p;
                q[a] = x;
                f(q)
            },
            p[a],
            h,
        )
    })
}

/// Jacobian `J[i][j] = d f_i / d x_j` of a map R^3 -> R^3.
pub fn jacobian(f: impl Fn(Vec3) -> Vec3, p: Vec3, h: f64) -> [[f64; 3]; 3] {
    let mut j = [[0.0; 3]; 3];
    for col in 0..3 {
        let d = |s: f64| {
            let mut a = p;
            let mut b = p;
            a[col] += s;
            b[col] -= s;
            let (fa, fb) = (f(a), f(b));
            [0, 1, 2].map(|i| (fa[i] - fb[i]) / (2.0 * s))
        };
        let (d1, d2) = (d(h), d(0.5 * h));
        for row in 0..3 {
            j[row][col] = (4.0 * d2[row] - d1[row]) / 3.0;
        }
    }
    j
}

/// Curl of a vector closure.
pub fn curl(f: impl Fn(Vec3) -> Vec3, p: Vec3, h: f64) -> Vec3 {
    let j = jacobian(f, p, h);
    [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]]
}

pub fn divergence(f: impl Fn(Vec3) -> Vec3, p: Vec3, h: f64) -> f64 {
    let j = jacobian(f, p, h);
    j[0][0] + j[1][1] + j[2][2]
}
