//! One-dimensional quadrature rules and deterministic point samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Vec3;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre integral of `f` over `[a, b]`.
pub fn gauss_legendre_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    half * x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + half * xi)).sum::<f64>()
}

/// Composite Simpson rule on equally spaced samples; a 3/8 panel closes an odd interval count.
pub fn simpson(samples: &[f64], h: f64) -> Result<f64> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("Simpson rule needs at least 3 samples, got {n}")));
    }
    let intervals = n - 1;
    let (even_end, tail) = if intervals % 2 == 0 { (n - 1, 0.0) } else {
        if n < 4 {
            return Err(Error::InvalidArgument("Simpson rule with 2 intervals minimum".into()));
        }
        let s = &samples[n - 4..];
        (n - 4, 3.0 * h / 8.0 * (s[0] + 3.0 * s[1] + 3.0 * s[2] + s[3]))
    };
    let mut acc = samples[0] + samples[even_end];
    for (i, v) in samples.iter().enumerate().take(even_end).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(acc * h / 3.0 + tail)
}

/// Periodic trapezoid on `n` equispaced nodes of `[0, period)`.
pub fn periodic_trapezoid(mut f: impl FnMut(f64) -> f64, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

/// Radical inverse of `i` in `base`.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Deterministic point sets in an axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sampler {
    /// Halton sequence in bases 2, 3, 5, skipping the origin.
    Halton,
    /// ChaCha8 uniform points from the given seed.
    Random(u64),
}

impl Sampler {
    pub fn points(&self, lo: Vec3, hi: Vec3, count: usize) -> Vec<Vec3> {
        let map = |u: [f64; 3]| [0, 1, 2].map(|a| lo[a] + (hi[a] - lo[a]) * u[a]);
        match *self {
            Sampler::Halton => (1..=count as u64)
                .map(|i| map([radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5)]))
                .collect(),
            Sampler::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count).map(|_| map([rng.gen(), rng.gen(), rng.gen()])).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in [2, 5, 16, 31] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * n - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = 2.0 / deg as f64;
            assert!((q - exact).abs() < 1e-13, "n={n}");
        }
        let v = gauss_legendre_integrate(f64::sin, 0.0, std::f64::consts::PI, 20);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        for n in [3, 4, 7, 10] {
            let h = 2.0 / (n - 1) as f64;
            let s: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3)).collect();
            assert!((simpson(&s, h).unwrap() - 4.0).abs() < 1e-13, "n={n}");
        }
        assert!(simpson(&[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn samplers_are_deterministic_and_in_range() {
        let lo = [-1.0, 0.0, 2.0];
        let hi = [1.0, 0.5, 3.0];
        for s in [Sampler::Halton, Sampler::Random(7)] {
            let a = s.points(lo, hi, 500);
            assert_eq!(a, s.points(lo, hi, 500));
            for p in &a {
                for k in 0..3 {
                    assert!(p[k] >= lo[k] && p[k] <= hi[k]);
                }
            }
        }
        assert_eq!(Sampler::Halton.points([0.0; 3], [1.0; 3], 1)[0], [0.5, 1.0 / 3.0, 0.2]);
    }
}
