//! Periodic 3D Fourier transforms and the spectral operators built on them:
//! curl, its inverse on solenoidal fields, Helmholtz projection, Poisson solves,
//! and the 2/3 dealiasing rule.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid_forms::{GridSpec3, ScalarField3, VectorField3};
use crate::linalg::{pairwise_sum, Vec3};

pub type Spectrum = Vec<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Cached forward/inverse plans for one grid shape.
#[derive(Clone)]
pub struct Fft3 {
    grid: GridSpec3,
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("grid", &self.grid).finish()
    }
}

impl Fft3 {
    pub fn new(grid: GridSpec3) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.counts();
        let forward = [0, 1, 2].map(|a| planner.plan_fft_forward(n[a]));
        let inverse = [0, 1, 2].map(|a| planner.plan_fft_inverse(n[a]));
        Self { grid, forward, inverse }
    }

    pub fn grid(&self) -> &GridSpec3 {
        &self.grid
    }

    pub fn forward(&self, data: &[f64]) -> Spectrum {
        let mut buf: Spectrum = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        buf
    }

    /// Inverse transform, normalized, keeping the real part.
    pub fn inverse(&self, mut spec: Spectrum) -> Vec<f64> {
        self.transform(&mut spec, &self.inverse);
        let norm = 1.0 / self.grid.len() as f64;
        spec.into_iter().map(|c| c.re * norm).collect()
    }

    pub fn forward_vector(&self, v: &VectorField3) -> [Spectrum; 3] {
        [0, 1, 2].map(|a| self.forward(v.component(a)))
    }

    pub fn inverse_vector(&self, spec: [Spectrum; 3]) -> Result<VectorField3> {
        let [a, b, c] = spec;
        VectorField3::from_components(self.grid, [self.inverse(a), self.inverse(b), self.inverse(c)])
    }

    fn transform(&self, buf: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [nx, ny, nz] = self.grid.counts();
        // z is contiguous.
        plans[2].process(buf);
        let mut line = vec![Complex64::new(0.0, 0.0); ny.max(nx)];
        for i in 0..nx {
            for k in 0..nz {
                for j in 0..ny {
                    line[j] = buf[(i * ny + j) * nz + k];
                }
                plans[1].process(&mut line[..ny]);
                for j in 0..ny {
                    buf[(i * ny + j) * nz + k] = line[j];
                }
            }
        }
        for j in 0..ny {
            for k in 0..nz {
                for i in 0..nx {
                    line[i] = buf[(i * ny + j) * nz + k];
                }
                plans[0].process(&mut line[..nx]);
                for i in 0..nx {
                    buf[(i * ny + j) * nz + k] = line[i];
                }
            }
        }
    }

    /// Signed integer mode numbers of a flat spectral index.
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let ijk = self.grid.unravel(idx);
        let n = self.grid.counts();
        [0, 1, 2].map(|a| signed_mode(ijk[a], n[a]))
    }

    /// Physical wavevector `2 pi m / L`.
    pub fn wavevector(&self, idx: usize) -> Vec3 {
        let m = self.mode(idx);
        let l = self.grid.lengths();
        [0, 1, 2].map(|a| 2.0 * PI * m[a] as f64 / l[a])
    }

    /// Wavevector used for derivatives: the unpaired Nyquist component is zeroed so
    /// that derivatives of real fields stay real.
    pub fn derivative_wavevector(&self, idx: usize) -> Vec3 {
        let m = self.mode(idx);
        let n = self.grid.counts();
        let l = self.grid.lengths();
        [0, 1, 2].map(|a| if is_nyquist(m[a], n[a]) { 0.0 } else { 2.0 * PI * m[a] as f64 / l[a] })
    }

    pub fn index_of_mode(&self, m: [i64; 3]) -> Option<usize> {
        let n = self.grid.counts();
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let na = n[a] as i64;
            if 2 * m[a].abs() >= na {
                return None;
            }
            ijk[a] = m[a].rem_euclid(na) as usize;
        }
        Some(self.grid.index(ijk[0], ijk[1], ijk[2]))
    }
}

fn signed_mode(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn is_nyquist(m: i64, n: usize) -> bool {
    n % 2 == 0 && m == (n / 2) as i64
}

fn dot_c(k: Vec3, v: [Complex64; 3]) -> Complex64 {
    v[0] * k[0] + v[1] * k[1] + v[2] * k[2]
}

fn cross_kv(k: Vec3, v: [Complex64; 3]) -> [Complex64; 3] {
    [v[2] * k[1] - v[1] * k[2], v[0] * k[2] - v[2] * k[0], v[1] * k[0] - v[0] * k[1]]
}

fn at(spec: &[Spectrum; 3], idx: usize) -> [Complex64; 3] {
    [spec[0][idx], spec[1][idx], spec[2][idx]]
}

/// `ik x v` in Fourier space.
pub fn curl_hat(fft: &Fft3, spec: &[Spectrum; 3]) -> [Spectrum; 3] {
    let n = fft.grid().len();
    let mut out = [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]];
    for idx in 0..n {
        let c = cross_kv(fft.derivative_wavevector(idx), at(spec, idx));
        for a in 0..3 {
            out[a][idx] = I * c[a];
        }
    }
    out
}

pub fn spectral_curl(v: &VectorField3) -> Result<VectorField3> {
    let fft = Fft3::new(*v.grid());
    let spec = fft.forward_vector(v);
    fft.inverse_vector(curl_hat(&fft, &spec))
}

pub fn spectral_grad(f: &ScalarField3) -> Result<VectorField3> {
    let fft = Fft3::new(*f.grid());
    let spec = fft.forward(f.values());
    let n = spec.len();
    let comps = [0, 1, 2].map(|a| {
        let s: Spectrum = (0..n).map(|idx| I * fft.derivative_wavevector(idx)[a] * spec[idx]).collect();
        fft.inverse(s)
    });
    VectorField3::from_components(*f.grid(), comps)
}

pub fn spectral_div(v: &VectorField3) -> Result<ScalarField3> {
    let fft = Fft3::new(*v.grid());
    let spec = fft.forward_vector(v);
    let s: Spectrum =
        (0..fft.grid().len()).map(|idx| I * dot_c(fft.derivative_wavevector(idx), at(&spec, idx))).collect();
    ScalarField3::from_samples(*v.grid(), fft.inverse(s))
}

/// Relative spectral divergence `|k.v^| / (|k||v^|)` in the l2 sense; 0 for solenoidal fields.
pub fn relative_divergence(fft: &Fft3, spec: &[Spectrum; 3]) -> f64 {
    let mut num = Vec::with_capacity(spec[0].len());
    let mut den = Vec::with_capacity(spec[0].len());
    for idx in 0..spec[0].len() {
        let k = fft.derivative_wavevector(idx);
        let v = at(spec, idx);
        num.push(dot_c(k, v).norm_sqr());
        den.push(crate::linalg::dot(k, k) * v.iter().map(|c| c.norm_sqr()).sum::<f64>());
    }
    let d = pairwise_sum(&den);
    if d == 0.0 {
        0.0
    } else {
        (pairwise_sum(&num) / d).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurlInverseTolerances {
    /// Admissible `|mean| / rms` before the mean mode is declared nonzero.
    pub mean: f64,
    /// Admissible relative spectral divergence.
    pub divergence: f64,
}

impl Default for CurlInverseTolerances {
    fn default() -> Self {
        Self { mean: 1e-10, divergence: 1e-8 }
    }
}

/// Coulomb-gauge vector potential `A^ = i k x v^ / |k|^2`, `A^(0) = 0`.
pub fn curl_inverse_with(v: &VectorField3, tol: CurlInverseTolerances) -> Result<VectorField3> {
    let rms = v.rms();
    if rms == 0.0 {
        return Ok(VectorField3::zeros(*v.grid()));
    }
    let mean = v.mean();
    let relative_mean = crate::linalg::norm(mean) / rms;
    if relative_mean > tol.mean {
        return Err(Error::NonzeroMean { relative_mean });
    }
    let fft = Fft3::new(*v.grid());
    let spec = fft.forward_vector(v);
    let residual = relative_divergence(&fft, &spec);
    if residual > tol.divergence {
        return Err(Error::NotSolenoidal { residual, tolerance: tol.divergence });
    }
    fft.inverse_vector(curl_inverse_hat(&fft, &spec))
}

pub fn curl_inverse_hat(fft: &Fft3, spec: &[Spectrum; 3]) -> [Spectrum; 3] {
    let mut out = curl_hat(fft, spec);
    for idx in 0..spec[0].len() {
        let k = fft.derivative_wavevector(idx);
        let k2 = crate::linalg::dot(k, k);
        for comp in out.iter_mut() {
            comp[idx] = if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { comp[idx] / k2 };
        }
    }
    out
}

/// Leray projection onto divergence-free fields (also drops the mean and unpaired Nyquist content).
pub fn project_solenoidal_hat(fft: &Fft3, spec: &mut [Spectrum; 3]) {
    for idx in 0..spec[0].len() {
        let k = fft.derivative_wavevector(idx);
        let k2 = crate::linalg::dot(k, k);
        if k2 == 0.0 {
            for comp in spec.iter_mut() {
                comp[idx] = Complex64::new(0.0, 0.0);
            }
            continue;
        }
        let kv = dot_c(k, at(spec, idx)) / k2;
        for a in 0..3 {
            spec[a][idx] -= kv * k[a];
        }
    }
}

pub fn project_solenoidal(v: &VectorField3) -> Result<VectorField3> {
    let fft = Fft3::new(*v.grid());
    let mut spec = fft.forward_vector(v);
    project_solenoidal_hat(&fft, &mut spec);
    fft.inverse_vector(spec)
}

/// Zero-mean solution of `laplacian(u) = f` (the mean of `f` is discarded).
pub fn poisson_solve(f: &ScalarField3) -> Result<ScalarField3> {
    let fft = Fft3::new(*f.grid());
    let spec = fft.forward(f.values());
    let s: Spectrum = spec
        .iter()
        .enumerate()
        .map(|(idx, &c)| {
            let k = fft.derivative_wavevector(idx);
            let k2 = crate::linalg::dot(k, k);
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                -c / k2
            }
        })
        .collect();
    ScalarField3::from_samples(*f.grid(), fft.inverse(s))
}

/// Two-thirds rule: zero every mode with `|m_a| > n_a / 3` on any axis.
pub fn dealias_hat(fft: &Fft3, spec: &mut Spectrum) {
    let n = fft.grid().counts();
    for (idx, c) in spec.iter_mut().enumerate() {
        let m = fft.mode(idx);
        if (0..3).any(|a| 3 * m[a].unsigned_abs() as usize > n[a]) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

pub fn dealias(f: &[f64], fft: &Fft3) -> Vec<f64> {
    let mut s = fft.forward(f);
    dealias_hat(fft, &mut s);
    fft.inverse(s)
}

/// `integral of a.b` over the box from two spectra of real fields (Parseval).
pub fn spectral_inner(grid: &GridSpec3, a: &[Spectrum; 3], b: &[Spectrum; 3]) -> f64 {
    let n = grid.len() as f64;
    let terms: Vec<f64> = (0..a[0].len())
        .map(|i| (0..3).map(|c| (a[c][i].conj() * b[c][i]).re).sum::<f64>())
        .collect();
    pairwise_sum(&terms) * grid.volume() / (n * n)
}

/// Zero coefficients whose magnitude is below `threshold` times the largest one.
/// Suppresses round-off noise that a growing flow would otherwise amplify.
pub fn noise_filter(spec: &mut [Spectrum; 3], threshold: f64) {
    let max = spec.iter().flat_map(|c| c.iter()).fold(0.0f64, |m, c| m.max(c.norm()));
    let floor = threshold * max;
    for comp in spec.iter_mut() {
        for c in comp.iter_mut() {
            if c.norm() < floor {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec3 {
        GridSpec3::new([16, 12, 10], [1.0, 1.5, 2.0]).unwrap()
    }

    #[test]
    fn round_trip_is_identity() {
        let g = grid();
        let f = ScalarField3::from_fn(g, |p| (p[0] * 3.0).sin() + p[1] * p[2]);
        let fft = Fft3::new(g);
        let back = fft.inverse(fft.forward(f.values()));
        for (a, b) in back.iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn mode_indexing() {
        let fft = Fft3::new(grid());
        let idx = fft.index_of_mode([2, -3, 1]).unwrap();
        assert_eq!(fft.mode(idx), [2, -3, 1]);
        assert!(fft.index_of_mode([8, 0, 0]).is_none());
        // Nyquist along x exists as a mode but is not differentiated.
        let nyq = fft.grid().index(8, 0, 0);
        assert_eq!(fft.mode(nyq), [8, 0, 0]);
        assert_eq!(fft.derivative_wavevector(nyq), [0.0; 3]);
    }

    #[test]
    fn spectral_derivatives_are_exact_on_trig_polynomials() {
        let g = grid();
        let t = [0, 1, 2].map(|a| 2.0 * PI / g.lengths()[a]);
        let v = VectorField3::from_fn(g, move |p| {
            [(t[1] * p[1]).sin(), (2.0 * t[2] * p[2]).cos(), (t[0] * p[0] + t[1] * p[1]).sin()]
        });
        let c = spectral_curl(&v).unwrap();
        for idx in 0..g.len() {
            let p = g.node_at(idx);
            let s = (t[0] * p[0] + t[1] * p[1]).cos();
            let exact = [
                t[1] * s + 2.0 * t[2] * (2.0 * t[2] * p[2]).sin(),
                -t[0] * s,
                -t[1] * (t[1] * p[1]).cos(),
            ];
            for a in 0..3 {
                assert!((c.at(idx)[a] - exact[a]).abs() < 1e-12);
            }
        }
        assert!(spectral_div(&c).unwrap().sup_norm() < 1e-12);
        let f = ScalarField3::from_fn(g, move |p| (t[0] * p[0]).cos() * (t[2] * p[2]).sin());
        assert!(spectral_curl(&spectral_grad(&f).unwrap()).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn curl_inverse_round_trip() {
        let g = grid();
        let t = [0, 1, 2].map(|a| 2.0 * PI / g.lengths()[a]);
        // A curl is solenoidal and mean-free.
        let a = VectorField3::from_fn(g, move |p| {
            [(t[1] * p[1] + 0.2).sin() * (t[2] * p[2]).cos(), (t[0] * p[0]).cos(), (2.0 * t[0] * p[0] - t[1] * p[1]).sin()]
        });
        let v = spectral_curl(&a).unwrap();
        let w = curl_inverse_with(&v, CurlInverseTolerances::default()).unwrap();
        let back = spectral_curl(&w).unwrap();
        let err = back.max_abs_diff(&v).unwrap();
        assert!(err <= 1e-12 * v.sup_norm(), "err {err}");
        assert!(spectral_div(&w).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn curl_inverse_rejects_mean_and_divergence() {
        let g = grid();
        let c = VectorField3::from_fn(g, |_| [1.0, 0.0, 0.0]);
        assert!(matches!(curl_inverse_with(&c, CurlInverseTolerances::default()), Err(Error::NonzeroMean { .. })));
        let t = 2.0 * PI;
        let grad = VectorField3::from_fn(g, move |p| [(t * p[0]).cos(), 0.0, 0.0]);
        assert!(matches!(
            curl_inverse_with(&grad, CurlInverseTolerances::default()),
            Err(Error::NotSolenoidal { .. })
        ));
    }

    #[test]
    fn projection_removes_gradients() {
        let g = grid();
        let t = [0, 1, 2].map(|a| 2.0 * PI / g.lengths()[a]);
        let v = VectorField3::from_fn(g, move |p| {
            let s = (t[0] * p[0]).sin();
            [t[0] * (t[0] * p[0]).cos() + (t[2] * p[2]).sin(), s, 0.5]
        });
        let w = project_solenoidal(&v).unwrap();
        assert!(spectral_div(&w).unwrap().sup_norm() < 1e-12);
        assert!(w.mean().iter().all(|m| m.abs() < 1e-14));
        let fft = Fft3::new(g);
        assert!(relative_divergence(&fft, &fft.forward_vector(&w)) < 1e-14);
    }

    #[test]
    fn poisson_inverts_laplacian() {
        let g = grid();
        let t = [0, 1, 2].map(|a| 2.0 * PI / g.lengths()[a]);
        let u = ScalarField3::from_fn(g, move |p| (t[0] * p[0]).sin() * (t[1] * p[1]).cos());
        let lap = u.map(|x| -(t[0] * t[0] + t[1] * t[1]) * x);
        let sol = poisson_solve(&lap).unwrap();
        for (a, b) in sol.values().iter().zip(u.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn dealias_keeps_low_modes_only() {
        let g = GridSpec3::cube(12, 1.0).unwrap();
        let fft = Fft3::new(g);
        let t = 2.0 * PI;
        let low = ScalarField3::from_fn(g, move |p| (4.0 * t * p[0]).cos());
        let high = ScalarField3::from_fn(g, move |p| (5.0 * t * p[1]).cos());
        let d = dealias(low.values(), &fft);
        assert!(d.iter().zip(low.values()).all(|(a, b)| (a - b).abs() < 1e-13));
        assert!(dealias(high.values(), &fft).iter().all(|a| a.abs() < 1e-13));
    }

    #[test]
    fn parseval_inner_product() {
        let g = grid();
        let t = [0, 1, 2].map(|a| 2.0 * PI / g.lengths()[a]);
        let v = VectorField3::from_fn(g, move |p| [(t[0] * p[0]).sin(), 1.0, (t[2] * p[2]).cos() + 0.5]);
        let fft = Fft3::new(g);
        let s = fft.forward_vector(&v);
        let direct = pairwise_sum(v.norm_sq().values()) * g.cell_volume();
        assert!((spectral_inner(&g, &s, &s) - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn noise_filter_zeroes_small_coefficients() {
        let g = GridSpec3::cube(8, 1.0).unwrap();
        let fft = Fft3::new(g);
        let t = 2.0 * PI;
        let v = VectorField3::from_fn(g, move |p| [(t * p[1]).sin() + 1e-15 * (2.0 * t * p[2]).cos(), 0.0, 0.0]);
        let mut s = fft.forward_vector(&v);
        noise_filter(&mut s, 1e-12);
        let w = fft.inverse_vector(s).unwrap();
        for idx in 0..g.len() {
            let p = g.node_at(idx);
            assert!((w.at(idx)[0] - (t * p[1]).sin()).abs() < 1e-15);
        }
    }
}
