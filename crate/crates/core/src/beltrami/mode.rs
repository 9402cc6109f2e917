use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_forms::{GridSpec3, ScalarField3, VectorField3};
use crate::linalg::{cross, dot, norm, normalize, Vec3};
use crate::spectral::{spectral_curl, Fft3};

/// Handedness of a curl eigenmode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Helicity {
    Positive,
    Negative,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Positive => 1.0,
            Helicity::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Helicity::Positive => Helicity::Negative,
            Helicity::Negative => Helicity::Positive,
        }
    }
}

/// A single curl eigenmode `v = Re(amplitude * h * exp(i k.x))` with `i k x h = kappa h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeltramiMode {
    pub k: [i64; 3],
    pub helicity: Helicity,
    pub amplitude: Complex64,
}

impl BeltramiMode {
    pub fn new(k: [i64; 3], helicity: Helicity, amplitude: f64) -> Self {
        Self { k, helicity, amplitude: Complex64::new(amplitude, 0.0) }
    }

    pub fn wavevector(&self, lengths: [f64; 3]) -> Vec3 {
        [0, 1, 2].map(|a| 2.0 * PI * self.k[a] as f64 / lengths[a])
    }

    /// `kappa = s |k|`.
    pub fn kappa(&self, lengths: [f64; 3]) -> f64 {
        self.helicity.sign() * norm(self.wavevector(lengths))
    }

    /// Orthonormal pair `(e1, e2 = k_hat x e1)` spanning the plane normal to `k`.
    fn frame(&self, lengths: [f64; 3]) -> (Vec3, Vec3) {
        let kh = normalize(self.wavevector(lengths)).expect("nonzero wavevector");
        let mut axis = 0;
        for a in 1..3 {
            if kh[a].abs() < kh[axis].abs() {
                axis = a;
            }
        }
        let mut r = [0.0; 3];
        r[axis] = 1.0;
        let d = dot(r, kh);
        let e1 = normalize([0, 1, 2].map(|a| r[a] - d * kh[a])).expect("axis not parallel to k");
        (e1, cross(kh, e1))
    }

    /// Real-space value at `p`: `|A| (cos(k.x + psi) e1 - s sin(k.x + psi) e2)`.
    pub fn eval(&self, lengths: [f64; 3], p: Vec3) -> Vec3 {
        let k = self.wavevector(lengths);
        let (e1, e2) = self.frame(lengths);
        let s = self.helicity.sign();
        let phase = dot(k, p) + self.amplitude.arg();
        let (sn, cs) = phase.sin_cos();
        let a = self.amplitude.norm();
        [0, 1, 2].map(|i| a * (cs * e1[i] - s * sn * e2[i]))
    }
}

/// Samples a mode on `grid` with its closure attached.
pub fn build_beltrami_mode(mode: BeltramiMode, grid: GridSpec3) -> Result<VectorField3> {
    check_resolved(mode.k, &grid)?;
    let lengths = grid.lengths();
    Ok(VectorField3::from_fn(grid, move |p| mode.eval(lengths, p)))
}

/// Superposition of several modes on one grid.
pub fn build_beltrami_sum(modes: &[BeltramiMode], grid: GridSpec3) -> Result<VectorField3> {
    for m in modes {
        check_resolved(m.k, &grid)?;
    }
    let lengths = grid.lengths();
    let modes: Arc<[BeltramiMode]> = modes.into();
    Ok(VectorField3::from_fn(grid, move |p| {
        modes.iter().fold([0.0; 3], |acc, m| {
            let v = m.eval(lengths, p);
            [acc[0] + v[0], acc[1] + v[1], acc[2] + v[2]]
        })
    }))
}

fn check_resolved(k: [i64; 3], grid: &GridSpec3) -> Result<()> {
    if k == [0; 3] {
        return Err(Error::InvalidArgument("wavevector must be nonzero".into()));
    }
    let n = grid.counts();
    if (0..3).any(|a| 2 * k[a].unsigned_abs() as usize >= n[a]) {
        return Err(Error::UnresolvedWavevector { k, counts: n });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceFree {
    /// Rayleigh quotient `<B . curl B> / <B . B>`.
    pub kappa_fit: f64,
    /// `||curl B - kappa_fit B|| / ||B||`.
    pub residual: f64,
    /// Set when `curl B` vanishes: the fit is trivially satisfied with `kappa = 0`.
    pub curl_free: bool,
    /// `||B . grad kappa|| / (||B|| ||grad kappa||)` when a `kappa` field is supplied.
    pub tangency: Option<f64>,
}

/// Spectral force-free diagnostic.
pub fn force_free_residual(b: &VectorField3, kappa: Option<&ScalarField3>) -> Result<ForceFree> {
    let b2: f64 = b.norm_sq().values().iter().sum();
    if b2 == 0.0 {
        return Err(Error::ZeroField);
    }
    let c = spectral_curl(b)?;
    let bc: f64 = b.dot(&c)?.values().iter().sum();
    let kappa_fit = bc / b2;
    let r = c.lin_comb(1.0, b, -kappa_fit)?;
    let r2: f64 = r.norm_sq().values().iter().sum();
    let c2: f64 = c.norm_sq().values().iter().sum();
    let tangency = match kappa {
        None => None,
        Some(k) => {
            let g = crate::spectral::spectral_grad(k)?;
            let g2: f64 = g.norm_sq().values().iter().sum();
            let bg = b.dot(&g)?;
            let t2: f64 = bg.values().iter().map(|x| x * x).sum();
            let n = b.grid().len() as f64;
            Some(if g2 == 0.0 { 0.0 } else { (t2 * n).sqrt() / (b2 * g2).sqrt() })
        }
    };
    Ok(ForceFree {
        kappa_fit,
        residual: (r2 / b2).sqrt(),
        curl_free: c2 <= 1e-24 * b2 * b.grid().max_length().powi(-2),
        tangency,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurlEigenvalue {
    /// `|m|^2` of the integer mode vectors in the shell.
    pub shell: u64,
    pub kappa: f64,
    /// Number of wavevectors in the shell; each contributes one eigenvector of each sign.
    pub multiplicity: usize,
}

/// Nonzero curl eigenvalues on divergence-free fields of the periodic box, for integer mode
/// vectors with `|m|^2 <= shell_max`, ordered by `|kappa|` with the negative sign first.
pub fn curl_spectrum(lengths: [f64; 3], shell_max: u64) -> Result<Vec<CurlEigenvalue>> {
    if shell_max < 1 {
        return Err(Error::InvalidArgument("shell_max must be at least 1".into()));
    }
    let r = (shell_max as f64).sqrt().floor() as i64;
    let mut shells: Vec<(f64, u64, usize)> = Vec::new();
    for i in -r..=r {
        for j in -r..=r {
            for k in -r..=r {
                let m2 = (i * i + j * j + k * k) as u64;
                if m2 == 0 || m2 > shell_max {
                    continue;
                }
                let kv = [i, j, k];
                let k2: f64 = (0..3).map(|a| (2.0 * PI * kv[a] as f64 / lengths[a]).powi(2)).sum();
                match shells.iter_mut().find(|s| (s.0 - k2).abs() <= 1e-12 * k2) {
                    Some(s) => s.2 += 1,
                    None => shells.push((k2, m2, 1)),
                }
            }
        }
    }
    shells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::with_capacity(2 * shells.len());
    for (k2, shell, multiplicity) in shells {
        let kappa = k2.sqrt();
        out.push(CurlEigenvalue { shell, kappa: -kappa, multiplicity });
        out.push(CurlEigenvalue { shell, kappa, multiplicity });
    }
    Ok(out)
}

/// Smallest positive curl eigenvalue on the box, `2 pi / L_max`.
pub fn lambda_1(lengths: [f64; 3]) -> f64 {
    2.0 * PI / lengths.iter().cloned().fold(0.0, f64::max)
}

/// Largest `|k|` carried by a field's nonzero Fourier coefficients (relative floor `1e-13`).
pub fn spectral_radius(fft: &Fft3, spec: &[crate::spectral::Spectrum; 3]) -> f64 {
    let max = spec.iter().flat_map(|c| c.iter()).fold(0.0f64, |m, c| m.max(c.norm()));
    let mut k: f64 = 0.0;
    for idx in 0..spec[0].len() {
        if (0..3).any(|a| spec[a][idx].norm() > 1e-13 * max) {
            k = k.max(norm(fft.derivative_wavevector(idx)));
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectral_div;

    #[test]
    fn z_mode_has_the_expected_form() {
        let l = [1.0; 3];
        let m = BeltramiMode::new([0, 0, 1], Helicity::Positive, 2.0);
        let t = 2.0 * PI;
        for z in [0.0, 0.1, 0.37] {
            let v = m.eval(l, [0.3, 0.8, z]);
            let expect = [2.0 * (t * z).cos(), -2.0 * (t * z).sin(), 0.0];
            for a in 0..3 {
                assert!((v[a] - expect[a]).abs() < 1e-15);
            }
        }
        assert!((m.kappa(l) - t).abs() < 1e-15);
        let n = BeltramiMode { helicity: Helicity::Negative, ..m };
        assert!((n.kappa(l) + t).abs() < 1e-15);
    }

    #[test]
    fn modes_are_exact_eigenfields() {
        let g = GridSpec3::new([16, 16, 12], [1.0, 1.0, 1.5]).unwrap();
        for k in [[0, 0, 1], [1, 2, 0], [-1, 1, 3], [2, -3, 1]] {
            for h in [Helicity::Positive, Helicity::Negative] {
                let mode = BeltramiMode { k, helicity: h, amplitude: Complex64::from_polar(1.3, 0.4) };
                let v = build_beltrami_mode(mode, g).unwrap();
                let c = spectral_curl(&v).unwrap();
                let kappa = mode.kappa(g.lengths());
                let err = c.max_abs_diff(&v.scaled(kappa)).unwrap();
                assert!(err < 1e-12 * kappa.abs(), "{k:?} {err}");
                assert!(spectral_div(&v).unwrap().sup_norm() < 1e-12);
                let ff = force_free_residual(&v, None).unwrap();
                assert!(ff.residual < 1e-12 && (ff.kappa_fit - kappa).abs() < 1e-12 * kappa.abs());
            }
        }
    }

    #[test]
    fn finite_difference_curl_converges_to_the_eigenvalue() {
        let mode = BeltramiMode::new([1, 1, 0], Helicity::Positive, 1.0);
        let mut hs = vec![];
        let mut errs = vec![];
        for n in [16, 32, 64] {
            let g = GridSpec3::cube(n, 1.0).unwrap();
            let v = build_beltrami_mode(mode, g).unwrap();
            let c = crate::grid_forms::curl(&v).unwrap();
            errs.push(c.max_abs_diff(&v.scaled(mode.kappa(g.lengths()))).unwrap());
            hs.push(1.0 / n as f64);
        }
        let order = crate::linalg::convergence_order(&hs, &errs);
        assert!((order - 2.0).abs() < 0.2, "{order}");
    }

    #[test]
    fn unresolved_and_zero_wavevectors() {
        let g = GridSpec3::cube(8, 1.0).unwrap();
        assert!(matches!(
            build_beltrami_mode(BeltramiMode::new([4, 0, 0], Helicity::Positive, 1.0), g),
            Err(Error::UnresolvedWavevector { .. })
        ));
        assert!(build_beltrami_mode(BeltramiMode::new([0, 0, 0], Helicity::Positive, 1.0), g).is_err());
    }

    #[test]
    fn two_shell_rayleigh_quotient() {
        let g = GridSpec3::cube(16, 2.0 * PI).unwrap();
        let v = build_beltrami_sum(
            &[BeltramiMode::new([0, 0, 1], Helicity::Positive, 1.0), BeltramiMode::new([2, 0, 0], Helicity::Positive, 1.0)],
            g,
        )
        .unwrap();
        let ff = force_free_residual(&v, None).unwrap();
        assert!(ff.residual > 0.1);
        assert!((ff.kappa_fit - 1.5).abs() < 1e-12);
    }

    #[test]
    fn gradient_field_is_flagged_curl_free() {
        let g = GridSpec3::cube(16, 1.0).unwrap();
        let t = 2.0 * PI;
        let v = VectorField3::from_fn(g, move |p| [t * (t * p[0]).cos(), 0.0, 0.0]);
        let ff = force_free_residual(&v, None).unwrap();
        assert!(ff.curl_free && ff.kappa_fit.abs() < 1e-12 && ff.residual < 1e-12);
        assert!(matches!(force_free_residual(&VectorField3::zeros(g), None), Err(Error::ZeroField)));
    }

    #[test]
    fn tangency_of_a_constant_kappa() {
        let g = GridSpec3::cube(16, 1.0).unwrap();
        let v = build_beltrami_mode(BeltramiMode::new([0, 1, 0], Helicity::Positive, 1.0), g).unwrap();
        let kz = ScalarField3::from_fn(g, |p| (2.0 * PI * p[1]).sin());
        let ff = force_free_residual(&v, Some(&kz)).unwrap();
        // v has no y component, grad kappa is along y.
        assert!(ff.tangency.unwrap() < 1e-12);
    }

    #[test]
    fn spectrum_shells() {
        let s = curl_spectrum([1.0; 3], 2).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!((s[0].shell, s[0].multiplicity), (1, 6));
        assert!((s[0].kappa + 2.0 * PI).abs() < 1e-14 && (s[1].kappa - 2.0 * PI).abs() < 1e-14);
        assert_eq!(s[0].multiplicity + s[1].multiplicity, 12);
        assert!((s[3].kappa - 2.0 * PI * 2f64.sqrt()).abs() < 1e-13);
        assert_eq!(s[3].multiplicity, 12);
        let smallest_positive = s.iter().filter(|e| e.kappa > 0.0).map(|e| e.kappa).fold(f64::MAX, f64::min);
        assert_eq!(smallest_positive, lambda_1([1.0; 3]));
        assert!(curl_spectrum([1.0; 3], 0).is_err());
        let rect = curl_spectrum([2.0, 1.0, 1.0], 1).unwrap();
        assert!((rect[1].kappa - lambda_1([2.0, 1.0, 1.0])).abs() < 1e-14);
    }
}
