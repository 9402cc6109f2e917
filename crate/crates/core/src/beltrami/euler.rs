use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_forms::VectorField3;
use crate::linalg::{cross, dot, norm, sub, Vec3};
use crate::numdiff;
use crate::spectral::{curl_hat, dealias_hat, Fft3, Spectrum};

fn truncated(fft: &Fft3, v: &VectorField3) -> [Spectrum; 3] {
    let mut s = fft.forward_vector(v);
    for c in s.iter_mut() {
        dealias_hat(fft, c);
    }
    s
}

/// Dealiased spectrum of `u x w` for two fields given by truncated spectra.
fn cross_product_hat(fft: &Fft3, u: &[Spectrum; 3], w: &[Spectrum; 3]) -> Result<[Spectrum; 3]> {
    let uu = fft.inverse_vector(u.clone())?;
    let ww = fft.inverse_vector(w.clone())?;
    let p = uu.zip_map(&ww, cross)?;
    let mut s = fft.forward_vector(&p);
    for c in s.iter_mut() {
        dealias_hat(fft, c);
    }
    Ok(s)
}

/// `||w - grad alpha|| / ||v||^2` (rms norms) with `w = v x curl v` and `laplacian alpha = div w`.
pub fn euler_steady_residual(v: &VectorField3) -> Result<f64> {
    let rms = v.rms();
    if rms == 0.0 {
        return Ok(0.0);
    }
    let fft = Fft3::new(*v.grid());
    let vs = truncated(&fft, v);
    let cs = curl_hat(&fft, &vs);
    let w = cross_product_hat(&fft, &vs, &cs)?;
    let n = fft.grid().len();
    let mut r = w.clone();
    for idx in 0..n {
        let k = fft.derivative_wavevector(idx);
        let k2 = dot(k, k);
        if k2 == 0.0 {
            continue;
        }
        // grad alpha = k (k . w^) / |k|^2.
        let kw: Complex64 = (0..3).map(|a| w[a][idx] * k[a]).sum::<Complex64>() / k2;
        for a in 0..3 {
            r[a][idx] -= kw * k[a];
        }
    }
    let res = fft.inverse_vector(r)?;
    Ok(res.rms() / (rms * rms))
}

/// `sup |dB/dt - curl(v x B)|` over interior slices: centered time differences, dealiased spectral products.
pub fn induction_residual(v: &[VectorField3], b: &[VectorField3], dt: f64) -> Result<f64> {
    if v.len() != b.len() {
        return Err(Error::InvalidArgument(format!("{} velocity slices but {} field slices", v.len(), b.len())));
    }
    if b.len() < 3 {
        return Err(Error::TooFewSlices { needed: 3, got: b.len() });
    }
    if !(dt > 0.0) {
        return Err(Error::NonPositive { what: "dt", value: dt });
    }
    let fft = Fft3::new(*b[0].grid());
    let mut worst: f64 = 0.0;
    for n in 1..b.len() - 1 {
        let rate = b[n + 1].lin_comb(0.5 / dt, &b[n - 1], -0.5 / dt)?;
        let vxb = cross_product_hat(&fft, &truncated(&fft, &v[n]), &truncated(&fft, &b[n]))?;
        let rhs = fft.inverse_vector(curl_hat(&fft, &vxb))?;
        worst = worst.max(rate.max_abs_diff(&rhs)?);
    }
    Ok(worst)
}

/// Pointwise check of `v x B = grad(beta) d(alpha)/dt - grad(alpha) d(beta)/dt` with
/// `B = grad(alpha) x grad(beta)`, for time-dependent Clebsch scalars. Returns the sup of the
/// mismatch relative to `|v||B|`.
pub fn clebsch_induction_residual(
    alpha: &dyn Fn(Vec3, f64) -> f64,
    beta: &dyn Fn(Vec3, f64) -> f64,
    v: &dyn Fn(Vec3) -> Vec3,
    points: &[Vec3],
    t: f64,
) -> f64 {
    let h = numdiff::DEFAULT_STEP;
    let mut worst: f64 = 0.0;
    for &p in points {
        let ga = numdiff::gradient(|q| alpha(q, t), p, h);
        let gb = numdiff::gradient(|q| beta(q, t), p, h);
        let at = numdiff::derivative(|s| alpha(p, s), t, h);
        let bt = numdiff::derivative(|s| beta(p, s), t, h);
        let b = cross(ga, gb);
        let vv = v(p);
        let lhs = cross(vv, b);
        let rhs = [0, 1, 2].map(|i| gb[i] * at - ga[i] * bt);
        let scale = norm(vv) * norm(b);
        let d = norm(sub(lhs, rhs));
        worst = worst.max(if scale > 0.0 { d / scale } else { d });
    }
    worst
}
