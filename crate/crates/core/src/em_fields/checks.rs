use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EMField;
use crate::error::{Error, Result};
use crate::grid_forms::{div, VectorField3};
use crate::linalg::{cross, dot, norm, Vec3};
use crate::spectral::spectral_curl;

/// Speed of light in natural units.
pub const C: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RsSample {
    /// `E + iB`.
    pub z: [Complex64; 3],
    /// `sum z_a^2 = E^2 - B^2 + 2i E.B`; zero exactly for null fields.
    pub square: Complex64,
}

pub fn rs_from_eb(e: Vec3, b: Vec3) -> RsSample {
    let z = [0, 1, 2].map(|a| Complex64::new(e[a], b[a]));
    RsSample { z, square: z.iter().map(|c| c * c).sum() }
}

pub fn rs_vector(f: &EMField, p: Vec3) -> RsSample {
    rs_from_eb(f.eval_e(p), f.eval_b(p))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullResiduals {
    /// Sup of `|E.B| / (|E||B|)`.
    pub dot: f64,
    /// Sup of `||E|^2 - |B|^2| / (|E|^2 + |B|^2)`.
    pub norm: f64,
    /// Set when the field vanishes at every sample.
    pub degenerate: bool,
}

fn accumulate(pairs: impl Iterator<Item = (Vec3, Vec3)>) -> NullResiduals {
    let mut r = NullResiduals { dot: 0.0, norm: 0.0, degenerate: true };
    for (e, b) in pairs {
        let (e2, b2) = (dot(e, e), dot(b, b));
        if e2 + b2 == 0.0 {
            continue;
        }
        r.degenerate = false;
        let nb = (e2 * b2).sqrt();
        if nb > 0.0 {
            r.dot = r.dot.max(dot(e, b).abs() / nb);
        }
        r.norm = r.norm.max((e2 - b2).abs() / (e2 + b2));
    }
    r
}

/// Residuals over the grid samples.
pub fn null_residuals(f: &EMField) -> NullResiduals {
    accumulate((0..f.grid().len()).map(|i| (f.e().at(i), f.b().at(i))))
}

/// Residuals at arbitrary points, through the closures when present.
pub fn null_residuals_at(f: &EMField, points: &[Vec3]) -> NullResiduals {
    accumulate(points.iter().map(|&p| (f.eval_e(p), f.eval_b(p))))
}

/// `(E, B) -> (-B, E)`.
pub fn duality_rotate(f: &EMField) -> EMField {
    let (e, b) = (f.e(), f.b());
    let mut new_e = b.scaled(-1.0);
    if let Some(cb) = b.closure().cloned() {
        new_e = new_e.with_closure(std::sync::Arc::new(move |p| cb(p).map(|x| -x)));
    }
    f.rebuild(new_e, e.clone())
}

/// Finite-difference `sup |div B| / sup |B|` and the same for `E` (0 for a vanishing field).
pub fn maxwell_divergence_residuals(f: &EMField) -> Result<(f64, f64)> {
    let rel = |v: &VectorField3| -> Result<f64> {
        let s = v.sup_norm();
        Ok(if s == 0.0 { 0.0 } else { div(v)?.sup_norm() / s })
    };
    Ok((rel(f.b())?, rel(f.e())?))
}

/// `sup |dA/dt - curl A|` over the interior slices, with centered time differences and
/// spectral curl. Zero along an anti-self-dual flow `-E = dA/dt = B`.
pub fn asd_check_31(series: &[VectorField3], dt: f64) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::TooFewSlices { needed: 3, got: series.len() });
    }
    if !(dt > 0.0) {
        return Err(Error::NonPositive { what: "dt", value: dt });
    }
    let mut worst: f64 = 0.0;
    for n in 1..series.len() - 1 {
        let rate = series[n + 1].lin_comb(0.5 / dt, &series[n - 1], -0.5 / dt)?;
        let c = spectral_curl(&series[n])?;
        worst = worst.max(rate.max_abs_diff(&c)?);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameVelocity {
    /// Branch with the minus sign; subluminal for non-null fields.
    pub minus: Vec3,
    /// Branch with the plus sign; superluminal for non-null fields.
    pub plus: Vec3,
    /// False when no inertial frame makes `E` parallel to `B` (null fields: both branches reach `c`).
    pub attainable: bool,
}

/// Drift velocity of the frame in which `E` and `B` are parallel:
/// `v = n (c/2)(E^2 + B^2)/|E x B| {1 -+ sqrt((E^2 - B^2)^2 + 4 (E.B)^2)/(E^2 + B^2)}`, `n = E x B / |E x B|`.
pub fn frame_velocity(e: Vec3, b: Vec3) -> Result<FrameVelocity> {
    let (e2, b2) = (dot(e, e), dot(b, b));
    if e2 + b2 == 0.0 {
        return Err(Error::ZeroField);
    }
    let s = cross(e, b);
    let sn = norm(s);
    if sn == 0.0 {
        return Ok(FrameVelocity { minus: [0.0; 3], plus: [0.0; 3], attainable: true });
    }
    let n = s.map(|x| x / sn);
    let sum = e2 + b2;
    let root = ((e2 - b2).powi(2) + 4.0 * dot(e, b).powi(2)).sqrt() / sum;
    let pre = 0.5 * C * sum / sn;
    let minus = n.map(|x| x * pre * (1.0 - root));
    let plus = n.map(|x| x * pre * (1.0 + root));
    Ok(FrameVelocity { minus, plus, attainable: norm(minus) < C * (1.0 - 1e-12) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstantonChart {
    /// `|F| = 1 / (1 + r^2)^2` on R^4.
    R4,
    /// `|F| = 4 / cosh^2 t` on S^3 x R.
    Tube,
}

pub fn instanton_profile(x: f64, chart: InstantonChart) -> f64 {
    match chart {
        InstantonChart::R4 => 1.0 / (1.0 + x * x).powi(2),
        InstantonChart::Tube => 4.0 / x.cosh().powi(2),
    }
}
