use serde::{Deserialize, Serialize};

use crate::beltrami::lambda_1;
use crate::em_fields::EMField;
use crate::error::Result;
use crate::grid_forms::{integrate, VectorField3};
use crate::spectral::{curl_inverse_with, CurlInverseTolerances};

/// `1/2 integral (|E|^2 + |B|^2)`.
pub fn energy_em(f: &EMField) -> f64 {
    0.5 * (integrate(&f.e().norm_sq()) + integrate(&f.b().norm_sq()))
}

/// `integral |v|^2` (no factor 1/2).
pub fn energy_v(v: &VectorField3) -> f64 {
    integrate(&v.norm_sq())
}

/// Coulomb-gauge inverse curl with the default mean and divergence tolerances.
pub fn curl_inverse(v: &VectorField3) -> Result<VectorField3> {
    curl_inverse_with(v, CurlInverseTolerances::default())
}

/// `integral A . B`.
pub fn helicity_ab(a: &VectorField3, b: &VectorField3) -> Result<f64> {
    Ok(integrate(&a.dot(b)?))
}

/// How a field is prepared before its inverse curl is taken.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HelicityOptions {
    pub mean_tol: Option<f64>,
    pub divergence_tol: Option<f64>,
    /// Subtract the spatial mean first. Needed for fields truncated to a box (the mean mode has
    /// no inverse curl).
    pub remove_mean: bool,
}

impl HelicityOptions {
    fn tolerances(&self) -> CurlInverseTolerances {
        let d = CurlInverseTolerances::default();
        CurlInverseTolerances { mean: self.mean_tol.unwrap_or(d.mean), divergence: self.divergence_tol.unwrap_or(d.divergence) }
    }

    /// Returns the prepared field and its inverse curl.
    pub fn potential(&self, v: &VectorField3) -> Result<(VectorField3, VectorField3)> {
        let v = if self.remove_mean { v.remove_mean() } else { v.clone() };
        let a = curl_inverse_with(&v, self.tolerances())?;
        Ok((v, a))
    }
}

/// `integral v . curl^-1 v`.
pub fn helicity_v(v: &VectorField3) -> Result<f64> {
    helicity_v_with(v, HelicityOptions::default())
}

pub fn helicity_v_with(v: &VectorField3, opts: HelicityOptions) -> Result<f64> {
    let (v, a) = opts.potential(v)?;
    helicity_ab(&a, &v)
}

/// Magnetic helicity in units of the squared normalization of the field.
pub fn magnetic_helicity(f: &EMField, opts: HelicityOptions) -> Result<f64> {
    let a2 = f.normalization() * f.normalization();
    Ok(helicity_v_with(f.b(), opts)? / a2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArnoldMargin {
    pub lhs: f64,
    pub rhs: f64,
    pub lambda1: f64,
    pub satisfied: bool,
}

impl ArnoldMargin {
    fn new(lhs: f64, rhs: f64, lambda1: f64) -> Self {
        Self { lhs, rhs, lambda1, satisfied: lhs >= rhs - 1e-12 * lhs.abs() }
    }

    /// `(lhs - rhs) / lhs`; zero for the equality case.
    pub fn relative_gap(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            (self.lhs - self.rhs) / self.lhs
        }
    }
}

/// `E[v] >= lambda_1 |H[v]|` with `lambda_1 = 2 pi / L_max`.
pub fn arnold_report(v: &VectorField3) -> Result<ArnoldMargin> {
    arnold_report_with(v, HelicityOptions::default())
}

pub fn arnold_report_with(v: &VectorField3, opts: HelicityOptions) -> Result<ArnoldMargin> {
    let (v, a) = opts.potential(v)?;
    let lambda1 = lambda_1(v.grid().lengths());
    let h = helicity_ab(&a, &v)?;
    Ok(ArnoldMargin::new(energy_v(&v), lambda1 * h.abs(), lambda1))
}
