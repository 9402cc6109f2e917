use serde::{Deserialize, Serialize};

use crate::em_fields::EMField;
use crate::error::{Error, Result};
use crate::grid_forms::{integrate, VectorField3};
use crate::spectral::spectral_curl;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionValues {
    /// `1/2 integral (E^2 + B^2)`.
    pub euclidean: f64,
    /// `1/2 integral (E^2 - B^2)`.
    pub minkowski: f64,
}

/// Both action densities integrated over one time slice.
pub fn action_values(f: &EMField) -> ActionValues {
    let e2 = integrate(&f.e().norm_sq());
    let b2 = integrate(&f.b().norm_sq());
    ActionValues { euclidean: 0.5 * (e2 + b2), minkowski: 0.5 * (e2 - b2) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityAction {
    /// Time integral (trapezoid over the interior slices) of the Lagrangian.
    pub value: f64,
    /// Lagrangian at each interior slice.
    pub lagrangian: Vec<f64>,
    /// `sup |curl dZ/dt - curl curl A|` over the interior slices.
    pub residual_z: f64,
    /// `sup |curl dA/dt + curl curl Z|`.
    pub residual_a: f64,
}

/// Two-potential action
/// `-1/2 integral dt dv [curl Z . dA/dt + (curl A)^2 - curl A . dZ/dt + (curl Z)^2]`
/// with centered time differences, plus the residuals of the field equations it implies.
pub fn duality_symmetric_action(a: &[VectorField3], z: &[VectorField3], dt: f64) -> Result<DualityAction> {
    if a.len() != z.len() {
        return Err(Error::InvalidArgument(format!("{} A slices but {} Z slices", a.len(), z.len())));
    }
    if a.len() < 3 {
        return Err(Error::TooFewSlices { needed: 3, got: a.len() });
    }
    if !(dt > 0.0) {
        return Err(Error::NonPositive { what: "dt", value: dt });
    }
    let curl_a: Vec<VectorField3> = a.iter().map(spectral_curl).collect::<Result<_>>()?;
    let curl_z: Vec<VectorField3> = z.iter().map(spectral_curl).collect::<Result<_>>()?;
    let mut lagrangian = Vec::with_capacity(a.len() - 2);
    let (mut rz, mut ra) = (0.0f64, 0.0f64);
    for n in 1..a.len() - 1 {
        let a_dot = a[n + 1].lin_comb(0.5 / dt, &a[n - 1], -0.5 / dt)?;
        let z_dot = z[n + 1].lin_comb(0.5 / dt, &z[n - 1], -0.5 / dt)?;
        let density = integrate(&curl_z[n].dot(&a_dot)?) + integrate(&curl_a[n].norm_sq())
            - integrate(&curl_a[n].dot(&z_dot)?)
            + integrate(&curl_z[n].norm_sq());
        lagrangian.push(-0.5 * density);

        let cc_a = spectral_curl(&curl_a[n])?;
        let cc_z = spectral_curl(&curl_z[n])?;
        rz = rz.max(spectral_curl(&z_dot)?.max_abs_diff(&cc_a)?);
        ra = ra.max(spectral_curl(&a_dot)?.max_abs_diff(&cc_z.scaled(-1.0))?);
    }
    let value = if lagrangian.len() == 1 {
        0.0
    } else {
        let inner: f64 = lagrangian[1..lagrangian.len() - 1].iter().sum();
        dt * (inner + 0.5 * (lagrangian[0] + lagrangian[lagrangian.len() - 1]))
    };
    Ok(DualityAction { value, lagrangian, residual_z: rz, residual_a: ra })
}
