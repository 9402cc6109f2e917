use serde::{Deserialize, Serialize};

use super::linking::{linking_number, Linking};
use super::trace::{trace_vector_field, FieldLine, TraceOptions};
use crate::contact::{wrap_angle, ClebschData};
use crate::em_fields::EMField;
use crate::error::{Error, Result};
use crate::functionals::{magnetic_helicity, HelicityOptions};
use crate::linalg::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfOptions {
    pub helicity: HelicityOptions,
    /// Seeds of the two traced lines.
    pub seeds: [Vec3; 2],
    pub trace: TraceOptions,
}

impl Default for HopfOptions {
    fn default() -> Self {
        Self {
            helicity: HelicityOptions { divergence_tol: Some(0.1), remove_mean: true, ..Default::default() },
            seeds: [[1.0, 0.0, 0.0], [0.5, 0.0, 0.0]],
            trace: TraceOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfInvariant {
    pub value: i64,
    /// Helicity in units of the squared normalization.
    pub helicity_raw: f64,
    pub linking: Linking,
    pub lines: [FieldLine; 2],
}

/// Hopf invariant by the helicity route and by the linking number of two traced lines of `B`.
/// The rounded values must agree.
pub fn hopf_invariant(f: &EMField, opts: &HopfOptions) -> Result<HopfInvariant> {
    let helicity_raw = magnetic_helicity(f, opts.helicity)?;
    let a = trace_vector_field(f.b(), opts.seeds[0], &opts.trace)?;
    let b = trace_vector_field(f.b(), opts.seeds[1], &opts.trace)?;
    let linking = linking_number(&a, &b)?;
    if helicity_raw.round() as i64 != linking.integer {
        return Err(Error::RouteDisagreement { helicity: helicity_raw, linking: linking.raw });
    }
    Ok(HopfInvariant { value: linking.integer, helicity_raw, linking, lines: [a, b] })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvectionDrift {
    /// Largest `|alpha - alpha(seed)|` along the line over all pairs, divided by the alpha range.
    pub alpha: f64,
    /// The same for `beta`, wrapped when angular and divided by its period.
    pub beta: f64,
}

/// Drift of the Clebsch labels along a traced line; both vanish on lines of
/// `grad alpha x grad beta`.
pub fn advection_invariants_check(line: &FieldLine, data: &ClebschData) -> Result<AdvectionDrift> {
    let eval = |f: &dyn Fn(Vec3) -> f64, p: Vec3| {
        let x = f(p);
        if x.is_finite() {
            Ok(x)
        } else {
            Err(Error::UndefinedClosure(p))
        }
    };
    let mut drift = AdvectionDrift { alpha: 0.0, beta: 0.0 };
    for pair in &data.pairs {
        let a0 = eval(&*pair.alpha, line.seed)?;
        let b0 = eval(&*pair.beta, line.seed)?;
        let a_range = pair.alpha_range.unwrap_or(1.0);
        for &p in &line.points {
            let da = (eval(&*pair.alpha, p)? - a0).abs() / a_range;
            let db = eval(&*pair.beta, p)? - b0;
            let db = match pair.beta_period {
                Some(t) => wrap_angle(db, t).abs() / t,
                None => db.abs(),
            };
            drift.alpha = drift.alpha.max(da);
            drift.beta = drift.beta.max(db);
        }
    }
    Ok(drift)
}
