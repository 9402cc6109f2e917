use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::chern::chern_simons;
use super::energy::{energy_em, energy_v, helicity_ab, ArnoldMargin, HelicityOptions};
use crate::beltrami::lambda_1;
use crate::em_fields::{fmt17, maxwell_divergence_residuals, null_residuals, EMField};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub energy_em: f64,
    pub energy_v: f64,
    /// In units of the squared normalization.
    pub helicity_ab: f64,
    pub helicity_v: f64,
    pub cs: f64,
    pub null_dot: f64,
    pub null_norm: f64,
    pub div_b: f64,
    pub div_e: f64,
    pub arnold: ArnoldMargin,
    pub normalization: f64,
}

const KEYS: [&str; 14] = [
    "energy_em",
    "energy_v",
    "helicity_ab",
    "helicity_v",
    "cs",
    "null_dot",
    "null_norm",
    "div_b",
    "div_e",
    "arnold_lhs",
    "arnold_rhs",
    "arnold_lambda1",
    "arnold_ok",
    "normalization",
];

impl DiagnosticsReport {
    /// Diagnostics of the magnetic part of `f`, with the electric part entering the energy and the
    /// null and divergence residuals.
    pub fn compute(f: &EMField, opts: HelicityOptions) -> Result<Self> {
        let (b, a) = opts.potential(f.b())?;
        let h = helicity_ab(&a, &b)?;
        let a2 = f.normalization() * f.normalization();
        let null = null_residuals(f);
        let (div_b, div_e) = maxwell_divergence_residuals(f)?;
        let lambda1 = lambda_1(f.grid().lengths());
        let ev = energy_v(&b);
        let rhs = lambda1 * h.abs();
        Ok(Self {
            energy_em: energy_em(f),
            energy_v: ev,
            helicity_ab: h / a2,
            helicity_v: h,
            cs: chern_simons(&a)?,
            null_dot: null.dot,
            null_norm: null.norm,
            div_b,
            div_e,
            arnold: ArnoldMargin { lhs: ev, rhs, lambda1, satisfied: ev >= rhs - 1e-12 * ev.abs() },
            normalization: f.normalization(),
        })
    }

    fn values(&self) -> [String; 14] {
        [
            fmt17(self.energy_em),
            fmt17(self.energy_v),
            fmt17(self.helicity_ab),
            fmt17(self.helicity_v),
            fmt17(self.cs),
            fmt17(self.null_dot),
            fmt17(self.null_norm),
            fmt17(self.div_b),
            fmt17(self.div_e),
            fmt17(self.arnold.lhs),
            fmt17(self.arnold.rhs),
            fmt17(self.arnold.lambda1),
            self.arnold.satisfied.to_string(),
            fmt17(self.normalization),
        ]
    }

    /// One `key=value` line per field, in a fixed order.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        for (k, v) in KEYS.iter().zip(self.values()) {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn from_key_value(text: &str) -> Result<Self> {
        let mut found: [Option<&str>; 14] = [None; 14];
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key=value", n + 1)))?;
            let slot = KEYS.iter().position(|x| *x == k.trim()).ok_or_else(|| Error::Parse(format!("line {}: unknown key {k:?}", n + 1)))?;
            found[slot] = Some(v.trim());
        }
        let get = |i: usize| found[i].ok_or_else(|| Error::Parse(format!("missing key {}", KEYS[i])));
        let num = |i: usize| -> Result<f64> {
            get(i)?.parse::<f64>().map_err(|e| Error::Parse(format!("{}: {e}", KEYS[i])))
        };
        let ok = get(12)?.parse::<bool>().map_err(|e| Error::Parse(format!("arnold_ok: {e}")))?;
        Ok(Self {
            energy_em: num(0)?,
            energy_v: num(1)?,
            helicity_ab: num(2)?,
            helicity_v: num(3)?,
            cs: num(4)?,
            null_dot: num(5)?,
            null_norm: num(6)?,
            div_b: num(7)?,
            div_e: num(8)?,
            arnold: ArnoldMargin { lhs: num(9)?, rhs: num(10)?, lambda1: num(11)?, satisfied: ok },
            normalization: num(13)?,
        })
    }
}
