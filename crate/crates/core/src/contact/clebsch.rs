use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::em_fields::{ComplexMap, HopfMap};
use crate::error::{Error, Result};
use crate::grid_forms::{GridSpec3, ScalarClosure, VectorField3};
use crate::linalg::{add, cross, dot, scale, Vec3};
use crate::numdiff;

/// One `alpha grad(beta)` term. An angular `beta` (defined modulo `beta_period`) is
/// differentiated across its branch cut correctly.
#[derive(Clone)]
pub struct ClebschPair {
    pub alpha: ScalarClosure,
    pub beta: ScalarClosure,
    pub beta_period: Option<f64>,
    /// Spread of `alpha` used to normalize drifts; `None` means unnormalized.
    pub alpha_range: Option<f64>,
}

impl ClebschPair {
    pub fn new(alpha: ScalarClosure, beta: ScalarClosure) -> Self {
        Self { alpha, beta, beta_period: None, alpha_range: None }
    }

    pub fn angular(alpha: ScalarClosure, beta: ScalarClosure, period: f64) -> Self {
        Self { alpha, beta, beta_period: Some(period), alpha_range: None }
    }

    pub fn with_alpha_range(mut self, range: f64) -> Self {
        self.alpha_range = Some(range);
        self
    }
}

/// `u = grad(phi) + sum_j alpha_j grad(beta_j)` with one or two pairs.
#[derive(Clone)]
pub struct ClebschData {
    pub phi: Option<ScalarClosure>,
    pub pairs: Vec<ClebschPair>,
    /// Base step of the extrapolated central differences.
    pub step: f64,
}

impl std::fmt::Debug for ClebschData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ClebschData {{ phi: {}, pairs: {} }}", self.phi.is_some(), self.pairs.len())
    }
}

/// Wraps `x` into `(-period/2, period/2]`.
pub fn wrap_angle(x: f64, period: f64) -> f64 {
    x - period * (x / period).round()
}

fn finite(p: Vec3, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::UndefinedClosure(p))
    }
}

impl ClebschData {
    pub fn new(phi: Option<ScalarClosure>, pairs: Vec<ClebschPair>) -> Result<Self> {
        if pairs.is_empty() || pairs.len() > 2 {
            return Err(Error::InvalidArgument(format!("Clebsch data needs one or two pairs, got {}", pairs.len())));
        }
        Ok(Self { phi, pairs, step: numdiff::DEFAULT_STEP })
    }

    /// Exact 1-form `d(phi)` with no pairs: an integrable, non-contact reference.
    pub fn exact(phi: ScalarClosure) -> Self {
        Self { phi: Some(phi), pairs: Vec::new(), step: numdiff::DEFAULT_STEP }
    }

    /// Number of pairs.
    pub fn delta(&self) -> usize {
        self.pairs.len()
    }

    fn grad(&self, f: &ScalarClosure, p: Vec3) -> Result<Vec3> {
        finite(p, f(p))?;
        let g = numdiff::gradient(|q| f(q), p, self.step);
        if g.iter().all(|x| x.is_finite()) {
            Ok(g)
        } else {
            Err(Error::UndefinedClosure(p))
        }
    }

    fn grad_beta(&self, pair: &ClebschPair, p: Vec3) -> Result<Vec3> {
        match pair.beta_period {
            None => self.grad(&pair.beta, p),
            Some(t) => {
                let b0 = finite(p, (pair.beta)(p))?;
                let beta = pair.beta.clone();
                let g = numdiff::gradient(move |q| wrap_angle(beta(q) - b0, t), p, self.step);
                if g.iter().all(|x| x.is_finite()) {
                    Ok(g)
                } else {
                    Err(Error::UndefinedClosure(p))
                }
            }
        }
    }

    /// `(omega, d omega)` as vector proxies at `p`.
    pub fn forms(&self, p: Vec3) -> Result<(Vec3, Vec3)> {
        let mut omega = match &self.phi {
            Some(phi) => self.grad(phi, p)?,
            None => [0.0; 3],
        };
        let mut d_omega = [0.0; 3];
        for pair in &self.pairs {
            let a = finite(p, (pair.alpha)(p))?;
            let ga = self.grad(&pair.alpha, p)?;
            let gb = self.grad_beta(pair, p)?;
            omega = add(omega, scale(gb, a));
            d_omega = add(d_omega, cross(ga, gb));
        }
        Ok((omega, d_omega))
    }

    /// The 1-form sampled on `grid`, keeping the analytic closure.
    pub fn one_form_field(&self, grid: GridSpec3) -> VectorField3 {
        let data = self.clone();
        VectorField3::from_fn(grid, move |p| data.forms(p).map(|f| f.0).unwrap_or([f64::NAN; 3]))
    }

    /// `sum_j grad(alpha_j) x grad(beta_j)` sampled on `grid`.
    pub fn two_form_field(&self, grid: GridSpec3) -> VectorField3 {
        let data = self.clone();
        VectorField3::from_fn(grid, move |p| data.forms(p).map(|f| f.1).unwrap_or([f64::NAN; 3]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactSample {
    pub point: Vec3,
    pub omega: Vec3,
    pub d_omega: Vec3,
    /// `omega . d omega`, the density of `omega ^ d omega`.
    pub density: f64,
}

pub fn contact_form(data: &ClebschData, p: Vec3) -> Result<ContactSample> {
    let (omega, d_omega) = data.forms(p)?;
    Ok(ContactSample { point: p, omega, d_omega, density: dot(omega, d_omega) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactVerdict {
    pub min_density: f64,
    pub sample_count: usize,
    pub threshold: f64,
    pub verdict: bool,
    /// Samples where `|omega ^ d omega| <= threshold`.
    pub violating: Vec<Vec3>,
    pub chart: String,
}

/// Minimum of `|omega ^ d omega|` over the sample points; contact iff it exceeds `threshold`.
pub fn nonintegrability_check(data: &ClebschData, points: &[Vec3], threshold: f64, chart: &str) -> Result<ContactVerdict> {
    let mut min_density = f64::INFINITY;
    let mut violating = Vec::new();
    for &p in points {
        let d = contact_form(data, p)?.density.abs();
        min_density = min_density.min(d);
        if d <= threshold {
            violating.push(p);
        }
    }
    Ok(ContactVerdict {
        min_density,
        sample_count: points.len(),
        threshold,
        verdict: !points.is_empty() && violating.is_empty(),
        violating,
        chart: chart.to_string(),
    })
}

/// Point of the unit 3-sphere reached from space by inverse stereographic projection.
fn lift(p: Vec3, s: f64) -> [f64; 4] {
    let u = [p[0] / s, p[1] / s, p[2] / s];
    let r2 = dot(u, u);
    let d = 1.0 + r2;
    [2.0 * u[0] / d, 2.0 * u[1] / d, 2.0 * u[2] / d, (r2 - 1.0) / d]
}

/// Two-pair Clebsch data of the Hopfion: the normalized standard contact form of the 3-sphere
/// pulled back to space, `omega = (1 / 2 pi) sum (x_i dy_i - y_i dx_i)` in the lifted coordinates.
pub fn hopfion_clebsch(scale: f64) -> Result<ClebschData> {
    if !(scale > 0.0) {
        return Err(Error::NonPositive { what: "scale", value: scale });
    }
    let c = move |i: usize| -> ScalarClosure { Arc::new(move |p| lift(p, scale)[i]) };
    let phi: ScalarClosure = Arc::new(move |p| {
        let x = lift(p, scale);
        -(x[0] * x[1] + x[2] * x[3]) / (2.0 * PI)
    });
    let a1: ScalarClosure = Arc::new(move |p| lift(p, scale)[0] / PI);
    let a2: ScalarClosure = Arc::new(move |p| lift(p, scale)[2] / PI);
    ClebschData::new(Some(phi), vec![ClebschPair::new(a1, c(1)), ClebschPair::new(a2, c(3))])
}

/// Single-pair (local) Clebsch potentials of the Hopfion's magnetic field: the normalized
/// polar-cap area `alpha = |P|^2 / (2 pi (|P|^2 + |Q|^2))` and the angle `beta = arg P - arg Q`.
/// Both are constant along magnetic field lines.
pub fn hopfion_single_pair(scale: f64) -> Result<ClebschData> {
    if !(scale > 0.0) {
        return Err(Error::NonPositive { what: "scale", value: scale });
    }
    let map = HopfMap::magnetic(scale);
    let alpha: ScalarClosure = Arc::new(move |p| {
        let h = map.homogeneous(p);
        let (pp, qq) = (h.num.norm_sqr(), h.den.norm_sqr());
        pp / (2.0 * PI * (pp + qq))
    });
    let beta: ScalarClosure = Arc::new(move |p| {
        let h = map.homogeneous(p);
        h.num.arg() - h.den.arg()
    });
    ClebschData::new(None, vec![ClebschPair::angular(alpha, beta, 2.0 * PI).with_alpha_range(1.0 / (2.0 * PI))])
}
