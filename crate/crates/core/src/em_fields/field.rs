use crate::error::{Error, Result};
use crate::grid_forms::{FourForm2, GridSpec3, Signature, VectorClosure, VectorField3};
use crate::linalg::Vec3;

/// Electric and magnetic fields on a common grid, each optionally backed by an analytic closure.
#[derive(Clone, Debug)]
pub struct EMField {
    e: VectorField3,
    b: VectorField3,
    signature: Signature,
    /// Amplitude normalization `a`; helicity is reported in units of `a^2`.
    normalization: f64,
    null_tolerance: Option<f64>,
}

impl EMField {
    pub fn new(e: VectorField3, b: VectorField3, signature: Signature) -> Result<Self> {
        e.check_grid(&b)?;
        Ok(Self { e, b, signature, normalization: 1.0, null_tolerance: None })
    }

    /// Samples both closures on `grid`.
    pub fn from_closures(grid: GridSpec3, e: VectorClosure, b: VectorClosure, signature: Signature) -> Self {
        Self {
            e: VectorField3::from_closure(grid, e),
            b: VectorField3::from_closure(grid, b),
            signature,
            normalization: 1.0,
            null_tolerance: None,
        }
    }

    pub fn with_normalization(mut self, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::NonPositive { what: "normalization", value: a });
        }
        self.normalization = a;
        Ok(self)
    }

    pub fn grid(&self) -> &GridSpec3 {
        self.e.grid()
    }

    pub fn e(&self) -> &VectorField3 {
        &self.e
    }

    pub fn b(&self) -> &VectorField3 {
        &self.b
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn has_closures(&self) -> bool {
        self.e.closure().is_some() && self.b.closure().is_some()
    }

    pub fn eval_e(&self, p: Vec3) -> Vec3 {
        self.e.eval(p)
    }

    pub fn eval_b(&self, p: Vec3) -> Vec3 {
        self.b.eval(p)
    }

    pub fn form_at(&self, p: Vec3) -> FourForm2 {
        FourForm2::from_eb(self.eval_e(p), self.eval_b(p), self.signature)
    }

    pub fn null_tolerance(&self) -> Option<f64> {
        self.null_tolerance
    }

    /// Sets the null flag after measuring the residuals against `tolerance`.
    pub fn certify_null(mut self, tolerance: f64) -> Result<Self> {
        let r = super::null_residuals(&self);
        if r.dot > tolerance || r.norm > tolerance {
            return Err(Error::InvalidArgument(format!(
                "field is not null: residuals ({:.3e}, {:.3e}) exceed {tolerance:.3e}",
                r.dot, r.norm
            )));
        }
        self.null_tolerance = Some(tolerance);
        Ok(self)
    }

    pub(crate) fn rebuild(&self, e: VectorField3, b: VectorField3) -> Self {
        Self { e, b, signature: self.signature, normalization: self.normalization, null_tolerance: self.null_tolerance }
    }
}
