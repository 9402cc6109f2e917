use thiserror::Error;

use crate::linalg::Vec3;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("exterior derivative degree {0} is not one of 0, 1, 2")]
    InvalidDegree(u8),

    #[error("degree {degree} expects a {expected} field")]
    DegreeMismatch { degree: u8, expected: &'static str },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("map is not finite at {0:?}")]
    NonFiniteMap(Vec3),

    #[error("point {point:?} lies on the singular axis of the {patch} patch")]
    SingularAxis { patch: &'static str, point: Vec3 },

    #[error("inverse curl is undefined on the mean mode (relative mean {relative_mean:.3e})")]
    NonzeroMean { relative_mean: f64 },

    #[error("field is not divergence-free: relative divergence {residual:.3e} exceeds {tolerance:.3e}")]
    NotSolenoidal { residual: f64, tolerance: f64 },

    #[error("field vanishes identically")]
    ZeroField,

    #[error("wavevector {k:?} is not resolved by a {counts:?} grid")]
    UnresolvedWavevector { k: [i64; 3], counts: [usize; 3] },

    #[error("time step {dt} violates the stability bound {bound}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("instability detected at t = {time}: norm ratio {growth:.3e} exceeds {limit:.3e}")]
    Instability { time: f64, growth: f64, limit: f64 },

    #[error("helicity constraint is degenerate (H = {helicity:.3e}); a zero-helicity field has no constrained minimizer")]
    DegenerateHelicity { helicity: f64 },

    #[error("need at least {needed} time slices, got {got}")]
    TooFewSlices { needed: usize, got: usize },

    #[error("stagnation point: |B| = {magnitude:.3e} at {point:?}")]
    Stagnation { point: Vec3, magnitude: f64 },

    #[error("field line left the trusted domain at {0:?}")]
    OutOfDomain(Vec3),

    #[error("curves are {separation:.3e} apart, below the separation floor {floor:.3e}")]
    CurvesTooClose { separation: f64, floor: f64 },

    #[error("curve is not closed")]
    OpenCurve,

    #[error("Hopf invariant routes disagree: helicity route {helicity:.6}, linking route {linking:.6}")]
    RouteDisagreement { helicity: f64, linking: f64 },

    #[error("({p}, {q}) is not a coprime pair of nonzero integers")]
    NotCoprime { p: i64, q: i64 },

    #[error("point has norm {norm}, expected a point on the unit 3-sphere")]
    OffSphere { norm: f64 },

    #[error("conformal factor vanishes at {0:?}")]
    VanishingConformalFactor(Vec3),

    #[error("an analytic closure is required for this operation")]
    ClosureMissing,

    #[error("closure is not defined at {0:?}")]
    UndefinedClosure(Vec3),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
