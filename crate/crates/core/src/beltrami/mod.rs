//! Curl eigenfields, the curl gradient flow and helicity-constrained relaxation.

mod euler;
mod flow;
mod mode;
mod relax;

pub use euler::{clebsch_induction_residual, euler_steady_residual, induction_residual};
pub use flow::{gradient_flow_evolve, FlowOptions, FlowSeries, NOISE_FLOOR};
pub use mode::{
    build_beltrami_mode, build_beltrami_sum, curl_spectrum, force_free_residual, lambda_1, spectral_radius,
    BeltramiMode, CurlEigenvalue, ForceFree, Helicity,
};
pub use relax::{relax_to_minimizer, Relaxation, RelaxOptions, TraceRow};
