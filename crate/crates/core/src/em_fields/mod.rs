//! Electromagnetic field constructors and pointwise diagnostics.

mod checks;
mod export;
mod field;
mod hopf;
mod monopole;

pub use checks::{
    asd_check_31, duality_rotate, frame_velocity, instanton_profile, maxwell_divergence_residuals, null_residuals,
    null_residuals_at, rs_from_eb, rs_vector, FrameVelocity, InstantonChart, NullResiduals, RsSample, C,
};
pub use export::{fmt17, read_grid_text, write_grid_text, GridFile};
pub use field::EMField;
pub use hopf::{
    build_dyon_pair, build_hopfion, build_mirror_hopfion, pullback_area_form, ComplexMap, DyonFields, DyonPair,
    DyonResiduals, FnMap, Homogeneous, HopfMap, Reflected,
};
pub use monopole::{
    monopole_a_phi, monopole_field, monopole_flux, monopole_potential, MonopoleFlux, MonopolePatch,
    MonopolePotential,
};
