//! Discretization substrate: periodic grids, sampled fields, finite-difference `d`,
//! quadrature, and pointwise 2-forms on a 4D chart.

pub mod diff;
pub mod four_form;
pub mod grid;
pub mod quadrature;

pub use diff::{curl, div, exterior_derivative, grad, integrate, partial, Form3, FormRef};
pub use four_form::{
    assemble_from_phi, hodge3_project, sd_asd_split, DualitySplit, FourForm2, Signature, SpaceTimeSplit,
};
pub use grid::{GridSpec3, ScalarClosure, ScalarField3, VectorClosure, VectorField3};
pub use quadrature::{gauss_legendre, gauss_legendre_integrate, periodic_trapezoid, simpson, Sampler};
