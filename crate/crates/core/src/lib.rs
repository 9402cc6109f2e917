//! Topological field constructions and their diagnostics: Hopfions, Dirac monopole
//! patches, Beltrami eigenfields, helicity, Chern-Simons functionals, field-line
//! knots, and contact forms.

pub mod beltrami;
pub mod contact;
pub mod em_fields;
pub mod error;
pub mod functionals;
pub mod grid_forms;
pub mod knotlines;
pub mod linalg;
pub mod numdiff;
pub mod spectral;

pub use error::{Error, Result};
