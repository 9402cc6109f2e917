//! Energies, helicities, the Abelian Chern-Simons functional and action-level checks.

mod action;
mod chern;
mod energy;
mod mechanics;
mod report;

pub use action::{action_values, duality_symmetric_action, ActionValues, DualityAction};
pub use chern::{
    chern_density_identity_check, chern_density_identity_check_field, chern_simons, cs_variation_check,
    flow_equality_check, ChernIdentity, FlowEquality, Potential4,
};
pub use energy::{
    arnold_report, arnold_report_with, curl_inverse, energy_em, energy_v, helicity_ab, helicity_v, helicity_v_with,
    magnetic_helicity, ArnoldMargin, HelicityOptions,
};
pub use mechanics::{mechanical_analogy, MechanicalRecord};
pub use report::DiagnosticsReport;
