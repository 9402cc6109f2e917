//! Contact forms built from Clebsch data, the standard contact structure of the 3-sphere, and
//! helicity as the integral of `omega ^ d omega`.

mod clebsch;
mod s3;

pub use clebsch::{
    contact_form, hopfion_clebsch, hopfion_single_pair, nonintegrability_check, wrap_angle, ClebschData, ClebschPair,
    ContactSample, ContactVerdict,
};
pub use s3::{
    contact_plane, contactomorphism_check, fubini_study_form, helicity_contact, helicity_s3_standard, hopf_chart,
    hopf_coordinates, nondegeneracy, normalization_constants, pullback_area, pullback_consistency_check,
    pullback_contact_density, pullback_one_form, reeb_vector, standard_contact_s3, standard_contact_s3_d,
    stereographic, ContactDomain, NormalizationConstants, PullbackConsistency, S3Helicity, Vec4,
};
