//! Weighted families of eigenforms, trace-formula comparisons, one-level densities
//! and their centered moments.

mod density;
mod family;
mod trace;

pub use density::{
    centered_moment, error_envelope_check, monotone_toward_zero, monotone_toward_zero_with, one_level_density, DensityReport, EnvelopeReport, EnvelopeRow,
    FormDensity, MomentReport, MomentRow, TREND_FLOOR,
};
pub use family::{build_family, FamilyOptions, FamilySnapshot, NormSource};
pub use trace::{
    kr_sum_formula, trace_main_term, trace_main_term_unsimplified, weighted_average_eigenvalue, KrReport,
};
