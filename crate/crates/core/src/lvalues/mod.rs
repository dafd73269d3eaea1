//! Central values of twisted L-functions, Petersson norms and harmonic weights.

mod afe;
mod norm;
mod symsq;
mod weight;

pub use afe::{completed_l, completed_l_with, upper_gamma_int, AfeOptions, CompletedLValue};
pub use norm::{petersson_norm_direct, petersson_norm_direct_coeffs, DirectOptions, NormMethod, PeterssonNorm};
pub use symsq::{
    calibrate, l1_symmetric_square, petersson_norm_symsq, verify_calibration, NormCalibration, SymSquareOptions,
    SymSquareValue,
};
pub use weight::{weight, weight_from_parts, Weight};
