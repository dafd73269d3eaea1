//! Level-one cusp forms: exact q-expansions, Hecke operators and eigenforms.

mod basis;
mod eigen;
mod hecke;
mod poly;
mod qexp;

pub use basis::{delta, dim_cusp, eisenstein_e4, eisenstein_e6, victor_miller_basis};
pub use eigen::{eigenforms, eigenforms_with, EigenOptions, HeckeEigenform};
pub use hecke::{apply_hecke, hecke_matrix, HeckeMatrix};
pub use poly::{char_poly, IntPoly};
pub use qexp::QExpansion;
