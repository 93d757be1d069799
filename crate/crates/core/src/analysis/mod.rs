//! Principal symbol, characteristic determinant, factorization checks,
//! hyperbolicity verdicts, Gevrey exponent and characteristic cones.

pub mod cones;
pub mod det;
pub mod factor;
pub mod hyper;
mod matrix;
pub mod minkowski;
mod report;
pub mod sphere;

use thiserror::Error;

pub use cones::{cone_sample, ConeRow, ConeSamples};
pub use det::{
    bareiss, block_determinants, cofactor_det_poly, cofactor_det_rational, det_poly, det_rational,
    determinant, triangular_blocks, BlockDeterminant,
};
pub use factor::{divide_out, verify_factorization, Factor, Factorization, VerifyReport, Witness};
pub use hyper::{
    biquadratic_split, gevrey_sigma, hyperbolicity_auto, hyperbolicity_linear,
    hyperbolicity_quadratic, hyperbolicity_sampled, sigma_from_count, verdict_or_inconclusive,
    BiquadraticSplit,
    GevreyError, GevreyExponent, HyperbolicityError, HyperbolicityVerdict, Method, Signature,
    SplitError, Verdict,
};
pub use matrix::{build_symbol_matrix, build_symbol_matrix_with, SymbolMatrix};
pub use minkowski::{verify_minkowski_inequalities, InequalityReport};
pub use report::{analyze, AnalysisConfig, AnalysisReport, Check};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("symbol matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
}
