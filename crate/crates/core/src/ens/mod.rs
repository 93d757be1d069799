//! The incompressible Einstein-Navier-Stokes system as a reference
//! instance: construction, fluid states, the derived biquadratic factor,
//! the closed-form characteristic product and its verification.

mod build;
pub mod reference;
pub mod state;
pub mod verify;

use thiserror::Error;

use crate::analysis::SplitError;
use crate::rational::{ratio, Q};

pub use build::{build_ens_system, METRIC_PAIRS, VORTICITY_PAIRS};
pub use reference::{
    derive_biquadratic, discriminant_report, eval_factorization, p_at_state, printed_coefficients,
    reference_factorization_symbolic, reference_product, Biquadratic, DiscriminantReport,
    PrintedCoefficients,
};
pub use state::{validate_state, EquationOfState, FluidState, StateReport, StiffToy};
pub use verify::{verify_ens, EnsReport, VerifyConfig};

/// The shipped `.lops` text of the ENS system.
pub const ENS_SPEC: &str = include_str!("../../data/ens.lops");

/// A scalar wave equation, the smallest example with a single factor.
pub const WAVE_SPEC: &str = include_str!("../../data/wave.lops");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsError {
    #[error("metric is singular")]
    SingularMetric,
    #[error("inverse metric has a vanishing pivot; no diagonal frame")]
    DegenerateFrame,
    #[error("derivation failed: {0}")]
    Derivation(String),
    #[error("biquadratic split failed: {0}")]
    Split(SplitError),
    #[error("unexpected atom `{0}` in a split factor")]
    UnexpectedAtom(String),
}

/// Index data and the factor table of the ENS characteristic product.
pub struct EnsReferenceValues;

impl EnsReferenceValues {
    pub const UNKNOWNS: [&'static str; 5] = ["g", "s", "u", "Omega", "C"];
    pub const M: [i64; 5] = [3, 2, 2, 1, 2];
    pub const N: [i64; 5] = [1, 0, 0, 0, 0];
    pub const MULTIPLICITIES: [usize; 5] = [10, 1, 4, 6, 4];
    pub const TOTAL_ORDER: i64 = 44;
    /// `(name, multiplicity, degree)`.
    pub const FACTORS: [(&'static str, u32, u32); 5] =
        [("light", 14, 2), ("flow", 6, 1), ("flow_light", 2, 3), ("P1", 1, 2), ("P2", 1, 2)];
    pub const FACTOR_COUNT: u32 = 24;
    pub const MAX_FACTOR_DEGREE: u32 = 3;

    pub fn sigma0() -> Q {
        ratio(24, 23)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values_are_consistent() {
        let m: i64 = EnsReferenceValues::M.iter().zip(EnsReferenceValues::MULTIPLICITIES).map(|(m, k)| m * k as i64).sum();
        let n = EnsReferenceValues::N.iter().zip(EnsReferenceValues::MULTIPLICITIES).map(|(n, k)| n * k as i64).sum::<i64>();
        assert_eq!(m - n, EnsReferenceValues::TOTAL_ORDER);
        let count: u32 = EnsReferenceValues::FACTORS.iter().map(|f| f.1).sum();
        let degree: u32 = EnsReferenceValues::FACTORS.iter().map(|f| f.1 * f.2).sum();
        assert_eq!(count, EnsReferenceValues::FACTOR_COUNT);
        assert_eq!(degree as i64, EnsReferenceValues::TOTAL_ORDER);
        let sys = build_ens_system();
        for (i, u) in sys.unknowns.iter().enumerate() {
            assert_eq!(u.name, EnsReferenceValues::UNKNOWNS[i]);
            assert_eq!(u.m, EnsReferenceValues::M[i]);
            assert_eq!(u.multiplicity, EnsReferenceValues::MULTIPLICITIES[i]);
            assert_eq!(sys.equations[i].n, EnsReferenceValues::N[i]);
        }
    }
}
