//! Exact symbolic analysis of quasi-linear PDE systems written with
//! Leray-Ohya index structure.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`] - exact multivariate polynomials over the rationals in the
//!   covector atoms `xi0..xi3` plus an open set of named parameters.
//! * [`system`] - the block data model, the `.lops` text format and
//!   structural (index / derivative order) validation.
//! * [`analysis`] - principal symbol matrix, exact determinant, factorization
//!   checks, hyperbolicity tests, Gevrey exponent and cone sampling.
//! * [`ens`] - the incompressible Einstein-Navier-Stokes system shipped as a
//!   reference instance together with its verification pipeline.
//! * [`lab`] - finite-difference checks of tensor identities on analytic
//!   test fields.

pub mod analysis;
pub mod ens;
pub mod lab;
pub mod poly;
pub mod rational;
pub mod system;

pub use poly::{Atom, AtomKind, Poly, PolyError};
pub use system::{LeraySystem, ParseError};
