//! Numerics for truncated and dual truncated Toeplitz operators on model spaces.

pub mod annihilate;
pub mod characterize;
pub mod error;
pub mod inner;
pub mod laurent;
pub mod linalg;
pub mod operators;
pub mod rng;
pub mod spaces;
pub mod suite;

pub use annihilate::{Dyad, FiniteRankOperator};
pub use characterize::{AdttoReport, DefectReport, Recovery, RecoveryMethod, Witness};
pub use error::{Error, Result};
pub use inner::BlaschkeProduct;
pub use laurent::{inner_product, LaurentPolynomial, C64};
pub use linalg::{CMatrix, CVector};
pub use operators::{BlockOperator, DenseComplexMatrix, LinearMap, SymbolFunction};
pub use spaces::{BasisLabel, OrthonormalBasis, Subspace};
pub use suite::{SuiteConfig, SuiteName, SuiteReport};
