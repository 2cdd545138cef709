//! Proper shift rules for perturbed-parametric expectation-value functions.
//!
//! The crate evaluates `f(x) = tr(M U(x) ρ U(x)^dag)` with
//! `U(x) = exp(2πi(xA + B))`, builds Nyquist shift rules and their folded
//! variants as atomic measures, and estimates `f'` from ±1 shot oracles.

pub mod aspsr;
pub mod error;
pub mod estimators;
pub mod folding;
pub mod linalg;
pub mod measure;
pub mod model;
pub mod numeric;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{CMatrix, EigenDecomposition, HermitianOperator};
pub use model::{random_instance, Decomposition, GammaEstimate, ModelInstance};
pub use rng::Rng;
pub use folding::{fold_mod, shift_fold, tau_pc, FoldedRule, FoldingMap, ModKind};
pub use measure::{dirichlet_rule, nyquist, AtomicMeasure};
pub use estimators::{folding_estimate, obvious_estimate, EstimateReport, ShotOracle};
pub use aspsr::{aspsr_derivative, aspsr_expectation, aspsr_mc_estimate, AspsrConfig, Sign};
