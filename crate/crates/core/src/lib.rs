//! Continuous-variable tripartite entanglement toolkit.
//!
//! Builds zero-mean Gaussian three-mode states from two optical models, a
//! symmetric beamsplitter network fed by squeezed light and an asymmetric
//! downconversion plus sum-frequency scheme (travelling-wave and intracavity),
//! and evaluates entanglement, EPR-steering and one-sided device-independent
//! key-rate criteria on them.
//!
//! Conventions used throughout:
//!
//! * `X = a + a†`, `Y = -i(a - a†)`, so the vacuum variance is 1 and
//!   `[X_j, Y_k] = 2i δ_jk`.
//! * Quadratures are laid out X-block then Y-block: `(X_0 … X_{N-1}, Y_0 … Y_{N-1})`.
//! * Modes are indexed from 0 in the API. Mode 0, 1, 2 are the parties often
//!   called Alice, Bob and Clare.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asym_tw;
pub mod cavity;
pub mod criteria;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod symmetric;

pub use error::{Error, Result};
pub use gaussian::{Covariance, GaussianState, Quadrature, QuadratureMap, SqueezingSpec};
