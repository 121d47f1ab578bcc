//! Rank-based tests on the copula of multivariate data that remain valid when
//! the coordinate samples contain ties.
//!
//! The crate provides four bootstrap-calibrated tests (exchangeability,
//! radial symmetry, extreme-value dependence, parametric goodness of fit),
//! each in a tie-adapted and a plain variant, together with the copula
//! families, estimators and Monte Carlo harness used to study their levels
//! and powers.

pub mod cli;
pub mod copulas;
pub mod empirical;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod hypothesis;
pub mod matrix;
pub mod ranks;
pub mod rng;
pub mod special;
pub mod statistics;

pub use copulas::{CopulaModel, Family};
pub use error::{Error, Result};
pub use matrix::{DataMatrix, Matrix};
pub use ranks::{PseudoSample, RankMode, TieTemplate};
pub use rng::{SeedSpec, Stream};
