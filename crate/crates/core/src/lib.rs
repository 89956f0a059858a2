//! Gibbs measures of double-well type potentials on the full shift over two
//! symbols, and their zero-temperature behaviour.
//!
//! The pipeline is: build a [`potential::ReducedPotential`], solve the
//! characteristic equation with [`spectrum::solve_lambda`], then query the
//! Gibbs measure, eigenfunction and sub-action. [`asymptotics::profile`]
//! predicts the `β → ∞` limit, [`peierls`] computes barriers and calibrated
//! sub-actions, and [`oracle`] provides independent finite-matrix checks.

pub mod asymptotics;
pub mod classes;
pub mod error;
pub mod nonselection;
pub mod oracle;
pub mod peierls;
pub mod potential;
pub mod series;
pub mod spectrum;

pub use error::{Error, Result};
pub use potential::{PlateauSeq, ReducedPotential, Side};
pub use series::LogValue;
