//! Damped Jaynes-Cummings dynamics with correlated initial atom-mode states.
//!
//! A two-level atom couples to a single cavity mode that leaks into a
//! zero-temperature Markovian bath. Starting from atom-mode states with a
//! relative phase, the crate computes:
//!
//! * excited-state populations and their interference decomposition
//!   ([`single_excitation`], [`two_excitation`]),
//! * the trace distance between atomic states evolved from correlated and
//!   uncorrelated initial states, with the initial-information bound
//!   ([`information`]),
//! * concurrence dynamics of two atoms sharing the damped mode ([`two_atoms`]).
//!
//! Every reduced-sector solver is cross-checked against a brute-force Lindblad
//! integration on the truncated Fock space ([`lindblad`]).

pub mod config;
pub mod error;
pub mod information;
pub mod lindblad;
pub mod model;
pub mod numerics;
pub mod par;
pub mod scenarios;
pub mod selfcheck;
pub mod single_excitation;
pub mod table;
pub mod two_atoms;
pub mod two_excitation;

pub use error::{Error, Result};
pub use model::{CorrelatedInit, ModelParams, ProductInit, Regime, TwoAtomInit};
pub use numerics::{DensityMatrix, Solver, TimeGrid, C64};
pub use par::Execution;
pub use scenarios::{catalog, run_scenario, Scenario};
pub use table::TimeSeriesTable;

