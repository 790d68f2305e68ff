//! Simulation and analysis of gradient stochastic systems under linear
//! time-delay feedback control.
//!
//! The crate covers the full workflow: build a potential and a system
//! ([`potentials`], [`systems`]), integrate it ([`engine`]), evaluate the
//! closed-form stationary density and transition bounds of the small-delay
//! approximation ([`analysis`]), estimate the same quantities from ensembles
//! ([`estimation`]) and pick a control gain without simulating ([`gain`]).
//! [`cli`] wires these into the `tipctl` command-line tool.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod potentials;
pub mod systems;
pub mod engine;
pub mod analysis;
pub mod estimation;
pub mod gain;
pub mod config;
pub mod io;
pub mod presets;
pub mod reproduce;
pub mod cli;

pub use error::{Error, Result};
