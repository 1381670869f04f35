//! Spectral Faedo–Galerkin simulator for a Caginalp phase-field system
//! perturbed by a maximal monotone operator, with Yosida regularization and
//! runtime monitors for the a priori estimates.
//!
//! Start with [`runner::run`] on a bundled [`scenarios`] entry, or build
//! [`dynamics::ModelParams`] by hand and call [`dynamics::solve`]. The guide
//! in `book/` walks through both.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod monotone;
pub mod output;
pub mod potentials;
pub mod profiles;
pub mod runner;
pub mod scenarios;
pub mod selftest;
pub mod spectral;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/getting-started.md")]
    mod getting_started {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/estimates.md")]
    mod estimates {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
