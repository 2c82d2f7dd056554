//! Dual-semantics inference over discrete universes.
//!
//! The same rule base can be read three ways:
//!
//! * **Relational** ([`fuzzy`]): max-min (or max-product) composition of a
//!   membership vector with a relation matrix.
//! * **Probabilistic** ([`prob`]): exact marginalization of a distribution
//!   through a row-stochastic conditional matrix, with a normalization
//!   bridge from memberships to distributions.
//! * **Statistical** ([`stochastic`]): grades as Bernoulli bit streams and
//!   logic gates as connectives. Under shared per-slot draws the gate
//!   network reproduces the exact max-min result bit for bit, so the only
//!   cost of the realization is Monte Carlo convergence — which the
//!   [`mod@bench`] harness measures as error versus stream length.
//!
//! [`controller`] closes the loop on a toy first-order plant with any of
//! the three backends; [`emit`] writes CSV traces, bench tables, and SVG
//! convergence plots. The `fuzzprob` binary exposes all of it on the
//! command line.

pub mod bench;
pub mod controller;
pub mod emit;
pub mod error;
pub mod fuzzy;
pub mod prob;
pub mod rng;
pub mod rulebase;
pub mod stochastic;

pub use error::{Error, Result};
