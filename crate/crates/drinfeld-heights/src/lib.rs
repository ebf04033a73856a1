//! Exact computation of canonical local and global heights of Drinfeld
//! modules over the rational function field F_q(t).
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: finite fields F_{p^e}, embeddings, additive-equation solvers;
//! - [`poly`]: polynomials and rational functions over F_q in the variable t;
//! - [`local`]: truncated Laurent series models of completions of F_q(t) and
//!   their finite extensions, with explicit precision tracking;
//! - [`twisted`]: twisted polynomial rings K{tau} and Drinfeld modules;
//! - [`heights`]: valuation thresholds, exception sets, the local-height
//!   iteration with termination certificates, escaping multipliers, global
//!   heights, and lower-bound reports;
//! - [`lab`]: randomized verification of the dichotomy and subspace lemmas;
//! - [`config`]: serde-facing configuration and result types.

pub mod config;
pub mod error;
pub mod field;
pub mod heights;
pub mod lab;
pub mod local;
pub mod poly;
pub mod twisted;

pub use error::{Error, Result};
