//! Exact n-queens and toroidal n-queens combinatorics.
//!
//! The crate is split along the lines of the computation:
//!
//! - [`board`]: configurations, validity checks and the JSON config schema.
//! - [`construction`]: the multiplicative base configuration for `n = 4^k + 1`.
//! - [`flips`]: the eight-queen local moves on that base configuration.
//! - [`counting`]: exact counters for the classical and toroidal problems,
//!   plus a brute-force permutation oracle.
//! - [`hypergraph`]: uniform hypergraphs, the perfect-matching reformulations
//!   of several design problems, and the entropy bound on matchings.
//! - [`bounds`]: the numeric side of the classical entropy bound (ring
//!   matrix, row profiles, quadrature of the log integrals).
//! - [`verify`] and [`cli`]: the self-check suite and the `queens-lab` binary.

pub mod board;
pub mod bounds;
pub mod cli;
pub mod construction;
pub mod counting;
pub mod error;
pub mod flips;
pub mod hypergraph;
pub mod limits;
pub mod verify;

pub use board::{QueensConfig, Square, ValidityReport};
pub use error::{Error, Result};
pub use limits::Limits;
