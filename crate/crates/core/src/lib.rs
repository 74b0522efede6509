//! Correlation distance and mutual information for two-valued classical
//! variables and pairs of qubits.
//!
//! The crate is organised bottom-up:
//!
//! - [`prob`]: finite distributions, Shannon entropies, relative entropy,
//!   variational distance and the `(x, y, r)` parameterisation of 2×2 tables.
//! - [`qubit`]: two-qubit density operators, the Fano decomposition, spin
//!   covariance singular values, trace-norm correlation distance, entanglement
//!   criteria, state families, twirling and projective measurement.
//! - [`bounds`]: Pinsker, the tight classical bound, the quantum bound with its
//!   entropy branches and the threshold `C0`.
//! - [`bell`]: CHSH values and the classical resources required to simulate a
//!   Bell violation with outcome-dependent hidden-variable models.
//! - [`verify`]: seeded samplers, brute-force oracles, property sweeps and
//!   figure data.
//! - [`cli`]: the `corrdist` command line front end.

#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod bounds;
pub mod cli;
mod error;
pub mod format;
pub mod linalg;
pub mod prob;
pub mod qubit;
mod units;
pub mod verify;

pub use error::{Error, Result};
pub use units::Unit;
