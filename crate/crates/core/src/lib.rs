//! Exact numerics for finite quantum spin systems.
//!
//! * [`spinops`]: spin matrices, graphs, Hamiltonians and magnetization sectors.
//! * [`spectra`]: sector-resolved diagonalization and total-spin level tables.
//! * [`fcs`]: finitely correlated (matrix product) states.
//! * [`gapbound`]: martingale-method lower bounds on spectral gaps.
//! * [`locality`]: Lieb-Robinson commutator growth and ground-state clustering.
//! * [`ssep`]: the symmetric exclusion process and its spin-chain image.
//! * [`climit`]: quantum versus classical partition functions.
//! * [`cli`]: the `spinlab` command-line driver.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod climit;
pub mod error;
pub mod fcs;
pub mod gapbound;
pub mod halfint;
pub mod linalg;
pub mod locality;
pub mod spectra;
pub mod spinops;
pub mod ssep;

pub use error::{Error, Result};
