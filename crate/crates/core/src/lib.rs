//! Weighted vector-valued Littlewood-Paley analysis on periodic grids.
//!
//! The crate samples functions `R^d -> C^n` (d = 1, 2) on a periodic box,
//! splits them into dyadic frequency bands, and evaluates weighted
//! Besov, Triebel-Lizorkin, Bessel-potential and Sobolev norms with power
//! weights `|t|^gamma`. On top of that machinery it computes Bony
//! paraproducts, Hardy-Littlewood maximal functions, and runs
//! operator-norm experiments for pointwise multiplication by the
//! half-space indicator `1_{t >= 0}`.
//!
//! Modules, bottom-up:
//! - [`grid`]: grids, fields, unitary DFT, Fourier/pointwise multiplication, test families.
//! - [`weights`]: power weights, weighted quadrature, A_p estimation, dual exponents.
//! - [`dyadic`]: the generator family and the operators `S_k`, `S^l`.
//! - [`norms`]: function-space and sequence-space norms, embedding reports.
//! - [`paraproduct`]: the three paraproducts and their support audit.
//! - [`maximal`]: the maximal operator and maximal-inequality ratios.
//! - [`multiplier`]: admissibility, indicator regularity, operator-norm sweeps.
//! - [`report`]: sweep report serialization (CSV/JSON).
//! - [`verify`]: invariant suites used by the CLI.

// Negated comparisons reject NaN parameters along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dyadic;
pub mod error;
pub mod grid;
pub mod maximal;
pub mod multiplier;
pub mod norms;
pub mod paraproduct;
pub mod report;
pub mod verify;
pub mod weights;

mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64;
