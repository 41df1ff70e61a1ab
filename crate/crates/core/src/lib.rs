//! Sequence-form solvers for two-player zero-sum extensive-form games.
//!
//! The saddle-point problem is `min_x max_y x^T M y` over two treeplexes.
//! [`solvers`] provides the extrapolated cyclic primal-dual method with
//! block-coordinate updates, mirror prox, CFR+ and predictive CFR+.

// `!(a > b)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod cli;
pub mod error;
pub mod games;
pub mod regularizer;
pub mod solvers;
pub mod treeplex;

pub use error::{GameError, PartitionError, RegularizerError, SolverError, TreeplexError};
