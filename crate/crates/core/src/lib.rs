//! Rank-based PC algorithm: CPDAG learning from data whose dependence is a
//! Gaussian copula with arbitrary continuous marginals.
//!
//! The crate splits into the graph layer ([`graph`]), correlation estimation
//! ([`correlation`]), partial correlations and error-propagation bounds
//! ([`partial`]), conditional-independence deciders ([`citest`]), the PC
//! search ([`pc`]) and a simulation layer for linear SEMs ([`simulate`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32`, `f64`); the aliases below
//! fix the common `f64` case.
//!
//! ```
//! use rankpc::citest::{make_oracle_decider};
//! use rankpc::graph::{cpdag, Dag};
//! use rankpc::pc::run_pc;
//!
//! let dag = Dag::new(3, [(0, 1), (2, 1)]).unwrap();
//! let result = run_pc(&make_oracle_decider(&dag), 3).unwrap();
//! assert_eq!(result.pdag, cpdag(&dag));
//! ```

// `!(x > y)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod citest;
pub mod correlation;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod partial;
pub mod pc;
mod scalar;
pub mod simulate;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type DatasetF64 = correlation::Dataset<f64>;
pub type DatasetF32 = correlation::Dataset<f32>;
pub type CorrelationMatrixF64 = correlation::CorrelationMatrix<f64>;
pub type CorrelationMatrixF32 = correlation::CorrelationMatrix<f32>;
pub type MatrixF64 = linalg::Matrix<f64>;
pub type CorrelationDeciderF64 = citest::CorrelationDecider<f64>;
