//! Constructive solver for the general linear equation of a rank-3 tensor in
//! four dimensions, with thirty coefficients including metric-trace and
//! Levi-Civita terms.
//!
//! The pipeline eliminates the four traces through a 4×4 system and then
//! reads `N` off the first row of the inverse of a 15×15 permutation system.
//! [`oracle`] solves the same problem by brute force for cross-checking.
//!
//! ```
//! use rank3eq_core::{solve, Metric, ParameterSet, Rank3Tensor, SolveConfig};
//!
//! let p = ParameterSet::identity();
//! let b = Rank3Tensor::basis(0, 1, 2);
//! let report = solve(&p, &Metric::minkowski(), &b, &SolveConfig::default());
//! assert_eq!(report.solution, Some(b));
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod consistency;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod perm_system;
pub mod rhs;
pub mod solver;
pub mod tensor;
pub mod trace_system;

pub use linalg::DegeneracyPolicy;
pub use params::{ParameterSet, PARAM_COUNT, PARAM_NAMES};
pub use solver::{batch_solve, solve, Instance, SolveConfig, SolveReport, Status};
pub use tensor::{LeviCivita, Metric, Rank3Tensor};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum TensorError {
    #[error("metric has non-finite components")]
    NonFiniteMetric,
    #[error("metric is not symmetric at ({row}, {col})")]
    AsymmetricMetric { row: usize, col: usize },
    #[error("metric is degenerate (det = {det:e})")]
    DegenerateMetric { det: f64 },
    #[error("selector {0} is not in 1..=3")]
    InvalidSelector(u8),
    #[error("({0}, {1}) is not a pair of distinct slots in 1..=3")]
    InvalidSlotPair(u8, u8),
    #[error("unknown parameter name")]
    UnknownParameter,
}
