//! Numerical curvature diagnostics for quasi-constant sectional curvature
//! (1-QC) metrics given on coordinate charts.

pub mod error;
pub mod expr;
pub mod metric;
pub mod tensor;
pub mod qc;
pub mod catalog;
pub mod immersion;
pub mod leaf;

pub use error::{Error, Result};
pub use metric::{compile_metric, CompiledMetric, MetricSpec};
