//! Local curvature tools for Riemannian metrics given in coordinates.

// Index loops follow tensor index notation; `!(x > 0.0)` also rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bivector;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod expr;
pub mod jet;
pub mod json;
pub mod metric;
pub mod obstruction;
pub mod parse;
pub mod perturb;
pub mod tensors;
pub mod weyl_space;

pub use error::{Error, Result};
pub use expr::Expr;
pub use jet::Jet3;
pub use metric::{parse_metric, MetricDef};
pub use parse::parse_expr;
pub use tensors::TensorSnapshot;
