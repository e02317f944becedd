//! Evaluation of p-harmonic and p-biharmonic objects for maps between
//! coordinate charts and for submanifolds of space forms.
//!
//! All differential quantities are computed by truncated Taylor (jet)
//! arithmetic on closed-form expressions, so derivatives are exact up to
//! floating-point rounding.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod mapcalc;
pub mod quadrature;
pub mod stress;
pub mod submanifold;

pub use error::{Error, Result};
pub use expr::{Expression, Params};
pub use geometry::ChartMetric;
pub use jet::{Jet, Scalar};
pub use mapcalc::SmoothMap;
