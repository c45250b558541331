//! Symbolic kernel: scalar expressions in the base coordinates and
//! truncated graded power series with those expressions as coefficients.

pub mod chart;
pub mod coeff;
pub mod expr;
pub mod poly;
pub mod series;
pub mod zero;

pub use chart::{Chart, GenMono, Generator, DEFAULT_TRUNC};
pub use coeff::{Coeff, Decision};
pub use expr::Expr;
pub use poly::Poly;
pub use series::{GradedSeries, Homogeneity};
pub use zero::{ZeroStatus, ZeroTest};
