pub mod constructions;
pub mod error;
pub mod geometry;
pub mod gradedlinalg;
pub mod grading;
pub mod symkernel;

pub use error::{Error, Result};
pub use grading::{canonical_degree_order, koszul_sign, scalar_product, Degree, DegreeOrder};

/// Exact rational numbers used for all symbolic coefficients.
pub type Rational = num_rational::BigRational;
