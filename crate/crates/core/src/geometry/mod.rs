//! Riemannian geometry of graded coordinate charts: metric, Levi-Civita
//! connection, curvature and the differential operators built on them.

pub mod calculus;
pub mod connection;
pub mod curvature;
pub mod fields;
pub mod metric;
pub mod report;

pub use calculus::{
    contracted_christoffel_check, coordinate_monomials, divergence, divergence_product_residue,
    gradient, gradient_product_residue, killing_check, laplacian, laplacian_degree,
    laplacian_local_even, leibniz_anomaly, lie_derivative_metric,
};
pub use connection::{
    christoffel, covariant_derivative, koszul_check, metric_compatibility, torsion, torsion_report,
    ChristoffelData,
};
pub use curvature::{
    antisymmetry, bianchi_first, bianchi_second, curvature_operator, einstein_check,
    pairing_antisymmetry, ricci, ricci_by_definition, ricci_scalar, ricci_symmetry,
    ricci_unsymmetrized, riemann, riemann_definition_check, RiemannData,
};
pub use fields::{OneForm, VectorField};
pub use metric::MetricTensor;
pub use report::{Finding, Report};
