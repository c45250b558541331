//! Cartesian and warped products of metric charts.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::MetricTensor;
use crate::gradedlinalg::{GradedMatrix, Variance};
use crate::symkernel::{Chart, Coeff, GradedSeries, Homogeneity, ZeroTest};
use crate::Rational;

/// Which factor a merged coordinate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Merged chart of two factors: base coordinates of the first factor,
/// then those of the second, then all generators in canonical order.
#[derive(Clone, Debug)]
pub struct ProductChart {
    pub chart: Arc<Chart>,
    /// Merged index to (factor, index in that factor's chart).
    pub provenance: Vec<(Factor, usize)>,
}

impl ProductChart {
    pub fn new(c1: &Arc<Chart>, c2: &Arc<Chart>) -> Result<ProductChart> {
        if c1.n() != c2.n() {
            return Err(Error::Dimension(format!(
                "factors have n = {} and n = {}",
                c1.n(),
                c2.n()
            )));
        }
        for name in c1.coord_names() {
            if c2.index_of(&name).is_some() {
                return Err(Error::Spec(format!(
                    "coordinate `{name}` appears in both factors"
                )));
            }
        }
        let base = c1
            .base_names()
            .iter()
            .chain(c2.base_names())
            .cloned()
            .collect();
        let gens = c1
            .generators()
            .iter()
            .chain(c2.generators())
            .cloned()
            .collect();
        let chart = Chart::new(c1.n(), base, gens, c1.trunc().max(c2.trunc()))?;
        let provenance = chart
            .coord_names()
            .iter()
            .map(|name| match c1.index_of(name) {
                Some(i) => (Factor::First, i),
                None => (
                    Factor::Second,
                    c2.index_of(name).expect("merged name comes from a factor"),
                ),
            })
            .collect();
        Ok(ProductChart { chart, provenance })
    }

    /// Pullback of a function on one factor.
    pub fn pull_back(&self, f: &GradedSeries) -> Result<GradedSeries> {
        GradedSeries::parse(&self.chart, &f.display())
    }
}

/// Product metric with a positive warping function on the second block.
#[derive(Clone, Debug)]
pub struct Product {
    pub chart: ProductChart,
    pub metric: MetricTensor,
    /// Positivity that could only be checked at sample points.
    pub warnings: Vec<String>,
}

fn assemble(m1: &MetricTensor, m2: &MetricTensor, mu: Option<&GradedSeries>) -> Result<Product> {
    if m1.degree().n() != m2.degree().n() {
        return Err(Error::Dimension("factor metrics have different n".into()));
    }
    if m1.degree() != m2.degree() {
        return Err(Error::Degree(format!(
            "factor metrics have degrees {} and {}",
            m1.degree(),
            m2.degree()
        )));
    }
    let pc = ProductChart::new(m1.chart(), m2.chart())?;
    let chart = pc.chart.clone();
    let mu = mu.map(|f| pc.pull_back(f)).transpose()?;
    let g = GradedMatrix::from_fn(&chart, Variance::Covariant, m1.degree(), |i, j| {
        match (pc.provenance[i], pc.provenance[j]) {
            ((Factor::First, a), (Factor::First, b)) => pc.pull_back(m1.get(a, b)),
            ((Factor::Second, a), (Factor::Second, b)) => {
                let e = pc.pull_back(m2.get(a, b))?;
                match &mu {
                    Some(f) => f.mul(&e),
                    None => Ok(e),
                }
            }
            _ => Ok(GradedSeries::zero(&chart)),
        }
    })?;
    Ok(Product {
        chart: pc,
        metric: MetricTensor::new(g)?,
        warnings: Vec::new(),
    })
}

/// `g = pi_1^* g_1 + pi_2^* g_2`.
pub fn cartesian_product(m1: &MetricTensor, m2: &MetricTensor) -> Result<Product> {
    assemble(m1, m2, None)
}

/// `g = pi_1^* g_1 + (pi_1^* mu) pi_2^* g_2` for `mu` of degree zero with a
/// strictly positive body.
pub fn warped_product(
    m1: &MetricTensor,
    m2: &MetricTensor,
    mu: &GradedSeries,
    test: &ZeroTest,
) -> Result<Product> {
    if !mu.chart().same_as(m1.chart()) {
        return Err(Error::ChartMismatch(
            "warping function must live on the first factor".into(),
        ));
    }
    match mu.homogeneity() {
        Homogeneity::Of(d) if d.is_zero() => {}
        Homogeneity::Zero => return Err(Error::NotInvertible("warping function is zero".into())),
        _ => {
            return Err(Error::Degree(
                "warping function must have degree zero".into(),
            ))
        }
    }
    let body = mu.body();
    let warnings = match positivity(&body, m1.chart().p(), test)? {
        Positivity::Proven => Vec::new(),
        Positivity::Sampled => vec![format!(
            "positivity of the warping body {} was only checked at sample points",
            body.display(m1.chart().base_names())
        )],
    };
    let mut out = assemble(m1, m2, Some(mu))?;
    out.warnings = warnings;
    Ok(out)
}

enum Positivity {
    Proven,
    Sampled,
}

fn positivity(body: &Coeff, nvars: usize, test: &ZeroTest) -> Result<Positivity> {
    if let Some(q) = body.as_rational() {
        return if q > Rational::from_integer(0.into()) {
            Ok(Positivity::Proven)
        } else {
            Err(Error::NotInvertible(format!(
                "warping body {} is not strictly positive",
                body.display(&[])
            )))
        };
    }
    if obviously_positive(body) {
        return Ok(Positivity::Proven);
    }
    let mut checked = 0;
    for point in test.points(nvars, test.samples) {
        let v = body.eval_float(&point)?;
        if v.is_nan() || v <= 0.0 {
            return Err(Error::NotInvertible(format!(
                "warping body is not positive at {point:?}"
            )));
        }
        checked += 1;
    }
    if checked == 0 {
        return Err(Error::Evaluation(
            "no sample point to check positivity".into(),
        ));
    }
    Ok(Positivity::Sampled)
}

/// Positive constants times exponentials over even powers.
fn obviously_positive(c: &Coeff) -> bool {
    let zero = Rational::from_integer(0.into());
    let num_ok = c
        .numerator()
        .iter()
        .all(|(_, p)| p.as_constant().is_some_and(|q| q > zero));
    let den_ok = c
        .denominator()
        .iter()
        .all(|(p, e)| e % 2 == 0 || p.as_constant().is_some_and(|q| q > zero));
    !c.numerator().is_empty() && num_ok && den_ok
}
