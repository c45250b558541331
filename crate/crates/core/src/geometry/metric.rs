use std::sync::{Arc, OnceLock};

use super::fields::{accumulate, OneForm, VectorField};
use super::report::Report;
use crate::error::{Error, Result};
use crate::gradedlinalg::{invert_body, metric_trace, GradedMatrix, Variance};
use crate::grading::{canonical_degree_order, Degree};
use crate::symkernel::{Chart, GradedSeries, Homogeneity, ZeroTest};

/// Components `g_{IJ} = <d_I | d_J>_g` of a homogeneous metric.
#[derive(Debug)]
pub struct MetricTensor {
    g: GradedMatrix,
    inverse: OnceLock<Result<GradedMatrix>>,
}

impl Clone for MetricTensor {
    fn clone(&self) -> Self {
        MetricTensor {
            g: self.g.clone(),
            inverse: self.inverse.clone(),
        }
    }
}

impl PartialEq for MetricTensor {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g
    }
}

impl MetricTensor {
    pub fn new(g: GradedMatrix) -> Result<Self> {
        if g.variance() != Variance::Covariant {
            return Err(Error::Variance(
                "metric components must be covariant".into(),
            ));
        }
        Ok(MetricTensor {
            g,
            inverse: OnceLock::new(),
        })
    }

    /// Builds a metric from a list of components, filling `g_{JI}` from
    /// `g_{IJ}` by graded symmetry. Entries given in both orders must agree.
    pub fn from_entries(
        chart: &Arc<Chart>,
        degree: Degree,
        entries: Vec<(usize, usize, GradedSeries)>,
    ) -> Result<Self> {
        let mut g = GradedMatrix::zeros(chart, Variance::Covariant, degree);
        let mut given = vec![false; chart.dim() * chart.dim()];
        for (i, j, value) in entries {
            let parity = chart.coord_degree(i).dot(chart.coord_degree(j));
            let mirrored = if parity == 1 {
                value.neg()
            } else {
                value.clone()
            };
            for (a, b, v) in [(i, j, &value), (j, i, &mirrored)] {
                let slot = a * chart.dim() + b;
                if given[slot] && g.get(a, b) != v {
                    return Err(Error::Spec(format!(
                        "contradictory entries for g[{},{}]",
                        chart.coord_name(a),
                        chart.coord_name(b)
                    )));
                }
            }
            g.set(i, j, value);
            g.set(j, i, mirrored);
            given[i * chart.dim() + j] = true;
            given[j * chart.dim() + i] = true;
        }
        Self::new(g)
    }

    /// Convenience constructor from `(name, name, expression)` triples.
    pub fn parse(
        chart: &Arc<Chart>,
        degree: Degree,
        entries: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let mut out = Vec::new();
        for (a, b, text) in entries {
            let i = chart
                .index_of(a)
                .ok_or_else(|| Error::UnknownCoordinate(a.to_string()))?;
            let j = chart
                .index_of(b)
                .ok_or_else(|| Error::UnknownCoordinate(b.to_string()))?;
            out.push((i, j, GradedSeries::parse(chart, text)?));
        }
        Self::from_entries(chart, degree, out)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.g.chart()
    }

    pub fn degree(&self) -> Degree {
        self.g.degree()
    }

    pub fn is_odd(&self) -> bool {
        self.degree().dot(self.degree()) == 1
    }

    pub fn components(&self) -> &GradedMatrix {
        &self.g
    }

    pub fn get(&self, i: usize, j: usize) -> &GradedSeries {
        self.g.get(i, j)
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `g^{IJ}` with `g^{IK} g_{KJ} = g_{JK} g^{KI} = delta`.
    pub fn inverse(&self) -> Result<&GradedMatrix> {
        self.inverse
            .get_or_init(|| self.g.invert())
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `<X|Y>_g = (-1)^<Y,I> X^I Y^J g_{JI}`.
    pub fn pairing(&self, x: &VectorField, y: &VectorField) -> Result<GradedSeries> {
        let chart = self.chart();
        if !x.chart().same_as(chart) || !y.chart().same_as(chart) {
            return Err(Error::ChartMismatch(
                "vector fields and metric live on different charts".into(),
            ));
        }
        let mut out = GradedSeries::zero(chart);
        for i in 0..self.dim() {
            let xi = x.component(i);
            if xi.is_exactly_zero() {
                continue;
            }
            let parity = y.degree().dot(chart.coord_degree(i));
            for j in 0..self.dim() {
                let (yj, g) = (y.component(j), self.get(j, i));
                if yj.is_exactly_zero() || g.is_exactly_zero() {
                    continue;
                }
                accumulate(&mut out, &xi.mul(yj)?.mul(g)?, parity)?;
            }
        }
        Ok(out)
    }

    /// `omega_I = (-1)^<X,I> X^J g_{JI}`.
    pub fn lower(&self, x: &VectorField) -> Result<OneForm> {
        let chart = self.chart();
        let mut comps = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let mut c = GradedSeries::zero(chart);
            for j in 0..self.dim() {
                c = c.add(&x.component(j).mul(self.get(j, i))?)?;
            }
            if x.degree().dot(chart.coord_degree(i)) == 1 {
                c = c.neg();
            }
            comps.push(c);
        }
        Ok(OneForm {
            degree: x.degree() + self.degree(),
            comps,
        })
    }

    /// Inverse of [`MetricTensor::lower`]: `X^K = (-1)^<X,I> omega_I g^{IK}`.
    pub fn raise(&self, omega: &OneForm) -> Result<VectorField> {
        let chart = self.chart();
        let ginv = self.inverse()?;
        let x_degree = omega.degree + self.degree();
        let mut comps = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            let mut c = GradedSeries::zero(chart);
            for i in 0..self.dim() {
                let t = omega.comps[i].mul(ginv.get(i, k))?;
                accumulate(&mut c, &t, x_degree.dot(chart.coord_degree(i)))?;
            }
            comps.push(c);
        }
        Ok(VectorField::raw(chart, x_degree, comps))
    }

    /// Homogeneity, graded symmetry, invertible body and the constraints
    /// on the number of coordinates per degree.
    pub fn validate(&self, test: &ZeroTest) -> Report {
        let chart = self.chart();
        let names = |i: usize, j: usize| {
            vec![
                chart.coord_name(i).to_string(),
                chart.coord_name(j).to_string(),
            ]
        };
        let mut report = Report::new("validate");
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let want = chart.coord_degree(i) + chart.coord_degree(j) + self.degree();
                let e = self.get(i, j);
                let (ok, detail) = match e.homogeneity() {
                    Homogeneity::Zero => (true, String::new()),
                    Homogeneity::Of(d) => (d == want, format!("degree {d}, expected {want}")),
                    Homogeneity::Mixed => {
                        (false, format!("not homogeneous, expected degree {want}"))
                    }
                };
                report.require("homogeneity", names(i, j), ok, detail);
            }
        }
        let mut symmetry = Report::new("symmetry");
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                let mut r = self.get(i, j).clone();
                let parity = chart.coord_degree(i).dot(chart.coord_degree(j));
                if accumulate(&mut r, self.get(j, i), parity ^ 1).is_ok() {
                    symmetry.record(names(i, j), &r, test);
                }
            }
        }
        report.absorb(symmetry);
        let body = invert_body(self.g.body(), chart.p(), test);
        report.require(
            "non-degeneracy",
            vec![],
            body.is_ok(),
            body.err().map(|e| e.to_string()).unwrap_or_default(),
        );
        let order = canonical_degree_order(chart.n());
        let counts = chart.degree_counts();
        let degrees = order.degrees();
        for a in 0..degrees.len() {
            for b in a..degrees.len() {
                if degrees[a] + degrees[b] != self.degree() {
                    continue;
                }
                let label = vec![degrees[a].to_string(), degrees[b].to_string()];
                report.require(
                    "dimension-pairing",
                    label.clone(),
                    counts[a] == counts[b],
                    format!("q{a} = {} but q{b} = {}", counts[a], counts[b]),
                );
                if a == b && degrees[a].dot(degrees[a]) == 1 {
                    report.require(
                        "dimension-evenness",
                        label,
                        counts[a].is_multiple_of(2),
                        format!("q{a} = {} must be even", counts[a]),
                    );
                }
            }
        }
        report
    }

    /// Classical metric `|g|_{ab}` on the base coordinates.
    pub fn reduced(&self) -> Result<MetricTensor> {
        if !self.degree().is_zero() {
            return Err(Error::Degree(format!(
                "reduced metric needs a degree zero metric, got degree {}",
                self.degree()
            )));
        }
        let chart = self.chart();
        let base: Vec<&str> = chart.base_names().iter().map(|s| s.as_str()).collect();
        let reduced_chart = Chart::new(
            0,
            base.iter().map(|s| s.to_string()).collect(),
            vec![],
            chart.trunc(),
        )?;
        let g = GradedMatrix::from_fn(
            &reduced_chart,
            Variance::Covariant,
            reduced_chart.zero_degree(),
            |a, b| {
                Ok(GradedSeries::from_coeff(
                    &reduced_chart,
                    self.get(a, b).body(),
                ))
            },
        )?;
        MetricTensor::new(g)
    }

    /// Residues of `g^{JK} - (-1)^{<J,J> + <K,K> + <K,J> + <g,g>} g^{KJ}`.
    pub fn inverse_symmetry(&self, test: &ZeroTest) -> Result<Report> {
        let chart = self.chart();
        let ginv = self.inverse()?;
        let gg = self.degree().dot(self.degree());
        let mut report = Report::new("inverse-symmetry");
        for j in 0..self.dim() {
            for k in j..self.dim() {
                let (dj, dk) = (chart.coord_degree(j), chart.coord_degree(k));
                let parity = dj.dot(dj) ^ dk.dot(dk) ^ dk.dot(dj) ^ gg;
                let mut r = ginv.get(j, k).clone();
                accumulate(&mut r, ginv.get(k, j), parity ^ 1)?;
                report.record(
                    vec![chart.coord_name(j).into(), chart.coord_name(k).into()],
                    &r,
                    test,
                );
            }
        }
        Ok(report)
    }

    /// `tr_g(omega)` for a covariant rank-two tensor.
    pub fn trace(&self, omega: &GradedMatrix) -> Result<GradedSeries> {
        metric_trace(omega, self.inverse()?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.g.to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{Generator, ZeroStatus};

    fn super_chart() -> Arc<Chart> {
        let odd = Degree::from_bits(&[1]).unwrap();
        let gens = vec![
            Generator {
                name: "t".into(),
                degree: odd,
            },
            Generator {
                name: "s".into(),
                degree: odd,
            },
        ];
        Chart::new(1, vec!["x".into()], gens, 3).unwrap()
    }

    fn zero(a: &GradedSeries, b: &GradedSeries) -> bool {
        a.sub(b).unwrap().zero_status(&ZeroTest::default()) == ZeroStatus::SymbolicZero
    }

    #[test]
    fn entries_complete_by_graded_symmetry() {
        let c = super_chart();
        let m = MetricTensor::parse(
            &c,
            c.zero_degree(),
            &[("x", "x", "1 + x^2"), ("t", "s", "x")],
        )
        .unwrap();
        assert_eq!(m.get(2, 1), &m.get(1, 2).neg());
        assert!(m.validate(&ZeroTest::default()).passed());
    }

    #[test]
    fn inverse_of_diagonal_body() {
        let c = Chart::classical(&["x", "y"]).unwrap();
        let m = MetricTensor::parse(
            &c,
            c.zero_degree(),
            &[("x", "x", "1 + x^2"), ("y", "y", "y^2")],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!(zero(
            inv.get(0, 0),
            &GradedSeries::parse(&c, "1/(1 + x^2)").unwrap()
        ));
        assert!(zero(
            inv.get(1, 1),
            &GradedSeries::parse(&c, "y^(-2)").unwrap()
        ));
        assert!(inv.get(0, 1).is_exactly_zero());
    }

    #[test]
    fn lower_then_raise() {
        let c = super_chart();
        let m = MetricTensor::parse(
            &c,
            c.zero_degree(),
            &[("x", "x", "1 + t*s"), ("t", "s", "1 + x")],
        )
        .unwrap();
        for i in 0..c.dim() {
            let v = VectorField::basis(&c, i);
            let back = m.raise(&m.lower(&v).unwrap()).unwrap();
            for k in 0..c.dim() {
                assert!(zero(back.component(k), v.component(k)), "{i} {k}");
            }
        }
    }

    #[test]
    fn validation_findings() {
        let c = super_chart();
        let t = ZeroTest::default();
        let mixed =
            MetricTensor::parse(&c, c.zero_degree(), &[("x", "x", "1 + t"), ("t", "s", "1")])
                .unwrap();
        assert!(mixed
            .validate(&t)
            .findings
            .iter()
            .any(|f| f.check == "homogeneity"));
        let singular =
            MetricTensor::parse(&c, c.zero_degree(), &[("x", "x", "1"), ("t", "s", "t*s")])
                .unwrap();
        assert!(singular
            .validate(&t)
            .findings
            .iter()
            .any(|f| f.check == "non-degeneracy"));
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn reduced_metric_drops_generators() {
        let c = super_chart();
        let m = MetricTensor::parse(
            &c,
            c.zero_degree(),
            &[("x", "x", "2 + x*t*s"), ("t", "s", "1")],
        )
        .unwrap();
        let r = m.reduced().unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(r.get(0, 0).display(), "2");
    }
}
