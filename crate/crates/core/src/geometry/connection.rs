use std::sync::Arc;

use super::fields::{accumulate, VectorField};
use super::metric::MetricTensor;
use super::report::Report;
use crate::error::{Error, Result};
use crate::symkernel::{Chart, GradedSeries, ZeroTest};
use crate::Rational;

/// Christoffel symbols `Gamma_{JI}^K` with `nabla_{d_I} d_J = Gamma_{JI}^K d_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChristoffelData {
    chart: Arc<Chart>,
    data: Vec<GradedSeries>,
}

impl ChristoffelData {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        let n = chart.dim();
        ChristoffelData {
            chart: chart.clone(),
            data: vec![GradedSeries::zero(chart); n * n * n],
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    fn slot(&self, j: usize, i: usize, k: usize) -> usize {
        let n = self.chart.dim();
        (j * n + i) * n + k
    }

    /// `Gamma_{JI}^K`.
    pub fn get(&self, j: usize, i: usize, k: usize) -> &GradedSeries {
        &self.data[self.slot(j, i, k)]
    }

    pub fn set(&mut self, j: usize, i: usize, k: usize, value: GradedSeries) {
        let s = self.slot(j, i, k);
        self.data[s] = value;
    }

    /// `nabla_{d_I} d_J` as a vector field.
    pub fn nabla_basis(&self, i: usize, j: usize) -> VectorField {
        let n = self.chart.dim();
        let comps = (0..n).map(|k| self.get(j, i, k).clone()).collect();
        VectorField::raw(
            &self.chart,
            self.chart.coord_degree(i) + self.chart.coord_degree(j),
            comps,
        )
    }

    /// Components keyed `"J,I,K"`; zero entries are omitted.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.chart.dim();
        let mut map = serde_json::Map::new();
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    let e = self.get(j, i, k);
                    if !e.has_no_terms() {
                        let key = format!(
                            "{},{},{}",
                            self.chart.coord_name(j),
                            self.chart.coord_name(i),
                            self.chart.coord_name(k)
                        );
                        map.insert(key, serde_json::Value::String(e.display()));
                    }
                }
            }
        }
        serde_json::Value::Object(map)
    }
}

/// Levi-Civita connection:
/// `Gamma_{JI}^L = 1/2 (d_I g_{JK} + (-1)^<I,J> d_J g_{IK} - (-1)^<K,I+J> d_K g_{IJ}) g^{KL}`.
pub fn christoffel(m: &MetricTensor) -> Result<ChristoffelData> {
    let chart = m.chart();
    let n = chart.dim();
    let ginv = m.inverse()?;
    let deg = |i: usize| chart.coord_degree(i);
    // dg[(k * n + i) * n + j] = d_k g_{ij}
    let mut dg = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                dg.push(m.get(i, j).derive(k));
            }
        }
    }
    let d = |k: usize, i: usize, j: usize| &dg[(k * n + i) * n + j];
    let half = Rational::new(1.into(), 2.into());
    let mut out = ChristoffelData::zero(chart);
    for j in 0..n {
        for i in 0..n {
            let mut first = Vec::with_capacity(n);
            for k in 0..n {
                let mut a = d(i, j, k).clone();
                accumulate(&mut a, d(j, i, k), deg(i).dot(deg(j)))?;
                accumulate(&mut a, d(k, i, j), deg(k).dot(deg(i) + deg(j)) ^ 1)?;
                first.push(a.scale(&half));
            }
            for l in 0..n {
                let mut g = GradedSeries::zero(chart);
                for (k, a) in first.iter().enumerate() {
                    let inv = ginv.get(k, l);
                    if a.is_exactly_zero() || inv.is_exactly_zero() {
                        continue;
                    }
                    g = g.add(&a.mul(inv)?)?;
                }
                out.set(j, i, l, g);
            }
        }
    }
    Ok(out)
}

/// `nabla_X Y = X^I d_I Y^J d_J + (-1)^<I, Y+J> X^I Y^J Gamma_{JI}^K d_K`.
pub fn covariant_derivative(
    c: &ChristoffelData,
    x: &VectorField,
    y: &VectorField,
) -> Result<VectorField> {
    let chart = c.chart();
    if !x.chart().same_as(chart) || !y.chart().same_as(chart) {
        return Err(Error::ChartMismatch(
            "vector fields and connection live on different charts".into(),
        ));
    }
    let n = chart.dim();
    let mut comps = Vec::with_capacity(n);
    for k in 0..n {
        comps.push(x.apply(y.component(k))?);
    }
    for i in 0..n {
        let xi = x.component(i);
        if xi.is_exactly_zero() {
            continue;
        }
        for j in 0..n {
            let yj = y.component(j);
            if yj.is_exactly_zero() {
                continue;
            }
            let xy = xi.mul(yj)?;
            let parity = chart
                .coord_degree(i)
                .dot(y.degree() + chart.coord_degree(j));
            for (k, comp) in comps.iter_mut().enumerate() {
                let g = c.get(j, i, k);
                if !g.is_exactly_zero() {
                    accumulate(comp, &xy.mul(g)?, parity)?;
                }
            }
        }
    }
    Ok(VectorField::raw(chart, x.degree() + y.degree(), comps))
}

/// `T_{IJ}^K = Gamma_{JI}^K - (-1)^<I,J> Gamma_{IJ}^K`, stored like the
/// Christoffel symbols with slot order `(I, J, K)`.
pub fn torsion(c: &ChristoffelData) -> Result<ChristoffelData> {
    let chart = c.chart();
    let n = chart.dim();
    let mut t = ChristoffelData::zero(chart);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = c.get(j, i, k).clone();
                accumulate(
                    &mut v,
                    c.get(i, j, k),
                    chart.coord_degree(i).dot(chart.coord_degree(j)) ^ 1,
                )?;
                t.set(i, j, k, v);
            }
        }
    }
    Ok(t)
}

fn triple(chart: &Chart, idx: &[usize]) -> Vec<String> {
    idx.iter()
        .map(|&i| chart.coord_name(i).to_string())
        .collect()
}

pub fn torsion_report(c: &ChristoffelData, test: &ZeroTest) -> Result<Report> {
    let t = torsion(c)?;
    let chart = c.chart();
    let n = chart.dim();
    let mut report = Report::new("torsion");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                report.record(triple(chart, &[i, j, k]), t.get(i, j, k), test);
            }
        }
    }
    Ok(report)
}

/// Residues `d_I <d_J|d_K> - <nabla_I d_J|d_K> - (-1)^<I,J> <d_J|nabla_I d_K>`.
pub fn metric_compatibility(
    m: &MetricTensor,
    c: &ChristoffelData,
    test: &ZeroTest,
) -> Result<Report> {
    let chart = m.chart();
    let n = chart.dim();
    let basis: Vec<VectorField> = (0..n).map(|i| VectorField::basis(chart, i)).collect();
    let mut report = Report::new("metric-compatibility");
    for i in 0..n {
        let nablas: Vec<VectorField> = (0..n).map(|j| c.nabla_basis(i, j)).collect();
        for j in 0..n {
            for k in 0..n {
                let mut r = m.get(j, k).derive(i);
                accumulate(&mut r, &m.pairing(&nablas[j], &basis[k])?, 1)?;
                let parity = chart.coord_degree(i).dot(chart.coord_degree(j));
                accumulate(&mut r, &m.pairing(&basis[j], &nablas[k])?, parity ^ 1)?;
                report.record(triple(chart, &[i, j, k]), &r, test);
            }
        }
    }
    Ok(report)
}

/// Right side of the Koszul formula for homogeneous fields.
pub fn koszul_rhs(
    m: &MetricTensor,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
) -> Result<GradedSeries> {
    let (dx, dy, dz) = (x.degree(), y.degree(), z.degree());
    let mut out = x.apply(&m.pairing(y, z)?)?;
    out = out.add(&m.pairing(&x.bracket(y)?, z)?)?;
    let mut second = y.apply(&m.pairing(z, x)?)?;
    accumulate(&mut second, &m.pairing(&y.bracket(z)?, x)?, 1)?;
    accumulate(&mut out, &second, dx.dot(dy + dz))?;
    let mut third = z.apply(&m.pairing(x, y)?)?;
    accumulate(&mut third, &m.pairing(&z.bracket(x)?, y)?, 1)?;
    accumulate(&mut out, &third, dz.dot(dx + dy) ^ 1)?;
    Ok(out)
}

/// Residues `2 <nabla_I d_J|d_K> - Koszul(d_I, d_J, d_K)`.
pub fn koszul_check(m: &MetricTensor, c: &ChristoffelData, test: &ZeroTest) -> Result<Report> {
    let chart = m.chart();
    let n = chart.dim();
    let basis: Vec<VectorField> = (0..n).map(|i| VectorField::basis(chart, i)).collect();
    let two = Rational::from_integer(2.into());
    let mut report = Report::new("koszul");
    for i in 0..n {
        for j in 0..n {
            let nab = c.nabla_basis(i, j);
            for k in 0..n {
                let lhs = m.pairing(&nab, &basis[k])?.scale(&two);
                let r = lhs.sub(&koszul_rhs(m, &basis[i], &basis[j], &basis[k])?)?;
                report.record(triple(chart, &[i, j, k]), &r, test);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::ZeroStatus;

    fn polar() -> MetricTensor {
        let c = Chart::classical(&["r", "th"]).unwrap();
        MetricTensor::parse(&c, c.zero_degree(), &[("r", "r", "1"), ("th", "th", "r^2")]).unwrap()
    }

    fn same(a: &GradedSeries, text: &str) -> bool {
        let b = GradedSeries::parse(a.chart(), text).unwrap();
        a.sub(&b).unwrap().zero_status(&ZeroTest::default()) == ZeroStatus::SymbolicZero
    }

    #[test]
    fn polar_symbols() {
        let c = christoffel(&polar()).unwrap();
        assert!(same(c.get(1, 1, 0), "-r"));
        assert!(same(c.get(0, 1, 1), "1/r"));
        assert!(same(c.get(1, 0, 1), "1/r"));
        assert!(c.get(0, 0, 0).is_exactly_zero());
    }

    #[test]
    fn levi_civita_checks_pass() {
        let m = polar();
        let c = christoffel(&m).unwrap();
        let t = ZeroTest::default();
        assert!(torsion_report(&c, &t).unwrap().passed());
        assert!(metric_compatibility(&m, &c, &t).unwrap().passed());
        assert!(koszul_check(&m, &c, &t).unwrap().passed());
        let mut bent = c.clone();
        bent.set(0, 1, 1, GradedSeries::from_int(m.chart(), 1));
        assert!(!torsion_report(&bent, &t).unwrap().passed());
        assert!(!metric_compatibility(&m, &bent, &t).unwrap().passed());
    }

    #[test]
    fn derivative_of_basis_fields() {
        let c = christoffel(&polar()).unwrap();
        let (r, th) = (
            VectorField::basis(c.chart(), 0),
            VectorField::basis(c.chart(), 1),
        );
        assert_eq!(
            covariant_derivative(&c, &th, &r).unwrap(),
            c.nabla_basis(1, 0)
        );
        let v = covariant_derivative(&c, &th, &th).unwrap();
        assert!(same(v.component(0), "-r"));
    }
}
