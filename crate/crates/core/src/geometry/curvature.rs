use std::sync::Arc;

use num_traits::Zero;

use super::connection::{covariant_derivative, ChristoffelData};
use super::fields::{accumulate, VectorField};
use super::metric::MetricTensor;
use super::report::Report;
use crate::error::{Error, Result};
use crate::gradedlinalg::{GradedMatrix, Variance};
use crate::symkernel::{Chart, GradedSeries, Homogeneity, ZeroTest};
use crate::Rational;

/// Components `R_{IJK}^L` with `R(d_I, d_J) d_K = R_{IJK}^L d_L`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannData {
    chart: Arc<Chart>,
    data: Vec<GradedSeries>,
}

impl RiemannData {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        let n = chart.dim();
        RiemannData {
            chart: chart.clone(),
            data: vec![GradedSeries::zero(chart); n * n * n * n],
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    fn slot(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        let n = self.chart.dim();
        ((i * n + j) * n + k) * n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &GradedSeries {
        &self.data[self.slot(i, j, k, l)]
    }

    fn get_mut(&mut self, i: usize, j: usize, k: usize, l: usize) -> &mut GradedSeries {
        let s = self.slot(i, j, k, l);
        &mut self.data[s]
    }

    /// `R(d_I, d_J) d_K` as a vector field.
    pub fn apply_basis(&self, i: usize, j: usize, k: usize) -> VectorField {
        let n = self.chart.dim();
        let comps = (0..n).map(|l| self.get(i, j, k, l).clone()).collect();
        let d =
            self.chart.coord_degree(i) + self.chart.coord_degree(j) + self.chart.coord_degree(k);
        VectorField::raw(&self.chart, d, comps)
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_exactly_zero())
    }

    /// Components keyed `"I,J,K,L"`; zero entries are omitted.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.chart.dim();
        let mut map = serde_json::Map::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let e = self.get(i, j, k, l);
                        if !e.has_no_terms() {
                            map.insert(
                                names(&self.chart, &[i, j, k, l]).join(","),
                                e.display().into(),
                            );
                        }
                    }
                }
            }
        }
        serde_json::Value::Object(map)
    }
}

fn names(chart: &Chart, idx: &[usize]) -> Vec<String> {
    idx.iter()
        .map(|&i| chart.coord_name(i).to_string())
        .collect()
}

/// `R_{IJK}^L = d_I Gamma_{KJ}^L - (-1)^<I,J> d_J Gamma_{KI}^L
///   + (-1)^<I,J+K+M> Gamma_{KJ}^M Gamma_{MI}^L - (-1)^<J,K+M> Gamma_{KI}^M Gamma_{MJ}^L`.
pub fn riemann(c: &ChristoffelData) -> Result<RiemannData> {
    let chart = c.chart().clone();
    let n = chart.dim();
    let deg = |i: usize| chart.coord_degree(i);
    let mut r = RiemannData::zero(&chart);
    for i in 0..n {
        for j in 0..n {
            let pij = deg(i).dot(deg(j));
            for k in 0..n {
                for l in 0..n {
                    let mut v = c.get(k, j, l).derive(i);
                    accumulate(&mut v, &c.get(k, i, l).derive(j), pij ^ 1)?;
                    *r.get_mut(i, j, k, l) = v;
                }
            }
        }
    }
    for k in 0..n {
        for j in 0..n {
            for m in 0..n {
                let a = c.get(k, j, m);
                if a.is_exactly_zero() {
                    continue;
                }
                for i in 0..n {
                    for l in 0..n {
                        let b = c.get(m, i, l);
                        if b.is_exactly_zero() {
                            continue;
                        }
                        let parity = deg(i).dot(deg(j) + deg(k) + deg(m));
                        accumulate(r.get_mut(i, j, k, l), &a.mul(b)?, parity)?;
                    }
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for m in 0..n {
                let a = c.get(k, i, m);
                if a.is_exactly_zero() {
                    continue;
                }
                for j in 0..n {
                    for l in 0..n {
                        let b = c.get(m, j, l);
                        if b.is_exactly_zero() {
                            continue;
                        }
                        let parity = deg(j).dot(deg(k) + deg(m));
                        accumulate(r.get_mut(i, j, k, l), &a.mul(b)?, parity ^ 1)?;
                    }
                }
            }
        }
    }
    Ok(r)
}

/// `R(X,Y)Z = nabla_X nabla_Y Z - (-1)^<X,Y> nabla_Y nabla_X Z - nabla_[X,Y] Z`.
pub fn curvature_operator(
    c: &ChristoffelData,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
) -> Result<VectorField> {
    let xy = covariant_derivative(c, x, &covariant_derivative(c, y, z)?)?;
    let yx = covariant_derivative(c, y, &covariant_derivative(c, x, z)?)?;
    let br = covariant_derivative(c, &x.bracket(y)?, z)?;
    let yx = if x.degree().dot(y.degree()) == 1 {
        yx.neg()
    } else {
        yx
    };
    xy.sub(&yx)?.sub(&br)
}

/// Compares the component formula with the definition on every basis triple.
pub fn riemann_definition_check(
    c: &ChristoffelData,
    r: &RiemannData,
    test: &ZeroTest,
) -> Result<Report> {
    let chart = c.chart();
    let n = chart.dim();
    let basis: Vec<VectorField> = (0..n).map(|i| VectorField::basis(chart, i)).collect();
    let mut report = Report::new("riemann-definition");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let def = curvature_operator(c, &basis[i], &basis[j], &basis[k])?;
                for l in 0..n {
                    let res = def.component(l).sub(r.get(i, j, k, l))?;
                    report.record(names(chart, &[i, j, k, l]), &res, test);
                }
            }
        }
    }
    Ok(report)
}

/// `R_{IJK}^L + (-1)^<I,J> R_{JIK}^L`.
pub fn antisymmetry(r: &RiemannData, test: &ZeroTest) -> Result<Report> {
    let chart = r.chart();
    let n = chart.dim();
    let mut report = Report::new("riemann-antisymmetry");
    for i in 0..n {
        for j in i..n {
            let parity = chart.coord_degree(i).dot(chart.coord_degree(j));
            for k in 0..n {
                for l in 0..n {
                    let mut res = r.get(i, j, k, l).clone();
                    accumulate(&mut res, r.get(j, i, k, l), parity)?;
                    report.record(names(chart, &[i, j, k, l]), &res, test);
                }
            }
        }
    }
    Ok(report)
}

/// `(-1)^<I,K> R(I,J)K + (-1)^<J,I> R(J,K)I + (-1)^<K,J> R(K,I)J = 0`.
pub fn bianchi_first(r: &RiemannData, test: &ZeroTest) -> Result<Report> {
    let chart = r.chart();
    let n = chart.dim();
    let deg = |i: usize| chart.coord_degree(i);
    let mut report = Report::new("bianchi-first");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut res = GradedSeries::zero(chart);
                    accumulate(&mut res, r.get(i, j, k, l), deg(i).dot(deg(k)))?;
                    accumulate(&mut res, r.get(j, k, i, l), deg(j).dot(deg(i)))?;
                    accumulate(&mut res, r.get(k, i, j, l), deg(k).dot(deg(j)))?;
                    report.record(names(chart, &[i, j, k, l]), &res, test);
                }
            }
        }
    }
    Ok(report)
}

/// Components of `(nabla_{d_A} R)(d_I, d_J) d_K`, indexed `[A][I][J][K][L]`,
/// from the product rule
/// `nabla_Z (R(X,Y)W) - R(nabla_Z X, Y)W - (-1)^<Z,X> R(X, nabla_Z Y)W
///   - (-1)^<Z,X+Y> R(X,Y) nabla_Z W`.
pub fn covariant_riemann(c: &ChristoffelData, r: &RiemannData) -> Result<Vec<GradedSeries>> {
    let chart = c.chart();
    let n = chart.dim();
    let deg = |i: usize| chart.coord_degree(i);
    let mut out = Vec::with_capacity(n.pow(5));
    for a in 0..n {
        let za = VectorField::basis(chart, a);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = covariant_derivative(c, &za, &r.apply_basis(i, j, k))?
                        .components()
                        .to_vec();
                    for m in 0..n {
                        // R(Gamma_{IA}^M d_M, d_J) d_K
                        let g = c.get(i, a, m);
                        if !g.is_exactly_zero() {
                            for (l, comp) in v.iter_mut().enumerate() {
                                let t = r.get(m, j, k, l);
                                if !t.is_exactly_zero() {
                                    accumulate(comp, &g.mul(t)?, 1)?;
                                }
                            }
                        }
                        // R(d_I, Gamma_{JA}^M d_M) d_K, moving Gamma past d_I
                        let g = c.get(j, a, m);
                        if !g.is_exactly_zero() {
                            let parity =
                                deg(a).dot(deg(i)) ^ (deg(a) + deg(j) + deg(m)).dot(deg(i)) ^ 1;
                            for (l, comp) in v.iter_mut().enumerate() {
                                let t = r.get(i, m, k, l);
                                if !t.is_exactly_zero() {
                                    accumulate(comp, &g.mul(t)?, parity)?;
                                }
                            }
                        }
                        // R(d_I, d_J) Gamma_{KA}^M d_M
                        let g = c.get(k, a, m);
                        if !g.is_exactly_zero() {
                            let dij = deg(i) + deg(j);
                            let parity = deg(a).dot(dij) ^ (deg(a) + deg(k) + deg(m)).dot(dij) ^ 1;
                            for (l, comp) in v.iter_mut().enumerate() {
                                let t = r.get(i, j, m, l);
                                if !t.is_exactly_zero() {
                                    accumulate(comp, &g.mul(t)?, parity)?;
                                }
                            }
                        }
                    }
                    out.extend(v);
                }
            }
        }
    }
    Ok(out)
}

/// `(-1)^<Y,Z> (nabla_Z R)(X,Y) + (-1)^<X,Y> (nabla_Y R)(Z,X) + (-1)^<Z,X> (nabla_X R)(Y,Z) = 0`.
pub fn bianchi_second(c: &ChristoffelData, r: &RiemannData, test: &ZeroTest) -> Result<Report> {
    let chart = c.chart();
    let n = chart.dim();
    let deg = |i: usize| chart.coord_degree(i);
    let d = covariant_riemann(c, r)?;
    let at = |a: usize, i: usize, j: usize, k: usize, l: usize| {
        &d[(((a * n + i) * n + j) * n + k) * n + l]
    };
    let mut report = Report::new("bianchi-second");
    // X = d_I, Y = d_J, Z = d_A
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut res = GradedSeries::zero(chart);
                        accumulate(&mut res, at(a, i, j, k, l), deg(j).dot(deg(a)))?;
                        accumulate(&mut res, at(j, a, i, k, l), deg(i).dot(deg(j)))?;
                        accumulate(&mut res, at(i, j, a, k, l), deg(a).dot(deg(i)))?;
                        report.record(names(chart, &[i, j, a, k, l]), &res, test);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `<R(X,Y)Z|W> + (-1)^<Z,W> <R(X,Y)W|Z>` on basis fields.
pub fn pairing_antisymmetry(m: &MetricTensor, r: &RiemannData, test: &ZeroTest) -> Result<Report> {
    let chart = m.chart();
    let n = chart.dim();
    let basis: Vec<VectorField> = (0..n).map(|i| VectorField::basis(chart, i)).collect();
    let mut report = Report::new("pairing-antisymmetry");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let rk = r.apply_basis(i, j, k);
                for l in k..n {
                    let rl = r.apply_basis(i, j, l);
                    let mut res = m.pairing(&rk, &basis[l])?;
                    let parity = chart.coord_degree(k).dot(chart.coord_degree(l));
                    accumulate(&mut res, &m.pairing(&rl, &basis[k])?, parity)?;
                    report.record(names(chart, &[i, j, k, l]), &res, test);
                }
            }
        }
    }
    Ok(report)
}

/// Graded trace of `Z -> R(Z, d_I) d_J`, a map of degree `I + J`.
fn curvature_trace(r: &RiemannData, i: usize, j: usize) -> Result<GradedSeries> {
    let chart = r.chart();
    let d = chart.coord_degree(i) + chart.coord_degree(j);
    let mut out = GradedSeries::zero(chart);
    for k in 0..chart.dim() {
        let dk = chart.coord_degree(k);
        accumulate(&mut out, r.get(k, i, j, k), dk.dot(dk + d))?;
    }
    Ok(out)
}

/// `R_{IJ} = 1/2 (tr(Z -> R(Z,d_I)d_J) + (-1)^<I,J> tr(Z -> R(Z,d_J)d_I))`.
pub fn ricci(r: &RiemannData) -> Result<GradedMatrix> {
    let chart = r.chart();
    let half = Rational::new(1.into(), 2.into());
    GradedMatrix::from_fn(chart, Variance::Covariant, chart.zero_degree(), |i, j| {
        let mut v = curvature_trace(r, i, j)?;
        accumulate(
            &mut v,
            &curvature_trace(r, j, i)?,
            chart.coord_degree(i).dot(chart.coord_degree(j)),
        )?;
        Ok(v.scale(&half))
    })
}

/// Same tensor with the curvature operator built from its definition.
pub fn ricci_by_definition(c: &ChristoffelData) -> Result<GradedMatrix> {
    let chart = c.chart();
    let n = chart.dim();
    let basis: Vec<VectorField> = (0..n).map(|i| VectorField::basis(chart, i)).collect();
    let trace = |i: usize, j: usize| -> Result<GradedSeries> {
        let d = chart.coord_degree(i) + chart.coord_degree(j);
        let mut out = GradedSeries::zero(chart);
        for k in 0..n {
            let v = curvature_operator(c, &basis[k], &basis[i], &basis[j])?;
            let dk = chart.coord_degree(k);
            accumulate(&mut out, v.component(k), dk.dot(dk + d))?;
        }
        Ok(out)
    };
    let half = Rational::new(1.into(), 2.into());
    GradedMatrix::from_fn(chart, Variance::Covariant, chart.zero_degree(), |i, j| {
        let mut v = trace(i, j)?;
        accumulate(
            &mut v,
            &trace(j, i)?,
            chart.coord_degree(i).dot(chart.coord_degree(j)),
        )?;
        Ok(v.scale(&half))
    })
}

/// Unsymmetrized trace `tr(Z -> R(Z,d_I)d_J)` as a covariant array.
pub fn ricci_unsymmetrized(r: &RiemannData) -> Result<GradedMatrix> {
    let chart = r.chart();
    GradedMatrix::from_fn(chart, Variance::Covariant, chart.zero_degree(), |i, j| {
        curvature_trace(r, i, j)
    })
}

/// `R_{IJ} - (-1)^<I,J> R_{JI}`.
pub fn ricci_symmetry(ric: &GradedMatrix, test: &ZeroTest) -> Result<Report> {
    let chart = ric.chart();
    let mut report = Report::new("ricci-symmetry");
    for i in 0..chart.dim() {
        for j in i + 1..chart.dim() {
            let mut res = ric.get(i, j).clone();
            accumulate(
                &mut res,
                ric.get(j, i),
                chart.coord_degree(i).dot(chart.coord_degree(j)) ^ 1,
            )?;
            report.record(names(chart, &[i, j]), &res, test);
        }
    }
    Ok(report)
}

/// `S = tr_g(Ric)`.
pub fn ricci_scalar(m: &MetricTensor, ric: &GradedMatrix) -> Result<GradedSeries> {
    m.trace(ric)
}

/// Residues of `Ric - kappa g`, after the degree rules on `kappa`.
pub fn einstein_check(
    m: &MetricTensor,
    ric: &GradedMatrix,
    kappa: &GradedSeries,
    test: &ZeroTest,
) -> Result<Report> {
    let chart = m.chart();
    let dg = m.degree();
    if !dg.is_zero() {
        if let Some(k) = kappa.as_coeff() {
            if k.as_rational().is_some_and(|q| !q.is_zero()) {
                return Err(Error::Degree(format!(
                    "kappa cannot be a nonzero constant for a metric of degree {dg}"
                )));
            }
        }
    }
    match kappa.homogeneity() {
        Homogeneity::Zero => {}
        Homogeneity::Of(d) if d == dg => {}
        Homogeneity::Of(d) => {
            return Err(Error::Degree(format!(
                "kappa has degree {d}, the metric has degree {dg}"
            )))
        }
        Homogeneity::Mixed => return Err(Error::Degree("kappa is not homogeneous".into())),
    }
    let mut report = Report::new("einstein");
    for i in 0..chart.dim() {
        for j in 0..chart.dim() {
            let res = ric.get(i, j).sub(&kappa.mul(m.get(i, j))?)?;
            report.record(names(chart, &[i, j]), &res, test);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::connection::christoffel;
    use crate::symkernel::ZeroStatus;

    fn half_plane() -> MetricTensor {
        let c = Chart::classical(&["x", "y"]).unwrap();
        MetricTensor::parse(
            &c,
            c.zero_degree(),
            &[("x", "x", "y^(-2)"), ("y", "y", "y^(-2)")],
        )
        .unwrap()
    }

    #[test]
    fn flat_polar_plane() {
        let c = Chart::classical(&["r", "th"]).unwrap();
        let m = MetricTensor::parse(&c, c.zero_degree(), &[("r", "r", "1"), ("th", "th", "r^2")])
            .unwrap();
        let r = riemann(&christoffel(&m).unwrap()).unwrap();
        assert!(r.is_exactly_zero());
    }

    #[test]
    fn hyperbolic_plane_is_einstein() {
        let m = half_plane();
        let c = christoffel(&m).unwrap();
        let r = riemann(&c).unwrap();
        let t = ZeroTest::default();
        let ric = ricci(&r).unwrap();
        assert_eq!(ric, ricci_by_definition(&c).unwrap());
        let s = ricci_scalar(&m, &ric).unwrap();
        assert_eq!(
            s.add(&GradedSeries::from_int(m.chart(), 2))
                .unwrap()
                .zero_status(&t),
            ZeroStatus::SymbolicZero
        );
        assert!(
            einstein_check(&m, &ric, &GradedSeries::from_int(m.chart(), -1), &t)
                .unwrap()
                .passed()
        );
        assert!(
            !einstein_check(&m, &ric, &GradedSeries::from_int(m.chart(), 1), &t)
                .unwrap()
                .passed()
        );
        for check in [
            antisymmetry(&r, &t),
            bianchi_first(&r, &t),
            bianchi_second(&c, &r, &t),
        ] {
            assert!(check.unwrap().passed());
        }
        assert!(riemann_definition_check(&c, &r, &t).unwrap().passed());
    }
}
