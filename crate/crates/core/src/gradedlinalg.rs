//! Square matrices of graded series indexed by the coordinates of a chart.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grading::Degree;
use crate::symkernel::{Chart, Coeff, Decision, GradedSeries, Homogeneity, ZeroTest};

/// Index positions of a rank-two component array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    /// Both indices down, as in `g_{IJ}`.
    Covariant,
    /// Both indices up, as in `g^{IJ}`.
    Contravariant,
    /// One index down and one up, as in `X_J^K`.
    Mixed,
}

impl Variance {
    fn dual(self) -> Variance {
        match self {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
            Variance::Mixed => Variance::Mixed,
        }
    }
}

/// How the body determinant was shown to be nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    Symbolic,
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix {
    chart: Arc<Chart>,
    entries: Vec<GradedSeries>,
    variance: Variance,
    degree: Degree,
}

impl GradedMatrix {
    pub fn zeros(chart: &Arc<Chart>, variance: Variance, degree: Degree) -> Self {
        let n = chart.dim();
        GradedMatrix {
            chart: chart.clone(),
            entries: vec![GradedSeries::zero(chart); n * n],
            variance,
            degree,
        }
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        let mut m = Self::zeros(chart, Variance::Mixed, chart.zero_degree());
        for i in 0..chart.dim() {
            m.set(i, i, GradedSeries::one(chart));
        }
        m
    }

    pub fn from_fn(
        chart: &Arc<Chart>,
        variance: Variance,
        degree: Degree,
        mut f: impl FnMut(usize, usize) -> Result<GradedSeries>,
    ) -> Result<Self> {
        let n = chart.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j)?);
            }
        }
        Ok(GradedMatrix {
            chart: chart.clone(),
            entries,
            variance,
            degree,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn get(&self, i: usize, j: usize) -> &GradedSeries {
        &self.entries[i * self.dim() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: GradedSeries) {
        let n = self.dim();
        self.entries[i * n + j] = value;
    }

    /// Checks that entry `(I,J)` is homogeneous of degree `I + J + d`.
    pub fn check_degrees(&self) -> Result<()> {
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let want = self.chart.coord_degree(i) + self.chart.coord_degree(j) + self.degree;
                match self.get(i, j).homogeneity() {
                    Homogeneity::Zero => {}
                    Homogeneity::Of(d) if d == want => {}
                    Homogeneity::Of(d) => {
                        return Err(Error::Degree(format!(
                            "entry ({},{}) has degree {d}, expected {want}",
                            self.chart.coord_name(i),
                            self.chart.coord_name(j)
                        )))
                    }
                    Homogeneity::Mixed => {
                        return Err(Error::Degree(format!(
                            "entry ({},{}) is not homogeneous",
                            self.chart.coord_name(i),
                            self.chart.coord_name(j)
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    /// Entries with all generators set to zero.
    pub fn body(&self) -> Vec<Vec<Coeff>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).body()).collect())
            .collect()
    }

    /// Plain product `sum_K a_{IK} b_{KJ}`.
    pub fn mul(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if !self.chart.same_as(&other.chart) {
            return Err(Error::ChartMismatch(
                "matrices live on different charts".into(),
            ));
        }
        let n = self.dim();
        let variance = match (self.variance, other.variance) {
            (Variance::Mixed, v) | (v, Variance::Mixed) => v,
            _ => Variance::Mixed,
        };
        let mut out = Self::zeros(&self.chart, variance, self.degree + other.degree);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_exactly_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_exactly_zero() {
                        continue;
                    }
                    let sum = out.get(i, j).add(&a.mul(b)?)?;
                    out.set(i, j, sum);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        let mut out = self.clone();
        for (e, o) in out.entries.iter_mut().zip(&other.entries) {
            *e = e.add(o)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        let mut out = self.clone();
        for (e, o) in out.entries.iter_mut().zip(&other.entries) {
            *e = e.sub(o)?;
        }
        Ok(out)
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_exactly_zero())
    }

    pub fn invert(&self) -> Result<GradedMatrix> {
        Ok(self.invert_with(&ZeroTest::default())?.0)
    }

    /// Two-sided inverse: the body is inverted by Gaussian elimination and
    /// the generator part by a Neumann series.
    pub fn invert_with(&self, test: &ZeroTest) -> Result<(GradedMatrix, Certainty)> {
        let n = self.dim();
        let (body_inv, certainty) = invert_body(self.body(), self.chart.p(), test)?;
        let binv =
            GradedMatrix::from_fn(&self.chart, self.variance.dual(), self.degree, |i, j| {
                Ok(GradedSeries::from_coeff(
                    &self.chart,
                    body_inv[i][j].clone(),
                ))
            })?;
        let mut nil = self.clone();
        for e in nil.entries.iter_mut() {
            *e = e.nilpotent_part();
        }
        // U' = B^{-1} (m - B); inverse is sum_k (-U')^k B^{-1}.
        let mut step = binv.mul(&nil)?;
        for e in step.entries.iter_mut() {
            *e = e.neg();
        }
        let mut power = GradedMatrix::identity(&self.chart);
        let mut sum = power.clone();
        let bound = self.chart.trunc() as usize + self.chart.nilpotent_count() + 1;
        for _ in 0..bound {
            power = power.mul(&step)?;
            if power.is_exactly_zero() {
                break;
            }
            sum = sum.add(&power)?;
        }
        let mut inv = sum.mul(&binv)?;
        inv.variance = self.variance.dual();
        inv.degree = self.degree;
        debug_assert_eq!(inv.entries.len(), n * n);
        Ok((inv, certainty))
    }

    /// `sum_I (-1)^<I, I + d> m_I^I` for a mixed tensor of degree `d`.
    pub fn graded_trace(&self) -> Result<GradedSeries> {
        if self.variance != Variance::Mixed {
            return Err(Error::Variance("graded trace needs a mixed tensor".into()));
        }
        let mut out = GradedSeries::zero(&self.chart);
        for i in 0..self.dim() {
            let di = self.chart.coord_degree(i);
            let e = self.get(i, i);
            out = if di.dot(di + self.degree) == 1 {
                out.sub(e)?
            } else {
                out.add(e)?
            };
        }
        Ok(out)
    }

    /// Component map keyed by `"I,J"` coordinate names; zero entries are
    /// omitted.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = BTreeMap::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let e = self.get(i, j);
                if !e.has_no_terms() {
                    let key = format!("{},{}", self.chart.coord_name(i), self.chart.coord_name(j));
                    map.insert(key, serde_json::Value::String(e.display()));
                }
            }
        }
        serde_json::json!({
            "variance": self.variance,
            "degree": self.degree,
            "components": map,
        })
    }

    pub fn from_json(chart: &Arc<Chart>, value: &serde_json::Value) -> Result<GradedMatrix> {
        let bad = |m: &str| Error::Spec(format!("matrix JSON: {m}"));
        let variance: Variance =
            serde_json::from_value(value["variance"].clone()).map_err(|e| bad(&e.to_string()))?;
        let degree: Degree =
            serde_json::from_value(value["degree"].clone()).map_err(|e| bad(&e.to_string()))?;
        let mut m = GradedMatrix::zeros(chart, variance, degree);
        let comps = value["components"]
            .as_object()
            .ok_or_else(|| bad("missing components"))?;
        for (key, v) in comps {
            let (a, b) = key.split_once(',').ok_or_else(|| bad("key is not `I,J`"))?;
            let i = chart
                .index_of(a)
                .ok_or_else(|| Error::UnknownCoordinate(a.into()))?;
            let j = chart
                .index_of(b)
                .ok_or_else(|| Error::UnknownCoordinate(b.into()))?;
            let text = v.as_str().ok_or_else(|| bad("component is not a string"))?;
            m.set(i, j, GradedSeries::parse(chart, text)?);
        }
        Ok(m)
    }
}

/// `tr_g(w) = sum (-1)^<w + g, I + J> (-1)^<I, J> w_{JI} g^{IJ} (-1)^<J, J>`.
pub fn metric_trace(w: &GradedMatrix, ginv: &GradedMatrix) -> Result<GradedSeries> {
    if !w.chart.same_as(&ginv.chart) {
        return Err(Error::ChartMismatch(
            "tensor and inverse metric live on different charts".into(),
        ));
    }
    if w.variance != Variance::Covariant || ginv.variance != Variance::Contravariant {
        return Err(Error::Variance(
            "metric trace needs a covariant tensor and the inverse metric".into(),
        ));
    }
    let chart = &w.chart;
    let wg = w.degree + ginv.degree;
    let mut out = GradedSeries::zero(chart);
    for i in 0..chart.dim() {
        for j in 0..chart.dim() {
            let (a, b) = (w.get(j, i), ginv.get(i, j));
            if a.is_exactly_zero() || b.is_exactly_zero() {
                continue;
            }
            let (di, dj) = (chart.coord_degree(i), chart.coord_degree(j));
            let parity = wg.dot(di + dj) ^ di.dot(dj) ^ dj.dot(dj);
            let t = a.mul(b)?;
            out = if parity == 1 {
                out.sub(&t)?
            } else {
                out.add(&t)?
            };
        }
    }
    Ok(out)
}

fn decide(c: &Coeff, nvars: usize, test: &ZeroTest) -> Option<Certainty> {
    match c.decide_zero() {
        Decision::Zero => None,
        Decision::Nonzero => Some(Certainty::Symbolic),
        Decision::Undecided => {
            if test.coeff_status(c, nvars).is_zero() {
                None
            } else {
                Some(Certainty::Numeric)
            }
        }
    }
}

/// Inverse of a matrix of scalar functions by Gauss-Jordan elimination.
pub fn invert_body(
    mut a: Vec<Vec<Coeff>>,
    nvars: usize,
    test: &ZeroTest,
) -> Result<(Vec<Vec<Coeff>>, Certainty)> {
    let n = a.len();
    let mut inv: Vec<Vec<Coeff>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Coeff::one() } else { Coeff::zero() })
                .collect()
        })
        .collect();
    let mut certainty = Certainty::Symbolic;
    for col in 0..n {
        let mut pivot = None;
        #[allow(clippy::needless_range_loop)]
        for r in col..n {
            match decide(&a[r][col], nvars, test) {
                Some(Certainty::Symbolic) => {
                    pivot = Some((r, Certainty::Symbolic));
                    break;
                }
                Some(Certainty::Numeric) if pivot.is_none() => {
                    pivot = Some((r, Certainty::Numeric))
                }
                _ => {}
            }
        }
        let (r, how) =
            pivot.ok_or_else(|| Error::Degenerate("the body of the matrix is singular".into()))?;
        if how == Certainty::Numeric {
            certainty = Certainty::Numeric;
        }
        a.swap(col, r);
        inv.swap(col, r);
        let p = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = a[col][j].mul(&p);
            inv[col][j] = inv[col][j].mul(&p);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let (ac, ic) = (a[col][j].mul(&f), inv[col][j].mul(&f));
                a[r][j] = a[r][j].sub(&ac);
                inv[r][j] = inv[r][j].sub(&ic);
            }
        }
    }
    Ok((inv, certainty))
}
