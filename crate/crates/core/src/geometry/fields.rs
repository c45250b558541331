//! Vector fields, one-forms and scalar sign bookkeeping.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grading::Degree;
use crate::symkernel::{Chart, GradedSeries, Homogeneity, ZeroStatus, ZeroTest};

/// Adds `(-1)^parity * term` to `acc`.
pub(crate) fn accumulate(acc: &mut GradedSeries, term: &GradedSeries, parity: u8) -> Result<()> {
    if term.is_exactly_zero() {
        return Ok(());
    }
    *acc = if parity & 1 == 1 {
        acc.sub(term)?
    } else {
        acc.add(term)?
    };
    Ok(())
}

/// Degree of a homogeneous function; the zero function takes `fallback`.
pub fn function_degree(f: &GradedSeries, fallback: Degree) -> Result<Degree> {
    f.degree_or(fallback)
}

/// `X = X^I d/dx^I`, homogeneous of a declared degree.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    chart: Arc<Chart>,
    degree: Degree,
    comps: Vec<GradedSeries>,
}

impl VectorField {
    /// Checks `deg X^I + deg I = deg X` for every nonzero component.
    pub fn new(chart: &Arc<Chart>, degree: Degree, comps: Vec<GradedSeries>) -> Result<Self> {
        if comps.len() != chart.dim() {
            return Err(Error::Dimension(format!(
                "vector field has {} components, chart has {} coordinates",
                comps.len(),
                chart.dim()
            )));
        }
        for (i, c) in comps.iter().enumerate() {
            if !c.chart().same_as(chart) {
                return Err(Error::ChartMismatch(
                    "vector field component on another chart".into(),
                ));
            }
            let want = degree + chart.coord_degree(i);
            match c.homogeneity() {
                Homogeneity::Zero => {}
                Homogeneity::Of(d) if d == want => {}
                _ => {
                    return Err(Error::Degree(format!(
                        "component along {} must have degree {want}",
                        chart.coord_name(i)
                    )))
                }
            }
        }
        Ok(VectorField {
            chart: chart.clone(),
            degree,
            comps,
        })
    }

    /// Homogeneous field whose degree is read off its components.
    pub fn infer(chart: &Arc<Chart>, comps: Vec<GradedSeries>) -> Result<Self> {
        let mut degree = None;
        for (i, c) in comps.iter().enumerate() {
            if let Homogeneity::Of(d) = c.homogeneity() {
                degree = Some(d + chart.coord_degree(i));
                break;
            }
        }
        Self::new(chart, degree.unwrap_or_else(|| chart.zero_degree()), comps)
    }

    pub(crate) fn raw(chart: &Arc<Chart>, degree: Degree, comps: Vec<GradedSeries>) -> Self {
        VectorField {
            chart: chart.clone(),
            degree,
            comps,
        }
    }

    pub fn zero(chart: &Arc<Chart>, degree: Degree) -> Self {
        Self::raw(chart, degree, vec![GradedSeries::zero(chart); chart.dim()])
    }

    /// Coordinate field `d/dx^i`.
    pub fn basis(chart: &Arc<Chart>, i: usize) -> Self {
        let mut v = Self::zero(chart, chart.coord_degree(i));
        v.comps[i] = GradedSeries::one(chart);
        v
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn component(&self, i: usize) -> &GradedSeries {
        &self.comps[i]
    }

    pub fn components(&self) -> &[GradedSeries] {
        &self.comps
    }

    /// `X(f) = X^I d_I f`.
    pub fn apply(&self, f: &GradedSeries) -> Result<GradedSeries> {
        let mut out = GradedSeries::zero(&self.chart);
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_exactly_zero() {
                continue;
            }
            out = out.add(&c.mul(&f.derive(i))?)?;
        }
        Ok(out)
    }

    /// Graded commutator `[X,Y]^K = X(Y^K) - (-1)^<X,Y> Y(X^K)`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        let parity = self.degree.dot(other.degree);
        let mut comps = Vec::with_capacity(self.comps.len());
        for k in 0..self.comps.len() {
            let mut c = self.apply(&other.comps[k])?;
            accumulate(&mut c, &other.apply(&self.comps[k])?, parity ^ 1)?;
            comps.push(c);
        }
        Ok(Self::raw(&self.chart, self.degree + other.degree, comps))
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Self::raw(&self.chart, self.degree, comps))
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(Self::raw(&self.chart, self.degree, comps))
    }

    pub fn neg(&self) -> VectorField {
        Self::raw(
            &self.chart,
            self.degree,
            self.comps.iter().map(|c| c.neg()).collect(),
        )
    }

    /// `f X`, of degree `deg f + deg X`.
    pub fn mul_function(&self, f: &GradedSeries, f_degree: Degree) -> Result<VectorField> {
        let comps = self.comps.iter().map(|c| f.mul(c)).collect::<Result<_>>()?;
        Ok(Self::raw(&self.chart, self.degree + f_degree, comps))
    }

    pub fn zero_status(&self, test: &ZeroTest) -> ZeroStatus {
        self.comps
            .iter()
            .fold(ZeroStatus::SymbolicZero, |s, c| s.and(c.zero_status(test)))
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_exactly_zero())
    }

    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.comps.iter().enumerate() {
            if !c.has_no_terms() {
                parts.push(format!("({})*d/d{}", c.display(), self.chart.coord_name(i)));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (i, c) in self.comps.iter().enumerate() {
            if !c.has_no_terms() {
                map.insert(
                    self.chart.coord_name(i).to_string(),
                    serde_json::Value::String(c.display()),
                );
            }
        }
        serde_json::json!({ "degree": self.degree, "components": map })
    }
}

/// `omega = dx^I omega_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub degree: Degree,
    pub comps: Vec<GradedSeries>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::Generator;

    fn s(c: &Arc<Chart>, t: &str) -> GradedSeries {
        GradedSeries::parse(c, t).unwrap()
    }

    #[test]
    fn rotation_bracket() {
        let c = Chart::classical(&["x", "y"]).unwrap();
        let zero = c.zero_degree();
        let a = VectorField::new(&c, zero, vec![s(&c, "0"), s(&c, "x")]).unwrap();
        let b = VectorField::new(&c, zero, vec![s(&c, "y"), s(&c, "0")]).unwrap();
        let br = a.bracket(&b).unwrap();
        assert_eq!(br.component(0), &s(&c, "x"));
        assert_eq!(br.component(1), &s(&c, "-y"));
    }

    #[test]
    fn odd_fields_anticommute() {
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
        let c = Chart::new(1, vec!["x".into()], gens, 2).unwrap();
        let (t, u) = (VectorField::basis(&c, 1), VectorField::basis(&c, 2));
        assert!(t.bracket(&u).unwrap().is_exactly_zero());
        assert!(t.bracket(&t).unwrap().is_exactly_zero());
        let f = s(&c, "t*s");
        assert_eq!(t.apply(&f).unwrap(), s(&c, "s"));
        assert_eq!(u.apply(&f).unwrap(), s(&c, "-t"));
    }

    #[test]
    fn degree_is_inferred_and_checked() {
        let odd = Degree::from_bits(&[1]).unwrap();
        let c = Chart::new(
            1,
            vec!["x".into()],
            vec![Generator {
                name: "t".into(),
                degree: odd,
            }],
            2,
        )
        .unwrap();
        let v = VectorField::infer(&c, vec![s(&c, "t"), s(&c, "x")]).unwrap();
        assert_eq!(v.degree(), odd);
        assert!(VectorField::new(&c, c.zero_degree(), vec![s(&c, "t"), s(&c, "x")]).is_err());
    }
}
