//! Truncated formal power series in the generators of a chart.
//!
//! A series is a finite sum `sum_m c_m(x) xi^m` over normal-ordered
//! generator monomials. Nilpotent generators appear at most once; the
//! remaining generators are truncated by total power.
//!
//! Every series carries a precision: terms of weight above it are not
//! known. Precision starts at the chart truncation order, sums and
//! products keep the smaller precision, and differentiating by a
//! non-nilpotent generator lowers it by one. Zero tests only look at
//! terms within the precision.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{Float, FromPrimitive, Zero};

use super::chart::{gen_exp, gen_unit, Chart, GenMono};
use super::coeff::Coeff;
use super::expr::Expr;
use super::zero::{ZeroStatus, ZeroTest};
use crate::error::{Error, Result};
use crate::grading::Degree;
use crate::Rational;

#[derive(Clone, Debug)]
pub struct GradedSeries {
    chart: Arc<Chart>,
    terms: Vec<(GenMono, Coeff)>,
    precision: i32,
}

/// Degree information of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Of(Degree),
    Mixed,
}

impl PartialEq for GradedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.chart.same_as(&other.chart)
            && self.sub(other).map(|d| d.terms.is_empty()).unwrap_or(false)
    }
}

impl GradedSeries {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        GradedSeries {
            chart: chart.clone(),
            terms: Vec::new(),
            precision: chart.trunc() as i32,
        }
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Self::from_coeff(chart, Coeff::one())
    }

    pub fn from_coeff(chart: &Arc<Chart>, c: Coeff) -> Self {
        Self::from_terms(chart, vec![(0, c)])
    }

    pub fn from_int(chart: &Arc<Chart>, k: i64) -> Self {
        Self::from_coeff(chart, Coeff::from_int(k))
    }

    pub fn from_rational(chart: &Arc<Chart>, q: Rational) -> Self {
        Self::from_coeff(chart, Coeff::from_rational(q))
    }

    /// The coordinate function `x^i`.
    pub fn coord(chart: &Arc<Chart>, i: usize) -> Self {
        match chart.gen_of(i) {
            None => Self::from_coeff(chart, Coeff::var(i)),
            Some(g) => Self::from_terms(chart, vec![(gen_unit(g), Coeff::one())]),
        }
    }

    /// Builds a series from unordered terms, merging equal monomials and
    /// dropping zeros and terms beyond the truncation order.
    pub fn from_terms(chart: &Arc<Chart>, terms: Vec<(GenMono, Coeff)>) -> Self {
        let mut s = GradedSeries {
            chart: chart.clone(),
            terms: Vec::new(),
            precision: chart.trunc() as i32,
        };
        let mut map: BTreeMap<GenMono, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            if s.chart.mono_weight(m) as i32 > s.precision {
                continue;
            }
            match map.get_mut(&m) {
                Some(acc) => *acc = acc.add(&c),
                None => {
                    map.insert(m, c);
                }
            }
        }
        s.terms = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        s
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> &[(GenMono, Coeff)] {
        &self.terms
    }

    pub fn precision(&self) -> i32 {
        self.precision
    }

    pub fn coefficient(&self, m: GenMono) -> Coeff {
        self.terms
            .binary_search_by(|(k, _)| k.cmp(&m))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    /// Coefficient of the empty monomial.
    pub fn body(&self) -> Coeff {
        self.coefficient(0)
    }

    /// Drops terms that are not exactly zero but lie beyond `precision`.
    pub fn truncated(&self, precision: i32) -> Self {
        let precision = precision.min(self.precision);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| self.chart.mono_weight(*m) as i32 <= precision)
            .cloned()
            .collect();
        GradedSeries {
            chart: self.chart.clone(),
            terms,
            precision,
        }
    }

    /// Zero with nothing unknown up to the truncation order.
    pub fn is_exactly_zero(&self) -> bool {
        self.terms.is_empty() && self.precision >= self.chart.trunc() as i32
    }

    /// The series minus its body.
    pub fn nilpotent_part(&self) -> Self {
        let mut out = self.clone();
        out.terms.retain(|(m, _)| *m != 0);
        out
    }

    /// No retained terms; higher terms may be unknown.
    pub fn has_no_terms(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_coeff(&self) -> Option<&Coeff> {
        match self.terms.as_slice() {
            [] => None,
            [(0, c)] => Some(c),
            _ => None,
        }
    }

    fn check_chart(&self, other: &Self) -> Result<()> {
        if self.chart.same_as(&other.chart) {
            Ok(())
        } else {
            Err(Error::ChartMismatch(
                "series live on different charts".into(),
            ))
        }
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return GradedSeries {
                terms: Vec::new(),
                ..self.clone()
            };
        }
        self.map_coeffs(|c| c.scale(k))
    }

    /// Multiplication by a degree-zero function of the base coordinates.
    pub fn mul_coeff(&self, k: &Coeff) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.mul(k)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        GradedSeries {
            chart: self.chart.clone(),
            terms,
            precision: self.precision,
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        GradedSeries {
            chart: self.chart.clone(),
            terms,
            precision: self.precision,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self> {
        self.check_chart(other)?;
        let precision = self.precision.min(other.precision);
        let keep = |m: &GenMono| self.chart.mono_weight(*m) as i32 <= precision;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let rhs = |c: &Coeff| if negate { c.neg() } else { c.clone() };
        while i < self.terms.len() || j < other.terms.len() {
            let a = self.terms.get(i);
            let b = other.terms.get(j);
            match (a, b) {
                (Some((ma, ca)), Some((mb, cb))) if ma == mb => {
                    let c = if negate { ca.sub(cb) } else { ca.add(cb) };
                    if !c.is_zero() && keep(ma) {
                        out.push((*ma, c));
                    }
                    i += 1;
                    j += 1;
                }
                (Some((ma, ca)), Some((mb, _))) if ma < mb => {
                    if keep(ma) {
                        out.push((*ma, ca.clone()));
                    }
                    i += 1;
                }
                (Some((ma, ca)), None) => {
                    if keep(ma) {
                        out.push((*ma, ca.clone()));
                    }
                    i += 1;
                }
                (_, Some((mb, cb))) => {
                    if keep(mb) {
                        out.push((*mb, rhs(cb)));
                    }
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Ok(GradedSeries {
            chart: self.chart.clone(),
            terms: out,
            precision,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_chart(other)?;
        let precision = self.precision.min(other.precision);
        if self.terms.is_empty() || other.terms.is_empty() {
            return Ok(GradedSeries {
                chart: self.chart.clone(),
                terms: Vec::new(),
                precision,
            });
        }
        let chart = &self.chart;
        let wb: Vec<i32> = other
            .terms
            .iter()
            .map(|(m, _)| chart.mono_weight(*m) as i32)
            .collect();
        let mut acc: BTreeMap<GenMono, Coeff> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let wa = chart.mono_weight(*ma) as i32;
            if wa > precision {
                continue;
            }
            for ((mb, cb), w) in other.terms.iter().zip(&wb) {
                if wa + w > precision {
                    continue;
                }
                let Some((m, parity)) = chart.mono_mul(*ma, *mb) else {
                    continue;
                };
                let mut c = ca.mul(cb);
                if parity == 1 {
                    c = c.neg();
                }
                match acc.get_mut(&m) {
                    Some(v) => *v = v.add(&c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(GradedSeries {
            chart: self.chart.clone(),
            terms,
            precision,
        })
    }

    /// Left derivative `d/dx^i`.
    pub fn derive(&self, i: usize) -> Self {
        let chart = &self.chart;
        match chart.gen_of(i) {
            None => self.map_coeffs(|c| c.derive(i)),
            Some(g) => {
                let gamma = chart.generators()[g].degree;
                let precision = if chart.is_nilpotent(g) {
                    self.precision
                } else {
                    self.precision - 1
                };
                let mut terms = Vec::new();
                for (m, c) in &self.terms {
                    let e = gen_exp(*m, g);
                    if e == 0 {
                        continue;
                    }
                    let rest = m - gen_unit(g);
                    if chart.mono_weight(rest) as i32 > precision {
                        continue;
                    }
                    let mut before = chart.zero_degree();
                    for j in 0..g {
                        if gen_exp(*m, j) & 1 == 1 {
                            before += chart.generators()[j].degree;
                        }
                    }
                    let mut k = c.scale(&Rational::from_integer(e.into()));
                    if gamma.dot(before) == 1 {
                        k = k.neg();
                    }
                    terms.push((rest, k));
                }
                terms.sort_by_key(|(m, _)| *m);
                GradedSeries {
                    chart: chart.clone(),
                    terms,
                    precision,
                }
            }
        }
    }

    /// Multiplicative inverse, provided the body is invertible.
    pub fn invert(&self) -> Result<Self> {
        let body = self.body();
        if body.is_zero() {
            return Err(Error::NotInvertible("series with vanishing body".into()));
        }
        let b_inv = body.recip()?;
        let chart = &self.chart;
        let mut step = self.clone();
        step.terms.retain(|(m, _)| *m != 0);
        let step = step.mul_coeff(&b_inv.neg());
        let mut power = GradedSeries {
            precision: self.precision,
            ..Self::one(chart)
        };
        let mut sum = power.clone();
        let bound = chart.trunc() as usize + chart.nilpotent_count() + 1;
        for _ in 0..bound {
            power = power.mul(&step)?;
            if power.terms.is_empty() {
                break;
            }
            sum = sum.add(&power)?;
        }
        Ok(sum.mul_coeff(&b_inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.invert()?)
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut out = GradedSeries {
            precision: self.precision,
            ..Self::one(&self.chart)
        };
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base)?;
        }
        Ok(out)
    }

    /// `exp(a)` for a series of degree zero.
    pub fn exp(&self) -> Result<Self> {
        match self.homogeneity() {
            Homogeneity::Zero => {
                return Ok(GradedSeries {
                    precision: self.precision,
                    ..Self::one(&self.chart)
                })
            }
            Homogeneity::Of(d) if d.is_zero() => {}
            _ => {
                return Err(Error::Degree(
                    "exp of a series that is not of degree zero".into(),
                ))
            }
        }
        let chart = &self.chart;
        let mut nil = self.clone();
        nil.terms.retain(|(m, _)| *m != 0);
        let mut power = GradedSeries {
            precision: self.precision,
            ..Self::one(chart)
        };
        let mut sum = power.clone();
        let bound = chart.trunc() as usize + chart.nilpotent_count() + 1;
        for k in 1..=bound {
            power = power
                .mul(&nil)?
                .scale(&Rational::new(1.into(), (k as i64).into()));
            if power.terms.is_empty() {
                break;
            }
            sum = sum.add(&power)?;
        }
        Ok(sum.mul_coeff(&Coeff::exp(&self.body())))
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let mut found: Option<Degree> = None;
        for (m, _) in &self.terms {
            let d = self.chart.mono_degree(*m);
            match found {
                None => found = Some(d),
                Some(f) if f != d => return Homogeneity::Mixed,
                _ => {}
            }
        }
        found.map_or(Homogeneity::Zero, Homogeneity::Of)
    }

    /// Degree of a homogeneous series; the zero series counts as `fallback`.
    pub fn degree_or(&self, fallback: Degree) -> Result<Degree> {
        match self.homogeneity() {
            Homogeneity::Zero => Ok(fallback),
            Homogeneity::Of(d) => Ok(d),
            Homogeneity::Mixed => Err(Error::Degree("series is not homogeneous".into())),
        }
    }

    pub fn zero_status(&self, test: &ZeroTest) -> ZeroStatus {
        let nvars = self.chart.p();
        let mut status = ZeroStatus::SymbolicZero;
        for (m, c) in &self.terms {
            if self.chart.mono_weight(*m) as i32 > self.precision {
                continue;
            }
            status = status.and(test.coeff_status(c, nvars));
            if status == ZeroStatus::Nonzero {
                break;
            }
        }
        status
    }

    /// Exact value `sum_m c_m(point) w(m)` where `w` assigns numbers to
    /// generator monomials.
    pub fn eval_rational(
        &self,
        point: &[Rational],
        weight: &dyn Fn(GenMono) -> Rational,
    ) -> Result<Rational> {
        self.check_point(point.len())?;
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let w = weight(*m);
            if w.is_zero() {
                continue;
            }
            let v = c.eval_rational(point).map_err(|e| self.pole_error(*m, e))?;
            total += v * w;
        }
        Ok(total)
    }

    /// Coefficients evaluated at a base point.
    pub fn eval_float<T: Float + FromPrimitive>(&self, point: &[T]) -> Result<Vec<(GenMono, T)>> {
        self.check_point(point.len())?;
        self.terms
            .iter()
            .map(|(m, c)| {
                c.eval_float(point)
                    .map(|v| (*m, v))
                    .map_err(|e| self.pole_error(*m, e))
            })
            .collect()
    }

    fn check_point(&self, len: usize) -> Result<()> {
        if len != self.chart.p() {
            return Err(Error::Dimension(format!(
                "point has {len} entries, chart has {} base coordinates",
                self.chart.p()
            )));
        }
        Ok(())
    }

    fn pole_error(&self, m: GenMono, e: Error) -> Error {
        match e {
            Error::Evaluation(msg) => Error::Evaluation(format!(
                "{msg} in the coefficient of {}",
                self.chart.mono_display(m)
            )),
            other => other,
        }
    }

    /// Series of an expression whose symbols are coordinates of `chart`.
    pub fn from_expr(chart: &Arc<Chart>, expr: &Expr) -> Result<Self> {
        use Expr::*;
        Ok(match expr {
            Num(q) => Self::from_rational(chart, q.clone()),
            Sym(s) => Self::coord(
                chart,
                chart
                    .index_of(s)
                    .ok_or_else(|| Error::UnknownCoordinate(s.clone()))?,
            ),
            Add(a, b) => Self::from_expr(chart, a)?.add(&Self::from_expr(chart, b)?)?,
            Sub(a, b) => Self::from_expr(chart, a)?.sub(&Self::from_expr(chart, b)?)?,
            Mul(a, b) => Self::from_expr(chart, a)?.mul(&Self::from_expr(chart, b)?)?,
            Div(a, b) => {
                let den = Self::from_expr(chart, b)?;
                let num = Self::from_expr(chart, a)?;
                match den.as_coeff() {
                    Some(c) => num.mul_coeff(&c.recip()?),
                    None => num.mul(&den.invert()?)?,
                }
            }
            Neg(a) => Self::from_expr(chart, a)?.neg(),
            Pow(a, k) => Self::from_expr(chart, a)?.powi(*k)?,
            Exp(a) => Self::from_expr(chart, a)?.exp()?,
        })
    }

    pub fn parse(chart: &Arc<Chart>, text: &str) -> Result<Self> {
        Self::from_expr(chart, &Expr::parse(text)?)
    }

    /// Expression text in the chart's coordinate names; it parses back to
    /// the same series.
    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names = self.chart.base_names().to_vec();
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let cs = c.display(&names);
            let simple = cs
                .chars()
                .all(|ch| ch.is_alphanumeric() || ch == '_' || ch == '^');
            let term = if *m == 0 {
                cs
            } else if c.is_one() {
                self.chart.mono_display(*m)
            } else if simple {
                format!("{cs}*{}", self.chart.mono_display(*m))
            } else {
                format!("({cs})*{}", self.chart.mono_display(*m))
            };
            if k > 0 {
                out.push_str(" + ");
            }
            out.push_str(&term);
        }
        out
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::chart::Generator;
    use num_traits::One;

    fn chart(trunc: u32) -> Arc<Chart> {
        let g = |n: &str, b: &[u8]| Generator {
            name: n.into(),
            degree: Degree::from_bits(b).unwrap(),
        };
        Chart::new(
            2,
            vec!["x".into()],
            vec![
                g("z", &[1, 1]),
                g("xi", &[0, 1]),
                g("xi2", &[0, 1]),
                g("eta", &[1, 0]),
            ],
            trunc,
        )
        .unwrap()
    }

    fn s(c: &Arc<Chart>, t: &str) -> GradedSeries {
        GradedSeries::parse(c, t).unwrap()
    }

    #[test]
    fn products_follow_the_sign_rule() {
        let c = chart(4);
        assert!(s(&c, "xi*xi").is_exactly_zero());
        assert_eq!(s(&c, "eta*xi"), s(&c, "xi*eta"));
        assert_eq!(s(&c, "xi*xi2"), s(&c, "-xi2*xi"));
        assert_eq!(s(&c, "xi*z"), s(&c, "-z*xi"));
        assert_eq!(s(&c, "z*z").display(), "z^2");
    }

    #[test]
    fn left_derivatives() {
        let c = chart(4);
        let z = c.index_of("z").unwrap();
        let xi = c.index_of("xi").unwrap();
        let xi2 = c.index_of("xi2").unwrap();
        let eta = c.index_of("eta").unwrap();
        assert_eq!(s(&c, "z^2").derive(z), s(&c, "2*z"));
        assert_eq!(s(&c, "xi*xi2").derive(xi), s(&c, "xi2"));
        assert_eq!(s(&c, "xi*xi2").derive(xi2), s(&c, "-xi"));
        assert_eq!(s(&c, "xi*eta").derive(eta), s(&c, "xi"));
        assert_eq!(s(&c, "z*xi").derive(xi), s(&c, "-z"));
        assert_eq!(s(&c, "x^2*xi").derive(0), s(&c, "2*x*xi"));
    }

    #[test]
    fn inverses() {
        let c = chart(3);
        assert_eq!(s(&c, "1 - xi*xi2").invert().unwrap(), s(&c, "1 + xi*xi2"));
        assert_eq!(
            s(&c, "1 - z").invert().unwrap().display(),
            "1 + z + z^2 + z^3"
        );
        let a = s(&c, "2 + x*z + xi*eta - z^2*xi2*eta");
        assert_eq!(a.mul(&a.invert().unwrap()).unwrap(), GradedSeries::one(&c));
        assert!(s(&c, "xi").invert().is_err());
    }

    #[test]
    fn exp_of_nilpotent_part() {
        let c = chart(3);
        let e = s(&c, "exp(x + xi*xi2)");
        assert_eq!(e, s(&c, "exp(x) + exp(x)*xi*xi2"));
        assert!(GradedSeries::parse(&c, "exp(xi)").is_err());
    }

    #[test]
    fn display_reparses() {
        let c = chart(3);
        let a = s(&c, "x/(1 + x^2)*z*xi - 3*eta + 1/2");
        assert_eq!(s(&c, &a.display()), a);
    }

    #[test]
    fn precision_drops_under_derivation() {
        let c = chart(2);
        let z = c.index_of("z").unwrap();
        let a = s(&c, "z^2");
        let d = a.derive(z);
        assert_eq!(d.precision(), 1);
        // Leibniz at the truncation edge holds within the tracked precision.
        let lhs = a.mul(&a).unwrap().derive(z);
        let rhs = d.mul(&a).unwrap().add(&a.mul(&d).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().has_no_terms());
    }

    #[test]
    fn evaluation_reports_poles() {
        let c = chart(2);
        let a = s(&c, "1/(x - 1)*xi");
        let err = a.eval_float(&[1.0f64]).unwrap_err();
        assert!(err.to_string().contains("xi"));
        let v = a
            .eval_rational(&[Rational::from_integer(3.into())], &|_| Rational::one())
            .unwrap();
        assert_eq!(v, Rational::new(1.into(), 2.into()));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::symkernel::chart::Generator;
    use crate::symkernel::poly::Poly;
    use proptest::prelude::*;

    fn chart() -> Arc<Chart> {
        let g = |n: &str, b: &[u8]| Generator {
            name: n.into(),
            degree: Degree::from_bits(b).unwrap(),
        };
        Chart::new(
            2,
            vec!["x".into()],
            vec![
                g("z", &[1, 1]),
                g("xi", &[0, 1]),
                g("xi2", &[0, 1]),
                g("eta", &[1, 0]),
            ],
            3,
        )
        .unwrap()
    }

    fn series(degree: Option<[u8; 2]>) -> impl Strategy<Value = GradedSeries> {
        prop::collection::vec(
            ((0u32..3, 0u32..2, 0u32..2, 0u32..2), -3i64..4, 0u32..3),
            0..5,
        )
        .prop_map(move |raw| {
            let c = chart();
            let terms = raw
                .into_iter()
                .map(|((z, a, b, e), k, px)| {
                    let m = c.mono_from_exponents(&[z, a, b, e]).unwrap();
                    let coeff = Coeff::from_poly(
                        Poly::var(0)
                            .pow(px)
                            .scale(&Rational::from_integer(k.into())),
                    );
                    (m, coeff)
                })
                .filter(|(m, _)| {
                    degree.is_none_or(|d| c.mono_degree(*m) == Degree::from_bits(&d).unwrap())
                })
                .collect();
            GradedSeries::from_terms(&c, terms)
        })
    }

    fn degree() -> impl Strategy<Value = [u8; 2]> {
        prop_oneof![Just([0, 0]), Just([1, 1]), Just([0, 1]), Just([1, 0])]
    }

    fn component(a: &GradedSeries, d: Degree) -> GradedSeries {
        let c = a.chart();
        GradedSeries::from_terms(
            c,
            a.terms()
                .iter()
                .filter(|(m, _)| c.mono_degree(*m) == d)
                .cloned()
                .collect(),
        )
    }

    fn sign(d1: Degree, d2: Degree) -> Rational {
        Rational::from_integer(if d1.dot(d2) == 1 {
            (-1).into()
        } else {
            1.into()
        })
    }

    proptest! {
        #[test]
        fn product_is_associative(a in series(None), b in series(None), c in series(None)) {
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn product_is_graded_commutative(da in degree(), db in degree(), a0 in series(None), b0 in series(None)) {
            let (ga, gb) = (Degree::from_bits(&da).unwrap(), Degree::from_bits(&db).unwrap());
            let (a, b) = (component(&a0, ga), component(&b0, gb));
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap().scale(&sign(ga, gb));
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn left_derivation_obeys_leibniz(da in degree(), a0 in series(None), b in series(None), i in 0usize..5) {
            let c = chart();
            let ga = Degree::from_bits(&da).unwrap();
            let a = component(&a0, ga);
            let lhs = a.mul(&b).unwrap().derive(i);
            let rhs = a
                .derive(i)
                .mul(&b)
                .unwrap()
                .add(&a.mul(&b.derive(i)).unwrap().scale(&sign(c.coord_degree(i), ga)))
                .unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn second_derivatives_graded_commute(a in series(None), i in 0usize..5, j in 0usize..5) {
            let c = chart();
            let ij = a.derive(j).derive(i);
            let ji = a.derive(i).derive(j).scale(&sign(c.coord_degree(i), c.coord_degree(j)));
            prop_assert_eq!(ij, ji);
        }

        #[test]
        fn inverse_is_two_sided(a in series(Some([0, 0])), k in 1i64..5) {
            let c = chart();
            let a = a.add(&GradedSeries::from_int(&c, k)).unwrap();
            prop_assume!(!a.body().is_zero());
            let inv = a.invert().unwrap();
            prop_assert_eq!(a.mul(&inv).unwrap(), GradedSeries::one(&c));
            prop_assert_eq!(inv.mul(&a).unwrap(), GradedSeries::one(&c));
        }
    }
}
