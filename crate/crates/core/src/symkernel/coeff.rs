//! Canonical form of a scalar expression in the base coordinates.
//!
//! A [`Coeff`] is a quotient `N / (f_1^e_1 ... f_k^e_k)` where every
//! denominator factor `f_i` is an exp-free polynomial with leading
//! coefficient one and the numerator is a finite sum `sum_u P_u exp(u)`
//! of polynomials times exponential atoms. Atoms with equal exponents are
//! merged and `exp(u) exp(v)` becomes `exp(u + v)`; exponent zero is the
//! plain polynomial part. After every operation numerator and denominator
//! are reduced by exact trial division against the denominator factors,
//! so the zero coefficient has an empty numerator.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::{Float, FromPrimitive, One, Zero};

use super::poly::{format_rational, Poly};
use crate::error::{Error, Result};
use crate::Rational;

/// Exponent of an exponential atom; `None` is exponent zero.
pub type ExpKey = Option<Arc<Coeff>>;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Coeff {
    num: Vec<(ExpKey, Poly)>,
    den: Vec<(Poly, u32)>,
}

impl PartialOrd for Coeff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coeff {
    fn cmp(&self, other: &Self) -> Ordering {
        self.num
            .cmp(&other.num)
            .then_with(|| self.den.cmp(&other.den))
    }
}

/// Outcome of a zero test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Zero,
    Nonzero,
    /// The canonical form cannot decide: several exponential atoms whose
    /// exponents have no unique representation.
    Undecided,
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::default()
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_rational(Rational::from_integer(c.into()))
    }

    pub fn var(var: usize) -> Self {
        Self::from_poly(Poly::var(var))
    }

    pub fn from_poly(p: Poly) -> Self {
        if p.is_zero() {
            Coeff::zero()
        } else {
            Coeff {
                num: vec![(None, p)],
                den: Vec::new(),
            }
        }
    }

    /// `exp(u)`.
    pub fn exp(u: &Coeff) -> Coeff {
        if u.is_zero() {
            return Coeff::one();
        }
        Coeff {
            num: vec![(Some(Arc::new(u.clone())), Poly::one())],
            den: Vec::new(),
        }
    }

    pub fn numerator(&self) -> &[(ExpKey, Poly)] {
        &self.num
    }

    pub fn denominator(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty()
            && self.num.len() == 1
            && self.num[0].0.is_none()
            && self.num[0].1.is_one()
    }

    pub fn has_exp(&self) -> bool {
        self.num.iter().any(|(k, _)| k.is_some())
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if !self.den.is_empty() || self.num.len() != 1 || self.num[0].0.is_some() {
            return None;
        }
        self.num[0].1.as_constant()
    }

    /// Exp-free polynomial, if this coefficient is one.
    pub fn as_poly(&self) -> Option<&Poly> {
        match (self.num.as_slice(), self.den.is_empty()) {
            ([(None, p)], true) => Some(p),
            _ => None,
        }
    }

    /// Exponents with a unique representation: exp-free polynomials.
    fn key_is_canonical(key: &ExpKey) -> bool {
        match key {
            None => true,
            Some(u) => u.as_poly().is_some(),
        }
    }

    pub fn decide_zero(&self) -> Decision {
        if self.num.is_empty() {
            return Decision::Zero;
        }
        if self.num.len() == 1 || self.num.iter().all(|(k, _)| Self::key_is_canonical(k)) {
            Decision::Nonzero
        } else {
            Decision::Undecided
        }
    }

    pub fn neg(&self) -> Coeff {
        Coeff {
            num: self.num.iter().map(|(k, p)| (k.clone(), p.neg())).collect(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Coeff {
        if k.is_zero() {
            return Coeff::zero();
        }
        Coeff {
            num: self
                .num
                .iter()
                .map(|(key, p)| (key.clone(), p.scale(k)))
                .collect(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = merge_num(&self.num, &other.num);
            return Coeff {
                num,
                den: self.den.clone(),
            }
            .reduced();
        }
        let den = lcm_den(&self.den, &other.den);
        let a = lift_num(&self.num, &self.den, &den);
        let b = lift_num(&other.num, &other.den, &den);
        Coeff {
            num: merge_num(&a, &b),
            den,
        }
        .reduced()
    }

    pub fn sub(&self, other: &Coeff) -> Coeff {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        if self.is_zero() || other.is_zero() {
            return Coeff::zero();
        }
        if let Some(c) = self.as_rational() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_rational() {
            return self.scale(&c);
        }
        let mut terms: Vec<(ExpKey, Poly)> = Vec::with_capacity(self.num.len() * other.num.len());
        for (ka, pa) in &self.num {
            for (kb, pb) in &other.num {
                terms.push((add_keys(ka, kb), pa.mul(pb)));
            }
        }
        let num = collect_num(terms);
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            if den.iter().any(|(g, _)| g == f) || den.is_empty() {
                add_factor(&mut den, f.clone(), *e);
            } else {
                for (g, k) in factor_against(f.clone(), &den) {
                    add_factor(&mut den, g, k * e);
                }
            }
        }
        Coeff { num, den }.reduced()
    }

    /// Multiplicative inverse. Fails for zero and for numerators mixing
    /// several exponential atoms.
    pub fn recip(&self) -> Result<Coeff> {
        if self.is_zero() {
            return Err(Error::NotInvertible("division by zero".into()));
        }
        if self.num.len() != 1 {
            return Err(Error::Unsupported(
                "division by a sum of distinct exponential terms".into(),
            ));
        }
        let (key, p) = &self.num[0];
        let inv_key = key.as_ref().map(|u| Arc::new(u.neg()));
        let mut num_poly = Poly::one();
        for (f, e) in &self.den {
            num_poly = num_poly.mul(&f.pow(*e));
        }
        let (content, prim) = p.monic();
        num_poly = num_poly.scale(&(Rational::one() / content));
        let mut den = Vec::new();
        if !prim.is_constant() {
            den = factor_against(prim, &self.den);
        }
        Ok(Coeff {
            num: vec![(inv_key, num_poly)],
            den,
        }
        .reduced())
    }

    pub fn div(&self, other: &Coeff) -> Result<Coeff> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, e: i64) -> Result<Coeff> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = Coeff::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Partial derivative with respect to base coordinate `var`.
    pub fn derive(&self, var: usize) -> Coeff {
        if self.is_zero() {
            return Coeff::zero();
        }
        // d(N) with d(P exp(u)) = (P' + P u') exp(u)
        let mut dnum = Coeff::zero();
        for (key, p) in &self.num {
            let atom = Coeff {
                num: vec![(key.clone(), Poly::one())],
                den: Vec::new(),
            };
            let mut inner = Coeff::from_poly(p.derive(var));
            if let Some(u) = key {
                inner = inner.add(&Coeff::from_poly(p.clone()).mul(&u.derive(var)));
            }
            dnum = dnum.add(&inner.mul(&atom));
        }
        if self.den.is_empty() {
            return dnum;
        }
        let inv_den = Coeff {
            num: vec![(None, Poly::one())],
            den: self.den.clone(),
        };
        // d(1/D) = -(sum e f' prod_{g != f} g) / (D prod f)
        let mut s = Poly::zero();
        for (i, (f, e)) in self.den.iter().enumerate() {
            let mut t = f.derive(var).scale(&Rational::from_integer((*e).into()));
            for (j, (g, _)) in self.den.iter().enumerate() {
                if i != j {
                    t = t.mul(g);
                }
            }
            s = s.add(&t);
        }
        let d_inv_den = Coeff {
            num: if s.is_zero() {
                Vec::new()
            } else {
                vec![(None, s.neg())]
            },
            den: self.den.iter().map(|(f, e)| (f.clone(), e + 1)).collect(),
        }
        .reduced();
        let n = Coeff {
            num: self.num.clone(),
            den: Vec::new(),
        };
        dnum.mul(&inv_den).add(&n.mul(&d_inv_den))
    }

    /// Cancels denominator factors that divide every numerator polynomial.
    fn reduced(mut self) -> Coeff {
        if self.num.is_empty() {
            self.den.clear();
            return self;
        }
        let mut k = 0;
        while k < self.den.len() {
            while self.den[k].1 > 0 {
                let f = &self.den[k].0;
                let divided: Option<Vec<_>> = self
                    .num
                    .iter()
                    .map(|(key, p)| p.div_exact(f).map(|q| (key.clone(), q)))
                    .collect();
                match divided {
                    Some(num) => {
                        self.num = num;
                        self.den[k].1 -= 1;
                    }
                    None => break,
                }
            }
            if self.den[k].1 == 0 {
                self.den.remove(k);
            } else {
                k += 1;
            }
        }
        self
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Result<Rational> {
        if self.has_exp() {
            return Err(Error::Evaluation(
                "expression contains exp and has no exact rational value".into(),
            ));
        }
        let mut d = Rational::one();
        for (f, e) in &self.den {
            d *= num_traits::pow(f.eval_rational(point), *e as usize);
        }
        if d.is_zero() {
            return Err(Error::Evaluation("pole: denominator vanishes".into()));
        }
        let n = self
            .num
            .first()
            .map(|(_, p)| p.eval_rational(point))
            .unwrap_or_else(Rational::zero);
        Ok(n / d)
    }

    pub fn eval_float<T: Float + FromPrimitive>(&self, point: &[T]) -> Result<T> {
        Ok(self.eval_float_with_scale(point)?.0)
    }

    /// Value together with the sum of absolute values of the numerator
    /// terms over the same denominator.
    pub fn eval_float_with_scale<T: Float + FromPrimitive>(&self, point: &[T]) -> Result<(T, T)> {
        let mut d = T::one();
        for (f, e) in &self.den {
            d = d * f.eval_float(point).powi(*e as i32);
        }
        if d == T::zero() || !d.is_finite() {
            return Err(Error::Evaluation("pole: denominator vanishes".into()));
        }
        let mut value = T::zero();
        let mut scale = T::zero();
        for (key, p) in &self.num {
            let atom = match key {
                None => T::one(),
                Some(u) => u.eval_float(point)?.exp(),
            };
            value = value + p.eval_float(point) * atom;
            scale = scale + p.eval_abs_float(point) * atom.abs();
        }
        Ok((value / d, scale / d.abs()))
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.num.is_empty() {
            return "0".to_string();
        }
        let num_parts: Vec<String> = self
            .num
            .iter()
            .map(|(key, p)| match key {
                None => p.display(names),
                Some(u) => {
                    let atom = format!("exp({})", u.display(names));
                    if p.is_one() {
                        atom
                    } else if let Some(c) = p.as_constant() {
                        format!("{}*{atom}", paren_rational(&c))
                    } else {
                        format!("({})*{atom}", p.display(names))
                    }
                }
            })
            .collect();
        let num = num_parts.join(" + ").replace("+ -", "- ");
        if self.den.is_empty() {
            return num;
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(f, e)| {
                if *e == 1 {
                    format!("({})", f.display(names))
                } else {
                    format!("({})^{e}", f.display(names))
                }
            })
            .collect();
        let num =
            if self.num.len() == 1 && self.num[0].1.terms().len() == 1 && self.num[0].0.is_none() {
                paren_if_negative(&num)
            } else {
                format!("({num})")
            };
        let den = if den.len() == 1 {
            den[0].clone()
        } else {
            format!("({})", den.join("*"))
        };
        format!("{num}/{den}")
    }
}

fn paren_rational(c: &Rational) -> String {
    let s = format_rational(c);
    if s.starts_with('-') || s.contains('/') {
        format!("({s})")
    } else {
        s
    }
}

fn paren_if_negative(s: &str) -> String {
    if s.starts_with('-') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

fn add_keys(a: &ExpKey, b: &ExpKey) -> ExpKey {
    match (a, b) {
        (None, k) | (k, None) => k.clone(),
        (Some(u), Some(v)) => {
            let s = u.add(v);
            if s.is_zero() {
                None
            } else {
                Some(Arc::new(s))
            }
        }
    }
}

fn collect_num(mut terms: Vec<(ExpKey, Poly)>) -> Vec<(ExpKey, Poly)> {
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(ExpKey, Poly)> = Vec::with_capacity(terms.len());
    for (k, p) in terms {
        match out.last_mut() {
            Some((lk, lp)) if *lk == k => *lp = lp.add(&p),
            _ => out.push((k, p)),
        }
    }
    out.retain(|(_, p)| !p.is_zero());
    out
}

fn merge_num(a: &[(ExpKey, Poly)], b: &[(ExpKey, Poly)]) -> Vec<(ExpKey, Poly)> {
    if a.len() == 1 && b.len() == 1 && a[0].0 == b[0].0 {
        let p = a[0].1.add(&b[0].1);
        return if p.is_zero() {
            Vec::new()
        } else {
            vec![(a[0].0.clone(), p)]
        };
    }
    collect_num(a.iter().chain(b.iter()).cloned().collect())
}

fn add_factor(den: &mut Vec<(Poly, u32)>, f: Poly, e: u32) {
    match den.binary_search_by(|(g, _)| g.cmp(&f)) {
        Ok(i) => den[i].1 += e,
        Err(i) => den.insert(i, (f, e)),
    }
}

fn lcm_den(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> Vec<(Poly, u32)> {
    let mut out = a.to_vec();
    for (f, e) in b {
        match out.binary_search_by(|(g, _)| g.cmp(f)) {
            Ok(i) => out[i].1 = out[i].1.max(*e),
            Err(i) => out.insert(i, (f.clone(), *e)),
        }
    }
    out
}

fn lift_num(
    num: &[(ExpKey, Poly)],
    den: &[(Poly, u32)],
    target: &[(Poly, u32)],
) -> Vec<(ExpKey, Poly)> {
    let mut factor = Poly::one();
    for (f, e) in target {
        let have = den
            .iter()
            .find(|(g, _)| g == f)
            .map(|(_, e)| *e)
            .unwrap_or(0);
        if *e > have {
            factor = factor.mul(&f.pow(e - have));
        }
    }
    if factor.is_one() {
        return num.to_vec();
    }
    num.iter()
        .map(|(k, p)| (k.clone(), p.mul(&factor)))
        .collect()
}

/// Splits a monic polynomial into powers of the known factors times a
/// remaining new factor.
fn factor_against(mut p: Poly, known: &[(Poly, u32)]) -> Vec<(Poly, u32)> {
    let mut den = Vec::new();
    for (f, _) in known {
        let mut e = 0;
        while let Some(q) = p.div_exact(f) {
            p = q;
            e += 1;
        }
        if e > 0 {
            add_factor(&mut den, f.clone(), e);
        }
    }
    if !p.is_constant() {
        let (c, prim) = p.monic();
        debug_assert!(c.is_one());
        add_factor(&mut den, prim, 1);
    }
    den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn x() -> Coeff {
        Coeff::var(0)
    }

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn fractions_cancel() {
        let one_minus_x = Coeff::one().sub(&x());
        let f = one_minus_x.recip().unwrap();
        let back = f.mul(&one_minus_x);
        assert!(back.is_one(), "{}", back.display(&names()));
        // 1/(1-x) - x/(1-x) = 1
        let g = f.sub(&x().mul(&f));
        assert!(g.is_one());
        // (1-x)^2 / (1-x) via recip of a product
        let sq = one_minus_x.mul(&one_minus_x);
        let h = sq.div(&one_minus_x).unwrap();
        assert_eq!(h, one_minus_x);
    }

    #[test]
    fn exp_atoms_merge() {
        let e = Coeff::exp(&x());
        let inv = Coeff::exp(&x().neg());
        let prod = e.mul(&inv);
        assert!(prod.is_one());
        assert_eq!(prod.sub(&Coeff::one()).decide_zero(), Decision::Zero);
        assert_eq!(e.recip().unwrap(), inv);
    }

    #[test]
    fn chain_rule_on_exp() {
        let x2 = x().mul(&x());
        let e = Coeff::exp(&x2);
        let d = e.derive(0);
        let expected = x().scale(&q(2)).mul(&e);
        assert_eq!(d.sub(&expected).decide_zero(), Decision::Zero);
    }

    #[test]
    fn quotient_rule() {
        // d/dx (x / (1 - x^2)) = (1 + x^2) / (1 - x^2)^2
        let den = Coeff::one().sub(&x().mul(&x()));
        let f = x().div(&den).unwrap();
        let df = f.derive(0);
        let expected = Coeff::one()
            .add(&x().mul(&x()))
            .div(&den.mul(&den))
            .unwrap();
        assert!(df.sub(&expected).is_zero(), "{}", df.display(&names()));
    }

    #[test]
    fn evaluation_and_poles() {
        let x2 = x().mul(&x());
        assert_eq!(x2.eval_rational(&[q(3)]).unwrap(), q(9));
        let f = Coeff::one().sub(&x()).recip().unwrap();
        assert!(matches!(
            f.eval_rational(&[q(1)]),
            Err(Error::Evaluation(_))
        ));
        assert!(matches!(f.eval_float(&[1.0f64]), Err(Error::Evaluation(_))));
        assert_eq!(
            Coeff::exp(&Coeff::zero()).eval_float(&[0.0f64]).unwrap(),
            1.0
        );
    }

    #[test]
    fn display_forms() {
        let den = Coeff::one().sub(&x().mul(&x()));
        let f = den.powi(-2).unwrap().scale(&q(4));
        assert_eq!(f.display(&names()), "4/(x^2 - 1)^2");
        let g = Coeff::from_int(4).div(&den.mul(&den)).unwrap();
        assert!(f.sub(&g).is_zero());
        let e = Coeff::exp(&x().scale(&Rational::new(q(1).to_integer(), 4.into())));
        assert_eq!(e.display(&names()), "exp(1/4*x)");
    }
}
