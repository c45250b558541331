//! Sparse multivariate polynomials over Q in the base coordinates.
//!
//! Monomials are packed into a `u64`, eight bits per variable, variable 0
//! in the most significant byte; comparing the packed words is therefore
//! lexicographic order. At most [`MAX_VARS`] variables and per-variable
//! degree below 128 are supported.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

pub const MAX_VARS: usize = 8;
const HIGH_BITS: u64 = 0x8080_8080_8080_8080;

pub type Mono = u64;

#[inline]
fn shift(var: usize) -> u32 {
    (8 * (MAX_VARS - 1 - var)) as u32
}

#[inline]
pub fn mono_exp(m: Mono, var: usize) -> u32 {
    ((m >> shift(var)) & 0xff) as u32
}

#[inline]
pub fn mono_var(var: usize) -> Mono {
    1u64 << shift(var)
}

#[inline]
fn mono_mul(a: Mono, b: Mono) -> Mono {
    let s = a + b;
    assert!(
        s & HIGH_BITS == 0,
        "polynomial degree overflow (>= 128 in one variable)"
    );
    s
}

#[inline]
fn mono_divides(d: Mono, m: Mono) -> bool {
    (0..MAX_VARS).all(|v| mono_exp(d, v) <= mono_exp(m, v))
}

/// A polynomial; terms sorted by descending monomial, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Poly {
    terms: Vec<(Mono, Rational)>,
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms
            .len()
            .cmp(&other.terms.len())
            .then_with(|| self.terms.cmp(&other.terms))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly {
                terms: vec![(0, c)],
            }
        }
    }

    pub fn var(var: usize) -> Self {
        assert!(
            var < MAX_VARS,
            "at most {MAX_VARS} base coordinates are supported"
        );
        Poly {
            terms: vec![(mono_var(var), Rational::one())],
        }
    }

    /// Builds from arbitrary terms, merging duplicates.
    pub fn from_terms(mut terms: Vec<(Mono, Rational)>) -> Self {
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        let mut out: Vec<(Mono, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if lc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some((_, lc)) = out.last() {
            if lc.is_zero() {
                out.pop();
            }
        }
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Mono, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn leading(&self) -> Option<&(Mono, Rational)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| (0..MAX_VARS).map(|v| mono_exp(*m, v)).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(
            b[j..]
                .iter()
                .map(|(m, c)| (*m, if negate { -c } else { c.clone() })),
        );
        Poly { terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        // Integer products over a common denominator, normalized once per
        // output term.
        let (da, a) = self.integer_form();
        let (db, b) = other.integer_form();
        let mut terms = Vec::with_capacity(a.len() * b.len());
        for (ma, ca) in &a {
            for (mb, cb) in &b {
                terms.push((mono_mul(*ma, *mb), ca * cb));
            }
        }
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        let den = da * db;
        let mut out: Vec<(Mono, Rational)> = Vec::with_capacity(terms.len());
        let mut iter = terms.into_iter().peekable();
        while let Some((m, mut c)) = iter.next() {
            while let Some((_, c2)) = iter.next_if(|(m2, _)| *m2 == m) {
                c += c2;
            }
            if c.is_zero() {
                continue;
            }
            let q = if den.is_one() {
                Rational::from_integer(c)
            } else {
                Rational::new(c, den.clone())
            };
            out.push((m, q));
        }
        Poly { terms: out }
    }

    /// `(d, P)` with `self = P / d` and `P` integral.
    fn integer_form(&self) -> (BigInt, Vec<(Mono, BigInt)>) {
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            if !c.denom().is_one() {
                den = den.lcm(c.denom());
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let k = if c.denom().is_one() {
                    c.numer() * &den
                } else {
                    c.numer() * (&den / c.denom())
                };
                (*m, k)
            })
            .collect();
        (den, terms)
    }

    pub fn mul_mono(&self, m: Mono, c: &Rational) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(tm, tc)| (mono_mul(*tm, m), tc * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derive(&self, var: usize) -> Poly {
        let s = shift(var);
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let e = mono_exp(*m, var);
                (e > 0).then(|| (m - (1u64 << s), c * Rational::from_integer(e.into())))
            })
            .collect();
        // Lowering one exponent keeps lexicographic order intact.
        Poly { terms }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading().expect("division by the zero polynomial");
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(Rational::one() / c)));
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if !self.may_be_divisible_by(d) {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.leading().cloned() {
            if !mono_divides(*dm, rm) {
                return None;
            }
            let qm = rm - dm;
            let qc = &rc / dc;
            rem = rem.sub(&d.mul_mono(qm, &qc));
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Cheap necessary conditions for `d | self`: degrees, trailing
    /// monomials and exact division modulo a prime.
    fn may_be_divisible_by(&self, d: &Poly) -> bool {
        let (Some((pt, _)), Some((dt, _))) = (self.terms.last(), d.terms.last()) else {
            return true;
        };
        if !mono_divides(*dt, *pt) {
            return false;
        }
        for v in 0..MAX_VARS {
            let top = |q: &Poly| {
                q.terms
                    .iter()
                    .map(|(m, _)| mono_exp(*m, v))
                    .max()
                    .unwrap_or(0)
            };
            if top(d) > top(self) {
                return false;
            }
        }
        match (modular::reduce(self), modular::reduce(d)) {
            (Some(a), Some(b)) => modular::divides(&a, &b),
            _ => true,
        }
    }

    /// Splits into `content * primitive` where `primitive` has leading
    /// coefficient one.
    pub fn monic(&self) -> (Rational, Poly) {
        match self.leading() {
            None => (Rational::zero(), Poly::zero()),
            Some((_, lc)) => {
                let lc = lc.clone();
                let inv = Rational::one() / &lc;
                (lc, self.scale(&inv))
            }
        }
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, x) in point.iter().enumerate().take(MAX_VARS) {
                let e = mono_exp(*m, v);
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_float<T: num_traits::Float + num_traits::FromPrimitive>(&self, point: &[T]) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = rational_to_float::<T>(c);
            for (v, x) in point.iter().enumerate().take(MAX_VARS) {
                let e = mono_exp(*m, v);
                if e > 0 {
                    t = t * x.powi(e as i32);
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Sum of absolute values of the terms at `point`; used as a scale for
    /// numeric zero tests.
    pub fn eval_abs_float<T: num_traits::Float + num_traits::FromPrimitive>(
        &self,
        point: &[T],
    ) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = rational_to_float::<T>(c).abs();
            for (v, x) in point.iter().enumerate().take(MAX_VARS) {
                let e = mono_exp(*m, v);
                if e > 0 {
                    t = t * x.abs().powi(e as i32);
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || *m == 0 {
                factors.push(format_rational(&abs));
            }
            for (v, name) in names.iter().enumerate().take(MAX_VARS) {
                match mono_exp(*m, v) {
                    0 => {}
                    1 => factors.push(name.clone()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

pub fn rational_to_float<T: num_traits::Float + num_traits::FromPrimitive>(q: &Rational) -> T {
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        T::from_f64(n / d).unwrap_or_else(T::nan)
    } else {
        // Fall back on string scaling for huge numerators or denominators.
        let bits = q.numer().bits().max(q.denom().bits()) as i64 - 900;
        let scale = num_bigint::BigInt::from(1u8) << (bits.max(0) as usize);
        let n = (q.numer() / &scale).to_f64().unwrap_or(0.0);
        let d = (q.denom() / &scale).to_f64().unwrap_or(1.0);
        T::from_f64(n / d).unwrap_or_else(T::nan)
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        let mut s = String::new();
        let _ = write!(s, "{}/{}", q.numer(), q.denom());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn arithmetic_and_display() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = x.add(&y).pow(2);
        assert_eq!(p.display(&names()), "x^2 + 2*x*y + y^2");
        let d = p
            .sub(&x.mul(&x))
            .sub(&y.mul(&y))
            .sub(&x.mul(&y).scale(&q(2)));
        assert!(d.is_zero());
        assert_eq!(Poly::one().sub(&x).display(&names()), "-x + 1");
    }

    #[test]
    fn exact_division() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let f = Poly::one().sub(&x.mul(&x)).sub(&y.mul(&y));
        let p = f.pow(3).mul(&x.add(&Poly::constant(q(3))));
        let quot = p.div_exact(&f).unwrap();
        assert_eq!(quot, f.pow(2).mul(&x.add(&Poly::constant(q(3)))));
        assert!(x.add(&Poly::one()).div_exact(&f).is_none());
    }

    #[test]
    fn derivative_and_eval() {
        let x = Poly::var(0);
        let p = x.pow(3).scale(&q(2));
        assert_eq!(p.derive(0), x.pow(2).scale(&q(6)));
        assert_eq!(p.derive(1), Poly::zero());
        assert_eq!(p.eval_rational(&[q(3)]), q(54));
        assert_eq!(p.eval_float(&[3.0f64]), 54.0);
    }
}

/// Polynomials over `Z / (2^61 - 1)`, used to reject non-divisors early.
mod modular {
    use std::collections::BTreeMap;

    use num_bigint::BigInt;
    use num_traits::{ToPrimitive, Zero};

    use super::{mono_divides, Mono, Poly};
    use crate::Rational;

    const P: u64 = (1 << 61) - 1;

    fn mul(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }

    fn pow(mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        acc
    }

    fn inv(a: u64) -> u64 {
        pow(a, P - 2)
    }

    fn residue(n: &BigInt) -> u64 {
        let r = n % BigInt::from(P);
        let r = if r < BigInt::zero() {
            r + BigInt::from(P)
        } else {
            r
        };
        r.to_u64().expect("residue below the modulus")
    }

    /// `None` when a coefficient has a denominator divisible by the prime
    /// or a coefficient vanishes modulo it.
    pub(super) fn reduce(p: &Poly) -> Option<Vec<(Mono, u64)>> {
        p.terms
            .iter()
            .map(|(m, c): &(Mono, Rational)| {
                let (n, d) = (residue(c.numer()), residue(c.denom()));
                (n != 0 && d != 0).then(|| (*m, mul(n, inv(d))))
            })
            .collect()
    }

    /// Whether `d` divides `p` modulo the prime; both sorted by descending
    /// monomial with nonzero coefficients.
    pub(super) fn divides(p: &[(Mono, u64)], d: &[(Mono, u64)]) -> bool {
        let (dm, dc) = d[0];
        let dinv = inv(dc);
        let mut rem: BTreeMap<Mono, u64> = p.iter().copied().collect();
        while let Some((&rm, &rc)) = rem.iter().next_back() {
            if !mono_divides(dm, rm) {
                return false;
            }
            let q = mul(rc, dinv);
            let qm = rm - dm;
            for &(m, c) in d {
                let key = m + qm;
                let sub = mul(q, c);
                let e = rem.entry(key).or_insert(0);
                *e = (*e + P - sub) % P;
                if *e == 0 {
                    rem.remove(&key);
                }
            }
        }
        true
    }
}
