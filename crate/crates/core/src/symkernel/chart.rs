//! Coordinate charts `R^{p|q}`: base coordinates plus graded generators.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::poly::MAX_VARS;
use crate::error::{Error, Result};
use crate::grading::{canonical_degree_order, Degree};

/// Most formal generators in one chart.
pub const MAX_GENS: usize = 16;

/// Default truncation order of non-nilpotent generators.
pub const DEFAULT_TRUNC: u32 = 4;

/// Monomial in the generators, eight bits of exponent per generator with
/// generator 0 in the most significant byte.
pub type GenMono = u128;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: Degree,
}

/// A coordinate system `x^I = (x^a, xi^A)`.
///
/// Coordinate indices run over the base coordinates first, then the
/// generators grouped by the canonical degree order (stable within one
/// degree). The order is fixed at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    n: usize,
    base: Vec<String>,
    gens: Vec<Generator>,
    trunc: u32,
    nilpotent: Vec<bool>,
    nil_mask: GenMono,
    weight_mask: GenMono,
}

#[inline]
fn gen_shift(g: usize) -> u32 {
    (8 * (MAX_GENS - 1 - g)) as u32
}

#[inline]
pub fn gen_exp(m: GenMono, g: usize) -> u32 {
    ((m >> gen_shift(g)) & 0xff) as u32
}

#[inline]
pub fn gen_unit(g: usize) -> GenMono {
    1u128 << gen_shift(g)
}

impl Chart {
    pub fn new(
        n: usize,
        base: Vec<String>,
        gens: Vec<Generator>,
        trunc: u32,
    ) -> Result<Arc<Chart>> {
        if base.len() > MAX_VARS {
            return Err(Error::Dimension(format!(
                "{} base coordinates exceed the supported maximum {MAX_VARS}",
                base.len()
            )));
        }
        if gens.len() > MAX_GENS {
            return Err(Error::Dimension(format!(
                "{} generators exceed the supported maximum {MAX_GENS}",
                gens.len()
            )));
        }
        if trunc > 100 {
            return Err(Error::Dimension(format!(
                "truncation order {trunc} is too large"
            )));
        }
        let mut seen = HashSet::new();
        for name in base.iter().chain(gens.iter().map(|g| &g.name)) {
            if name == "exp" || !is_identifier(name) {
                return Err(Error::Spec(format!(
                    "`{name}` is not a valid coordinate name"
                )));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::Spec(format!("duplicate coordinate name `{name}`")));
            }
        }
        for g in &gens {
            if g.degree.n() != n {
                return Err(Error::Dimension(format!(
                    "generator `{}` has a degree of length {}, expected {n}",
                    g.name,
                    g.degree.n()
                )));
            }
            if g.degree.is_zero() {
                return Err(Error::Degree(format!(
                    "generator `{}` has degree zero",
                    g.name
                )));
            }
        }
        let order = canonical_degree_order(n);
        let mut gens = gens;
        gens.sort_by_key(|g| order.position(g.degree).unwrap_or(usize::MAX));
        let nilpotent: Vec<bool> = gens.iter().map(|g| g.degree.dot(g.degree) == 1).collect();
        let mut nil_mask = 0;
        let mut weight_mask = 0;
        for (i, &nil) in nilpotent.iter().enumerate() {
            if nil {
                nil_mask |= gen_unit(i);
            } else {
                weight_mask |= 0xffu128 << gen_shift(i);
            }
        }
        Ok(Arc::new(Chart {
            n,
            base,
            gens,
            trunc,
            nilpotent,
            nil_mask,
            weight_mask,
        }))
    }

    /// Classical chart with `n = 0`.
    pub fn classical(base: &[&str]) -> Result<Arc<Chart>> {
        Chart::new(
            0,
            base.iter().map(|s| s.to_string()).collect(),
            Vec::new(),
            DEFAULT_TRUNC,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn with_trunc(&self, trunc: u32) -> Result<Arc<Chart>> {
        Chart::new(self.n, self.base.clone(), self.gens.clone(), trunc)
    }

    pub fn base_names(&self) -> &[String] {
        &self.base
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn p(&self) -> usize {
        self.base.len()
    }

    /// Total number of coordinates.
    pub fn dim(&self) -> usize {
        self.base.len() + self.gens.len()
    }

    pub fn coord_name(&self, i: usize) -> &str {
        if i < self.base.len() {
            &self.base[i]
        } else {
            &self.gens[i - self.base.len()].name
        }
    }

    pub fn coord_names(&self) -> Vec<String> {
        (0..self.dim())
            .map(|i| self.coord_name(i).to_string())
            .collect()
    }

    pub fn coord_degree(&self, i: usize) -> Degree {
        if i < self.base.len() {
            Degree::zero(self.n)
        } else {
            self.gens[i - self.base.len()].degree
        }
    }

    pub fn coord_degrees(&self) -> Vec<Degree> {
        (0..self.dim()).map(|i| self.coord_degree(i)).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        (0..self.dim()).find(|&i| self.coord_name(i) == name)
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.base.iter().position(|b| b == name)
    }

    /// Generator slot of coordinate `i`, if it is formal.
    pub fn gen_of(&self, i: usize) -> Option<usize> {
        i.checked_sub(self.base.len())
    }

    pub fn is_nilpotent(&self, g: usize) -> bool {
        self.nilpotent[g]
    }

    pub fn nilpotent_count(&self) -> usize {
        self.nilpotent.iter().filter(|&&b| b).count()
    }

    pub fn zero_degree(&self) -> Degree {
        Degree::zero(self.n)
    }

    /// Number of coordinates per degree, indexed like the canonical degree
    /// order (`q_0 = p`).
    pub fn degree_counts(&self) -> Vec<usize> {
        let order = canonical_degree_order(self.n);
        let mut counts = vec![0; order.len()];
        counts[0] = self.base.len();
        for g in &self.gens {
            counts[order.position(g.degree).expect("degree in order")] += 1;
        }
        counts
    }

    pub fn mono_degree(&self, m: GenMono) -> Degree {
        let mut d = self.zero_degree();
        for (g, gen) in self.gens.iter().enumerate() {
            if gen_exp(m, g) & 1 == 1 {
                d += gen.degree;
            }
        }
        d
    }

    /// Total power of the non-nilpotent generators.
    pub fn mono_weight(&self, m: GenMono) -> u32 {
        let w = m & self.weight_mask;
        if w == 0 {
            return 0;
        }
        (0..self.gens.len()).map(|g| gen_exp(w, g)).sum()
    }

    pub fn mono_exponents(&self, m: GenMono) -> Vec<u32> {
        (0..self.gens.len()).map(|g| gen_exp(m, g)).collect()
    }

    pub fn mono_from_exponents(&self, exps: &[u32]) -> Result<GenMono> {
        if exps.len() != self.gens.len() {
            return Err(Error::Dimension(format!(
                "monomial has {} exponents, chart has {} generators",
                exps.len(),
                self.gens.len()
            )));
        }
        let mut m = 0;
        for (g, &e) in exps.iter().enumerate() {
            if e > 127 {
                return Err(Error::Dimension("generator exponent too large".into()));
            }
            m |= (e as u128) << gen_shift(g);
        }
        Ok(m)
    }

    /// Product of two normal-ordered monomials: `None` when a nilpotent
    /// generator repeats, otherwise the merged monomial and the parity of
    /// the reordering sign.
    #[inline]
    pub fn mono_mul(&self, a: GenMono, b: GenMono) -> Option<(GenMono, u8)> {
        if a & b & self.nil_mask != 0 {
            return None;
        }
        if a == 0 || b == 0 {
            return Some((a | b, 0));
        }
        // Each generator of `a` moves past the generators of `b` that sit
        // strictly before it in the normal order.
        let mut parity = 0u8;
        let mut prefix = self.zero_degree();
        for g in 0..self.gens.len() {
            let ea = gen_exp(a, g);
            if ea & 1 == 1 {
                parity ^= self.gens[g].degree.dot(prefix);
            }
            if gen_exp(b, g) & 1 == 1 {
                prefix += self.gens[g].degree;
            }
        }
        let m = a + b;
        Some((m, parity))
    }

    pub fn mono_display(&self, m: GenMono) -> String {
        let mut parts = Vec::new();
        for (g, gen) in self.gens.iter().enumerate() {
            match gen_exp(m, g) {
                0 => {}
                1 => parts.push(gen.name.clone()),
                e => parts.push(format!("{}^{e}", gen.name)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Chart>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}
