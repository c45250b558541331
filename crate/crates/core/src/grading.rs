//! Z2^n degrees, the sign rule and the canonical ordering of degrees.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported `n`.
pub const MAX_N: usize = 16;

/// An element of Z2^n stored as a packed bit vector.
///
/// Bit `i` (counting from the least significant bit) holds component `i`
/// of the tuple, so `(1, 0)` has `bits == 0b01`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Degree {
    n: u8,
    bits: u16,
}

impl Degree {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_N, "n = {n} exceeds MAX_N");
        Degree {
            n: n as u8,
            bits: 0,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_N {
            return Err(Error::Dimension(format!(
                "degree of length {} exceeds the supported maximum {MAX_N}",
                bits.len()
            )));
        }
        let mut packed = 0u16;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => packed |= 1 << i,
                other => {
                    return Err(Error::Dimension(format!(
                        "degree component must be 0 or 1, got {other}"
                    )))
                }
            }
        }
        Ok(Degree {
            n: bits.len() as u8,
            bits: packed,
        })
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn bit(self, i: usize) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    pub fn to_bits(self) -> Vec<u8> {
        (0..self.n()).map(|i| self.bit(i)).collect()
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Total degree: the bit sum mod 2.
    pub fn parity(self) -> u8 {
        (self.bits.count_ones() & 1) as u8
    }

    pub fn is_even(self) -> bool {
        self.parity() == 0
    }

    pub fn checked_add(self, other: Degree) -> Result<Degree> {
        self.same_length(other)?;
        Ok(Degree {
            n: self.n,
            bits: self.bits ^ other.bits,
        })
    }

    pub fn checked_scalar_product(self, other: Degree) -> Result<u8> {
        self.same_length(other)?;
        Ok(self.dot(other))
    }

    /// Mod-2 scalar product without the length check. Callers inside one
    /// chart always share `n`.
    #[inline]
    pub fn dot(self, other: Degree) -> u8 {
        debug_assert_eq!(self.n, other.n);
        ((self.bits & other.bits).count_ones() & 1) as u8
    }

    fn same_length(self, other: Degree) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "degree lengths differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

impl std::ops::Add for Degree {
    type Output = Degree;

    fn add(self, rhs: Degree) -> Degree {
        debug_assert_eq!(self.n, rhs.n);
        Degree {
            n: self.n,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl std::ops::AddAssign for Degree {
    fn add_assign(&mut self, rhs: Degree) {
        *self = *self + rhs;
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.n() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.bit(i))?;
        }
        write!(f, ")")
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_bits().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(d)?;
        Degree::from_bits(&bits).map_err(serde::de::Error::custom)
    }
}

/// `<a, b>` = sum of `a_i b_i` mod 2.
pub fn scalar_product(a: Degree, b: Degree) -> Result<u8> {
    a.checked_scalar_product(b)
}

/// `(-1)^<a, b>`.
pub fn koszul_sign(a: Degree, b: Degree) -> Result<i8> {
    Ok(sign_of(a.checked_scalar_product(b)?))
}

#[inline]
pub fn sign_of(parity: u8) -> i8 {
    if parity & 1 == 0 {
        1
    } else {
        -1
    }
}

/// The 2^n degrees in index order: zero first, then the remaining even
/// degrees, then the odd ones. Within a parity class the tuples are listed
/// by increasing number of ones and, for equal weight, with the ones
/// filled in from the right before the left (so `(0,1)` precedes `(1,0)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeOrder {
    degrees: Vec<Degree>,
}

impl DegreeOrder {
    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn position(&self, d: Degree) -> Option<usize> {
        self.degrees.iter().position(|&x| x == d)
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }
}

pub fn canonical_degree_order(n: usize) -> DegreeOrder {
    assert!(n <= MAX_N, "n = {n} exceeds MAX_N");
    let mut degrees: Vec<Degree> = (0..(1u32 << n))
        .map(|bits| Degree {
            n: n as u8,
            bits: bits as u16,
        })
        .collect();
    degrees.sort_by_key(|d| {
        // Tuple read left to right as a binary number, so that (0,1) < (1,0).
        let mut value = 0u32;
        for i in 0..n {
            value = (value << 1) | d.bit(i) as u32;
        }
        (d.parity(), d.bits.count_ones(), value)
    });
    DegreeOrder { degrees }
}
