//! Zero testing with a seeded numeric fallback.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::coeff::{Coeff, Decision};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroStatus {
    SymbolicZero,
    NumericZero,
    Nonzero,
}

impl ZeroStatus {
    pub fn is_zero(self) -> bool {
        self != ZeroStatus::Nonzero
    }

    /// Weakest of two statuses.
    pub fn and(self, other: ZeroStatus) -> ZeroStatus {
        use ZeroStatus::*;
        match (self, other) {
            (Nonzero, _) | (_, Nonzero) => Nonzero,
            (NumericZero, _) | (_, NumericZero) => NumericZero,
            _ => SymbolicZero,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ZeroStatus::SymbolicZero => "symbolic-zero",
            ZeroStatus::NumericZero => "numeric-zero",
            ZeroStatus::Nonzero => "nonzero",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroTest {
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            samples: 5,
            tolerance: 1e-9,
            seed: 0,
        }
    }
}

impl ZeroTest {
    pub fn with_seed(seed: u64) -> Self {
        ZeroTest {
            seed,
            ..Default::default()
        }
    }

    /// Seeded sample points in `[-1/2, 1/2]^nvars`, on a 1/64 grid.
    pub fn points(&self, nvars: usize, count: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..count)
            .map(|_| {
                (0..nvars)
                    .map(|_| rng.gen_range(-32i32..=32) as f64 / 64.0 + 1.0 / 128.0)
                    .collect()
            })
            .collect()
    }

    pub fn coeff_status(&self, c: &Coeff, nvars: usize) -> ZeroStatus {
        match c.decide_zero() {
            Decision::Zero => ZeroStatus::SymbolicZero,
            Decision::Nonzero => ZeroStatus::Nonzero,
            Decision::Undecided => {
                let mut checked = 0;
                for point in self.points(nvars, self.samples * 4) {
                    let Ok((value, scale)) = c.eval_float_with_scale(&point) else {
                        continue;
                    };
                    if value.abs() > self.tolerance * scale.max(f64::MIN_POSITIVE) {
                        return ZeroStatus::Nonzero;
                    }
                    checked += 1;
                    if checked == self.samples {
                        break;
                    }
                }
                if checked == 0 {
                    ZeroStatus::Nonzero
                } else {
                    ZeroStatus::NumericZero
                }
            }
        }
    }
}
