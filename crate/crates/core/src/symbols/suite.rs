//! Seeded batches of global symbols, each checked against reciprocity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{hilbert2_global, symbol_global, Rat};
use crate::arith::{EisInt, FieldElem};
use crate::brauer::BrauerClass;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSample {
    pub a: String,
    pub b: String,
    pub class: BrauerClass,
    pub reciprocity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReciprocitySuite {
    pub n: u64,
    pub count: usize,
    pub seed: u64,
    pub failures: usize,
    pub samples: Vec<SuiteSample>,
}

fn nonzero(rng: &mut ChaCha8Rng, r: i64) -> i64 {
    loop {
        let x = rng.gen_range(-r..=r);
        if x != 0 {
            return x;
        }
    }
}

fn eis(rng: &mut ChaCha8Rng) -> Result<FieldElem> {
    loop {
        let x = EisInt::new(rng.gen_range(-60..=60), rng.gen_range(-60..=60));
        if !x.is_zero() {
            return FieldElem::from_eis(&x);
        }
    }
}

/// `count` random pairs at level 2 (over ℚ) or 3 (over ℚ(ζ₃)).
pub fn reciprocity_suite(n: u64, count: usize, seed: u64) -> Result<ReciprocitySuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let (a, b, class) = match n {
            2 => {
                let a = Rat::new(nonzero(&mut rng, 500), nonzero(&mut rng, 50).abs());
                let b = Rat::new(nonzero(&mut rng, 500), nonzero(&mut rng, 50).abs());
                (a.to_string(), b.to_string(), hilbert2_global(&a, &b)?)
            }
            3 => {
                let (a, b) = (eis(&mut rng)?, eis(&mut rng)?);
                (a.to_string(), b.to_string(), symbol_global(&a, &b, 3)?)
            }
            _ => return Err(Error::Invalid(format!("reciprocity suites run at levels 2 and 3, not {n}"))),
        };
        let reciprocity = class.reciprocity_check();
        samples.push(SuiteSample { a, b, class, reciprocity });
    }
    Ok(ReciprocitySuite { n, count, seed, failures: samples.iter().filter(|s| !s.reciprocity).count(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_are_deterministic() {
        for n in [2, 3] {
            let s = reciprocity_suite(n, 10, 4).unwrap();
            assert_eq!(s.failures, 0);
            assert_eq!(s, reciprocity_suite(n, 10, 4).unwrap());
        }
        assert!(reciprocity_suite(5, 1, 0).is_err());
    }
}
