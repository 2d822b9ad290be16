//! Exhaustive counts over small height boxes, and exact residue-class counts
//! over boxes of any size.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::predicate::{Evaluator, Outcome};
use super::{GlobalProperty, HeightBox};
use crate::error::{Result, WdlError};
use crate::weierstrass::WeierstrassEq;

/// Largest box enumerated by default.
pub const DEFAULT_BOX_LIMIT: u64 = 100_000_000;

/// Exact hit count of one property over a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRow {
    pub property: String,
    pub hits: u64,
    pub undetermined: u64,
    /// hits / (cardinality − singular).
    pub density: BigRational,
}

/// Result of enumerating a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub x: String,
    pub bound: u64,
    pub cardinality: u64,
    /// Tuples with Δ = 0, excluded from every property.
    pub singular: u64,
    pub rows: Vec<BoxRow>,
}

#[derive(Clone)]
struct Tally {
    singular: u64,
    hits: Vec<u64>,
    undetermined: Vec<u64>,
}

impl Tally {
    fn new(k: usize) -> Self {
        Tally { singular: 0, hits: vec![0; k], undetermined: vec![0; k] }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.singular += o.singular;
        for i in 0..self.hits.len() {
            self.hits[i] += o.hits[i];
            self.undetermined[i] += o.undetermined[i];
        }
        self
    }
}

/// Counts, for every tuple in the box, which properties hold (primes up to
/// `bound` tested directly). Work is split by the value of a1.
pub fn enumerate_box(hbox: &HeightBox, properties: &[GlobalProperty], bound: u64, limit: u64) -> Result<BoxCount> {
    let card = hbox.cardinality();
    let size = card.to_u64().filter(|&c| c <= limit).ok_or_else(|| WdlError::BoxTooLarge {
        size: card.to_string(),
        limit,
    })?;
    let evs: Vec<Evaluator> = properties.iter().map(|p| Evaluator::new(p, bound)).collect::<Result<_>>()?;
    let b = hbox.small_bounds().expect("a box within the limit has machine-size sides");
    let k = evs.len();
    let tally = (-b[0]..=b[0])
        .into_par_iter()
        .map(|a1| {
            let mut t = Tally::new(k);
            for a2 in -b[1]..=b[1] {
                for a3 in -b[2]..=b[2] {
                    for a4 in -b[3]..=b[3] {
                        for a6 in -b[4]..=b[4] {
                            let e = WeierstrassEq::from_i64([a1, a2, a3, a4, a6]);
                            let inv = e.invariants();
                            if inv.delta.is_zero() {
                                t.singular += 1;
                                continue;
                            }
                            for (i, ev) in evs.iter().enumerate() {
                                match ev.evaluate_with(&e, &inv) {
                                    Outcome::Hit => t.hits[i] += 1,
                                    Outcome::Undetermined => t.undetermined[i] += 1,
                                    Outcome::Miss => {}
                                }
                            }
                        }
                    }
                }
            }
            t
        })
        .reduce(|| Tally::new(k), Tally::merge);
    let nonsingular = size - tally.singular;
    let rows = properties
        .iter()
        .enumerate()
        .map(|(i, p)| BoxRow {
            property: p.to_string(),
            hits: tally.hits[i],
            undetermined: tally.undetermined[i],
            density: BigRational::new(tally.hits[i].into(), nonsingular.max(1).into()),
        })
        .collect();
    Ok(BoxCount { x: hbox.x.to_string(), bound, cardinality: size, singular: tally.singular, rows })
}

/// #{t ∈ [−n, n] : t ≡ r (mod m)}.
fn count_residue(n: &BigInt, r: u64, m: u64) -> BigInt {
    let (m, r) = (BigInt::from(m), BigInt::from(r));
    let lo: BigInt = -n - 1 - &r;
    (n - &r).div_floor(&m) - lo.div_floor(&m)
}

/// The fraction of tuples with |a_i| ≤ X^{weights_i} lying in the residue
/// class `residues` mod M. The box is a product, so the count is exact
/// coordinate by coordinate.
pub fn congruence_box_density(modulus: u64, residues: [u64; 5], x: u64, weights: [u32; 5]) -> Result<BigRational> {
    if modulus < 1 || x < 1 {
        return Err(WdlError::InvalidArgument("modulus and X must be positive".into()));
    }
    let mut hits = BigInt::from(1);
    let mut total = BigInt::from(1);
    for (r, w) in residues.iter().zip(weights) {
        let n = BigInt::from(x).pow(w);
        hits *= count_residue(&n, r % modulus, modulus);
        total *= 2 * n + 1;
    }
    Ok(BigRational::new(hits, total))
}
