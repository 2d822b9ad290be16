//! Deciding a global property for one equation: per-prime tests at every
//! prime up to the bound, and, for properties whose failures beyond the
//! bound force p | gcd(c4, c6), at the prime factors of that gcd.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::factor::prime_factors;
use super::{is_zero_mod, GlobalProperty};
use crate::error::{Result, WdlError};
use crate::padic::valuation_unchecked;
use crate::script::TypeLabel;
use crate::tate::{curve_reduction_class, is_minimal, reduction_class, tate_local, ReductionClass};
use crate::weierstrass::{InvariantSet, WeierstrassEq};

/// Verdict for one equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Hit,
    Miss,
    /// A cofactor of gcd(c4, c6) resisted the factoring budget.
    Undetermined,
}

/// The per-prime condition imposed away from the listed primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Local {
    Minimal,
    SemistableEquation,
    SemistableCurve,
    SquarefreeDisc,
    SquarefreeMinimalDisc,
    Unrestricted,
}

/// A property prepared for repeated evaluation at a fixed prime bound.
#[derive(Debug, Clone)]
pub struct Evaluator {
    property: GlobalProperty,
    bound: u64,
    /// Primes tested directly: p ≤ max(bound, 3).
    primes: Vec<u64>,
    conditions: BTreeMap<u64, TypeLabel>,
    local: Local,
    /// Whether failures beyond the bound are searched for in gcd(c4, c6).
    beyond: bool,
}

impl Evaluator {
    pub fn new(property: &GlobalProperty, bound: u64) -> Result<Self> {
        property.validate()?;
        if bound < 2 {
            return Err(WdlError::InvalidArgument("prime bound B must be at least 2".into()));
        }
        let (local, beyond) = match property {
            GlobalProperty::GloballyMinimal => (Local::Minimal, true),
            GlobalProperty::SemistableEquation => (Local::SemistableEquation, true),
            GlobalProperty::SemistableCurve => (Local::SemistableCurve, true),
            GlobalProperty::SquarefreeDisc => (Local::SquarefreeDisc, false),
            GlobalProperty::SquarefreeMinimalDisc => (Local::SquarefreeMinimalDisc, true),
            GlobalProperty::GoodAt { semistable_elsewhere, .. } | GlobalProperty::TypeAt { semistable_elsewhere, .. } => {
                if *semistable_elsewhere {
                    (Local::SemistableCurve, true)
                } else {
                    (Local::Unrestricted, false)
                }
            }
            GlobalProperty::SingleBadPrimeBelow(_) => (Local::Unrestricted, false),
        };
        let top = match property {
            GlobalProperty::SingleBadPrimeBelow(x) => *x,
            _ if local == Local::Unrestricted => 1,
            _ => bound.max(3),
        };
        Ok(Evaluator {
            property: property.clone(),
            bound,
            primes: super::euler::primes_up_to(top),
            conditions: property.conditions().into_iter().collect(),
            local,
            beyond,
        })
    }

    pub fn property(&self) -> &GlobalProperty {
        &self.property
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Decides the property for a nonsingular equation.
    pub fn evaluate(&self, e: &WeierstrassEq) -> Result<Outcome> {
        let inv = e.invariants();
        if num_traits::Zero::is_zero(&inv.delta) {
            return Err(WdlError::Singular);
        }
        Ok(self.evaluate_with(e, &inv))
    }

    /// As [`Evaluator::evaluate`], with the invariants already computed (Δ ≠ 0).
    pub fn evaluate_with(&self, e: &WeierstrassEq, inv: &InvariantSet) -> Outcome {
        if let GlobalProperty::SingleBadPrimeBelow(_) = self.property {
            let bad = self.primes.iter().filter(|&&p| is_zero_mod(&inv.delta, p)).take(2).count();
            return if bad == 1 { Outcome::Hit } else { Outcome::Miss };
        }
        for (&p, &t) in &self.conditions {
            if curve_label(e, inv, p) != t {
                return Outcome::Miss;
            }
        }
        for &p in &self.primes {
            if self.conditions.contains_key(&p) || !is_zero_mod(&inv.delta, p) {
                continue;
            }
            if !local_ok(self.local, e, inv, p) {
                return Outcome::Miss;
            }
        }
        if !self.beyond {
            return Outcome::Hit;
        }
        // Beyond the bound (all such primes are ≥ 5), an additive or
        // non-minimal prime divides both c4 and c6.
        let mut g = inv.c4.gcd(&inv.c6);
        for &p in &self.primes {
            if g.is_one() {
                break;
            }
            while is_zero_mod(&g, p) {
                g /= p;
            }
        }
        if g.is_one() {
            return Outcome::Hit;
        }
        let Some(factors) = prime_factors(&g) else {
            return Outcome::Undetermined;
        };
        for q in factors {
            let q = q.to_u64().expect("prime factors of gcd(c4, c6) fit in u64 at supported heights");
            if self.conditions.contains_key(&q) {
                continue;
            }
            if !local_ok(self.local, e, inv, q) {
                return Outcome::Miss;
            }
        }
        Outcome::Hit
    }
}

/// Type of the curve at p.
fn curve_label(e: &WeierstrassEq, inv: &InvariantSet, p: u64) -> TypeLabel {
    if !is_zero_mod(&inv.delta, p) {
        return TypeLabel::I0;
    }
    if !is_zero_mod(&inv.c4, p) {
        return TypeLabel::Ige1;
    }
    tate_local(e, p).expect("nonsingular").kodaira.label()
}

/// The local condition at a prime p dividing Δ.
fn local_ok(local: Local, e: &WeierstrassEq, inv: &InvariantSet, p: u64) -> bool {
    let v = || valuation_unchecked(&inv.delta, p).finite().expect("Δ ≠ 0");
    // p | Δ and p ∤ c4: minimal with multiplicative reduction.
    let multiplicative = !is_zero_mod(&inv.c4, p);
    match local {
        Local::Unrestricted => true,
        Local::Minimal => v() < 12 || is_minimal(e, p).expect("nonsingular"),
        Local::SemistableEquation => {
            multiplicative || (p <= 3 && reduction_class(e, p).expect("nonsingular") == ReductionClass::Multiplicative)
        }
        Local::SemistableCurve => {
            multiplicative
                || ((p <= 3 || v() >= 12) && curve_reduction_class(e, p).expect("nonsingular") != ReductionClass::Additive)
        }
        Local::SquarefreeDisc => v() <= 1,
        Local::SquarefreeMinimalDisc => {
            let n = v();
            n <= 1 || (n >= 12 && {
                let d = tate_local(e, p).expect("nonsingular");
                d.n - 12 * d.level <= 1
            })
        }
    }
}
