//! Global (height-ordered) densities of integral Weierstrass equations:
//! Euler products with certified tails ([`euler`]), the predicted densities
//! of global properties ([`expected`]), exhaustive small-box counts
//! ([`boxes`]), seeded Monte Carlo over large boxes with bounded-prime
//! property tests ([`mc`]), and the square-free a³ − b² demonstration
//! ([`a3b2`]).

pub mod a3b2;
pub mod boxes;
pub mod euler;
pub mod expected;
pub mod factor;
pub mod mc;
pub mod predicate;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{require_prime, Result, WdlError};
use crate::script::TypeLabel;
use crate::weierstrass::WEIGHTS;

pub use a3b2::{a3b2_census, squarefree_a3b2_demo, A3b2Census, MAX_A3B2_X};
pub use boxes::{congruence_box_density, enumerate_box, BoxCount, BoxRow, DEFAULT_BOX_LIMIT};
pub use euler::{euler_product, prime_tail_bound, primes_up_to, zeta, EulerProduct, EulerProductSpec, RatFn};
pub use expected::{
    expected_density, expected_density_at, product_spec, single_bad_prime_comparator, ExpectedDensity, DEFAULT_PRODUCT_BOUND,
};
pub use mc::{mc_global, prime_conductor_scan, tail_density_probe, GlobalMcConfig, ScanRow, TailFamily, TailProbe, TailRow};
pub use predicate::{Evaluator, Outcome};

/// A global property of an integral Weierstrass equation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GlobalProperty {
    /// Minimal at every prime.
    GloballyMinimal,
    /// Minimal with good or multiplicative reduction at every prime.
    SemistableEquation,
    /// The curve has good or multiplicative reduction at every prime.
    SemistableCurve,
    /// No prime p ≤ B with p² | Δ (always a truncated statement).
    SquarefreeDisc,
    /// The minimal discriminant is square-free.
    SquarefreeMinimalDisc,
    /// The curve has good reduction at each listed prime; optionally
    /// semistable at every other prime.
    GoodAt { primes: Vec<u64>, semistable_elsewhere: bool },
    /// The curve has the given finite type at each listed prime; optionally
    /// semistable at every other prime.
    TypeAt { conditions: Vec<(u64, TypeLabel)>, semistable_elsewhere: bool },
    /// Exactly one prime p ≤ X divides Δ.
    SingleBadPrimeBelow(u64),
}

impl GlobalProperty {
    /// Checks the parameters.
    pub fn validate(&self) -> Result<()> {
        match self {
            GlobalProperty::GoodAt { primes, .. } => {
                if primes.is_empty() {
                    return Err(WdlError::InvalidArgument("good-at needs at least one prime".into()));
                }
                for &p in primes {
                    require_prime(p)?;
                }
            }
            GlobalProperty::TypeAt { conditions, .. } => {
                if conditions.is_empty() {
                    return Err(WdlError::InvalidArgument("type-at needs at least one condition".into()));
                }
                let mut seen = std::collections::BTreeSet::new();
                for &(p, t) in conditions {
                    require_prime(p)?;
                    if t == TypeLabel::NonMinimal {
                        return Err(WdlError::InvalidArgument("a type condition must name a finite reduction type".into()));
                    }
                    if !seen.insert(p) {
                        return Err(WdlError::InvalidArgument(format!("prime {p} is given two type conditions")));
                    }
                }
            }
            GlobalProperty::SingleBadPrimeBelow(x) if *x < 2 => {
                return Err(WdlError::InvalidArgument("the prime cutoff must be at least 2".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// The per-prime conditions (p, type) of a finite-set property.
    pub fn conditions(&self) -> Vec<(u64, TypeLabel)> {
        match self {
            GlobalProperty::GoodAt { primes, .. } => primes.iter().map(|&p| (p, TypeLabel::I0)).collect(),
            GlobalProperty::TypeAt { conditions, .. } => conditions.clone(),
            _ => Vec::new(),
        }
    }

    /// Short machine name.
    pub fn name(&self) -> &'static str {
        match self {
            GlobalProperty::GloballyMinimal => "globally-minimal",
            GlobalProperty::SemistableEquation => "semistable-equation",
            GlobalProperty::SemistableCurve => "semistable-curve",
            GlobalProperty::SquarefreeDisc => "squarefree-disc",
            GlobalProperty::SquarefreeMinimalDisc => "squarefree-minimal-disc",
            GlobalProperty::GoodAt { .. } => "good-at",
            GlobalProperty::TypeAt { .. } => "type-at",
            GlobalProperty::SingleBadPrimeBelow(_) => "single-bad-prime",
        }
    }

    /// How primes beyond the tested bound B are treated.
    pub fn tail_treatment(&self) -> &'static str {
        match self {
            GlobalProperty::GloballyMinimal
            | GlobalProperty::SemistableEquation
            | GlobalProperty::SemistableCurve => {
                "primes above B are located among the prime factors of gcd(c4, c6); tail_allowance bounds the gap to the truncated product"
            }
            GlobalProperty::SquarefreeDisc => "truncated: only primes p <= B are tested; tail_allowance = sum over p > B of 2/p^2",
            GlobalProperty::SquarefreeMinimalDisc => {
                "additive and non-minimal primes above B via gcd(c4, c6); multiplicative p^2 | disc only for p <= B; tail_allowance bounds the rest"
            }
            GlobalProperty::GoodAt { semistable_elsewhere: false, .. }
            | GlobalProperty::TypeAt { semistable_elsewhere: false, .. } => "finite set of primes: no tail",
            GlobalProperty::GoodAt { .. } | GlobalProperty::TypeAt { .. } => {
                "listed primes exactly; semistability elsewhere as for semistable-curve"
            }
            GlobalProperty::SingleBadPrimeBelow(_) => "finite set of primes p <= X: no tail",
        }
    }
}

impl fmt::Display for GlobalProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalProperty::GoodAt { primes, semistable_elsewhere } => {
                let ps: Vec<String> = primes.iter().map(u64::to_string).collect();
                write!(f, "good-at{{{}}}", ps.join(","))?;
                if *semistable_elsewhere {
                    write!(f, "+semistable-elsewhere")?;
                }
                Ok(())
            }
            GlobalProperty::TypeAt { conditions, semistable_elsewhere } => {
                let cs: Vec<String> = conditions.iter().map(|(p, t)| format!("{p}:{t}")).collect();
                write!(f, "type-at{{{}}}", cs.join(","))?;
                if *semistable_elsewhere {
                    write!(f, "+semistable-elsewhere")?;
                }
                Ok(())
            }
            GlobalProperty::SingleBadPrimeBelow(x) => write!(f, "single-bad-prime{{{x}}}"),
            other => f.write_str(other.name()),
        }
    }
}

/// The tuples with |a_i| ≤ X^{w_i} for the weights (1, 2, 3, 4, 6).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightBox {
    pub x: BigRational,
    /// floor(X^{w_i}) for each coordinate.
    pub bounds: [BigInt; 5],
}

impl HeightBox {
    pub fn new(x: BigRational) -> Result<Self> {
        if !x.is_positive() {
            return Err(WdlError::InvalidArgument("height bound X must be positive".into()));
        }
        let bounds = WEIGHTS.map(|w| num_traits::pow(x.clone(), w as usize).floor().to_integer());
        Ok(HeightBox { x, bounds })
    }

    pub fn integer(x: u64) -> Result<Self> {
        Self::new(BigRational::from_integer(x.into()))
    }

    /// ∏ (2·floor(X^{w_i}) + 1).
    pub fn cardinality(&self) -> BigInt {
        self.bounds.iter().map(|b| 2 * b + 1u32).product()
    }

    /// Side lengths as machine integers, when they fit.
    pub(crate) fn small_bounds(&self) -> Option<[i64; 5]> {
        let v: Vec<i64> = self.bounds.iter().map(|b| b.to_i64()).collect::<Option<_>>()?;
        Some([v[0], v[1], v[2], v[3], v[4]])
    }
}

/// A Monte Carlo estimate of a global density together with the
/// truncation bookkeeping needed to compare it with a truncated product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub property: String,
    pub x: String,
    pub n_samples: u64,
    pub seed: u64,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
    /// Primes p ≤ bound are tested directly.
    pub bound: u64,
    /// Bound on the density mass attributable to primes beyond `bound`.
    pub tail_allowance: BigRational,
    /// Samples whose outcome the factoring budget could not decide.
    pub undetermined: u64,
    pub undetermined_fraction: f64,
    /// Singular draws that were discarded and redrawn.
    pub singular_resampled: u64,
    /// ∏_{p ≤ bound} (1 − s_p), the comparator at this bound.
    pub truncated_product: f64,
    /// The predicted limiting density, when there is one.
    pub expected: Option<f64>,
}

impl EstimateReport {
    /// |estimate − truncated product| ≤ k·stderr + tail + undetermined.
    pub fn within(&self, k_sigma: f64) -> bool {
        self.deviation() <= self.tolerance(k_sigma)
    }

    pub fn deviation(&self) -> f64 {
        (self.estimate - self.truncated_product).abs()
    }

    pub fn tolerance(&self, k_sigma: f64) -> f64 {
        k_sigma * self.stderr + crate::local::to_f64(&self.tail_allowance) + self.undetermined_fraction
    }
}

/// hits/n and its binomial standard error.
pub(crate) fn proportion(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let est = hits as f64 / n as f64;
    (est, (est * (1.0 - est) / n as f64).sqrt())
}

pub(crate) fn is_zero_mod(n: &BigInt, m: u64) -> bool {
    (n % m).is_zero()
}
