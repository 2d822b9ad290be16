//! Euler products ∏_p (1 − s_p) with a certified enclosure of the omitted
//! tail.
//!
//! The generic local factor is an exact rational function of x = 1/p. For a
//! factor with 0 ≤ s_p ≤ C/p^e (e ≥ 2) the omitted primes p > B contribute a
//! factor in [1 − C·T_e(B), 1], where T_e(B) is an explicit rational upper
//! bound for Σ_{p>B} p^{−e}.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{require_prime, Result, WdlError};
use crate::local::to_f64;

/// N(x)/D(x) with integer coefficients listed from the constant term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFn {
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

impl RatFn {
    pub fn new(num: Vec<i64>, den: Vec<i64>) -> Self {
        RatFn { num, den }
    }

    /// A polynomial factor.
    pub fn poly(num: Vec<i64>) -> Self {
        RatFn { num, den: vec![1] }
    }

    fn coeff(c: &[i64], i: usize) -> i64 {
        c.get(i).copied().unwrap_or(0)
    }

    /// s = 1 − N/D = (D − N)/D at x, in floating point.
    fn s_at(&self, x: f64) -> f64 {
        let len = self.num.len().max(self.den.len());
        let diff: Vec<i64> = (0..len).map(|i| Self::coeff(&self.den, i) - Self::coeff(&self.num, i)).collect();
        horner(&diff, x) / horner(&self.den, x)
    }

    /// The factor N(1/p)/D(1/p) exactly.
    pub fn eval_exact(&self, p: u64) -> BigRational {
        let x = BigRational::new(BigInt::one(), BigInt::from(p));
        let ev = |c: &[i64]| c.iter().rev().fold(BigRational::zero(), |acc, &ci| acc * &x + BigRational::from_integer(ci.into()));
        ev(&self.num) / ev(&self.den)
    }
}

fn horner(c: &[i64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci as f64)
}

/// A product over all primes of a generic factor, with exact factors at
/// listed primes, truncated at `bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerProductSpec {
    /// The generic factor 1 − s_p as a function of x = 1/p.
    pub factor: RatFn,
    /// Exact factors replacing the generic one at these primes (included
    /// whatever the bound).
    pub special: BTreeMap<u64, BigRational>,
    /// Primes p ≤ bound are multiplied out.
    pub bound: u64,
    /// s_p ≤ c / p^e for every prime beyond the bound.
    pub c: BigRational,
    pub e: u32,
}

/// Value of a truncated product and a certified enclosure of the full one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerProduct {
    /// ∏_{p ≤ B} (including special primes).
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub bound: u64,
    /// Number of generic primes multiplied out.
    pub primes: usize,
    /// c·T_e(B), the bound used for Σ_{p>B} s_p.
    pub tail_bound: BigRational,
}

impl EulerProduct {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Rational upper bound for Σ_{p>B} p^{−e}, e ≥ 2.
///
/// For B ≥ 3 every prime beyond B is ≡ ±1 (mod 6); each block of six
/// consecutive integers above B holds two such numbers, giving
/// 2/B^e + 1/(3(e−1)B^{e−1}). For smaller B the integral bound
/// 1/((e−1)B^{e−1}) over all integers is used.
pub fn prime_tail_bound(b: u64, e: u32) -> BigRational {
    assert!(e >= 2 && b >= 1, "tail bound needs e >= 2 and B >= 1");
    let bb = BigInt::from(b);
    let e1 = BigInt::from(e - 1);
    if b >= 3 {
        BigRational::new(BigInt::from(2), bb.pow(e)) + BigRational::new(BigInt::one(), 3 * e1 * bb.pow(e - 1))
    } else {
        BigRational::new(BigInt::one(), e1 * bb.pow(e - 1))
    }
}

/// Primes up to n (inclusive).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    primal::Sieve::new(n as usize).primes_from(2).take_while(|&p| p as u64 <= n).map(|p| p as u64).collect()
}

impl EulerProductSpec {
    /// A product with no special primes.
    pub fn new(factor: RatFn, bound: u64, c: BigRational, e: u32) -> Self {
        EulerProductSpec { factor, special: BTreeMap::new(), bound, c, e }
    }

    /// ∏(1 − p^{−s}) = 1/ζ(s).
    pub fn inverse_zeta(s: u32, bound: u64) -> Self {
        let mut num = vec![0; s as usize + 1];
        num[0] = 1;
        num[s as usize] = -1;
        Self::new(RatFn::poly(num), bound, BigRational::one(), s)
    }

    /// ∏(1 − p^{−2})/(1 − p^{−10}) = ζ(10)/ζ(2): curves semistable at p.
    pub fn semistable_curve(bound: u64) -> Self {
        Self::new(RatFn::new(vec![1, 0, -1], pow_x(10)), bound, q(1024, 1023), 2)
    }

    /// ∏(1 − 2/p² + 1/p³): square-free discriminant at p.
    pub fn squarefree_disc(bound: u64) -> Self {
        Self::new(RatFn::poly(vec![1, 0, -2, 1]), bound, q(2, 1), 2)
    }

    /// ∏(1 − 2/p² + 1/p³)/(1 − p^{−10}): square-free minimal discriminant.
    pub fn squarefree_minimal_disc(bound: u64) -> Self {
        Self::new(RatFn::new(vec![1, 0, -2, 1], pow_x(10)), bound, q(2048, 1023), 2)
    }

    pub fn with_special(mut self, p: u64, factor: BigRational) -> Self {
        self.special.insert(p, factor);
        self
    }

    pub fn with_bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(WdlError::InvalidArgument(m));
        if self.bound < 1 {
            return bad("product bound must be at least 1".into());
        }
        if self.e < 2 {
            return bad(format!("tail exponent {} gives a divergent tail; need s_p = O(1/p^2)", self.e));
        }
        let f = &self.factor;
        if RatFn::coeff(&f.den, 0) == 0 {
            return bad("local factor has a pole at x = 0".into());
        }
        for i in 0..2 {
            if RatFn::coeff(&f.den, i) != RatFn::coeff(&f.num, i) {
                return bad("local factor is not 1 - O(1/p^2): the product diverges or tends to 0".into());
            }
        }
        for &p in self.special.keys() {
            require_prime(p)?;
        }
        // Spot-check 0 ≤ s_p ≤ c/p^e on primes just beyond the bound.
        let c = to_f64(&self.c);
        let start = self.bound.saturating_add(1);
        let probe = primal::Primes::all().skip_while(|&p| (p as u64) < start).take(200);
        for p in probe {
            let pf = p as f64;
            let s = f.s_at(1.0 / pf);
            if s < 0.0 || s > 1.0 || s * pf.powi(self.e as i32) > c * (1.0 + 1e-12) {
                return bad(format!("s_p <= c/p^e fails at p = {p}"));
            }
        }
        Ok(())
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// 1 − x^k.
fn pow_x(k: usize) -> Vec<i64> {
    let mut v = vec![0; k + 1];
    v[0] = 1;
    v[k] = -1;
    v
}

/// Multiplies out the product to its bound and encloses the omitted tail.
pub fn euler_product(spec: &EulerProductSpec) -> Result<EulerProduct> {
    spec.validate()?;
    let primes = primes_up_to(spec.bound);
    // Σ log(1 − s_p) with compensated summation.
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut used = 0usize;
    for &p in &primes {
        if spec.special.contains_key(&p) {
            continue;
        }
        let term = (-spec.factor.s_at(1.0 / p as f64)).ln_1p();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        used += 1;
    }
    let special: f64 = spec.special.values().map(to_f64).product();
    let value = sum.exp() * special;
    let tail_bound = &spec.c * prime_tail_bound(spec.bound, spec.e);
    let tail = to_f64(&tail_bound).min(1.0);
    // Allowance for floating-point rounding in the accumulated product.
    let rounding = (used as f64 + 16.0) * 4.0 * f64::EPSILON;
    Ok(EulerProduct {
        value,
        lower: value * (1.0 - tail) * (1.0 - rounding),
        upper: value * (1.0 + rounding),
        bound: spec.bound,
        primes: used,
        tail_bound,
    })
}

/// ζ(s) enclosed via 1/∏(1 − p^{−s}).
pub fn zeta(s: u32, bound: u64) -> Result<(f64, f64)> {
    let r = euler_product(&EulerProductSpec::inverse_zeta(s, bound))?;
    Ok((1.0 / r.upper, 1.0 / r.lower))
}
