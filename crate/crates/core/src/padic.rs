//! p-adic valuations, residues modulo prime powers, and root counting for
//! the monic quadratics and cubics over F_p that drive every branch test of
//! Tate's algorithm.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{require_prime, Result, WdlError};
use crate::fp;

/// Primes below this bound use exhaustive search over F_p; larger primes
/// use the algebraic (Legendre symbol / polynomial gcd) routines.
pub const BRUTE_FORCE_LIMIT: u64 = 128;

/// Primality test for 64-bit integers (deterministic Miller–Rabin).
pub fn is_prime(p: u64) -> bool {
    primal::is_prime(p)
}

/// A p-adic valuation: a non-negative integer, or infinity for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Val {
    Finite(u32),
    Infinity,
}

impl Val {
    pub fn is_finite(self) -> bool {
        matches!(self, Val::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Val::Finite(v) => Some(v),
            Val::Infinity => None,
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val::Finite(a), Val::Finite(b)) => a.cmp(b),
            (Val::Finite(_), Val::Infinity) => Ordering::Less,
            (Val::Infinity, Val::Finite(_)) => Ordering::Greater,
            (Val::Infinity, Val::Infinity) => Ordering::Equal,
        }
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinity,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(v) => write!(f, "{v}"),
            Val::Infinity => write!(f, "inf"),
        }
    }
}

/// The p-adic valuation of `n`.
pub fn valuation(n: &BigInt, p: u64) -> Result<Val> {
    require_prime(p)?;
    Ok(valuation_unchecked(n, p))
}

/// Valuation without the primality check (callers guarantee p prime).
pub fn valuation_unchecked(n: &BigInt, p: u64) -> Val {
    if n.is_zero() {
        return Val::Infinity;
    }
    let pb = BigInt::from(p);
    let mut v = 0u32;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Val::Finite(v);
        }
        m = q;
        v += 1;
    }
}

/// Valuation of a machine integer (p ≥ 2).
pub fn valuation_i128(n: i128, p: u64) -> Val {
    if n == 0 {
        return Val::Infinity;
    }
    let p = p as i128;
    let mut v = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    Val::Finite(v)
}

/// An element of Z/p^k Z, stored canonically in [0, p^k).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    p: u64,
    k: u32,
    modulus: BigInt,
    value: BigInt,
}

impl Residue {
    pub fn new(value: &BigInt, p: u64, k: u32) -> Result<Self> {
        require_prime(p)?;
        let modulus = BigInt::from(p).pow(k);
        let value = value.mod_floor(&modulus);
        Ok(Residue { p, k, modulus, value })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> u32 {
        self.k
    }
    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }
    pub fn value(&self) -> &BigInt {
        &self.value
    }

    fn same_ring(&self, other: &Residue) -> Result<()> {
        if self.p == other.p && self.k == other.k {
            Ok(())
        } else {
            Err(WdlError::InvalidArgument(format!(
                "residues modulo {}^{} and {}^{} cannot be combined",
                self.p, self.k, other.p, other.k
            )))
        }
    }

    fn with_value(&self, v: BigInt) -> Residue {
        Residue {
            p: self.p,
            k: self.k,
            modulus: self.modulus.clone(),
            value: v.mod_floor(&self.modulus),
        }
    }

    pub fn add(&self, other: &Residue) -> Result<Residue> {
        self.same_ring(other)?;
        Ok(self.with_value(&self.value + &other.value))
    }

    pub fn mul(&self, other: &Residue) -> Result<Residue> {
        self.same_ring(other)?;
        Ok(self.with_value(&self.value * &other.value))
    }

    pub fn neg(&self) -> Residue {
        self.with_value(-&self.value)
    }

    /// Exact truncation to precision `k2 ≤ k`.
    pub fn reduce(&self, k2: u32) -> Result<Residue> {
        if k2 > self.k {
            return Err(WdlError::InvalidArgument(format!(
                "cannot raise precision from {} to {}",
                self.k, k2
            )));
        }
        let modulus = BigInt::from(self.p).pow(k2);
        Ok(Residue {
            p: self.p,
            k: k2,
            value: self.value.mod_floor(&modulus),
            modulus,
        })
    }
}

/// Root data of a monic quadratic over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadRoots {
    /// Number of distinct roots in F_p (0, 1 or 2).
    pub roots: u32,
    /// True when the quadratic is a square (double root).
    pub double: bool,
}

impl QuadRoots {
    pub fn distinct(self) -> bool {
        !self.double
    }
    pub fn split(self) -> bool {
        self.roots == 2
    }
}

fn quad_eval(a1: u64, a2: u64, y: u64, p: u64) -> u64 {
    // y^2 + a1 y - a2
    fp::sub(fp::add(fp::mul(y, y, p), fp::mul(a1, y, p), p), a2, p)
}

/// Classifies y² + a1·y − a2 over F_p by exhaustive search.
pub fn quad_root_count_brute(a1: u64, a2: u64, p: u64) -> QuadRoots {
    let (a1, a2) = (a1 % p, a2 % p);
    let roots: Vec<u64> = (0..p).filter(|&y| quad_eval(a1, a2, y, p) == 0).collect();
    match roots.len() {
        0 => QuadRoots { roots: 0, double: false },
        1 => QuadRoots { roots: 1, double: true },
        _ => QuadRoots { roots: 2, double: false },
    }
}

/// Classifies y² + a1·y − a2 over F_p via its discriminant (p odd) .
pub fn quad_root_count_alg(a1: u64, a2: u64, p: u64) -> QuadRoots {
    if p == 2 {
        return quad_root_count_brute(a1, a2, p);
    }
    let d = fp::add(fp::mul(a1, a1, p), fp::mul(4, a2, p), p);
    match fp::legendre(d, p) {
        0 => QuadRoots { roots: 1, double: true },
        1 => QuadRoots { roots: 2, double: false },
        _ => QuadRoots { roots: 0, double: false },
    }
}

/// Classifies y² + a1·y − a2 over F_p: number of roots in F_p and whether
/// the root is double. Exhaustive for small p.
pub fn quad_root_count(a1: u64, a2: u64, p: u64) -> QuadRoots {
    if p < BRUTE_FORCE_LIMIT {
        quad_root_count_brute(a1, a2, p)
    } else {
        quad_root_count_alg(a1, a2, p)
    }
}

/// The double root of y² + a1·y − a2 (which must be a square) in F_p.
pub fn quad_double_root(a1: u64, a2: u64, p: u64) -> u64 {
    let (a1, a2) = (a1 % p, a2 % p);
    if p < BRUTE_FORCE_LIMIT {
        (0..p)
            .find(|&y| quad_eval(a1, a2, y, p) == 0)
            .expect("quadratic has no root")
    } else {
        // y0 = -a1/2
        fp::neg(fp::mul(a1, fp::inv(2, p), p), p)
    }
}

/// Root profile of a monic cubic over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CubicProfile {
    Distinct3InFp,
    Distinct1InFp,
    Distinct0InFp,
    DoublePlusSingle,
    Triple,
}

impl CubicProfile {
    pub fn square_free(self) -> bool {
        matches!(
            self,
            CubicProfile::Distinct3InFp | CubicProfile::Distinct1InFp | CubicProfile::Distinct0InFp
        )
    }
    /// Number of distinct roots in F_p.
    pub fn roots_in_fp(self) -> u32 {
        match self {
            CubicProfile::Distinct3InFp => 3,
            CubicProfile::Distinct1InFp => 1,
            CubicProfile::Distinct0InFp => 0,
            CubicProfile::DoublePlusSingle => 2,
            CubicProfile::Triple => 1,
        }
    }
}

fn cubic_eval(a2: u64, a4: u64, a6: u64, x: u64, p: u64) -> u64 {
    let x2 = fp::mul(x, x, p);
    let v = fp::add(fp::mul(x2, x, p), fp::mul(a2, x2, p), p);
    fp::add(fp::add(v, fp::mul(a4, x, p), p), a6, p)
}

fn cubic_deriv(a2: u64, a4: u64, x: u64, p: u64) -> u64 {
    fp::add(fp::add(fp::mul(3, fp::mul(x, x, p), p), fp::mul(fp::mul(2, a2, p), x, p), p), a4, p)
}

/// Profile of x³ + a2·x² + a4·x + a6 over F_p by exhaustive search: roots
/// are found by evaluation and multiplicities by the derivatives.
pub fn cubic_root_profile_brute(a2: u64, a4: u64, a6: u64, p: u64) -> CubicProfile {
    let (a2, a4, a6) = (a2 % p, a4 % p, a6 % p);
    let roots: Vec<u64> = (0..p).filter(|&x| cubic_eval(a2, a4, a6, x, p) == 0).collect();
    let multiple: Vec<u64> = roots.iter().copied().filter(|&x| cubic_deriv(a2, a4, x, p) == 0).collect();
    match (roots.len(), multiple.len()) {
        (3, _) => CubicProfile::Distinct3InFp,
        (0, _) => CubicProfile::Distinct0InFp,
        (1, 0) => CubicProfile::Distinct1InFp,
        (1, 1) => CubicProfile::Triple,
        (2, _) => CubicProfile::DoublePlusSingle,
        _ => unreachable!("impossible root configuration"),
    }
}

/// Profile via polynomial gcds (any p).
pub fn cubic_root_profile_alg(a2: u64, a4: u64, a6: u64, p: u64) -> CubicProfile {
    let (a2, a4, a6) = (a2 % p, a4 % p, a6 % p);
    if let Some(r) = multiple_root_alg(a2, a4, a6, p) {
        // With r a multiple root, g(x + r) = x^3 + (a2 + 3r) x^2.
        return if fp::add(a2, fp::mul(3, r, p), p) == 0 {
            CubicProfile::Triple
        } else {
            CubicProfile::DoublePlusSingle
        };
    }
    match fp::count_distinct_roots(&[a6, a4, a2, 1], p) {
        3 => CubicProfile::Distinct3InFp,
        1 => CubicProfile::Distinct1InFp,
        _ => CubicProfile::Distinct0InFp,
    }
}

/// A multiple root of the monic cubic, found from gcd(g, g'), if any.
fn multiple_root_alg(a2: u64, a4: u64, a6: u64, p: u64) -> Option<u64> {
    let g = vec![a6, a4, a2, 1];
    let d = fp::derivative(&g, p);
    if d.is_empty() {
        // g' = 0 only in characteristic 3: g = x^3 + a6 = (x + a6)^3.
        return Some(fp::neg(a6, p));
    }
    let h = fp::poly_gcd(&g, &d, p);
    match h.len() {
        2 => Some(fp::linear_root(&h, p)),
        // h = (x - r)^2 = x^2 - 2r x + r^2
        3 if p == 2 => Some(h[0]),
        3 => Some(fp::neg(fp::mul(h[1], fp::inv(2, p), p), p)),
        _ => None,
    }
}

/// Profile of x³ + a2·x² + a4·x + a6 over F_p.
pub fn cubic_root_profile(a2: u64, a4: u64, a6: u64, p: u64) -> CubicProfile {
    if p < BRUTE_FORCE_LIMIT {
        cubic_root_profile_brute(a2, a4, a6, p)
    } else {
        cubic_root_profile_alg(a2, a4, a6, p)
    }
}

/// The repeated root (double or triple) of a cubic with a multiple root.
pub fn cubic_multiple_root(a2: u64, a4: u64, a6: u64, p: u64) -> u64 {
    let (a2, a4, a6) = (a2 % p, a4 % p, a6 % p);
    if p < BRUTE_FORCE_LIMIT {
        return (0..p)
            .find(|&x| cubic_eval(a2, a4, a6, x, p) == 0 && cubic_deriv(a2, a4, x, p) == 0)
            .expect("cubic has no multiple root");
    }
    multiple_root_alg(a2, a4, a6, p).expect("cubic has no multiple root")
}

/// Discriminant of x³ + a2·x² + a4·x + a6.
pub fn cubic_disc(a2: &BigInt, a4: &BigInt, a6: &BigInt) -> BigInt {
    let eighteen = BigInt::from(18);
    let four = BigInt::from(4);
    let twenty_seven = BigInt::from(27);
    &eighteen * a2 * a4 * a6 - &four * a2 * a2 * a2 * a6 + a2 * a2 * a4 * a4
        - &four * a4 * a4 * a4
        - &twenty_seven * a6 * a6
}

/// Reduces a big integer into [0, p).
pub fn bigint_mod_u64(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// p^k as a big integer.
pub fn pow_big(p: u64, k: u32) -> BigInt {
    let mut r = BigInt::one();
    let pb = BigInt::from(p);
    for _ in 0..k {
        r *= &pb;
    }
    r
}

/// |n| as an unsigned machine integer when it fits.
pub fn abs_u128(n: &BigInt) -> Option<u128> {
    n.abs().to_u128()
}
