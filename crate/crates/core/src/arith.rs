//! Tracked p-adic arithmetic: integers known modulo p^k, where every derived
//! quantity carries a conservative precision and the index of the input
//! coordinate that limits it.
//!
//! Two integer backends implement [`Int`]: `i128` (fast; all residues are
//! kept below a cap p^K < 2^62 so products never overflow) and `BigInt`
//! (unbounded; precision may be infinite, which is how exact integer input is
//! handled).

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Infinite precision (an exactly known integer).
pub const INF: u32 = u32::MAX;

/// Sentinel "limiting coordinate" meaning the precision was truncated by the
/// backend's cap rather than by an input coordinate.
pub const LIM_CAP: u8 = 5;

/// Integer backend for tracked arithmetic.
pub trait Int: Clone + Debug + PartialEq + Eq + Hash + Ord + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn mul_i64(&self, c: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// Remainder in [0, m) for m > 0.
    fn rem_floor(&self, m: &Self) -> Self;
    /// Exact quotient (the caller guarantees divisibility).
    fn div_exact(&self, m: &Self) -> Self;
    /// Residue modulo a machine prime, in [0, p).
    fn mod_small(&self, p: u64) -> u64;
    /// min(v_p(self), limit); zero gives `limit`.
    fn val_upto(&self, p: u64, limit: u32) -> u32;
    fn to_bigint(&self) -> BigInt;
}

impl Int for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_i64(&self, c: i64) -> Self {
        self * c as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn rem_floor(&self, m: &Self) -> Self {
        self.rem_euclid(*m)
    }
    fn div_exact(&self, m: &Self) -> Self {
        self / m
    }
    fn mod_small(&self, p: u64) -> u64 {
        self.rem_euclid(p as i128) as u64
    }
    fn val_upto(&self, p: u64, limit: u32) -> u32 {
        if *self == 0 {
            return limit;
        }
        let p = p as i128;
        let mut x = *self;
        let mut v = 0;
        while v < limit && x % p == 0 {
            x /= p;
            v += 1;
        }
        v
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Int for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_i64(&self, c: i64) -> Self {
        self * c
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn rem_floor(&self, m: &Self) -> Self {
        self.mod_floor(m)
    }
    fn div_exact(&self, m: &Self) -> Self {
        self / m
    }
    fn mod_small(&self, p: u64) -> u64 {
        self.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
    }
    fn val_upto(&self, p: u64, limit: u32) -> u32 {
        if Zero::is_zero(self) {
            return limit;
        }
        let pb = BigInt::from(p);
        let mut x = self.clone();
        let mut v = 0;
        while v < limit {
            let (q, r) = x.div_rem(&pb);
            if !Zero::is_zero(&r) {
                break;
            }
            x = q;
            v += 1;
        }
        v
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Per-prime arithmetic context: the prime, the precision cap and a table of
/// its powers.
#[derive(Debug, Clone)]
pub struct Ctx<I: Int> {
    pub p: u64,
    /// Precisions above the cap are truncated to it (INF: never truncate).
    pub cap: u32,
    pows: Vec<I>,
}

impl Ctx<i128> {
    /// The largest K with p^K < 2^62 (0 if p itself is too large).
    pub fn i128_cap(p: u64) -> u32 {
        let mut k = 0;
        let mut q: u128 = 1;
        while q * (p as u128) < (1u128 << 62) {
            q *= p as u128;
            k += 1;
        }
        k
    }

    /// Fast context with residues bounded by p^K < 2^62.
    pub fn machine(p: u64) -> Self {
        let cap = Ctx::i128_cap(p);
        let mut pows = Vec::with_capacity(cap as usize + 1);
        let mut q: i128 = 1;
        for _ in 0..=cap {
            pows.push(q);
            q = q.saturating_mul(p as i128);
        }
        Ctx { p, cap, pows }
    }
}

impl Ctx<BigInt> {
    /// Unbounded context; `cap` may be INF for exact integer input.
    pub fn big(p: u64, cap: u32) -> Self {
        let table = if cap == INF { 64 } else { cap as usize + 1 };
        let mut pows = Vec::with_capacity(table);
        let mut q = BigInt::from(1);
        for _ in 0..table {
            pows.push(q.clone());
            q *= p;
        }
        Ctx { p, cap, pows }
    }
}

impl<I: Int> Ctx<I> {
    /// p^j.
    pub fn pow(&self, j: u32) -> I {
        if let Some(q) = self.pows.get(j as usize) {
            return q.clone();
        }
        let mut q = self.pows.last().expect("non-empty power table").clone();
        let pi = I::from_i64(self.p as i64);
        for _ in self.pows.len() - 1..j as usize {
            q = q.mul(&pi);
        }
        q
    }

    /// The exact constant p^j · c.
    pub fn scaled_const(&self, j: u32, c: u64) -> I {
        self.pow(j).mul(&I::from_i64(c as i64))
    }
}

/// A test could not be decided at the current precision; refining the named
/// coordinate (or the backend, for [`LIM_CAP`]) is required.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub coord: u8,
    pub reason: &'static str,
}

/// A tracked value: known to be ≡ x (mod p^k).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TV<I: Int> {
    pub x: I,
    pub k: u32,
    pub lim: u8,
}

fn sat_add(a: u32, b: u32) -> u32 {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b).min(INF - 1)
    }
}

fn small_val(c: i64, p: u64) -> u32 {
    if c == 0 {
        return INF;
    }
    let mut c = c.unsigned_abs();
    let mut v = 0;
    while c % p == 0 {
        c /= p;
        v += 1;
    }
    v
}

impl<I: Int> TV<I> {
    /// Canonicalizes: truncates to the cap and reduces the residue.
    pub fn norm(x: I, k: u32, lim: u8, ctx: &Ctx<I>) -> Self {
        let (k, lim) = if k > ctx.cap { (ctx.cap, LIM_CAP) } else { (k, lim) };
        let x = if k == INF { x } else { x.rem_floor(&ctx.pow(k)) };
        TV { x, k, lim }
    }

    /// A box coordinate with index `lim`, known modulo p^k.
    pub fn coord(x: I, k: u32, lim: u8, ctx: &Ctx<I>) -> Self {
        TV::norm(x, k, lim, ctx)
    }

    /// An exactly known constant.
    pub fn constant(c: I, ctx: &Ctx<I>) -> Self {
        TV::norm(c, INF, LIM_CAP, ctx)
    }

    /// Lower bound for the valuation: min(v(x), k).
    pub fn vlb(&self, p: u64) -> u32 {
        self.x.val_upto(p, self.k)
    }

    pub fn add(&self, o: &Self, ctx: &Ctx<I>) -> Self {
        let (k, lim) = if self.k <= o.k { (self.k, self.lim) } else { (o.k, o.lim) };
        TV::norm(self.x.add(&o.x), k, lim, ctx)
    }

    pub fn sub(&self, o: &Self, ctx: &Ctx<I>) -> Self {
        let (k, lim) = if self.k <= o.k { (self.k, self.lim) } else { (o.k, o.lim) };
        TV::norm(self.x.sub(&o.x), k, lim, ctx)
    }

    pub fn mul(&self, o: &Self, ctx: &Ctx<I>) -> Self {
        let pa = sat_add(self.k, o.vlb(ctx.p));
        let pb = sat_add(o.k, self.vlb(ctx.p));
        let (k, lim) = if pa <= pb { (pa, self.lim) } else { (pb, o.lim) };
        TV::norm(self.x.mul(&o.x), k, lim, ctx)
    }

    pub fn square(&self, ctx: &Ctx<I>) -> Self {
        let v2 = if ctx.p == 2 { 1 } else { 0 };
        let k = sat_add(sat_add(self.k, v2), self.vlb(ctx.p)).min(sat_add(self.k, self.k));
        TV::norm(self.x.mul(&self.x), k, self.lim, ctx)
    }

    pub fn mul_c(&self, c: i64, ctx: &Ctx<I>) -> Self {
        if c == 0 {
            return TV::constant(I::from_i64(0), ctx);
        }
        TV::norm(self.x.mul_i64(c), sat_add(self.k, small_val(c, ctx.p)), self.lim, ctx)
    }

    /// Exact division by p^e; the caller guarantees p^e | x and k ≥ e.
    pub fn div_p(&self, e: u32, ctx: &Ctx<I>) -> Self {
        debug_assert!(self.k >= e);
        let k = if self.k == INF { INF } else { self.k - e };
        TV::norm(self.x.div_exact(&ctx.pow(e)), k, self.lim, ctx)
    }

    fn block(&self, reason: &'static str) -> Block {
        Block { coord: self.lim, reason }
    }

    /// Residue modulo p.
    pub fn modp(&self, ctx: &Ctx<I>, reason: &'static str) -> Result<u64, Block> {
        if self.k >= 1 {
            Ok(self.x.mod_small(ctx.p))
        } else {
            Err(self.block(reason))
        }
    }

    /// Decides v(x) ≥ e.
    pub fn v_ge(&self, e: u32, ctx: &Ctx<I>, reason: &'static str) -> Result<bool, Block> {
        if e == 0 {
            return Ok(true);
        }
        let v = self.vlb(ctx.p);
        if v >= e {
            Ok(true)
        } else if v < self.k {
            Ok(false)
        } else {
            Err(self.block(reason))
        }
    }

    /// The exact valuation (x must be known to be nonzero).
    pub fn val(&self, ctx: &Ctx<I>, reason: &'static str) -> Result<u32, Block> {
        let v = self.vlb(ctx.p);
        if v < self.k {
            Ok(v)
        } else {
            Err(self.block(reason))
        }
    }

    /// (x / p^e) mod p, for x known to be divisible by p^e.
    pub fn digit(&self, e: u32, ctx: &Ctx<I>, reason: &'static str) -> Result<u64, Block> {
        if self.k > e {
            Ok(self.x.div_exact(&ctx.pow(e)).mod_small(ctx.p))
        } else {
            Err(self.block(reason))
        }
    }
}
