//! Bounded-budget integer factorisation: trial division by the primes below
//! 10^6, a Miller–Rabin test and Brent's variant of Pollard's rho.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Trial division covers all primes below this bound.
pub const TRIAL_LIMIT: u64 = 1_000_000;

/// Rho iterations allowed per composite cofactor.
pub const RHO_BUDGET: u64 = 200_000;

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| super::euler::primes_up_to(TRIAL_LIMIT))
}

/// Deterministic for n < 3.3·10^24 with these bases; a strong probable-prime
/// test beyond that.
pub fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    const BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for &b in &BASES {
        if n == &BigInt::from(b) {
            return true;
        }
        if (n % b).is_zero() {
            return false;
        }
    }
    let n1: BigInt = n - 1u32;
    let s = n1.trailing_zeros().expect("n − 1 is nonzero");
    let d: BigInt = &n1 >> s;
    'bases: for &b in &BASES {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of the odd composite n, or `None` when the budget
/// runs out.
fn rho(n: &BigInt, budget: u64) -> Option<BigInt> {
    let mut used = 0u64;
    for c in 1u32.. {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut y, m) = (BigInt::from(2), 64u64);
        let (mut g, mut r, mut q) = (BigInt::one(), 1u64, BigInt::one());
        let (mut x, mut ys) = (BigInt::zero(), BigInt::zero());
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
                used += m.min(r);
                if used > budget {
                    return None;
                }
            }
            r *= 2;
        }
        if &g == n {
            // Back up one step at a time.
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

/// The distinct prime factors of |n| (n ≠ 0), or `None` if some cofactor
/// resisted the budget.
pub fn prime_factors(n: &BigInt) -> Option<Vec<BigInt>> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut m = n.abs();
    let mut out = Vec::new();
    for &p in trial_primes() {
        if m.is_one() {
            break;
        }
        if let Some(small) = m.to_u64() {
            if p.saturating_mul(p) > small {
                break;
            }
        }
        if (&m % p).is_zero() {
            out.push(BigInt::from(p));
            while (&m % p).is_zero() {
                m /= p;
            }
        }
    }
    let mut stack = vec![m];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) || m.to_u64().is_some_and(|v| v < TRIAL_LIMIT * TRIAL_LIMIT) {
            // Every prime factor below 10^6 is gone, so a cofactor below
            // 10^12 is prime.
            out.push(m);
            continue;
        }
        let d = rho(&m, RHO_BUDGET)?;
        let e = &m / &d;
        stack.push(d);
        stack.push(e);
    }
    out.sort();
    out.dedup();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u128) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn primality() {
        for p in [2u128, 3, 1_000_003, 998_244_353, 1_000_000_007, 18_446_744_073_709_551_557] {
            assert!(is_probable_prime(&b(p)), "{p}");
        }
        for c in [1u128, 4, 561, 1_000_003 * 1_000_033, 3_215_031_751] {
            assert!(!is_probable_prime(&b(c)), "{c}");
        }
    }

    #[test]
    fn factors_with_large_cofactors() {
        let (p, q) = (1_000_003u128, 1_000_033u128);
        assert_eq!(prime_factors(&b(p * q * 12)).unwrap(), vec![b(2), b(3), b(p), b(q)]);
        let (r, s) = (1_000_000_007u128, 998_244_353u128);
        assert_eq!(prime_factors(&b(r * s)).unwrap(), vec![b(s), b(r)]);
        assert_eq!(prime_factors(&b(r * r * 5)).unwrap(), vec![b(5), b(r)]);
        assert_eq!(prime_factors(&BigInt::from(-30)).unwrap(), vec![b(2), b(3), b(5)]);
        assert!(prime_factors(&b(1)).unwrap().is_empty());
    }

    #[test]
    fn factors_agree_with_trial_division() {
        for n in 2u128..3000 {
            let mut expect = Vec::new();
            let mut m = n;
            for d in 2..=n {
                if m % d == 0 {
                    expect.push(b(d));
                    while m % d == 0 {
                        m /= d;
                    }
                }
            }
            assert_eq!(prime_factors(&b(n)).unwrap(), expect);
        }
    }
}
