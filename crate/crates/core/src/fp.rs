//! Arithmetic in the prime field F_p for word-sized p, and the few
//! polynomial operations (gcd, Frobenius) needed to locate roots of
//! quadratics and cubics when brute force over F_p is too slow.

#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - (b % p) as u128) % p as u128) as u64
}

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn neg(a: u64, p: u64) -> u64 {
    let a = a % p;
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b, p);
        }
        b = mul(b, b, p);
        e >>= 1;
    }
    r
}

/// Inverse of a non-zero element (p prime).
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow(a, p - 2, p)
}

/// Reduces a signed integer into [0, p).
#[inline]
pub fn from_i128(x: i128, p: u64) -> u64 {
    x.rem_euclid(p as i128) as u64
}

/// Legendre symbol for odd p: 0, 1 or -1.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Polynomials over F_p, coefficients in increasing degree order, trimmed.
pub type Poly = Vec<u64>;

pub fn trim(mut f: Poly) -> Poly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

pub fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim(a.to_vec());
    let lead_inv = inv(*b.last().unwrap(), p);
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = mul(*r.last().unwrap(), lead_inv, p);
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = sub(r[shift + i], mul(c, bi, p), p);
        }
        r = trim(r);
    }
    r
}

pub fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let li = inv(l, p);
        for c in a.iter_mut() {
            *c = mul(*c, li, p);
        }
    }
    a
}

pub fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] = add(r[i + j], mul(ai, bj, p), p);
        }
    }
    poly_rem(&r, m, p)
}

/// x^e mod m over F_p.
pub fn poly_xpow_mod(e: u64, m: &[u64], p: u64) -> Poly {
    let mut result: Poly = poly_rem(&[1], m, p);
    let mut base: Poly = poly_rem(&[0, 1], m, p);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mul_mod(&result, &base, m, p);
        }
        base = poly_mul_mod(&base, &base, m, p);
        e >>= 1;
    }
    result
}

pub fn derivative(f: &[u64], p: u64) -> Poly {
    trim(
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul(c, i as u64 % p, p))
            .collect(),
    )
}

/// Number of distinct roots in F_p of a non-zero polynomial f: deg gcd(f, x^p - x).
pub fn count_distinct_roots(f: &[u64], p: u64) -> usize {
    let f = trim(f.to_vec());
    if f.len() <= 1 {
        return 0;
    }
    let mut xp = poly_xpow_mod(p, &f, p);
    // subtract x
    if xp.len() < 2 {
        xp.resize(2, 0);
    }
    xp[1] = sub(xp[1], 1, p);
    let xp = trim(xp);
    let g = if xp.is_empty() { f } else { poly_gcd(&f, &xp, p) };
    g.len() - 1
}

/// The root of a monic linear polynomial x + c.
pub fn linear_root(g: &[u64], p: u64) -> u64 {
    debug_assert_eq!(g.len(), 2);
    let li = inv(g[1], p);
    neg(mul(g[0], li, p), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_legendre() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            for a in 1..p {
                assert_eq!(mul(a, inv(a, p), p), 1);
                let is_sq = (1..p).any(|y| mul(y, y, p) == a);
                assert_eq!(legendre(a, p) == 1, is_sq);
            }
        }
    }

    #[test]
    fn root_counting_matches_brute_force() {
        let p = 31;
        for a in 0..p {
            for b in 0..p {
                let f = vec![b, a, 3, 1];
                let brute = (0..p)
                    .filter(|&x| {
                        let v = add(add(add(mul(mul(x, x, p), x, p), mul(3, mul(x, x, p), p), p), mul(a, x, p), p), b, p);
                        v == 0
                    })
                    .count();
                assert_eq!(count_distinct_roots(&f, p), brute);
            }
        }
    }
}
