//! Exhaustive censuses over F_q of singular Weierstrass equations and of the
//! root patterns of monic quadratics and cubics. Roots are found by direct
//! evaluation and multiplicities by synthetic division, independently of the
//! root-count routines used by the branch script.

use serde::{Deserialize, Serialize};

use crate::error::{require_prime, Result, WdlError};
use crate::fp;
use crate::script::delta_mod_p;

/// One census line: what was counted, the count and the predicted count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub name: String,
    pub count: u64,
    pub expected: u64,
}

impl LemmaRow {
    pub fn ok(&self) -> bool {
        self.count == self.expected
    }
}

/// All census lines for one q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub q: u64,
    pub rows: Vec<LemmaRow>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(LemmaRow::ok)
    }
}

/// Evaluates a polynomial with coefficients listed from the constant term.
fn eval(c: &[u64], x: u64, q: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &ci| fp::add(fp::mul(acc, x, q), ci, q))
}

/// Divides by (X − r), returning the quotient (constant term first).
fn deflate(c: &[u64], r: u64, q: u64) -> Vec<u64> {
    let n = c.len() - 1;
    let mut out = vec![0; n];
    let mut carry = 0;
    for i in (0..n).rev() {
        carry = fp::add(c[i + 1], fp::mul(carry, r, q), q);
        out[i] = carry;
    }
    out
}

/// Multiplicities of the roots in F_q of a monic polynomial.
fn root_multiplicities(c: &[u64], q: u64) -> Vec<u32> {
    let mut out = Vec::new();
    for r in 0..q {
        let mut poly = c.to_vec();
        let mut mult = 0;
        while poly.len() > 1 && eval(&poly, r, q) == 0 {
            poly = deflate(&poly, r, q);
            mult += 1;
        }
        if mult > 0 {
            out.push(mult);
        }
    }
    out.sort_unstable();
    out
}

/// True iff the affine Weierstrass curve over F_q has a singular point,
/// found by searching all points for a common zero of F, F_x and F_y.
fn singular_by_search(a: [u64; 5], q: u64) -> bool {
    let [a1, a2, a3, a4, a6] = a;
    let m = |x, y| fp::mul(x, y, q);
    let ad = |x, y| fp::add(x, y, q);
    for x in 0..q {
        let x2 = m(x, x);
        let rhs = ad(ad(ad(m(x2, x), m(a2, x2)), m(a4, x)), a6);
        // F_x = a1·y − 3x² − 2a2·x − a4, F_y = 2y + a1·x + a3.
        let fx_base = ad(ad(m(3 % q, x2), m(m(2 % q, a2), x)), a4);
        for y in 0..q {
            let lhs = ad(ad(m(y, y), m(m(a1, x), y)), m(a3, y));
            if lhs != rhs {
                continue;
            }
            if m(a1, y) != fx_base {
                continue;
            }
            if ad(ad(m(2 % q, y), m(a1, x)), a3) == 0 {
                return true;
            }
        }
    }
    false
}

/// Runs all three censuses for a prime q ≤ 13.
pub fn verify_counting_lemmas(q: u64) -> Result<LemmaReport> {
    require_prime(q)?;
    if q > 13 {
        return Err(WdlError::InvalidArgument(format!("census limited to q <= 13 (got {q})")));
    }
    let mut rows = Vec::new();
    let row = |name: &str, count: u64, expected: u64| LemmaRow { name: name.to_string(), count, expected };

    // Singular Weierstrass equations, counted by point search and by the
    // discriminant.
    let (mut by_search, mut by_delta) = (0u64, 0u64);
    for t in 0..q.pow(5) {
        let mut r = t;
        let mut a = [0u64; 5];
        for ai in a.iter_mut() {
            *ai = r % q;
            r /= q;
        }
        if singular_by_search(a, q) {
            by_search += 1;
        }
        if delta_mod_p(a, q) == 0 {
            by_delta += 1;
        }
    }
    rows.push(row("singular equations (point search)", by_search, q.pow(4)));
    rows.push(row("singular equations (discriminant)", by_delta, q.pow(4)));

    // Monic quadratics X^2 + bX + c.
    let (mut double, mut split, mut irreducible) = (0, 0, 0);
    for b in 0..q {
        for c in 0..q {
            match root_multiplicities(&[c, b, 1], q).as_slice() {
                [2] => double += 1,
                [1, 1] => split += 1,
                [] => irreducible += 1,
                other => unreachable!("quadratic with root pattern {other:?}"),
            }
        }
    }
    rows.push(row("quadratics with a double root", double, q));
    rows.push(row("quadratics with distinct roots in F_q", split, q * (q - 1) / 2));
    rows.push(row("quadratics with conjugate roots", irreducible, q * (q - 1) / 2));

    // Monic cubics X^3 + aX^2 + bX + c.
    let (mut triple, mut dbl, mut three, mut one, mut none) = (0, 0, 0, 0, 0);
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                match root_multiplicities(&[c, b, a, 1], q).as_slice() {
                    [3] => triple += 1,
                    [1, 2] => dbl += 1,
                    [1, 1, 1] => three += 1,
                    [1] => one += 1,
                    [] => none += 1,
                    other => unreachable!("cubic with root pattern {other:?}"),
                }
            }
        }
    }
    rows.push(row("cubics with a multiple root", triple + dbl, q * q));
    rows.push(row("cubics with a triple root", triple, q));
    rows.push(row("cubics with a double and a single root", dbl, q * (q - 1)));
    rows.push(row("cubics with distinct roots", three + one + none, q * q * q - q * q));
    rows.push(row("cubics with three roots in F_q", three, q * (q - 1) * (q - 2) / 6));
    rows.push(row("cubics with one root in F_q and a conjugate pair", one, q * q * (q - 1) / 2));
    rows.push(row("cubics with conjugate roots in F_{q^3}", none, q * (q * q - 1) / 3));
    Ok(LemmaReport { q, rows })
}
