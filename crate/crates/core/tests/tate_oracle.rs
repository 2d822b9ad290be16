//! Cross-checks `tate_local` against an independent, deliberately naive
//! implementation of Tate's algorithm: brute-force searches over residues for
//! every change of coordinates, b6/b8-based exit tests where the library uses
//! a4/a6, and Ogg's formula f = v(Δ_min) − (#components) + 1 as a separate
//! check on the conductor exponent.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wdl_core::{tate_local, KodairaType, Translation, WeierstrassEq};

fn v(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut m = n.clone();
    let mut k = 0;
    while (&m % &pb).is_zero() {
        m /= &pb;
        k += 1;
    }
    k
}

fn vge(n: &BigInt, p: u64, e: u32) -> bool {
    (n % BigInt::from(p).pow(e)).is_zero()
}

fn md(n: &BigInt, p: u64) -> i64 {
    n.mod_floor(&BigInt::from(p)).try_into().unwrap()
}

fn q(n: &BigInt, p: u64, e: u32) -> BigInt {
    n / BigInt::from(p).pow(e)
}

/// Roots in F_p of y^2 + b y - c, with multiplicity flag, by brute force.
fn quad(b: i64, c: i64, p: u64) -> (Vec<i64>, bool) {
    let p = p as i64;
    let roots: Vec<i64> = (0..p).filter(|&y| (y * y + b * y - c).rem_euclid(p) == 0).collect();
    let double = roots.len() == 1 && (2 * roots[0] + b).rem_euclid(p) == 0;
    (roots, double)
}

fn tr(e: &WeierstrassEq, r: BigInt, s: BigInt, t: BigInt) -> WeierstrassEq {
    e.translate(&Translation { r, s, t })
}

#[derive(Debug, PartialEq)]
struct Oracle {
    kodaira: KodairaType,
    fp: u32,
    cp: u32,
    level: u32,
    split: Option<bool>,
}

fn components(t: KodairaType) -> u32 {
    match t {
        KodairaType::I0 => 1,
        KodairaType::I(m) => m,
        KodairaType::II => 1,
        KodairaType::III => 2,
        KodairaType::IV => 3,
        KodairaType::I0Star => 5,
        KodairaType::IStar(m) => 5 + m,
        KodairaType::IVStar => 7,
        KodairaType::IIIStar => 8,
        KodairaType::IIStar => 9,
    }
}

fn oracle(e0: &WeierstrassEq, p: u64) -> Oracle {
    let pb = BigInt::from(p);
    let pi = p as i64;
    let mut e = e0.clone();
    let mut level = 0;
    loop {
        let n = v(&e.discriminant(), p);
        if n == 0 {
            return Oracle { kodaira: KodairaType::I0, fp: 0, cp: 1, level, split: None };
        }
        // Singular point by brute force over F_p^2.
        let (mut x0, mut y0) = (-1i64, -1i64);
        'search: for x in 0..pi {
            for y in 0..pi {
                let (xb, yb) = (BigInt::from(x), BigInt::from(y));
                let f = &yb * &yb + e.a1() * &xb * &yb + e.a3() * &yb
                    - &xb * &xb * &xb
                    - e.a2() * &xb * &xb
                    - e.a4() * &xb
                    - e.a6();
                let fx = e.a1() * &yb - 3 * &xb * &xb - 2 * e.a2() * &xb - e.a4();
                let fy = 2 * &yb + e.a1() * &xb + e.a3();
                if md(&f, p) == 0 && md(&fx, p) == 0 && md(&fy, p) == 0 {
                    x0 = x;
                    y0 = y;
                    break 'search;
                }
            }
        }
        assert!(x0 >= 0);
        e = tr(&e, x0.into(), 0.into(), y0.into());
        let inv = e.invariants();
        if md(&inv.b2, p) != 0 {
            let (roots, _) = quad(md(e.a1(), p), md(e.a2(), p), p);
            let split = roots.len() == 2;
            let m = n;
            let cp = if split { m } else if m % 2 == 0 { 2 } else { 1 };
            return Oracle { kodaira: KodairaType::I(m), fp: 1, cp, level, split: Some(split) };
        }
        if !vge(e.a6(), p, 2) {
            return Oracle { kodaira: KodairaType::II, fp: n, cp: 1, level, split: None };
        }
        if !vge(&inv.b8, p, 3) {
            return Oracle { kodaira: KodairaType::III, fp: n - 1, cp: 2, level, split: None };
        }
        if !vge(&inv.b6, p, 3) {
            let (roots, _) = quad(md(&q(e.a3(), p, 1), p), md(&q(e.a6(), p, 2), p), p);
            let cp = if roots.len() == 2 { 3 } else { 1 };
            return Oracle { kodaira: KodairaType::IV, fp: n - 2, cp, level, split: None };
        }
        // Brute-force search for τ(0, s, p t) giving p | a1, a2; p^2 | a3, a4; p^3 | a6.
        let mut found = None;
        'st: for s in 0..pi {
            for t in 0..pi {
                let c = tr(&e, 0.into(), s.into(), BigInt::from(t) * &pb);
                if vge(c.a1(), p, 1) && vge(c.a2(), p, 1) && vge(c.a3(), p, 2) && vge(c.a4(), p, 2) && vge(c.a6(), p, 3)
                {
                    found = Some(c);
                    break 'st;
                }
            }
        }
        e = found.expect("a translation into W(1,1,2,2,3) exists");
        let (a2, a4, a6) = (md(&q(e.a2(), p, 1), p), md(&q(e.a4(), p, 2), p), md(&q(e.a6(), p, 3), p));
        let cubic = |x: i64| (x * x * x + a2 * x * x + a4 * x + a6).rem_euclid(pi);
        let dcubic = |x: i64| (3 * x * x + 2 * a2 * x + a4).rem_euclid(pi);
        let roots: Vec<i64> = (0..pi).filter(|&x| cubic(x) == 0).collect();
        let multiple: Vec<i64> = roots.iter().copied().filter(|&x| dcubic(x) == 0).collect();
        if multiple.is_empty() {
            let n_min = n;
            return Oracle { kodaira: KodairaType::I0Star, fp: n_min - 4, cp: 1 + roots.len() as u32, level, split: None };
        }
        let x0 = multiple[0];
        // x0 is a multiple root; it is a triple root iff the shifted cubic has no x^2 term.
        let triple = (a2 + 3 * x0).rem_euclid(pi) == 0;
        e = tr(&e, BigInt::from(x0) * &pb, 0.into(), 0.into());
        if !triple {
            // I_m*: alternate between the y-quadratic and the x-quadratic.
            let mut m = 1u32;
            let mut mx = pb.pow(2);
            let mut my = pb.pow(2);
            loop {
                let xa3 = md(&(e.a3() / &my), p);
                let xa6 = md(&(e.a6() / (&mx * &my)), p);
                let (roots, double) = quad(xa3, xa6, p);
                if !double {
                    let cp = if roots.len() == 2 { 4 } else { 2 };
                    return Oracle { kodaira: KodairaType::IStar(m), fp: n - m - 4, cp, level, split: None };
                }
                e = tr(&e, 0.into(), 0.into(), BigInt::from(roots[0]) * &my);
                m += 1;
                my *= &pb;
                let xa2 = md(&(e.a2() / &pb), p);
                let xa4 = md(&(e.a4() / (&pb * &mx)), p);
                let xa6 = md(&(e.a6() / (&mx * &my)), p);
                let xroots: Vec<i64> =
                    (0..pi).filter(|&x| (xa2 * x * x + xa4 * x + xa6).rem_euclid(pi) == 0).collect();
                let xdouble = xroots.len() == 1 && (2 * xa2 * xroots[0] + xa4).rem_euclid(pi) == 0;
                if !xdouble {
                    let cp = if xroots.len() == 2 { 4 } else { 2 };
                    return Oracle { kodaira: KodairaType::IStar(m), fp: n - m - 4, cp, level, split: None };
                }
                e = tr(&e, BigInt::from(xroots[0]) * &mx, 0.into(), 0.into());
                m += 1;
                mx *= &pb;
            }
        }
        let (roots, double) = quad(md(&q(e.a3(), p, 2), p), md(&q(e.a6(), p, 4), p), p);
        if !double {
            let cp = if roots.len() == 2 { 3 } else { 1 };
            return Oracle { kodaira: KodairaType::IVStar, fp: n - 6, cp, level, split: None };
        }
        e = tr(&e, 0.into(), 0.into(), BigInt::from(roots[0]) * pb.pow(2));
        if !vge(e.a4(), p, 4) {
            return Oracle { kodaira: KodairaType::IIIStar, fp: n - 7, cp: 2, level, split: None };
        }
        if !vge(e.a6(), p, 6) {
            return Oracle { kodaira: KodairaType::IIStar, fp: n - 8, cp: 1, level, split: None };
        }
        e = e.scale_down(&pb).unwrap();
        level += 1;
    }
}

fn check(e: &WeierstrassEq, p: u64) {
    if e.is_singular() {
        return;
    }
    let got = tate_local(e, p).unwrap();
    let want = oracle(e, p);
    assert_eq!(
        (got.kodaira, got.fp, got.cp, got.level, got.split),
        (want.kodaira, want.fp, want.cp, want.level, want.split),
        "curve {e} at p={p}"
    );
    let n_min = v(&got.minimal_eq.discriminant(), p);
    assert_eq!(got.n, n_min + 12 * got.level);
    assert_eq!(got.fp + components(got.kodaira), n_min + 1, "Ogg's formula for {e} at p={p}");
    if let KodairaType::I(m) = got.kodaira {
        assert_eq!(m, n_min);
    }
    if p >= 5 && got.kodaira.is_additive() {
        assert_eq!(got.fp, 2);
    }
    assert!(got.minimal_eq.is_singular() == false);
}

/// A random equation whose coefficients are divisible by random powers of p,
/// so that deep branches (I_m*, II*, non-minimal) are exercised often.
fn structured(rng: &mut ChaCha8Rng, p: u64) -> WeierstrassEq {
    let pb = BigInt::from(p);
    let a: [BigInt; 5] = std::array::from_fn(|i| {
        let w = [1u32, 2, 3, 4, 6][i];
        let e = rng.gen_range(0..=w * 2 + 2);
        let unit = BigInt::from(rng.gen_range(-1000i64..=1000));
        pb.pow(e) * unit
    });
    let base = WeierstrassEq::new(a);
    // random translation to hide the structure
    let t = Translation::new(rng.gen_range(-50i64..50), rng.gen_range(-50i64..50), rng.gen_range(-50i64..50));
    base.translate(&t)
}

#[test]
fn agrees_with_oracle_on_random_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    for p in [2u64, 3, 5, 7, 11] {
        for _ in 0..4000 {
            let a: [i64; 5] = std::array::from_fn(|_| rng.gen_range(-10_000..=10_000));
            check(&WeierstrassEq::from_i64(a), p);
            check(&structured(&mut rng, p), p);
        }
    }
}

#[test]
fn deep_types_are_reached() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for p in [2u64, 3, 5] {
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..20000 {
            let e = structured(&mut rng, p);
            if e.is_singular() {
                continue;
            }
            let d = tate_local(&e, p).unwrap();
            seen.insert(d.kodaira.label());
            if d.level > 0 {
                seen.insert(wdl_core::TypeLabel::NonMinimal);
            }
        }
        assert_eq!(seen.len(), 11, "p={p}: only reached {seen:?}");
    }
}

#[test]
fn exact_m_detection() {
    // y^2 + xy = x^3 + p^m u: multiplicative with v(Δ) = m.
    for p in [2u64, 3, 5, 7] {
        for m in 1..=40u32 {
            let a6 = BigInt::from(p).pow(m) * 7;
            let e = WeierstrassEq::new([BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::zero(), a6]);
            let d = tate_local(&e, p).unwrap();
            if p == 7 {
                assert_eq!(d.kodaira, KodairaType::I(m + 1));
            } else {
                assert_eq!(d.kodaira, KodairaType::I(m));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn translation_invariance(a in proptest::array::uniform5(-5000i64..5000), t in proptest::array::uniform3(-300i64..300), pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        let e = WeierstrassEq::from_i64(a);
        prop_assume!(!e.is_singular());
        let tau = Translation::new(t[0], t[1], t[2]);
        let x = tate_local(&e, p).unwrap();
        let y = tate_local(&e.translate(&tau), p).unwrap();
        prop_assert_eq!((x.kodaira, x.fp, x.cp, x.n, x.level, x.split), (y.kodaira, y.fp, y.cp, y.n, y.level, y.split));
    }

    #[test]
    fn scaling_raises_level_only(a in proptest::array::uniform5(-5000i64..5000), pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        let e = WeierstrassEq::from_i64(a);
        prop_assume!(!e.is_singular());
        let x = tate_local(&e, p).unwrap();
        let y = tate_local(&e.scale_up(&BigInt::from(p)).unwrap(), p).unwrap();
        prop_assert_eq!((x.kodaira, x.fp, x.cp, x.level + 1, x.split, x.n + 12), (y.kodaira, y.fp, y.cp, y.level, y.split, y.n));
    }

    #[test]
    fn determinacy_modulo_p6(a in proptest::array::uniform5(-100_000i64..100_000), d in proptest::array::uniform5(-1000i64..1000), pi in 0usize..3) {
        let p = [2u64, 3, 5][pi];
        let e = WeierstrassEq::from_i64(a);
        prop_assume!(!e.is_singular());
        let x = tate_local(&e, p).unwrap();
        prop_assume!(x.level == 0);
        let p6 = BigInt::from(p).pow(6);
        let f = WeierstrassEq::new(std::array::from_fn(|i| &e.a[i] + &p6 * d[i]));
        prop_assume!(!f.is_singular());
        let y = tate_local(&f, p).unwrap();
        prop_assert_eq!(y.level, 0);
        prop_assert_eq!(x.kodaira.label(), y.kodaira.label());
        if x.kodaira.m().is_none() {
            prop_assert_eq!((x.fp, x.cp), (y.fp, y.cp));
        }
    }
}

#[test]
fn absolute_values_are_irrelevant_signs() {
    // Sanity: the oracle's helpers agree with the library on a negative input.
    let e = WeierstrassEq::from_i64([-1, -2, -3, -4, -5]);
    let _ = e.a.iter().map(|c| c.abs()).count();
    check(&e, 2);
    check(&e, 3);
}

/// The LocalData consistency relations on 10^6 random equations per prime.
#[test]
fn consistency_relations_bulk() {
    for p in [2u64, 3, 5, 7] {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + p);
        for i in 0..1_000_000u32 {
            let e = if i % 4 == 0 {
                structured(&mut rng, p)
            } else {
                WeierstrassEq::from_i64(std::array::from_fn(|_| rng.gen_range(-1_000_000..=1_000_000)))
            };
            if e.is_singular() {
                continue;
            }
            let d = tate_local(&e, p).unwrap();
            let n_min = v(&d.minimal_eq.discriminant(), p);
            assert_eq!(d.n, n_min + 12 * d.level);
            match d.kodaira {
                KodairaType::I0 => assert_eq!((d.fp, d.cp, n_min), (0, 1, 0)),
                KodairaType::I(m) => {
                    assert_eq!((d.fp, m), (1, n_min));
                    let split = d.split.expect("split flag present for multiplicative reduction");
                    let want = if split { m } else if m % 2 == 0 { 2 } else { 1 };
                    assert_eq!(d.cp, want);
                }
                KodairaType::IStar(m) => assert_eq!(d.fp, n_min - m - 4),
                _ => {}
            }
            if d.kodaira.is_additive() {
                assert!((1..=4).contains(&d.cp));
                assert!(d.split.is_none());
                if p >= 5 {
                    assert_eq!(d.fp, 2);
                }
            }
            assert_eq!(d.fp + components(d.kodaira), n_min + 1);
        }
    }
}
