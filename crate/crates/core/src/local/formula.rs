//! Closed-form local densities: the measure of each finite type among
//! minimal equations, the I_m and I_m* densities, level-set measures, the
//! relative distributions of conductor exponents and Tamagawa numbers within
//! each type, and the overall conductor-exponent distribution.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Cell, DensityInterval, DistributionTable, Key, KeyKind, Mode};
use crate::error::{require_prime, Result};
use crate::script::TypeLabel;

fn pw(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

fn q(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Position of a finite type in the chain of exits of Tate's algorithm;
/// its minimal density is (p−1)/p^{rank}.
fn rank(label: TypeLabel) -> Option<u32> {
    Some(match label {
        TypeLabel::I0 => 1,
        TypeLabel::Ige1 => 2,
        TypeLabel::II => 3,
        TypeLabel::III => 4,
        TypeLabel::IV => 5,
        TypeLabel::I0s => 6,
        TypeLabel::Ige1s => 7,
        TypeLabel::IVs => 8,
        TypeLabel::IIIs => 9,
        TypeLabel::IIs => 10,
        TypeLabel::NonMinimal => return None,
    })
}

/// ρ_T^M: the measure of equations that are minimal of type T; for the
/// non-minimal label, the measure of all non-minimal equations (1/p^10).
pub fn rho_minimal(p: u64, label: TypeLabel) -> BigRational {
    match rank(label) {
        Some(r) => q(p - 1, pw(p, r)),
        None => non_minimal(p),
    }
}

/// Measure of the non-minimal equations.
pub fn non_minimal(p: u64) -> BigRational {
    q(1, pw(p, 10))
}

/// Measure of minimal equations of type I_m (m ≥ 1).
pub fn rho_im(p: u64, m: u32) -> BigRational {
    q((p - 1) * (p - 1), pw(p, m + 2))
}

/// Measure of minimal equations of type I_m* (m ≥ 1).
pub fn rho_ims(p: u64, m: u32) -> BigRational {
    q((p - 1) * (p - 1), pw(p, m + 7))
}

/// ρ_T: the measure of all equations whose curve has type T.
pub fn rho_curve(p: u64, label: TypeLabel) -> BigRational {
    let p10 = pw(p, 10);
    rho_minimal(p, label) * q(p10.clone(), p10 - 1)
}

/// μ(W_k): the measure of equations of level exactly k.
pub fn level_measure(p: u64, k: u32) -> BigRational {
    (BigRational::one() - non_minimal(p)) * q(1, pw(p, 10 * k))
}

/// Measure of the base set B_T of each finite type, and the index of its
/// stabiliser in the translation group.
pub fn base_set(p: u64, label: TypeLabel) -> Option<(BigRational, BigInt)> {
    let (e, idx) = match label {
        TypeLabel::I0 => (1, 0),
        TypeLabel::Ige1 => (4, 2),
        TypeLabel::II => (6, 3),
        TypeLabel::III => (7, 3),
        TypeLabel::IV => (8, 3),
        TypeLabel::I0s => (10, 4),
        TypeLabel::Ige1s => (12, 5),
        TypeLabel::IVs => (13, 5),
        TypeLabel::IIIs => (15, 6),
        TypeLabel::IIs => (16, 6),
        TypeLabel::NonMinimal => return Some((q(1, pw(p, 16)), pw(p, 6))),
    };
    Some((q(p - 1, pw(p, e)), pw(p, idx)))
}

/// Base sets of the individual types I_m and I_m*: measure and stabiliser
/// index.
pub fn base_set_indexed(p: u64, label: TypeLabel, m: u32) -> Option<(BigRational, BigInt)> {
    let sq = (p - 1) * (p - 1);
    match label {
        TypeLabel::Ige1 => Some((q(sq, pw(p, 3 * m + 2)), pw(p, 2 * m))),
        TypeLabel::Ige1s => Some((q(sq, pw(p, 2 * m + 11)), pw(p, m + 4))),
        _ => None,
    }
}

/// Relative distribution of the conductor exponent within a type (among
/// minimal equations of that type). Empty for the non-minimal label.
pub fn fp_relative(p: u64, label: TypeLabel) -> Vec<(u32, BigRational)> {
    use TypeLabel::*;
    let one = || vec![(2, q(1, 1))];
    match label {
        I0 => vec![(0, q(1, 1))],
        Ige1 => vec![(1, q(1, 1))],
        NonMinimal => vec![],
        _ if p >= 5 => one(),
        II | IV | IVs | IIs if p == 3 => vec![(3, q(2, 3)), (4, q(2, 9)), (5, q(1, 9))],
        III | IIIs | I0s | Ige1s if p == 3 => one(),
        II => vec![(4, q(1, 2)), (6, q(3, 8)), (7, q(1, 8))],
        IIs => vec![(3, q(1, 2)), (4, q(1, 4)), (6, q(1, 4))],
        III | IIIs => vec![(3, q(1, 2)), (5, q(1, 4)), (7, q(1, 8)), (8, q(1, 8))],
        IV | IVs => one(),
        I0s => vec![(4, q(1, 2)), (5, q(1, 4)), (6, q(1, 4))],
        Ige1s => vec![(3, q(1, 2)), (4, q(1, 4)), (5, q(1, 16)), (6, q(1, 8)), (7, q(1, 16))],
    }
}

/// Relative distribution of the Tamagawa number within a non-multiplicative
/// type. Zero-density values are omitted.
pub fn cp_relative(p: u64, label: TypeLabel) -> Vec<(u32, BigRational)> {
    use TypeLabel::*;
    let half = || q(1, 2);
    let v = match label {
        I0 | II | IIs => vec![(1, q(1, 1))],
        III | IIIs => vec![(2, q(1, 1))],
        IV | IVs => vec![(1, half()), (3, half())],
        I0s => vec![(1, q(p + 1, 3 * p)), (2, half()), (4, q(p - 2, 6 * p))],
        Ige1s => vec![(2, half()), (4, half())],
        Ige1 | NonMinimal => vec![],
    };
    v.into_iter().filter(|(_, r)| !r.is_zero()).collect()
}

/// Multiplicative reduction: (split, c_p) rows with their relative density
/// within I_{≥1}. Split rows are per m (c_p = m) for m ≤ m_max; the two
/// non-split rows aggregate all m of the given parity.
pub fn multiplicative_cp_relative(p: u64, m_max: u32) -> Vec<(bool, u32, BigRational)> {
    let mut v: Vec<(bool, u32, BigRational)> =
        (1..=m_max).map(|m| (true, m, q(p - 1, 2 * pw(p, m)))).collect();
    v.push((false, 1, q(p, 2 * (p + 1))));
    v.push((false, 2, q(1, 2 * (p + 1))));
    v
}

/// Overall density of each conductor exponent among all equations (minimal
/// ones; the non-minimal mass 1/p^10 is excluded).
pub fn conductor_overall(p: u64) -> Vec<(u32, BigRational)> {
    let mut v = vec![(0, q(p - 1, p)), (1, q(p - 1, p * p))];
    match p {
        2 => {
            let d = pw(2, 12);
            for (f, n) in [(2, 144), (3, 150), (4, 297), (5, 84), (6, 213), (7, 99), (8, 33)] {
                v.push((f, q(n, d.clone())));
            }
        }
        3 => {
            let d = pw(3, 12);
            for (f, n) in [(2, 15120), (3, 29280), (4, 9760), (5, 4880)] {
                v.push((f, q(n, d.clone())));
            }
        }
        _ => v.push((2, q(1, p * p) - q(1, pw(p, 10)))),
    }
    v
}

/// The closed-form table for one key kind. Families indexed by m (I_m, I_m*,
/// split multiplicative Tamagawa numbers) are listed for m ≤ m_max.
pub fn formula_table(p: u64, kind: KeyKind, m_max: u32) -> Result<DistributionTable> {
    require_prime(p)?;
    let mut t = DistributionTable::new(p, kind, Mode::Formula);
    let mut put = |k: Key, v: BigRational| {
        t.rows.insert(k, Cell::Interval(DensityInterval::point(v)));
    };
    let finite = TypeLabel::ALL.iter().copied().filter(|l| *l != TypeLabel::NonMinimal);
    match kind {
        KeyKind::Type => {
            for l in TypeLabel::ALL {
                put(Key::Type(l), rho_minimal(p, l));
            }
        }
        KeyKind::Kodaira => {
            for l in TypeLabel::ALL {
                match l {
                    TypeLabel::Ige1 => (1..=m_max).for_each(|m| put(Key::Kodaira(l, Some(m)), rho_im(p, m))),
                    TypeLabel::Ige1s => (1..=m_max).for_each(|m| put(Key::Kodaira(l, Some(m)), rho_ims(p, m))),
                    _ => put(Key::Kodaira(l, None), rho_minimal(p, l)),
                }
            }
        }
        KeyKind::Conductor => {
            for (f, d) in conductor_overall(p) {
                put(Key::Conductor(Some(f)), d);
            }
            put(Key::Conductor(None), non_minimal(p));
        }
        KeyKind::TypeConductor => {
            for l in finite {
                for (f, r) in fp_relative(p, l) {
                    put(Key::TypeConductor(l, Some(f)), rho_minimal(p, l) * r);
                }
            }
            put(Key::TypeConductor(TypeLabel::NonMinimal, None), non_minimal(p));
        }
        KeyKind::Tamagawa => {
            for l in finite {
                if l == TypeLabel::Ige1 {
                    for (split, c, r) in multiplicative_cp_relative(p, m_max) {
                        put(Key::Tamagawa { label: l, split: Some(split), cp: Some(c) }, rho_minimal(p, l) * r);
                    }
                } else {
                    for (c, r) in cp_relative(p, l) {
                        put(Key::Tamagawa { label: l, split: None, cp: Some(c) }, rho_minimal(p, l) * r);
                    }
                }
            }
            put(Key::Tamagawa { label: TypeLabel::NonMinimal, split: None, cp: None }, non_minimal(p));
        }
        KeyKind::TypeByLevel { max_level } => {
            for k in 0..=max_level {
                for l in finite.clone() {
                    put(Key::TypeLevel(l, k), rho_minimal(p, l) * q(1, pw(p, 10 * k)));
                }
            }
            put(Key::TypeLevel(TypeLabel::NonMinimal, max_level + 1), q(1, pw(p, 10 * (max_level + 1))));
        }
        KeyKind::CurveType => {
            for l in finite {
                put(Key::CurveType(l), rho_curve(p, l));
            }
        }
    }
    Ok(t)
}

/// Density of a row relative to the total of its type (Type key values).
pub fn relative(p: u64, key: &Key, value: &BigRational) -> Option<BigRational> {
    let l = key.label()?;
    let base = rho_minimal(p, l);
    if base.is_zero() {
        None
    } else {
        Some(value / base)
    }
}
