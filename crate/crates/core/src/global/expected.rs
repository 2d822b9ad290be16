//! Predicted global densities: each property as an Euler product of local
//! densities (exact at finitely many primes, enclosed otherwise).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::euler::{euler_product, primes_up_to, EulerProductSpec, RatFn};
use super::GlobalProperty;
use crate::error::Result;
use crate::local::formula::rho_curve;
use crate::local::to_f64;

/// Bound used when a predicted density is an infinite product.
pub const DEFAULT_PRODUCT_BOUND: u64 = 1_000_000;

/// A predicted density: exact when finitely many primes are involved,
/// otherwise a certified enclosure with a representative value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedDensity {
    pub property: String,
    pub exact: Option<BigRational>,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Product bound and tail bound when the value is a truncated product.
    pub bound: Option<u64>,
    pub tail_bound: Option<BigRational>,
    /// True when the value is a finite-X comparator rather than a limit
    /// (the limit of the single-bad-prime density is 0).
    pub comparator: bool,
}

/// The product ∏ (1 − s_p) predicted for a property, truncated at `bound`;
/// `None` for the single-bad-prime property, whose comparator is exact.
pub fn product_spec(property: &GlobalProperty, bound: u64) -> Result<Option<EulerProductSpec>> {
    property.validate()?;
    let spec = match property {
        GlobalProperty::GloballyMinimal => EulerProductSpec::inverse_zeta(10, bound),
        GlobalProperty::SemistableEquation => EulerProductSpec::inverse_zeta(2, bound),
        GlobalProperty::SemistableCurve => EulerProductSpec::semistable_curve(bound),
        GlobalProperty::SquarefreeDisc => EulerProductSpec::squarefree_disc(bound),
        GlobalProperty::SquarefreeMinimalDisc => EulerProductSpec::squarefree_minimal_disc(bound),
        GlobalProperty::GoodAt { semistable_elsewhere, .. } | GlobalProperty::TypeAt { semistable_elsewhere, .. } => {
            let mut spec = if *semistable_elsewhere {
                EulerProductSpec::semistable_curve(bound)
            } else {
                EulerProductSpec::new(RatFn::poly(vec![1]), bound, BigRational::zero(), 2)
            };
            for (p, t) in property.conditions() {
                spec = spec.with_special(p, rho_curve(p, t));
            }
            spec
        }
        GlobalProperty::SingleBadPrimeBelow(_) => return Ok(None),
    };
    Ok(Some(spec))
}

/// (Σ_{p≤X} 1/(p−1)) · ∏_{q≤X} (1 − 1/q): the density of equations with
/// exactly one prime p ≤ X dividing the discriminant.
pub fn single_bad_prime_comparator(x: u64) -> BigRational {
    let primes = primes_up_to(x);
    let sum = primes.iter().fold(BigRational::zero(), |acc, &p| acc + BigRational::new(BigInt::one(), BigInt::from(p - 1)));
    let prod = primes.iter().fold(BigRational::one(), |acc, &q| acc * BigRational::new(BigInt::from(q - 1), BigInt::from(q)));
    sum * prod
}

/// The predicted density of a property.
pub fn expected_density(property: &GlobalProperty) -> Result<ExpectedDensity> {
    expected_density_at(property, DEFAULT_PRODUCT_BOUND)
}

/// As [`expected_density`], multiplying out primes up to `bound`.
pub fn expected_density_at(property: &GlobalProperty, bound: u64) -> Result<ExpectedDensity> {
    let name = property.to_string();
    let spec = match product_spec(property, bound)? {
        Some(s) => s,
        None => {
            let GlobalProperty::SingleBadPrimeBelow(x) = property else { unreachable!() };
            let c = single_bad_prime_comparator(*x);
            let v = to_f64(&c);
            return Ok(ExpectedDensity {
                property: name,
                exact: Some(c),
                value: v,
                lower: v,
                upper: v,
                bound: None,
                tail_bound: None,
                comparator: true,
            });
        }
    };
    let finite = spec.c.is_zero();
    if finite {
        let exact = spec.special.values().fold(BigRational::one(), |a, f| a * f);
        let v = to_f64(&exact);
        return Ok(ExpectedDensity {
            property: name,
            exact: Some(exact),
            value: v,
            lower: v,
            upper: v,
            bound: None,
            tail_bound: None,
            comparator: false,
        });
    }
    let r = euler_product(&spec)?;
    Ok(ExpectedDensity {
        property: name,
        exact: None,
        value: r.value,
        lower: r.lower,
        upper: r.upper,
        bound: Some(r.bound),
        tail_bound: Some(r.tail_bound),
        comparator: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::formula::rho_minimal;
    use crate::script::TypeLabel;
    use std::f64::consts::PI;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn good_at(primes: Vec<u64>) -> GlobalProperty {
        GlobalProperty::GoodAt { primes, semistable_elsewhere: false }
    }

    #[test]
    fn good_at_two() {
        assert_eq!(expected_density(&good_at(vec![2])).unwrap().exact, Some(q(512, 1023)));
    }

    #[test]
    fn good_at_two_and_three() {
        assert_eq!(expected_density(&good_at(vec![2, 3])).unwrap().exact, Some(q(839_808, 2_516_921)));
    }

    #[test]
    fn type_three_star_at_five() {
        // (5² − 5)/(5^10 − 1) = 20/9765624.
        let t = GlobalProperty::TypeAt { conditions: vec![(5, TypeLabel::IIIs)], semistable_elsewhere: false };
        let d = expected_density(&t).unwrap();
        assert_eq!(d.exact, Some(q(5, 2_441_406)));
        assert_eq!(d.exact, Some(q(20, 9_765_624)));
    }

    #[test]
    fn good_multiplicative_additive_example() {
        // Good at 2, multiplicative at 3, additive at 5.
        let (p1, p2, p3) = (2f64, 3f64, 5f64);
        let expect = ((1.0 - 1.0 / p1) / (1.0 - p1.powi(-10)))
            * ((1.0 / p2 - p2.powi(-2)) / (1.0 - p2.powi(-10)))
            * ((p3.powi(-2) - p3.powi(-10)) / (1.0 - p3.powi(-10)));
        let additive: BigRational = [
            TypeLabel::II,
            TypeLabel::III,
            TypeLabel::IV,
            TypeLabel::I0s,
            TypeLabel::Ige1s,
            TypeLabel::IVs,
            TypeLabel::IIIs,
            TypeLabel::IIs,
        ]
        .iter()
        .map(|&t| rho_curve(5, t))
        .sum();
        let got = rho_curve(2, TypeLabel::I0) * rho_curve(3, TypeLabel::Ige1) * additive;
        assert!((to_f64(&got) - expect).abs() < 1e-15);
    }

    #[test]
    fn infinite_products_enclose_closed_forms() {
        let z2 = PI * PI / 6.0;
        let z10 = PI.powi(10) / 93555.0;
        let cases = [
            (GlobalProperty::GloballyMinimal, 1.0 / z10),
            (GlobalProperty::SemistableEquation, 1.0 / z2),
            (GlobalProperty::SemistableCurve, z10 / z2),
        ];
        for (p, v) in cases {
            let d = expected_density(&p).unwrap();
            assert!(d.lower <= v && v <= d.upper, "{p}: {d:?}");
        }
        let sf = expected_density(&GlobalProperty::SquarefreeDisc).unwrap();
        assert!((sf.value - 0.428_249_56).abs() < 1e-8);
        let sfm = expected_density(&GlobalProperty::SquarefreeMinimalDisc).unwrap();
        assert!((sfm.value - 0.428_675_49).abs() < 1e-8);
    }

    #[test]
    fn semistable_elsewhere_uses_minimal_densities() {
        // Type T at S and semistable elsewhere: ζ(10)/ζ(2) · ∏_S ρ_T^M/(1 − p^{−2}).
        let t = GlobalProperty::TypeAt { conditions: vec![(5, TypeLabel::II), (7, TypeLabel::Ige1)], semistable_elsewhere: true };
        let d = expected_density(&t).unwrap();
        let z2 = PI * PI / 6.0;
        let z10 = PI.powi(10) / 93555.0;
        let factor: f64 = [(5u64, TypeLabel::II), (7, TypeLabel::Ige1)]
            .iter()
            .map(|&(p, l)| to_f64(&rho_minimal(p, l)) / (1.0 - (p as f64).powi(-2)))
            .product();
        let closed = z10 / z2 * factor;
        assert!(d.lower <= closed && closed <= d.upper, "{d:?} vs {closed}");
    }

    #[test]
    fn single_bad_prime_comparator_values() {
        assert_eq!(single_bad_prime_comparator(10), q(46, 105));
        let c: Vec<f64> = [100u64, 1000, 10_000].iter().map(|&x| to_f64(&single_bad_prime_comparator(x))).collect();
        assert!(c[0] > c[1] && c[1] > c[2], "{c:?}");
        let d = expected_density(&GlobalProperty::SingleBadPrimeBelow(10)).unwrap();
        assert!(d.comparator);
        assert_eq!(d.exact, Some(q(46, 105)));
    }
}
