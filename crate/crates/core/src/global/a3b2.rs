//! Square-free values of a³ − b² over the weighted box |a| ≤ X², |b| ≤ X³:
//! the exhaustive local-factor census and a seeded Monte Carlo estimate.

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::euler::{euler_product, prime_tail_bound, primes_up_to, EulerProductSpec};
use super::mc::sample_rng;
use super::{proportion, EstimateReport};
use crate::error::{require_prime, Result, WdlError};

/// Largest X for which a³ and b² fit in 128-bit arithmetic.
pub const MAX_A3B2_X: u64 = 100_000;

/// Pairs (a, b) mod p² with p² | a³ − b².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct A3b2Census {
    pub p: u64,
    pub count: u64,
    /// p⁴·(2/p² − 1/p³) = 2p² − p.
    pub expected: u64,
}

/// Exhaustive count over (Z/p²Z)².
pub fn a3b2_census(p: u64) -> Result<A3b2Census> {
    require_prime(p)?;
    if p > 13 {
        return Err(WdlError::InvalidArgument(format!("census limited to p <= 13 (got {p})")));
    }
    let m = p * p;
    let cubes: Vec<u64> = (0..m).map(|a| a * a % m * a % m).collect();
    let mut squares = vec![0u64; m as usize];
    for b in 0..m {
        squares[(b * b % m) as usize] += 1;
    }
    let count = cubes.iter().map(|&c| squares[c as usize]).sum();
    Ok(A3b2Census { p, count, expected: 2 * p * p - p })
}

/// Estimates the density of pairs with a³ − b² free of p² for every p ≤ B.
/// Pairs with a³ = b² (a = t², b = t³) are redrawn.
pub fn squarefree_a3b2_demo(n_samples: u64, x: u64, bound: u64, seed: u64) -> Result<EstimateReport> {
    if n_samples == 0 || x == 0 || bound < 2 {
        return Err(WdlError::InvalidArgument("need n_samples >= 1, X >= 1 and B >= 2".into()));
    }
    if x > MAX_A3B2_X {
        return Err(WdlError::InvalidArgument(format!("X is limited to {MAX_A3B2_X}")));
    }
    let (ab, bb) = ((x * x) as i128, (x as i128).pow(3));
    let squares: Vec<i128> = primes_up_to(bound).into_iter().map(|p| (p * p) as i128).collect();
    let (hits, rejected) = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let mut rejected = 0u64;
            let v = loop {
                let a: i128 = rng.gen_range(-ab..=ab);
                let b: i128 = rng.gen_range(-bb..=bb);
                let v = a * a * a - b * b;
                if v != 0 {
                    break v;
                }
                rejected += 1;
            };
            let free = squares.iter().all(|&q| v % q != 0);
            (free as u64, rejected)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let spec = EulerProductSpec::squarefree_disc(bound);
    let truncated = euler_product(&spec)?.value;
    let tail: BigRational = &spec.c * prime_tail_bound(bound, spec.e);
    let (estimate, stderr) = proportion(hits, n_samples);
    Ok(EstimateReport {
        property: "squarefree-a3-b2".into(),
        x: x.to_string(),
        n_samples,
        seed,
        hits,
        estimate,
        stderr,
        bound,
        tail_allowance: tail,
        undetermined: 0,
        undetermined_fraction: 0.0,
        singular_resampled: rejected,
        truncated_product: truncated,
        expected: Some(euler_product(&spec.with_bound(1_000_000))?.value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_matches_local_factor() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let c = a3b2_census(p).unwrap();
            assert_eq!(c.count, c.expected, "p = {p}");
        }
        assert_eq!(a3b2_census(5).unwrap().count, 45);
        assert!(a3b2_census(17).is_err());
    }

    #[test]
    fn demo_is_deterministic_and_close() {
        let a = squarefree_a3b2_demo(20_000, 1000, 1000, 4).unwrap();
        let b = squarefree_a3b2_demo(20_000, 1000, 1000, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.within(4.0), "{a:?}");
    }

    #[test]
    fn the_curve_t2_t3_is_excluded() {
        // X = 1: the pairs (0,0), (1,1), (1,−1) lie on a³ = b² and are redrawn.
        let r = squarefree_a3b2_demo(2000, 1, 10, 1).unwrap();
        assert!(r.singular_resampled > 0);
    }
}
