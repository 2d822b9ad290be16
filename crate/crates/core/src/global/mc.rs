//! Seeded Monte Carlo over height boxes.
//!
//! Sample `i` is drawn from the ChaCha stream selected by (seed, i); a
//! singular draw is discarded and redrawn from the same stream. Outcomes
//! depend only on (seed, i), and counts are merged by integer addition, so
//! results are identical at every thread count.

use num_bigint::{BigInt, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::euler::{euler_product, primes_up_to, prime_tail_bound};
use super::expected::{expected_density, product_spec, single_bad_prime_comparator};
use super::predicate::{Evaluator, Outcome};
use super::{is_zero_mod, proportion, EstimateReport, GlobalProperty, HeightBox};
use crate::error::{Result, WdlError};
use crate::local::to_f64;
use crate::weierstrass::{InvariantSet, WeierstrassEq};

/// Parameters of a global Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalMcConfig {
    pub height: HeightBox,
    pub n_samples: u64,
    pub seed: u64,
    /// Primes p ≤ bound are tested directly.
    pub bound: u64,
}

impl GlobalMcConfig {
    pub fn new(x: u64, n_samples: u64, seed: u64, bound: u64) -> Result<Self> {
        Ok(GlobalMcConfig { height: HeightBox::integer(x)?, n_samples, seed, bound })
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(WdlError::InvalidArgument("n_samples must be at least 1".into()));
        }
        if self.bound < 2 {
            return Err(WdlError::InvalidArgument("prime bound B must be at least 2".into()));
        }
        Ok(())
    }
}

/// The random generator of sample `index`.
pub(crate) fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniform nonsingular tuple of the box, its invariants and the number of
/// singular draws discarded on the way.
fn draw(hbox: &HeightBox, rng: &mut ChaCha8Rng) -> (WeierstrassEq, InvariantSet, u64) {
    let mut rejected = 0;
    loop {
        let a = hbox.bounds.clone().map(|b| rng.gen_bigint_range(&-&b, &(&b + 1u32)));
        let e = WeierstrassEq::new(a);
        let inv = e.invariants();
        if !inv.delta.is_zero() {
            return (e, inv, rejected);
        }
        rejected += 1;
    }
}

/// Sum of per-sample counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    hits: u64,
    undetermined: u64,
    singular: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts { hits: self.hits + o.hits, undetermined: self.undetermined + o.undetermined, singular: self.singular + o.singular }
    }
}

/// Estimates the density of a property over the box, testing primes up to
/// the bound, and reports the truncated product and tail allowance it is to
/// be compared with.
pub fn mc_global(property: &GlobalProperty, cfg: &GlobalMcConfig) -> Result<EstimateReport> {
    cfg.validate()?;
    let ev = Evaluator::new(property, cfg.bound)?;
    let counts = (0..cfg.n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed, i);
            let (e, inv, singular) = draw(&cfg.height, &mut rng);
            let outcome = ev.evaluate_with(&e, &inv);
            Counts {
                hits: (outcome == Outcome::Hit) as u64,
                undetermined: (outcome == Outcome::Undetermined) as u64,
                singular,
            }
        })
        .reduce(Counts::default, |a, b| a + b);
    let (truncated_product, tail_allowance, expected) = match product_spec(property, cfg.bound)? {
        Some(spec) => {
            let tail = if spec.c.is_zero() { BigRational::zero() } else { &spec.c * prime_tail_bound(cfg.bound, spec.e) };
            let finite = spec.c.is_zero();
            let trunc = euler_product(&spec)?.value;
            let expected = if finite { trunc } else { expected_density(property)?.value };
            (trunc, tail, Some(expected))
        }
        None => {
            let GlobalProperty::SingleBadPrimeBelow(x) = property else { unreachable!() };
            let c = to_f64(&single_bad_prime_comparator(*x));
            (c, BigRational::zero(), Some(c))
        }
    };
    let (estimate, stderr) = proportion(counts.hits, cfg.n_samples);
    Ok(EstimateReport {
        property: property.to_string(),
        x: cfg.height.x.to_string(),
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        hits: counts.hits,
        estimate,
        stderr,
        bound: cfg.bound,
        tail_allowance,
        undetermined: counts.undetermined,
        undetermined_fraction: counts.undetermined as f64 / cfg.n_samples as f64,
        singular_resampled: counts.singular,
        truncated_product,
        expected,
    })
}

/// Families of per-prime excluded sets whose tail density is probed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TailFamily {
    /// p | c4 and p | c6.
    AdditiveOrNonminimal,
    /// p ∤ c4 and p² | Δ.
    WeakDisc,
}

impl TailFamily {
    pub fn name(self) -> &'static str {
        match self {
            TailFamily::AdditiveOrNonminimal => "additive-or-nonminimal",
            TailFamily::WeakDisc => "weak-disc",
        }
    }

    fn contains(self, inv: &InvariantSet, p: u64) -> bool {
        match self {
            TailFamily::AdditiveOrNonminimal => is_zero_mod(&inv.c4, p) && is_zero_mod(&inv.c6, p),
            TailFamily::WeakDisc => !is_zero_mod(&inv.c4, p) && is_zero_mod(&inv.delta, p * p),
        }
    }

    /// μ(U_p): 1/p at 2 and 3 and 1/p² beyond for the first family;
    /// (p−1)/p³ (minimal of type I_m, m ≥ 2) for the second.
    pub fn local_measure(self, p: u64) -> BigRational {
        let p = BigInt::from(p);
        match self {
            TailFamily::AdditiveOrNonminimal if p <= BigInt::from(3) => BigRational::new(BigInt::one(), p),
            TailFamily::AdditiveOrNonminimal => BigRational::new(BigInt::one(), &p * &p),
            TailFamily::WeakDisc => BigRational::new(&p - 1, p.pow(3)),
        }
    }
}

/// ρ̂_M for one M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub m: u64,
    /// Samples lying in U_p for some prime M < p ≤ B.
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
    /// Σ_{M<p≤B} 2/p².
    pub comparator: BigRational,
    /// Σ_{M<p≤B} μ(U_p), the union bound for this family.
    pub union_bound: BigRational,
}

/// An empirical tail-density curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailProbe {
    pub family: TailFamily,
    pub x: String,
    pub n_samples: u64,
    pub seed: u64,
    pub bound: u64,
    pub rows: Vec<TailRow>,
}

/// Estimates, for each M, the fraction of box samples lying in U_p for
/// some prime p with M < p ≤ B.
pub fn tail_density_probe(family: TailFamily, m_list: &[u64], cfg: &GlobalMcConfig) -> Result<TailProbe> {
    cfg.validate()?;
    if m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(WdlError::InvalidArgument("M values must be strictly increasing".into()));
    }
    let primes = primes_up_to(cfg.bound);
    // Largest prime p ≤ B with the sample in U_p (0 if none).
    let largest: Vec<u64> = (0..cfg.n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed, i);
            let (_, inv, _) = draw(&cfg.height, &mut rng);
            primes.iter().rev().copied().find(|&p| family.contains(&inv, p)).unwrap_or(0)
        })
        .collect();
    let rows = m_list
        .iter()
        .map(|&m| {
            let hits = largest.iter().filter(|&&p| p > m).count() as u64;
            let (estimate, stderr) = proportion(hits, cfg.n_samples);
            let range = primes.iter().copied().filter(|&p| p > m);
            let comparator = range.clone().map(|p| BigRational::new(BigInt::from(2), BigInt::from(p * p))).sum();
            let union_bound = range.map(|p| family.local_measure(p)).sum();
            TailRow { m, hits, estimate, stderr, comparator, union_bound }
        })
        .collect();
    Ok(TailProbe {
        family,
        x: cfg.height.x.to_string(),
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        bound: cfg.bound,
        rows,
    })
}

/// One cutoff of the single-bad-prime scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub cutoff: u64,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
    /// (Σ_{p≤X} 1/(p−1)) · ∏_{q≤X} (1 − 1/q).
    pub comparator: BigRational,
    pub comparator_value: f64,
}

/// For each cutoff X, the fraction of box samples with exactly one prime
/// p ≤ X dividing Δ, next to the closed-form comparator. The bound in `cfg`
/// is unused.
pub fn prime_conductor_scan(cutoffs: &[u64], cfg: &GlobalMcConfig) -> Result<Vec<ScanRow>> {
    if cfg.n_samples == 0 {
        return Err(WdlError::InvalidArgument("n_samples must be at least 1".into()));
    }
    if cutoffs.iter().any(|&x| !(2..=10_000).contains(&x)) {
        return Err(WdlError::InvalidArgument("cutoffs must lie in [2, 10^4]".into()));
    }
    let top = cutoffs.iter().copied().max().unwrap_or(2);
    let primes = primes_up_to(top);
    // For each sample, the two smallest primes ≤ top dividing Δ.
    let small: Vec<[u64; 2]> = (0..cfg.n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed, i);
            let (_, inv, _) = draw(&cfg.height, &mut rng);
            let mut found = [u64::MAX; 2];
            let mut k = 0;
            for &p in &primes {
                if is_zero_mod(&inv.delta, p) {
                    found[k] = p;
                    k += 1;
                    if k == 2 {
                        break;
                    }
                }
            }
            found
        })
        .collect();
    Ok(cutoffs
        .iter()
        .map(|&x| {
            let hits = small.iter().filter(|f| f[0] <= x && f[1] > x).count() as u64;
            let (estimate, stderr) = proportion(hits, cfg.n_samples);
            let comparator = single_bad_prime_comparator(x);
            let comparator_value = to_f64(&comparator);
            ScanRow { cutoff: x, hits, estimate, stderr, comparator, comparator_value }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(x: u64, n: u64, seed: u64, b: u64) -> GlobalMcConfig {
        GlobalMcConfig::new(x, n, seed, b).unwrap()
    }

    #[test]
    fn draws_stay_in_the_box() {
        let hbox = HeightBox::integer(3).unwrap();
        for i in 0..200 {
            let (e, _, _) = draw(&hbox, &mut sample_rng(7, i));
            assert!(e.height_le(&hbox.x));
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let c = cfg(100, 2000, 11, 100);
        let a = mc_global(&GlobalProperty::SemistableCurve, &c).unwrap();
        let b = mc_global(&GlobalProperty::SemistableCurve, &c).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let d = pool.install(|| mc_global(&GlobalProperty::SemistableCurve, &c).unwrap());
        assert_eq!(a, d);
    }

    #[test]
    fn good_at_two_is_near_its_density() {
        let p = GlobalProperty::GoodAt { primes: vec![2], semistable_elsewhere: false };
        let r = mc_global(&p, &cfg(1000, 20_000, 3, 100)).unwrap();
        assert!((r.truncated_product - 512.0 / 1023.0).abs() < 1e-15);
        assert!(r.within(4.0), "{r:?}");
    }

    #[test]
    fn squarefree_disc_small_run() {
        let r = mc_global(&GlobalProperty::SquarefreeDisc, &cfg(1000, 20_000, 5, 1000)).unwrap();
        assert!(r.within(4.0), "{r:?}");
        assert_eq!(r.undetermined, 0);
    }

    #[test]
    fn tail_probe_trivial_range() {
        let t = tail_density_probe(TailFamily::WeakDisc, &[10, 100, 1000], &cfg(100, 500, 1, 100)).unwrap();
        assert_eq!(t.rows[1].hits, 0);
        assert_eq!(t.rows[2].hits, 0);
        assert!(t.rows[1].comparator.is_zero());
        assert!(tail_density_probe(TailFamily::WeakDisc, &[10, 10], &cfg(100, 5, 1, 100)).is_err());
    }

    #[test]
    fn local_measures_match_box_frequencies() {
        // μ(U_p) for both families, from the residues of a large box.
        let c = cfg(1000, 40_000, 9, 7);
        for fam in [TailFamily::AdditiveOrNonminimal, TailFamily::WeakDisc] {
            for p in [2u64, 3, 5, 7] {
                let hits = (0..c.n_samples)
                    .filter(|&i| {
                        let (_, inv, _) = draw(&c.height, &mut sample_rng(c.seed, i));
                        fam.contains(&inv, p)
                    })
                    .count() as u64;
                let (est, _) = proportion(hits, c.n_samples);
                let mu = to_f64(&fam.local_measure(p));
                let sd = (mu * (1.0 - mu) / c.n_samples as f64).sqrt();
                assert!((est - mu).abs() <= 4.0 * sd + 1e-3, "{fam:?} p={p}: {est} vs {mu}");
            }
        }
    }

    #[test]
    fn scan_rows() {
        let rows = prime_conductor_scan(&[10, 100], &cfg(1000, 5000, 2, 2)).unwrap();
        assert_eq!(rows[0].comparator, BigRational::new(46.into(), 105.into()));
        for r in &rows {
            let sd = (r.comparator_value * (1.0 - r.comparator_value) / 5000.0).sqrt();
            assert!((r.estimate - r.comparator_value).abs() <= 4.0 * sd, "{r:?}");
        }
    }
}
