//! Monte Carlo densities with lazily extended p-adic digits.
//!
//! Sample `i` draws its coefficients from a ChaCha stream selected by
//! (seed, i); within the stream, the initial digits of coordinate j and
//! every later single-digit extension of it come from disjoint, fixed word
//! positions keyed by (j, digit index). A sample's outcome therefore depends
//! only on (seed, i), never on scheduling, and per-key hit counts are merged
//! by integer addition.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::formula::{formula_table, level_measure};
use super::{Cell, DistributionTable, Key, KeyKind, Mode, PointEstimate, ResidueClassState};
use crate::arith::{Block, Ctx, Int, INF, LIM_CAP};
use crate::error::{require_prime, Result, WdlError};
use crate::script::{Need, Run, State, Summary, TypeLabel};

/// Parameters of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// Digits drawn up front for every coordinate (at least 6).
    pub digit_cap: u32,
    /// A sample needing more digits than this in some coordinate is
    /// reported as unresolved.
    pub ceiling: u32,
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        McConfig { n_samples, seed, digit_cap: 6, ceiling: 256 }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(WdlError::InvalidArgument("n_samples must be at least 1".into()));
        }
        if self.digit_cap < 6 {
            return Err(WdlError::InvalidArgument("digit_cap must be at least 6".into()));
        }
        if self.ceiling < self.digit_cap {
            return Err(WdlError::InvalidArgument("digit ceiling below the initial digit count".into()));
        }
        Ok(())
    }
}

/// Word position of the digits of coordinate `coord` starting at `digit`.
fn word_pos(coord: usize, digit: u32) -> u128 {
    ((coord as u128) << 48) | ((digit as u128) << 16)
}

/// One sampled equation, known to a per-coordinate number of digits.
struct Sample {
    p: u64,
    rng: ChaCha8Rng,
    xs: [BigInt; 5],
    ks: [u32; 5],
}

impl Sample {
    /// Draws `digits` digits per coordinate below the known digits of
    /// `base` (the whole space when `base` is `None`).
    fn draw(p: u64, seed: u64, index: u64, digits: u32, base: Option<&ResidueClassState>) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut xs: [BigInt; 5] = Default::default();
        let mut ks = [digits; 5];
        let bound = (p as u128).checked_pow(digits).filter(|b| *b <= u64::MAX as u128);
        for (j, x) in xs.iter_mut().enumerate() {
            let k0 = base.map_or(0, |b| b.precisions[j]);
            rng.set_word_pos(word_pos(j, k0));
            let fresh = match bound {
                Some(b) => BigInt::from(rng.gen_range(0..b as u64)),
                None => {
                    let mut v = BigInt::from(0);
                    let mut scale = BigInt::from(1);
                    for _ in 0..digits {
                        v += &scale * rng.gen_range(0..p);
                        scale *= p;
                    }
                    v
                }
            };
            *x = match base {
                Some(b) => &b.residues[j] + BigInt::from(p).pow(k0) * fresh,
                None => fresh,
            };
            ks[j] += k0;
        }
        Sample { p, rng, xs, ks }
    }

    /// Appends the next digit of coordinate j.
    fn extend(&mut self, j: usize) {
        let k = self.ks[j];
        self.rng.set_word_pos(word_pos(j, k));
        let d = self.rng.gen_range(0..self.p);
        self.xs[j] += BigInt::from(self.p).pow(k) * d;
        self.ks[j] += 1;
    }
}

fn run_once<I: Int>(xs: [I; 5], ks: [u32; 5], ctx: &Ctx<I>, need: Need) -> std::result::Result<Summary, Block> {
    let mut st = State::new(xs, ks, ctx);
    let mut run = Run { ctx, need, n_input: None, ops: None };
    st.advance(&mut run)
}

/// Outcome of sample `index`, or `None` if it needs more than `ceiling`
/// digits in some coordinate.
pub fn sample_outcome(
    p: u64,
    need: Need,
    cfg: &McConfig,
    index: u64,
    base: Option<&ResidueClassState>,
    machine: &Ctx<i128>,
    big: &Ctx<BigInt>,
) -> Option<Summary> {
    let mut s = Sample::draw(p, cfg.seed, index, cfg.digit_cap, base);
    loop {
        let fits = machine.cap >= 1 && s.ks.iter().all(|k| *k <= machine.cap);
        let mut res = if fits {
            let xs = s.xs.clone().map(|x| i128::try_from(x).expect("below p^K"));
            run_once(xs, s.ks, machine, need)
        } else {
            run_once(s.xs.clone(), s.ks, big, need)
        };
        if let Err(b) = res {
            if b.coord == LIM_CAP {
                res = run_once(s.xs.clone(), s.ks, big, need);
            }
        }
        match res {
            Ok(summary) => return Some(summary),
            Err(b) => {
                let j = b.coord as usize;
                debug_assert!(j < 5, "unbounded backend never blocks on its cap");
                if s.ks[j] >= cfg.ceiling {
                    return None;
                }
                s.extend(j);
            }
        }
    }
}

/// Per-key hit counts over samples 0..n, plus the unresolved count.
fn tally(p: u64, kind: KeyKind, cfg: &McConfig, base: Option<&ResidueClassState>) -> (BTreeMap<Key, u64>, u64) {
    let need = kind.need();
    let machine = Ctx::machine(p);
    let big = Ctx::big(p, INF);
    (0..cfg.n_samples)
        .into_par_iter()
        .fold(
            || (BTreeMap::new(), 0u64),
            |(mut m, mut u), i| {
                match sample_outcome(p, need, cfg, i, base, &machine, &big) {
                    Some(s) => *m.entry(kind.key_of(&s)).or_insert(0u64) += 1,
                    None => u += 1,
                }
                (m, u)
            },
        )
        .reduce(
            || (BTreeMap::new(), 0u64),
            |(mut a, ua), (b, ub)| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                (a, ua + ub)
            },
        )
}

/// Monte Carlo estimates of every row of `kind` at p. Rows are the observed
/// keys together with the closed-form rows; unresolved samples count towards
/// n but towards no row.
pub fn mc_distribution(p: u64, kind: KeyKind, cfg: &McConfig) -> Result<DistributionTable> {
    require_prime(p)?;
    cfg.validate()?;
    build(p, kind, cfg, None)
}

/// Monte Carlo estimates over one residue class (sampled uniformly within
/// it), e.g. a base set, for sharper conditional distributions.
pub fn mc_distribution_in(class: &ResidueClassState, kind: KeyKind, cfg: &McConfig) -> Result<DistributionTable> {
    cfg.validate()?;
    build(class.p, kind, cfg, Some(class))
}

fn build(p: u64, kind: KeyKind, cfg: &McConfig, base: Option<&ResidueClassState>) -> Result<DistributionTable> {
    let (hits, unresolved) = tally(p, kind, cfg, base);
    let m_max = hits
        .keys()
        .filter_map(|k| match k {
            Key::Kodaira(_, Some(m)) => Some(*m),
            Key::Tamagawa { split: Some(true), cp: Some(c), .. } => Some(*c),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    let mut t = DistributionTable::new(p, kind, Mode::MonteCarlo);
    for k in formula_table(p, kind, m_max)?.rows.keys() {
        t.rows.insert(*k, Cell::Estimate(PointEstimate::from_counts(0, cfg.n_samples)));
    }
    for (k, h) in hits {
        t.rows.insert(k, Cell::Estimate(PointEstimate::from_counts(h, cfg.n_samples)));
    }
    t.meta.samples = Some(cfg.n_samples);
    t.meta.unresolved = Some(unresolved);
    t.meta.seed = Some(cfg.seed);
    Ok(t)
}

/// Frequency of `key` among the samples whose row has the same type label
/// (e.g. the share of c_p = 1 within I0*), with its binomial standard error.
pub fn conditional_estimate(t: &DistributionTable, key: &Key) -> Option<PointEstimate> {
    let label = key.label()?;
    let hits = t.estimate(key)?.hits;
    let total: u64 = t
        .rows
        .iter()
        .filter(|(k, _)| k.label() == Some(label))
        .filter_map(|(_, c)| c.estimate())
        .map(|e| e.hits)
        .sum();
    Some(PointEstimate::from_counts(hits, total))
}

/// One level of non-minimality: MC estimate against μ(W_k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: u32,
    /// True for the final row, which collects every level above `k_max`.
    pub at_least: bool,
    pub estimate: PointEstimate,
    pub exact: BigRational,
}

/// MC estimates of μ(W_k) for k ≤ k_max (and of the deeper remainder),
/// drawing 6(k_max+1) digits up front so that levels up to k_max are
/// decided without extension in almost all samples.
pub fn level_distribution(p: u64, k_max: u32, n_samples: u64, seed: u64) -> Result<Vec<LevelRow>> {
    if k_max > 3 {
        return Err(WdlError::InvalidArgument("k_max must be at most 3".into()));
    }
    let digits = 6 * (k_max + 1);
    let cfg = McConfig { n_samples, seed, digit_cap: digits, ceiling: digits.max(256) };
    let t = mc_distribution(p, KeyKind::TypeByLevel { max_level: k_max }, &cfg)?;
    let mut per_level = vec![0u64; k_max as usize + 2];
    for (k, c) in &t.rows {
        if let (Key::TypeLevel(l, lv), Some(e)) = (k, c.estimate()) {
            let idx = if *l == TypeLabel::NonMinimal { k_max as usize + 1 } else { *lv as usize };
            per_level[idx] += e.hits;
        }
    }
    let deeper = super::p_pow_neg(p, 10 * (k_max + 1));
    Ok(per_level
        .into_iter()
        .enumerate()
        .map(|(k, h)| LevelRow {
            level: k as u32,
            at_least: k as u32 == k_max + 1,
            estimate: PointEstimate::from_counts(h, n_samples),
            exact: if k as u32 == k_max + 1 { deeper.clone() } else { level_measure(p, k as u32) },
        })
        .collect())
}
