//! Certified exact densities by demand-driven refinement of residue classes.
//!
//! The worklist holds machine states (working box, stage, level). In round r
//! every live state stands for `count` disjoint input classes of measure
//! p^{-r} each: a refinement adds one digit, a scale-down trades 16 digits of
//! box precision for one level, and translations preserve precision, so the
//! exponent of every live state equals the round number. States that reach
//! the same box, stage, level and split flag describe the same future and are
//! merged by adding their counts; this is what keeps the worklist small.
//!
//! Determined outcomes accumulate exact per-key counts. At the end every row
//! gets the interval [determined mass, determined mass + mass of the live
//! states that could still produce the row].

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::formula::{cp_relative, fp_relative, formula_table};
use super::{require_small_prime, Cell, DensityInterval, DistributionTable, Key, KeyKind, Mode};
use crate::arith::{Ctx, Int, TV};
use crate::error::{Result, WdlError};
use crate::script::{Need, Run, Stage, State, TypeLabel};

/// Parameters of an exact run.
#[derive(Debug, Clone)]
pub struct ExactConfig {
    /// Stop once every row's interval is at most this wide.
    pub width_target: BigRational,
    /// Maximum number of refinement rounds (digits per input class).
    pub depth_budget: u32,
    /// Stop (incomplete) if the live worklist exceeds this many states.
    pub max_live: usize,
    /// Checkpoint file: resumed from if present, rewritten periodically.
    pub checkpoint: Option<PathBuf>,
    /// Rounds between checkpoints.
    pub checkpoint_every: u32,
    /// Progress lines on stderr.
    pub verbose: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            width_target: super::p_pow_neg(2, 30),
            depth_budget: 40,
            max_live: 30_000_000,
            checkpoint: None,
            checkpoint_every: 5,
            verbose: false,
        }
    }
}

/// Worklist contents, also the checkpoint format.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Worklist {
    p: u64,
    kind: KeyKind,
    round: u32,
    /// Live states, each standing for `count` classes of measure p^{-round}.
    live: Vec<(State<i128>, u128)>,
    /// States whose next refinement exceeds the machine precision cap:
    /// (state, count, exponent). Their mass stays undetermined.
    frozen: Vec<(State<i128>, u128, u32)>,
    /// Determined counts per key and exponent.
    totals: Vec<(Key, Vec<(u32, u128)>)>,
    states: u64,
}

enum Outcome {
    Done(Key),
    Split(State<i128>, usize),
    Frozen,
}

fn add_count(map: &mut HashMap<State<i128>, u128>, s: State<i128>, c: u128) -> Result<()> {
    let e = map.entry(s).or_insert(0);
    *e = e.checked_add(c).ok_or_else(|| WdlError::InvalidArgument("class count overflow".into()))?;
    Ok(())
}

/// What a live state can still produce.
struct Reach {
    here: &'static [TypeLabel],
    /// A scale-down is still allowed, after which any type may occur.
    deeper: bool,
    level: u32,
    /// Lower bound on m for I_m (resp. I_m*) outcomes.
    m_min: u32,
    split: Option<bool>,
}

fn reach(s: &State<i128>, need: &Need) -> Reach {
    use TypeLabel::*;
    const ALL: &[TypeLabel] = &[I0, Ige1, II, III, IV, I0s, Ige1s, IVs, IIIs, IIs, NonMinimal];
    let here: &'static [TypeLabel] = match s.stage {
        Stage::Start => ALL,
        Stage::Mult => &ALL[1..],
        Stage::MultLoop { .. } => &[Ige1],
        Stage::II => &ALL[2..],
        Stage::III => &ALL[3..],
        Stage::IV => &ALL[4..],
        Stage::I0s => &ALL[5..],
        Stage::ImStar { .. } => &[Ige1s],
        Stage::IVs => &ALL[7..],
        Stage::IIIs => &ALL[8..],
        Stage::IIs => &ALL[9..],
    };
    let m_min = match s.stage {
        Stage::MultLoop { k } => k,
        Stage::ImStar { m, .. } => m,
        _ => 1,
    };
    Reach { here, deeper: here.contains(&NonMinimal) && s.level < need.max_level, level: s.level, m_min, split: s.split }
}

fn fp_possible(p: u64, l: TypeLabel, f: u32) -> bool {
    fp_relative(p, l).iter().any(|(g, _)| *g == f)
}

fn cp_possible(p: u64, l: TypeLabel, c: u32) -> bool {
    l == TypeLabel::I0 && c == 1 || cp_relative(p, l).iter().any(|(d, _)| *d == c)
}

/// Whether some member of a live state's classes may land in row `key`.
///
/// Label and m constraints follow from the structure of the branch script.
/// Conductor exponents are constrained to the values that occur with positive
/// density within each type; the remaining values form a null set, so the
/// upper bounds remain valid as bounds on measures.
fn could_yield(p: u64, kind: KeyKind, r: &Reach, key: &Key) -> bool {
    use TypeLabel::*;
    let here = |l: TypeLabel| r.here.contains(&l);
    let m_ok = |l: TypeLabel, m: Option<u32>| match (l, m) {
        (Ige1 | Ige1s, Some(m)) => m >= r.m_min,
        (Ige1 | Ige1s, None) => false,
        (_, m) => m.is_none(),
    };
    match (*key, kind) {
        (Key::Type(l), _) => here(l),
        (Key::Kodaira(l, m), _) => here(l) && m_ok(l, m),
        (Key::Conductor(None), _) => here(NonMinimal),
        (Key::Conductor(Some(f)), _) => r.here.iter().any(|l| *l != NonMinimal && fp_possible(p, *l, f)),
        (Key::TypeConductor(l, f), _) => {
            here(l)
                && match f {
                    None => l == NonMinimal,
                    Some(f) => l != NonMinimal && fp_possible(p, l, f),
                }
        }
        (Key::Tamagawa { label, split, cp }, _) => {
            if !here(label) {
                return false;
            }
            match (label, cp) {
                (NonMinimal, c) => c.is_none(),
                (_, None) => false,
                (Ige1, Some(c)) => {
                    let split_ok = r.split.is_none() || r.split == split;
                    split_ok
                        && match split {
                            Some(true) => c >= r.m_min,
                            Some(false) => c == 1 || c == 2,
                            None => false,
                        }
                }
                (l, Some(c)) => split.is_none() && cp_possible(p, l, c),
            }
        }
        (Key::TypeLevel(l, lv), KeyKind::TypeByLevel { max_level }) => {
            if l == NonMinimal {
                lv == max_level + 1 && here(NonMinimal)
            } else {
                (lv == r.level && here(l)) || (r.deeper && lv > r.level && lv <= max_level)
            }
        }
        (Key::TypeLevel(..), _) => false,
        (Key::CurveType(l), _) => here(l) || r.deeper,
    }
}

/// Runs one state until it finishes, blocks or must freeze.
fn step(state: &State<i128>, ctx: &Ctx<i128>, kind: KeyKind, need: Need) -> Outcome {
    let mut s = state.clone();
    let mut run = Run { ctx, need, n_input: None, ops: None };
    match s.advance(&mut run) {
        Ok(summary) => Outcome::Done(kind.key_of(&summary)),
        Err(b) => {
            let i = b.coord as usize;
            if i >= 5 || s.a[i].k >= ctx.cap {
                Outcome::Frozen
            } else {
                Outcome::Split(s, i)
            }
        }
    }
}

impl Worklist {
    fn fresh(p: u64, kind: KeyKind, ctx: &Ctx<i128>) -> Self {
        let root = State::new([0i128; 5], [0; 5], ctx);
        Worklist { p, kind, round: 0, live: vec![(root, 1)], frozen: Vec::new(), totals: Vec::new(), states: 0 }
    }

    fn totals_map(&self) -> BTreeMap<Key, BTreeMap<u32, u128>> {
        self.totals.iter().map(|(k, v)| (*k, v.iter().copied().collect())).collect()
    }

    /// Exact conservation: determined + live + frozen mass = 1.
    fn check_conservation(&self) -> Result<()> {
        let r = self.round;
        let p = BigInt::from(self.p);
        let mut sum = BigInt::zero();
        let scaled = |c: u128, e: u32| BigInt::from(c) * p.pow(r - e);
        for (_, v) in &self.totals {
            for (e, c) in v {
                sum += scaled(*c, *e);
            }
        }
        for (_, c) in &self.live {
            sum += BigInt::from(*c);
        }
        for (_, c, e) in &self.frozen {
            sum += scaled(*c, *e);
        }
        if sum != p.pow(r) {
            return Err(WdlError::InvalidArgument(format!("mass not conserved at round {r}")));
        }
        Ok(())
    }

    fn process_round(&mut self, ctx: &Ctx<i128>, need: Need) -> Result<()> {
        let kind = self.kind;
        let outcomes: Vec<Outcome> = self.live.par_iter().map(|(s, _)| step(s, ctx, kind, need)).collect();
        let mut totals = self.totals_map();
        let mut next: HashMap<State<i128>, u128> = HashMap::new();
        let live = std::mem::take(&mut self.live);
        self.states += live.len() as u64;
        for ((orig, count), out) in live.into_iter().zip(outcomes) {
            match out {
                Outcome::Done(key) => {
                    let e = totals.entry(key).or_default().entry(self.round).or_insert(0);
                    *e = e.checked_add(count).ok_or_else(|| WdlError::InvalidArgument("count overflow".into()))?;
                }
                Outcome::Frozen => self.frozen.push((orig, count, self.round)),
                Outcome::Split(s, i) => {
                    let k = s.a[i].k;
                    let step = ctx.pow(k);
                    for d in 0..self.p {
                        let mut child = s.clone();
                        let x = s.a[i].x.add(&step.mul_i64(d as i64));
                        child.a[i] = TV::coord(x, k + 1, i as u8, ctx);
                        add_count(&mut next, child, count)?;
                    }
                }
            }
        }
        let mut live: Vec<(State<i128>, u128)> = next.into_iter().collect();
        live.sort_unstable();
        self.live = live;
        self.totals = totals.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect();
        self.round += 1;
        Ok(())
    }

    /// The table at the current point of the run.
    fn table(&self, need: &Need) -> Result<DistributionTable> {
        let p = self.p;
        let totals = self.totals_map();
        let rat = |c: u128, e: u32| BigRational::new(BigInt::from(c), BigInt::from(p).pow(e));
        let mut lower: BTreeMap<Key, BigRational> = totals
            .iter()
            .map(|(k, v)| (*k, v.iter().fold(BigRational::zero(), |a, (e, c)| a + rat(*c, *e))))
            .collect();
        let m_max = totals
            .keys()
            .filter_map(|k| match k {
                Key::Kodaira(_, Some(m)) => Some(*m),
                Key::Tamagawa { split: Some(true), cp: Some(c), .. } => Some(*c),
                _ => None,
            })
            .max()
            .unwrap_or(0)
            + 1;
        for k in formula_table(p, self.kind, m_max)?.rows.keys() {
            lower.entry(*k).or_insert_with(BigRational::zero);
        }
        let keys: Vec<Key> = lower.keys().copied().collect();
        // Live mass per row, in units of p^{-round}.
        let mut live_counts = vec![0u128; keys.len()];
        let mut undetermined = BigRational::zero();
        for (s, c) in &self.live {
            let r = reach(s, need);
            for (j, key) in keys.iter().enumerate() {
                if could_yield(p, self.kind, &r, key) {
                    live_counts[j] = live_counts[j].saturating_add(*c);
                }
            }
            undetermined += rat(*c, self.round);
        }
        let mut frozen_extra = vec![BigRational::zero(); keys.len()];
        for (s, c, e) in &self.frozen {
            let r = reach(s, need);
            let m = rat(*c, *e);
            for (j, key) in keys.iter().enumerate() {
                if could_yield(p, self.kind, &r, key) {
                    frozen_extra[j] += &m;
                }
            }
            undetermined += m;
        }
        let mut t = DistributionTable::new(p, self.kind, Mode::Exact);
        for (j, key) in keys.iter().enumerate() {
            let lo = lower[key].clone();
            let hi = &lo + rat(live_counts[j], self.round) + &frozen_extra[j];
            let hi = if hi > BigRational::one() { BigRational::one() } else { hi };
            t.rows.insert(*key, Cell::Interval(DensityInterval::new(lo, hi)));
        }
        t.meta.undetermined = Some(undetermined);
        t.meta.rounds = Some(self.round);
        t.meta.states = Some(self.states);
        Ok(t)
    }

    fn save(&self, path: &PathBuf) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let data = serde_json::to_vec(self).map_err(|e| WdlError::InvalidArgument(format!("checkpoint: {e}")))?;
        std::fs::write(&tmp, data).map_err(|e| WdlError::InvalidArgument(format!("checkpoint write: {e}")))?;
        std::fs::rename(&tmp, path).map_err(|e| WdlError::InvalidArgument(format!("checkpoint rename: {e}")))?;
        Ok(())
    }

    fn load(path: &PathBuf) -> Result<Option<Self>> {
        match std::fs::read(path) {
            Ok(data) => serde_json::from_slice(&data)
                .map(Some)
                .map_err(|e| WdlError::InvalidArgument(format!("checkpoint {}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(WdlError::InvalidArgument(format!("checkpoint read: {e}"))),
        }
    }
}

/// Certified enclosures of the densities of every row of `kind` at p.
///
/// Runs refinement rounds until every interval is at most `width_target`
/// wide, the depth budget is exhausted, or the worklist outgrows `max_live`;
/// in the latter two cases the table is returned with `meta.complete =
/// Some(false)`. Rows are the determined keys together with the closed-form
/// rows of the same kind.
pub fn exact_distribution(p: u64, kind: KeyKind, cfg: &ExactConfig) -> Result<DistributionTable> {
    require_small_prime(p)?;
    let ctx = Ctx::machine(p);
    let need = kind.need();
    let mut wl = match &cfg.checkpoint {
        Some(path) => match Worklist::load(path)? {
            Some(w) if w.p == p && w.kind == kind => w,
            Some(_) => {
                return Err(WdlError::InvalidArgument(format!(
                    "checkpoint {} belongs to a different run",
                    path.display()
                )))
            }
            None => Worklist::fresh(p, kind, &ctx),
        },
        None => Worklist::fresh(p, kind, &ctx),
    };
    let mut complete;
    loop {
        wl.check_conservation()?;
        let t = wl.table(&need)?;
        complete = t.max_width() <= cfg.width_target;
        if cfg.verbose {
            eprintln!(
                "[exact p={p} {}] round {} live {} frozen {} undetermined {:.3e} max width {:.3e}",
                kind.name(),
                wl.round,
                wl.live.len(),
                wl.frozen.len(),
                super::to_f64(t.meta.undetermined.as_ref().expect("set")),
                super::to_f64(&t.max_width())
            );
        }
        if complete || wl.live.is_empty() || wl.round >= cfg.depth_budget || wl.live.len() > cfg.max_live {
            break;
        }
        wl.process_round(&ctx, need)?;
        if let Some(path) = &cfg.checkpoint {
            if wl.round % cfg.checkpoint_every.max(1) == 0 {
                wl.save(path)?;
            }
        }
    }
    if let Some(path) = &cfg.checkpoint {
        wl.save(path)?;
    }
    let mut t = wl.table(&need)?;
    t.meta.complete = Some(complete);
    Ok(t)
}
