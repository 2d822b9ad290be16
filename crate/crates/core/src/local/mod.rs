//! p-adic densities of reduction types, conductor exponents and Tamagawa
//! numbers, computed three ways: closed forms ([`formula`]), certified exact
//! interval counting over residue classes ([`exact`]) and seeded Monte Carlo
//! sampling ([`mc`]).

pub mod classify;
pub mod exact;
pub mod formula;
pub mod lemmas;
pub mod mc;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, WdlError};
use crate::script::{Need, Summary, TypeLabel};

pub use classify::{classify_class, ClassVerdict, Classification, ResidueClassState};
pub use exact::{exact_distribution, ExactConfig};
pub use formula::formula_table;
pub use lemmas::{verify_counting_lemmas, LemmaReport};
pub use mc::{conditional_estimate, level_distribution, mc_distribution, mc_distribution_in, LevelRow, McConfig};


/// What a distribution table is keyed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KeyKind {
    /// Finite type of a level-0 equation (non-minimal equations form one row).
    Type,
    /// Kodaira symbol with the exact index m of I_m and I_m*.
    Kodaira,
    /// Conductor exponent of a minimal equation (non-minimal: one row).
    Conductor,
    /// Tamagawa number per type; multiplicative rows also record splitness.
    Tamagawa,
    /// Type together with the level of non-minimality, for levels up to
    /// `max_level`; deeper equations form one non-minimal row.
    TypeByLevel { max_level: u32 },
    /// Type of the curve (of a minimal model), over all equations.
    CurveType,
    /// Type together with the conductor exponent (minimal equations).
    TypeConductor,
}

impl KeyKind {
    /// What the branch script must determine for this key kind.
    pub fn need(self) -> Need {
        let none = Need { m: false, fp: false, cp: false, max_level: 0 };
        match self {
            KeyKind::Type => Need::TYPE,
            KeyKind::Kodaira => Need { m: true, ..none },
            KeyKind::Conductor | KeyKind::TypeConductor => Need { fp: true, ..none },
            KeyKind::Tamagawa => Need { cp: true, ..none },
            KeyKind::TypeByLevel { max_level } => Need { max_level, ..none },
            KeyKind::CurveType => Need { max_level: u32::MAX, ..none },
        }
    }

    /// The row an outcome of the script falls into.
    pub fn key_of(self, s: &Summary) -> Key {
        let nm = s.label == TypeLabel::NonMinimal;
        match self {
            KeyKind::Type => Key::Type(s.label),
            KeyKind::Kodaira => Key::Kodaira(s.label, s.m),
            KeyKind::Conductor => Key::Conductor(if nm { None } else { s.fp }),
            KeyKind::Tamagawa => Key::Tamagawa {
                label: s.label,
                split: if s.label == TypeLabel::Ige1 { s.split } else { None },
                cp: s.cp,
            },
            KeyKind::TypeByLevel { .. } => Key::TypeLevel(s.label, s.level),
            KeyKind::CurveType => Key::CurveType(s.label),
            KeyKind::TypeConductor => Key::TypeConductor(s.label, if nm { None } else { s.fp }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KeyKind::Type => "type",
            KeyKind::Kodaira => "kodaira",
            KeyKind::Conductor => "fp",
            KeyKind::Tamagawa => "tamagawa",
            KeyKind::TypeByLevel { .. } => "level",
            KeyKind::CurveType => "curve-type",
            KeyKind::TypeConductor => "type-fp",
        }
    }
}

impl FromStr for KeyKind {
    type Err = WdlError;

    /// Parses a key-kind name; `level` takes an optional `:k` suffix (default 1).
    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let kind = match head {
            "type" => KeyKind::Type,
            "kodaira" => KeyKind::Kodaira,
            "fp" | "conductor" => KeyKind::Conductor,
            "tamagawa" | "cp" => KeyKind::Tamagawa,
            "level" => {
                let max_level = match tail {
                    Some(t) => t.parse().map_err(|_| WdlError::InvalidArgument(format!("bad level bound {t:?}")))?,
                    None => 1,
                };
                return Ok(KeyKind::TypeByLevel { max_level });
            }
            "curve-type" => KeyKind::CurveType,
            "type-fp" => KeyKind::TypeConductor,
            _ => return Err(WdlError::InvalidArgument(format!("unknown key kind {s:?}"))),
        };
        if tail.is_some() {
            return Err(WdlError::InvalidArgument(format!("key kind {head:?} takes no parameter")));
        }
        Ok(kind)
    }
}

/// One row of a distribution table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Key {
    Type(TypeLabel),
    /// m is present for I_m and I_m*.
    Kodaira(TypeLabel, Option<u32>),
    /// `None` is the non-minimal row.
    Conductor(Option<u32>),
    /// `split` is present for multiplicative reduction; `cp` is absent only
    /// for the non-minimal row.
    Tamagawa { label: TypeLabel, split: Option<bool>, cp: Option<u32> },
    TypeLevel(TypeLabel, u32),
    CurveType(TypeLabel),
    TypeConductor(TypeLabel, Option<u32>),
}

impl Key {
    /// The type label a row refers to, if any.
    pub fn label(&self) -> Option<TypeLabel> {
        match *self {
            Key::Type(l) | Key::Kodaira(l, _) | Key::TypeLevel(l, _) | Key::CurveType(l) | Key::TypeConductor(l, _) => Some(l),
            Key::Tamagawa { label, .. } => Some(label),
            Key::Conductor(None) => Some(TypeLabel::NonMinimal),
            Key::Conductor(Some(_)) => None,
        }
    }
}

fn kodaira_name(label: TypeLabel, m: Option<u32>) -> String {
    match (label, m) {
        (TypeLabel::Ige1, Some(m)) => format!("I{m}"),
        (TypeLabel::Ige1s, Some(m)) => format!("I{m}*"),
        _ => label.name().to_string(),
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Key::Type(l) | Key::CurveType(l) => write!(f, "{l}"),
            Key::Kodaira(l, m) => f.write_str(&kodaira_name(l, m)),
            Key::Conductor(Some(e)) => write!(f, "fp={e}"),
            Key::Conductor(None) | Key::TypeConductor(_, None) => write!(f, "non-minimal"),
            Key::Tamagawa { label, split, cp } => {
                write!(f, "{label}")?;
                match split {
                    Some(true) => write!(f, " split")?,
                    Some(false) => write!(f, " non-split")?,
                    None => {}
                }
                if let Some(c) = cp {
                    write!(f, " cp={c}")?;
                }
                Ok(())
            }
            Key::TypeLevel(l, k) => write!(f, "{l} level={k}"),
            Key::TypeConductor(l, Some(e)) => write!(f, "{l} fp={e}"),
        }
    }
}

/// A certified enclosure of a density.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityInterval {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl DensityInterval {
    pub fn new(lower: BigRational, upper: BigRational) -> Self {
        debug_assert!(lower <= upper);
        DensityInterval { lower, upper }
    }

    pub fn point(v: BigRational) -> Self {
        DensityInterval { lower: v.clone(), upper: v }
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lower <= v && v <= &self.upper
    }
}

/// A Monte Carlo frequency with its binomial standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub hits: u64,
    pub n: u64,
    pub value: f64,
    pub stderr: f64,
}

impl PointEstimate {
    pub fn from_counts(hits: u64, n: u64) -> Self {
        let value = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
        let stderr = if n == 0 { 0.0 } else { (value * (1.0 - value) / n as f64).sqrt() };
        PointEstimate { hits, n, value, stderr }
    }

    /// |estimate − x| in units of the binomial standard error under the
    /// hypothesis that the true frequency is x.
    pub fn sigmas_from(&self, x: f64) -> f64 {
        let sd = if self.n == 0 { 0.0 } else { (x * (1.0 - x) / self.n as f64).sqrt() };
        let d = (self.value - x).abs();
        if sd > 0.0 {
            d / sd
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// A table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Interval(DensityInterval),
    Estimate(PointEstimate),
}

impl Cell {
    pub fn interval(&self) -> Option<&DensityInterval> {
        match self {
            Cell::Interval(i) => Some(i),
            Cell::Estimate(_) => None,
        }
    }

    pub fn estimate(&self) -> Option<&PointEstimate> {
        match self {
            Cell::Estimate(e) => Some(e),
            Cell::Interval(_) => None,
        }
    }
}

/// How a table was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Formula,
    Exact,
    MonteCarlo,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Formula => "formula",
            Mode::Exact => "exact",
            Mode::MonteCarlo => "mc",
        }
    }
}

/// Run statistics attached to a table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TableMeta {
    /// Exact mode: measure of the classes still undetermined at the end.
    pub undetermined: Option<BigRational>,
    /// Exact mode: refinement rounds performed.
    pub rounds: Option<u32>,
    /// Exact mode: residue-class states processed over the whole run.
    pub states: Option<u64>,
    /// Exact mode: false if the depth budget ran out before the width target.
    pub complete: Option<bool>,
    /// MC mode: samples drawn.
    pub samples: Option<u64>,
    /// MC mode: samples that exceeded the digit ceiling.
    pub unresolved: Option<u64>,
    /// MC mode: the seed.
    pub seed: Option<u64>,
}

/// A distribution of outcomes over W(Z_p), keyed by one [`KeyKind`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub p: u64,
    pub kind: KeyKind,
    pub mode: Mode,
    pub rows: BTreeMap<Key, Cell>,
    pub meta: TableMeta,
}

impl DistributionTable {
    pub fn new(p: u64, kind: KeyKind, mode: Mode) -> Self {
        DistributionTable { p, kind, mode, rows: BTreeMap::new(), meta: TableMeta::default() }
    }

    pub fn interval(&self, key: &Key) -> Option<&DensityInterval> {
        self.rows.get(key).and_then(Cell::interval)
    }

    pub fn estimate(&self, key: &Key) -> Option<&PointEstimate> {
        self.rows.get(key).and_then(Cell::estimate)
    }

    /// Sum of the lower ends of all interval rows.
    pub fn lower_sum(&self) -> BigRational {
        self.rows.values().filter_map(Cell::interval).fold(BigRational::zero(), |acc, i| acc + &i.lower)
    }

    /// Sum of the upper ends of all interval rows.
    pub fn upper_sum(&self) -> BigRational {
        self.rows.values().filter_map(Cell::interval).fold(BigRational::zero(), |acc, i| acc + &i.upper)
    }

    /// Largest interval width over all rows.
    pub fn max_width(&self) -> BigRational {
        self.rows.values().filter_map(Cell::interval).map(DensityInterval::width).max().unwrap_or_else(BigRational::zero)
    }

    /// Sum of all point estimates.
    pub fn estimate_sum(&self) -> f64 {
        self.rows.values().filter_map(Cell::estimate).map(|e| e.value).sum()
    }
}

/// Verdict of joining one computed row against the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Exact: point interval equal to the formula.
    Match,
    /// Exact: interval of positive width containing the formula value.
    Encloses,
    /// MC: within the stated number of standard errors.
    Consistent,
    Mismatch,
    /// No closed form for this row.
    NoFormula,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Match => "MATCH",
            Verdict::Encloses => "ENCLOSES",
            Verdict::Consistent => "CONSISTENT",
            Verdict::Mismatch => "MISMATCH",
            Verdict::NoFormula => "NO-FORMULA",
        }
    }

    pub fn is_failure(self) -> bool {
        self == Verdict::Mismatch
    }
}

/// One joined row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub key: Key,
    pub formula: Option<BigRational>,
    pub verdict: Verdict,
}

/// Joins a computed table against the closed-form table of the same kind.
/// MC rows are judged at `sigmas` standard errors.
pub fn compare_with_formula(table: &DistributionTable, sigmas: f64) -> Result<Vec<Comparison>> {
    let m_max = table
        .rows
        .keys()
        .filter_map(|k| match k {
            Key::Kodaira(_, Some(m)) => Some(*m),
            Key::Tamagawa { split: Some(true), cp: Some(c), .. } => Some(*c),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    let f = formula_table(table.p, table.kind, m_max)?;
    let mut out = Vec::new();
    for (key, cell) in &table.rows {
        let formula = f.interval(key).map(|i| i.lower.clone());
        let verdict = match (&formula, cell) {
            (None, _) => Verdict::NoFormula,
            (Some(v), Cell::Interval(i)) => {
                if i.is_point() && &i.lower == v {
                    Verdict::Match
                } else if i.contains(v) && !i.is_point() {
                    Verdict::Encloses
                } else {
                    Verdict::Mismatch
                }
            }
            (Some(v), Cell::Estimate(e)) => {
                if e.sigmas_from(to_f64(v)) <= sigmas {
                    Verdict::Consistent
                } else {
                    Verdict::Mismatch
                }
            }
        };
        out.push(Comparison { key: *key, formula, verdict });
    }
    Ok(out)
}

/// p^{-e} as an exact rational.
pub fn p_pow_neg(p: u64, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(e))
}

/// Nearest double to an exact rational (sufficient for reporting).
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale numerator and denominator down together for huge operands.
    let shift = r.denom().bits().max(r.numer().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// Rejects primes outside the exact-counting range.
pub(crate) fn require_small_prime(p: u64) -> Result<()> {
    crate::error::require_prime(p)?;
    if p > 13 {
        return Err(WdlError::InvalidArgument(format!(
            "exact counting is supported for p <= 13 (got {p}); use Monte Carlo for larger primes"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_kinds_parse() {
        assert_eq!("type".parse::<KeyKind>().unwrap(), KeyKind::Type);
        assert_eq!("fp".parse::<KeyKind>().unwrap(), KeyKind::Conductor);
        assert_eq!("level:2".parse::<KeyKind>().unwrap(), KeyKind::TypeByLevel { max_level: 2 });
        assert_eq!("level".parse::<KeyKind>().unwrap(), KeyKind::TypeByLevel { max_level: 1 });
        assert!("type:3".parse::<KeyKind>().is_err());
        assert!("bogus".parse::<KeyKind>().is_err());
    }

    #[test]
    fn key_display() {
        assert_eq!(Key::Kodaira(TypeLabel::Ige1, Some(3)).to_string(), "I3");
        assert_eq!(Key::Kodaira(TypeLabel::Ige1s, Some(2)).to_string(), "I2*");
        assert_eq!(Key::Conductor(Some(2)).to_string(), "fp=2");
        assert_eq!(Key::Conductor(None).to_string(), "non-minimal");
        let t = Key::Tamagawa { label: TypeLabel::Ige1, split: Some(true), cp: Some(4) };
        assert_eq!(t.to_string(), "I>=1 split cp=4");
    }

    #[test]
    fn interval_basics() {
        let half = BigRational::new(1.into(), 2.into());
        let i = DensityInterval::new(half.clone() - p_pow_neg(2, 3), half.clone());
        assert!(i.contains(&half));
        assert!(!i.is_point());
        assert_eq!(i.width(), p_pow_neg(2, 3));
    }

    #[test]
    fn huge_rationals_convert() {
        let r = p_pow_neg(2, 2000) * BigRational::from_integer(BigInt::from(2).pow(1999));
        assert!((to_f64(&r) - 0.5).abs() < 1e-12);
    }
}
