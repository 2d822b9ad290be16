//! Tate's algorithm at a prime over exact integer input.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{Ctx, Int, INF};
use crate::error::{require_prime, Result, WdlError};
use crate::padic::valuation_unchecked;
use crate::script::{Need, Op, Run, State, Summary, TypeLabel};
use crate::weierstrass::{Translation, WeierstrassEq};

/// Kodaira type of the special fibre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaType {
    I0,
    I(u32),
    II,
    III,
    IV,
    I0Star,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaType {
    /// The finite type (I_m and I_m* collapsed to I≥1 and I≥1*).
    pub fn label(self) -> TypeLabel {
        match self {
            KodairaType::I0 => TypeLabel::I0,
            KodairaType::I(_) => TypeLabel::Ige1,
            KodairaType::II => TypeLabel::II,
            KodairaType::III => TypeLabel::III,
            KodairaType::IV => TypeLabel::IV,
            KodairaType::I0Star => TypeLabel::I0s,
            KodairaType::IStar(_) => TypeLabel::Ige1s,
            KodairaType::IVStar => TypeLabel::IVs,
            KodairaType::IIIStar => TypeLabel::IIIs,
            KodairaType::IIStar => TypeLabel::IIs,
        }
    }

    /// The index m of I_m or I_m*.
    pub fn m(self) -> Option<u32> {
        match self {
            KodairaType::I(m) | KodairaType::IStar(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_additive(self) -> bool {
        self.label().is_additive()
    }

    fn from_summary(s: &Summary) -> KodairaType {
        match s.label {
            TypeLabel::I0 => KodairaType::I0,
            TypeLabel::Ige1 => KodairaType::I(s.m.expect("m resolved")),
            TypeLabel::II => KodairaType::II,
            TypeLabel::III => KodairaType::III,
            TypeLabel::IV => KodairaType::IV,
            TypeLabel::I0s => KodairaType::I0Star,
            TypeLabel::Ige1s => KodairaType::IStar(s.m.expect("m resolved")),
            TypeLabel::IVs => KodairaType::IVStar,
            TypeLabel::IIIs => KodairaType::IIIStar,
            TypeLabel::IIs => KodairaType::IIStar,
            TypeLabel::NonMinimal => unreachable!("exact run always reaches a minimal model"),
        }
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I0 => write!(f, "I0"),
            KodairaType::I(m) => write!(f, "I{m}"),
            KodairaType::II => write!(f, "II"),
            KodairaType::III => write!(f, "III"),
            KodairaType::IV => write!(f, "IV"),
            KodairaType::I0Star => write!(f, "I0*"),
            KodairaType::IStar(m) => write!(f, "I{m}*"),
            KodairaType::IVStar => write!(f, "IV*"),
            KodairaType::IIIStar => write!(f, "III*"),
            KodairaType::IIStar => write!(f, "II*"),
        }
    }
}

impl FromStr for KodairaType {
    type Err = WdlError;
    fn from_str(s: &str) -> Result<Self> {
        let t = match s {
            "I0" => KodairaType::I0,
            "II" => KodairaType::II,
            "III" => KodairaType::III,
            "IV" => KodairaType::IV,
            "I0*" => KodairaType::I0Star,
            "IV*" => KodairaType::IVStar,
            "III*" => KodairaType::IIIStar,
            "II*" => KodairaType::IIStar,
            _ => {
                let bad = || WdlError::InvalidArgument(format!("unknown Kodaira type {s:?}"));
                let body = s.strip_prefix('I').ok_or_else(bad)?;
                let (digits, star) = match body.strip_suffix('*') {
                    Some(d) => (d, true),
                    None => (body, false),
                };
                let m: u32 = digits.parse().map_err(|_| bad())?;
                if m == 0 {
                    return Err(bad());
                }
                if star {
                    KodairaType::IStar(m)
                } else {
                    KodairaType::I(m)
                }
            }
        };
        Ok(t)
    }
}

impl Serialize for KodairaType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for KodairaType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Output of Tate's algorithm at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalData {
    pub p: u64,
    pub kodaira: KodairaType,
    pub fp: u32,
    pub cp: u32,
    /// v(Δ) of the input equation.
    pub n: u32,
    pub level: u32,
    /// Present iff the reduction is multiplicative.
    pub split: Option<bool>,
    pub minimal_eq: WeierstrassEq,
}

/// Reduction of an equation at p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReductionClass {
    Good,
    Multiplicative,
    Additive,
}

fn run_exact<I: Int>(
    xs: [I; 5],
    k: u32,
    ctx: &Ctx<I>,
    need: Need,
    n: u32,
) -> std::result::Result<(Summary, Vec<Op<I>>), crate::arith::Block> {
    let mut state = State::new(xs, [k; 5], ctx);
    let mut ops = Vec::new();
    let mut run = Run { ctx, need, n_input: Some(n), ops: Some(&mut ops) };
    let s = state.advance(&mut run)?;
    Ok((s, ops))
}

/// Runs the script on exact input: first on residues modulo a machine-word
/// power of p, falling back to unbounded integers if that precision is
/// insufficient.
fn exact_summary(e: &WeierstrassEq, p: u64, n: u32, need: Need) -> (Summary, Vec<Step>) {
    let ctx = Ctx::machine(p);
    if ctx.cap >= 1 {
        let m = BigInt::from(p).pow(ctx.cap);
        let xs = e.a.clone().map(|c| {
            let r = num_integer::Integer::mod_floor(&c, &m);
            i128::try_from(r).expect("residue below p^K fits")
        });
        if let Ok((s, ops)) = run_exact(xs, ctx.cap, &ctx, need, n) {
            return collect(s, ops);
        }
    }
    let ctx = Ctx::big(p, INF);
    let (s, ops) = run_exact(e.a.clone(), INF, &ctx, need, n).expect("exact input never blocks");
    collect(s, ops)
}

/// A change of model recorded by the script, over exact integers.
enum Step {
    Translate(Translation),
    Descale,
}

fn collect<I: Int>(s: Summary, ops: Vec<Op<I>>) -> (Summary, Vec<Step>) {
    let steps = ops
        .into_iter()
        .map(|op| match op {
            Op::Translate(r, s, t) => Step::Translate(Translation { r: r.to_bigint(), s: s.to_bigint(), t: t.to_bigint() }),
            Op::Descale => Step::Descale,
        })
        .collect();
    (s, steps)
}

/// Tate's algorithm: type, conductor exponent, Tamagawa number, level and a
/// minimal model.
pub fn tate_local(e: &WeierstrassEq, p: u64) -> Result<LocalData> {
    require_prime(p)?;
    let delta = e.discriminant();
    if num_traits::Zero::is_zero(&delta) {
        return Err(WdlError::Singular);
    }
    let n = valuation_unchecked(&delta, p).finite().expect("nonzero discriminant");
    let (s, steps) = exact_summary(e, p, n, Need::ALL);
    let pb = BigInt::from(p);
    let mut minimal = e.clone();
    for step in &steps {
        minimal = match step {
            Step::Translate(tau) => minimal.translate(tau),
            Step::Descale => minimal.scale_down(&pb).expect("scale-down is exact at a trivially non-minimal model"),
        };
    }
    Ok(LocalData {
        p,
        kodaira: KodairaType::from_summary(&s),
        fp: s.fp.expect("fp resolved"),
        cp: s.cp.expect("cp resolved"),
        n,
        level: s.level,
        split: s.split,
        minimal_eq: minimal,
    })
}

/// Good / multiplicative / additive reduction of the equation itself (a
/// non-minimal equation has additive shape).
pub fn reduction_class(e: &WeierstrassEq, p: u64) -> Result<ReductionClass> {
    require_prime(p)?;
    let delta = e.discriminant();
    if num_traits::Zero::is_zero(&delta) {
        return Err(WdlError::Singular);
    }
    let n = valuation_unchecked(&delta, p).finite().expect("nonzero discriminant");
    let (s, _) = exact_summary(e, p, n, Need::TYPE);
    Ok(match s.label {
        TypeLabel::I0 => ReductionClass::Good,
        TypeLabel::Ige1 => ReductionClass::Multiplicative,
        _ => ReductionClass::Additive,
    })
}

/// Reduction of the curve: the class of a minimal model.
pub fn curve_reduction_class(e: &WeierstrassEq, p: u64) -> Result<ReductionClass> {
    let d = tate_local(e, p)?;
    Ok(match d.kodaira {
        KodairaType::I0 => ReductionClass::Good,
        KodairaType::I(_) => ReductionClass::Multiplicative,
        _ => ReductionClass::Additive,
    })
}

/// True iff the equation is minimal at p (level 0).
pub fn is_minimal(e: &WeierstrassEq, p: u64) -> Result<bool> {
    require_prime(p)?;
    let delta = e.discriminant();
    if num_traits::Zero::is_zero(&delta) {
        return Err(WdlError::Singular);
    }
    let n = valuation_unchecked(&delta, p).finite().expect("nonzero discriminant");
    if n < 12 {
        return Ok(true);
    }
    let (s, _) = exact_summary(e, p, n, Need::TYPE);
    Ok(s.label != TypeLabel::NonMinimal)
}
