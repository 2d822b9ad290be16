//! Classification of a whole residue class of equations at once: the branch
//! script run over partially known coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{Block, Ctx, Int, INF, LIM_CAP};
use crate::error::{require_prime, Result, WdlError};
use crate::script::{Need, Run, State, Summary, TypeLabel};
use crate::weierstrass::WeierstrassEq;

/// The set of equations with a_i ≡ residues[i] (mod p^{precisions[i]}).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueClassState {
    pub p: u64,
    pub residues: [BigInt; 5],
    pub precisions: [u32; 5],
}

impl ResidueClassState {
    /// The class of the given residues; each is reduced into [0, p^k).
    pub fn new(p: u64, residues: [BigInt; 5], precisions: [u32; 5]) -> Result<Self> {
        require_prime(p)?;
        if precisions.contains(&INF) {
            return Err(WdlError::InvalidArgument("class precision must be finite".into()));
        }
        let mut residues = residues;
        for (r, k) in residues.iter_mut().zip(precisions) {
            *r = r.mod_floor(&BigInt::from(p).pow(k));
        }
        Ok(ResidueClassState { p, residues, precisions })
    }

    /// All of W(Z_p).
    pub fn full(p: u64) -> Result<Self> {
        Self::new(p, Default::default(), [0; 5])
    }

    /// The class of an equation modulo p^{k_i}.
    pub fn of_equation(e: &WeierstrassEq, p: u64, precisions: [u32; 5]) -> Result<Self> {
        Self::new(p, e.a.clone(), precisions)
    }

    /// p^{−Σk_i}.
    pub fn measure(&self) -> BigRational {
        super::p_pow_neg(self.p, self.precisions.iter().sum())
    }

    /// The p children obtained by fixing the next digit of coordinate i.
    pub fn refine(&self, i: usize) -> Vec<ResidueClassState> {
        let step = BigInt::from(self.p).pow(self.precisions[i]);
        (0..self.p)
            .map(|d| {
                let mut c = self.clone();
                c.residues[i] += &step * d;
                c.precisions[i] += 1;
                c
            })
            .collect()
    }

    /// The member x_i = residue_i + p^{k_i}·t_i.
    pub fn lift(&self, t: [BigInt; 5]) -> WeierstrassEq {
        let mut a = self.residues.clone();
        for i in 0..5 {
            a[i] += BigInt::from(self.p).pow(self.precisions[i]) * &t[i];
        }
        WeierstrassEq::new(a)
    }
}

/// Facts that hold for every member of a class. Fields are `None` when they
/// are not determined by the known digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVerdict {
    /// Type of the equation, or `NonMinimal`.
    pub label: TypeLabel,
    /// Exact m of I_m / I_m*.
    pub m: Option<u32>,
    /// Splitness of multiplicative reduction.
    pub split: Option<bool>,
    /// Conductor exponent (minimal classes only).
    pub fp: Option<u32>,
    /// Tamagawa number (minimal classes only).
    pub cp: Option<u32>,
    pub minimal: bool,
    /// Level of non-minimality and type of the curve, when determined.
    pub level: Option<u32>,
    pub curve_label: Option<TypeLabel>,
}

/// Outcome of classifying a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Determined(ClassVerdict),
    /// The type depends on unknown digits; refining `coord` makes progress.
    NeedsRefinement { coord: usize, reason: &'static str },
}

fn run_with<I: Int>(xs: [I; 5], ks: [u32; 5], ctx: &Ctx<I>, need: Need) -> std::result::Result<Summary, Block> {
    let mut st = State::new(xs, ks, ctx);
    let mut run = Run { ctx, need, n_input: None, ops: None };
    st.advance(&mut run)
}

/// Runs the script over a class, on machine integers when the precisions
/// allow and on unbounded integers otherwise. Blocks never name the backend
/// cap.
pub(crate) fn run_class(c: &ResidueClassState, need: Need) -> std::result::Result<Summary, Block> {
    let machine = Ctx::machine(c.p);
    if machine.cap >= 1 && c.precisions.iter().all(|k| *k <= machine.cap) {
        let xs = c.residues.clone().map(|r| i128::try_from(r).expect("residue below p^K fits"));
        match run_with(xs, c.precisions, &machine, need) {
            Err(b) if b.coord == LIM_CAP => {}
            other => return other,
        }
    }
    let big = Ctx::big(c.p, INF);
    run_with(c.residues.clone(), c.precisions, &big, need)
}

/// Classifies a residue class. `Determined` is sound: the verdict holds for
/// every member of the class. Optional facts (m, fp, cp, level) are filled
/// in when the known digits already decide them.
pub fn classify_class(c: &ResidueClassState) -> Classification {
    let base = match run_class(c, Need::TYPE) {
        Ok(s) => s,
        Err(b) => return Classification::NeedsRefinement { coord: b.coord as usize, reason: b.reason },
    };
    let mut v = ClassVerdict {
        label: base.label,
        m: None,
        split: base.split,
        fp: None,
        cp: None,
        minimal: base.label != TypeLabel::NonMinimal,
        level: if base.label == TypeLabel::NonMinimal { None } else { Some(0) },
        curve_label: if base.label == TypeLabel::NonMinimal { None } else { Some(base.label) },
    };
    let none = Need { m: false, fp: false, cp: false, max_level: 0 };
    if v.minimal {
        if let Ok(s) = run_class(c, Need { m: true, ..none }) {
            v.m = s.m;
        }
        if let Ok(s) = run_class(c, Need { fp: true, ..none }) {
            v.fp = s.fp;
        }
        if let Ok(s) = run_class(c, Need { cp: true, ..none }) {
            v.cp = s.cp;
            v.split = v.split.or(s.split);
        }
    } else if let Ok(s) = run_class(c, Need { max_level: u32::MAX, ..none }) {
        v.level = Some(s.level);
        v.curve_label = Some(s.label);
    }
    Classification::Determined(v)
}
