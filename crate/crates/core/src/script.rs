//! The branch script of Tate's algorithm, written once over tracked residues.
//!
//! The machine state is a *box* of working coordinates: five tracked values
//! known modulo p^{k_i}, obtained from the input by the translations and
//! scale-downs applied so far. Every translation is required to preserve the
//! box precisions exactly, so the state always describes a product set of
//! equations, and refining working coordinate i by one p-adic digit is the
//! same as refining the input coordinate i. The same script therefore drives
//! exact integer input (infinite precision), residue-class classification,
//! exact density counting and Monte Carlo sampling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{Block, Ctx, Int, TV};
use crate::fp;
use crate::padic::{self, CubicProfile};

/// Weights of the coordinates a1, a2, a3, a4, a6.
pub const W: [u32; 5] = [1, 2, 3, 4, 6];

/// Finite reduction-type label (I_m and I_m* collapsed), or the verdict that
/// the equation is not minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeLabel {
    I0,
    Ige1,
    II,
    III,
    IV,
    I0s,
    Ige1s,
    IVs,
    IIIs,
    IIs,
    NonMinimal,
}

impl TypeLabel {
    pub const ALL: [TypeLabel; 11] = [
        TypeLabel::I0,
        TypeLabel::Ige1,
        TypeLabel::II,
        TypeLabel::III,
        TypeLabel::IV,
        TypeLabel::I0s,
        TypeLabel::Ige1s,
        TypeLabel::IVs,
        TypeLabel::IIIs,
        TypeLabel::IIs,
        TypeLabel::NonMinimal,
    ];

    pub fn is_additive(self) -> bool {
        !matches!(self, TypeLabel::I0 | TypeLabel::Ige1 | TypeLabel::NonMinimal)
    }

    pub fn name(self) -> &'static str {
        match self {
            TypeLabel::I0 => "I0",
            TypeLabel::Ige1 => "I>=1",
            TypeLabel::II => "II",
            TypeLabel::III => "III",
            TypeLabel::IV => "IV",
            TypeLabel::I0s => "I0*",
            TypeLabel::Ige1s => "I>=1*",
            TypeLabel::IVs => "IV*",
            TypeLabel::IIIs => "III*",
            TypeLabel::IIs => "II*",
            TypeLabel::NonMinimal => "non-minimal",
        }
    }

    pub fn parse(s: &str) -> Option<TypeLabel> {
        TypeLabel::ALL.iter().copied().find(|t| t.name() == s)
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Position in the branch script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    /// Test for good reduction, then move the singular point to the origin.
    Start,
    /// W(0,0,1,1,1): multiplicative iff b2 is a unit.
    Mult,
    /// Multiplicative, in W(0,0,k,k,k): m = k iff v(a6) = k.
    MultLoop { k: u32 },
    /// W(1,1,1,1,1).
    II,
    III,
    IV,
    /// W(1,1,2,2,3).
    I0s,
    /// The I_m* chain: odd steps live in W(1,=1,k+1,k+2,2k+2), even steps in
    /// W(1,=1,k+2,k+2,2k+3).
    ImStar { m: u32, k: u32, odd: bool },
    /// W(1,2,2,3,4).
    IVs,
    /// W(1,2,3,3,5).
    IIIs,
    IIs,
}

/// What the caller needs to know; the script stops as soon as it is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Need {
    pub m: bool,
    pub fp: bool,
    pub cp: bool,
    /// Scale-downs beyond this level are not performed; the outcome is then
    /// reported as `NonMinimal` with `level = max_level + 1` (a lower bound).
    pub max_level: u32,
}

impl Need {
    pub const TYPE: Need = Need { m: false, fp: false, cp: false, max_level: 0 };
    pub const ALL: Need = Need { m: true, fp: true, cp: true, max_level: u32::MAX };
}

/// The outcome of the script. Fields not requested may be `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Summary {
    pub label: TypeLabel,
    pub m: Option<u32>,
    pub split: Option<bool>,
    pub fp: Option<u32>,
    pub cp: Option<u32>,
    /// Level of the model where the type was found (a lower bound when the
    /// label is `NonMinimal`).
    pub level: u32,
}

/// A recorded change of coordinates, for rebuilding the minimal model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op<I: Int> {
    Translate(I, I, I),
    Descale,
}

/// The machine state: working box, stage, level and the split flag once known.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State<I: Int> {
    pub a: [TV<I>; 5],
    pub stage: Stage,
    pub level: u32,
    pub split: Option<bool>,
}

/// Run-time parameters of one script execution.
pub struct Run<'a, I: Int> {
    pub ctx: &'a Ctx<I>,
    pub need: Need,
    /// v(Δ) of the input equation when known exactly (exact mode).
    pub n_input: Option<u32>,
    pub ops: Option<&'a mut Vec<Op<I>>>,
}

enum Flow {
    Next(Stage),
    Done(Summary),
}

impl<I: Int> State<I> {
    /// The full box of a class: coordinate i ≡ x_i (mod p^{k_i}).
    pub fn new(xs: [I; 5], ks: [u32; 5], ctx: &Ctx<I>) -> Self {
        let mut i = 0u8;
        let a = xs.map(|x| {
            let tv = TV::coord(x, ks[i as usize], i, ctx);
            i += 1;
            tv
        });
        State { a, stage: Stage::Start, level: 0, split: None }
    }

    /// Runs the script until an answer or a blocking test.
    pub fn advance(&mut self, run: &mut Run<'_, I>) -> Result<Summary, Block> {
        loop {
            let flow = match self.stage {
                Stage::Start => self.start(run)?,
                Stage::Mult => self.mult(run)?,
                Stage::MultLoop { k } => self.mult_loop(k, run)?,
                Stage::II => self.type_ii(run)?,
                Stage::III => self.type_iii(run)?,
                Stage::IV => self.type_iv(run)?,
                Stage::I0s => self.type_i0s(run)?,
                Stage::ImStar { m, k, odd } => self.im_star(m, k, odd, run)?,
                Stage::IVs => self.type_ivs(run)?,
                Stage::IIIs => self.type_iiis(run)?,
                Stage::IIs => self.type_iis(run)?,
            };
            match flow {
                Flow::Next(stage) => self.stage = stage,
                Flow::Done(s) => return Ok(s),
            }
        }
    }

    fn done(&self, label: TypeLabel, m: Option<u32>, fp: Option<u32>, cp: Option<u32>, run: &Run<'_, I>) -> Flow {
        Flow::Done(Summary {
            label,
            m,
            split: self.split,
            fp: if run.need.fp { fp } else { None },
            cp: if run.need.cp { cp } else { None },
            level: self.level,
        })
    }

    /// v(Δ) of the working equation.
    fn n(&self, run: &Run<'_, I>) -> Result<u32, Block> {
        if let Some(n) = run.n_input {
            return Ok(n - 12 * self.level);
        }
        let c = run.ctx;
        let [a1, a2, a3, a4, a6] = &self.a;
        let a1sq = a1.square(c);
        let b2 = a1sq.add(&a2.mul_c(4, c), c);
        let b4 = a4.mul_c(2, c).add(&a1.mul(a3, c), c);
        let a3sq = a3.square(c);
        let b6 = a3sq.add(&a6.mul_c(4, c), c);
        let b8 = a1sq
            .mul(a6, c)
            .add(&a2.mul(a6, c).mul_c(4, c), c)
            .sub(&a1.mul(a3, c).mul(a4, c), c)
            .add(&a2.mul(&a3sq, c), c)
            .sub(&a4.square(c), c);
        let delta = b2
            .mul(&b4, c)
            .mul(&b6, c)
            .mul_c(9, c)
            .sub(&b2.square(c).mul(&b8, c), c)
            .sub(&b4.square(c).mul(&b4, c).mul_c(8, c), c)
            .sub(&b6.square(c).mul_c(27, c), c);
        delta.val(c, "valuation of the discriminant")
    }

    fn fp_from(&self, offset: u32, extra: u32, run: &Run<'_, I>) -> Result<Option<u32>, Block> {
        if run.need.fp {
            Ok(Some(self.n(run)? - offset - extra))
        } else {
            Ok(None)
        }
    }

    /// Applies τ(r,s,t) with exact r, s, t; blocks if any coordinate would
    /// lose precision.
    fn translate(&mut self, r: I, s: I, t: I, run: &mut Run<'_, I>) -> Result<(), Block> {
        let c = run.ctx;
        let zero = I::from_i64(0);
        let rt = TV::constant(r.clone(), c);
        let st = TV::constant(s.clone(), c);
        let tt = TV::constant(t.clone(), c);
        let [a1, a2, a3, a4, a6] = &self.a;
        let (rz, sz, tz) = (r == zero, s == zero, t == zero);

        let mut n1 = a1.clone();
        let mut n2 = a2.clone();
        let mut n3 = a3.clone();
        let mut n4 = a4.clone();
        let mut n6 = a6.clone();
        if !sz {
            n1 = n1.add(&st.mul_c(2, c), c);
            n2 = n2.sub(&st.mul(a1, c), c).sub(&st.square(c), c);
            n4 = n4.sub(&st.mul(a3, c), c);
        }
        if !rz {
            n2 = n2.add(&rt.mul_c(3, c), c);
            n3 = n3.add(&rt.mul(a1, c), c);
            n4 = n4.add(&rt.mul(a2, c).mul_c(2, c), c).add(&rt.square(c).mul_c(3, c), c);
            let r2 = rt.square(c);
            n6 = n6.add(&rt.mul(a4, c), c).add(&r2.mul(a2, c), c).add(&r2.mul(&rt, c), c);
        }
        if !tz {
            n3 = n3.add(&tt.mul_c(2, c), c);
            n4 = n4.sub(&tt.mul(a1, c), c);
            n6 = n6.sub(&tt.mul(a3, c), c).sub(&tt.square(c), c);
        }
        if !rz && !sz {
            n4 = n4.sub(&rt.mul(&st, c).mul(a1, c), c);
        }
        if !sz && !tz {
            n4 = n4.sub(&st.mul(&tt, c).mul_c(2, c), c);
        }
        if !rz && !tz {
            n6 = n6.sub(&rt.mul(&tt, c).mul(a1, c), c);
        }
        let new = [n1, n2, n3, n4, n6];
        for (i, (nv, ov)) in new.iter().zip(self.a.iter()).enumerate() {
            if nv.k < ov.k {
                let _ = i;
                return Err(Block { coord: nv.lim, reason: "translation would lose precision" });
            }
        }
        let mut out = new;
        for (i, nv) in out.iter_mut().enumerate() {
            *nv = TV::coord(nv.x.clone(), self.a[i].k, i as u8, c);
        }
        self.a = out;
        if let Some(ops) = run.ops.as_deref_mut() {
            ops.push(Op::Translate(r, s, t));
        }
        Ok(())
    }

    fn start(&mut self, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        let c = run.ctx;
        let p = c.p;
        let mut u = [0u64; 5];
        for (ui, ai) in u.iter_mut().zip(self.a.iter()) {
            *ui = ai.modp(c, "reduction modulo p")?;
        }
        if delta_mod_p(u, p) != 0 {
            return Ok(self.done(TypeLabel::I0, None, Some(0), Some(1), run));
        }
        let (x0, y0) = singular_point(u, p);
        self.translate(I::from_i64(x0 as i64), I::from_i64(0), I::from_i64(y0 as i64), run)?;
        Ok(Flow::Next(Stage::Mult))
    }

    fn mult(&mut self, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        let c = run.ctx;
        let p = c.p;
        let u1 = self.a[0].modp(c, "tangent cone at the singular point")?;
        let u2 = self.a[1].modp(c, "tangent cone at the singular point")?;
        let b2 = fp::add(fp::mul(u1, u1, p), fp::mul(4 % p, u2, p), p);
        if b2 != 0 {
            self.split = Some(padic::quad_root_count(u1, u2, p).split());
            if run.need.m || run.need.cp {
                return Ok(Flow::Next(Stage::MultLoop { k: 1 }));
            }
            return Ok(self.done(TypeLabel::Ige1, None, Some(1), None, run));
        }
        let s0 = padic::quad_double_root(u1, u2, p);
        self.translate(I::from_i64(0), I::from_i64(s0 as i64), I::from_i64(0), run)?;
        Ok(Flow::Next(Stage::II))
    }

    fn mult_loop(&mut self, k: u32, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        let c = run.ctx;
        let p = c.p;
        if !self.a[4].v_ge(k + 1, c, "multiplicative: v(a6) = k")? {
            let split = self.split.expect("split flag set");
            let cp = if split { k } else if k % 2 == 0 { 2 } else { 1 };
            return Ok(self.done(TypeLabel::Ige1, Some(k), Some(1), Some(cp), run));
        }
        let a3k = self.a[2].digit(k, c, "multiplicative: next digit of a3")?;
        let a4k = self.a[3].digit(k, c, "multiplicative: next digit of a4")?;
        let u1 = self.a[0].modp(c, "a1 mod p")?;
        let u2 = self.a[1].modp(c, "a2 mod p")?;
        // Solve [a1 2; 2a2 -a1] (rho, theta) = -(a3k, a4k) modulo p.
        let det = fp::neg(fp::add(fp::mul(u1, u1, p), fp::mul(4 % p, u2, p), p), p);
        let dinv = fp::inv(det, p);
        let rho = fp::mul(fp::add(fp::mul(u1, a3k, p), fp::mul(2 % p, a4k, p), p), dinv, p);
        let theta = fp::mul(fp::sub(fp::mul(fp::mul(2 % p, u2, p), a3k, p), fp::mul(u1, a4k, p), p), dinv, p);
        let r = c.scaled_const(k, rho);
        let t = c.scaled_const(k, theta);
        self.translate(r, I::from_i64(0), t, run)?;
        Ok(Flow::Next(Stage::MultLoop { k: k + 1 }))
    }

    fn type_ii(&mut self, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        if !self.a[4].v_ge(2, run.ctx, "type II: v(a6) = 1")? {
            let fp = self.fp_from(0, 0, run)?;
            return Ok(self.done(TypeLabel::II, None, fp, Some(1), run));
        }
        Ok(Flow::Next(Stage::III))
    }

    fn type_iii(&mut self, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        if !self.a[3].v_ge(2, run.ctx, "type III: v(a4) = 1")? {
            let fp = self.fp_from(1, 0, run)?;
            return Ok(self.done(TypeLabel::III, None, fp, Some(2), run));
        }
        Ok(Flow::Next(Stage::IV))
    }

    fn type_iv(&mut self, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        let c = run.ctx;
        let p = c.p;
        let c1 = self.a[2].digit(1, c, "type IV: a3/p")?;
        let c2 = self.a[4].digit(2, c, "type IV: a6/p^2")?;
        let q = padic::quad_root_count(c1, c2, p);
        if !q.double {
            let fp = self.fp_from(2, 0, run)?;
            return Ok(self.done(TypeLabel::IV, None, fp, Some(if q.split() { 3 } else { 1 }), run));
        }
        let y0 = padic::quad_double_root(c1, c2, p);
        self.translate(I::from_i64(0), I::from_i64(0), c.scaled_const(1, y0), run)?;
        Ok(Flow::Next(Stage::I0s))
    }

    fn type_i0s(&mut self, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        let c = run.ctx;
        let p = c.p;
        let g2 = self.a[1].digit(1, c, "type I0*: a2/p")?;
        let g4 = self.a[3].digit(2, c, "type I0*: a4/p^2")?;
        let g6 = self.a[4].digit(3, c, "type I0*: a6/p^3")?;
        let prof = padic::cubic_root_profile(g2, g4, g6, p);
        match prof {
            CubicProfile::Triple => {
                let x0 = padic::cubic_multiple_root(g2, g4, g6, p);
                self.translate(c.scaled_const(1, x0), I::from_i64(0), I::from_i64(0), run)?;
                Ok(Flow::Next(Stage::IVs))
            }
            CubicProfile::DoublePlusSingle => {
                let need_chain = run.need.m || run.need.cp || (run.need.fp && p == 2);
                if !need_chain {
                    // For odd p the conductor exponent of I_m* is 2.
                    return Ok(self.done(TypeLabel::Ige1s, None, Some(2), None, run));
                }
                let x0 = padic::cubic_multiple_root(g2, g4, g6, p);
                self.translate(c.scaled_const(1, x0), I::from_i64(0), I::from_i64(0), run)?;
                Ok(Flow::Next(Stage::ImStar { m: 1, k: 1, odd: true }))
            }
            _ => {
                let fp = self.fp_from(4, 0, run)?;
                Ok(self.done(TypeLabel::I0s, None, fp, Some(1 + prof.roots_in_fp()), run))
            }
        }
    }

    fn im_star(&mut self, m: u32, k: u32, odd: bool, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        let c = run.ctx;
        let p = c.p;
        if p != 2 && !run.need.m && !run.need.cp {
            return Ok(self.done(TypeLabel::Ige1s, None, Some(2), None, run));
        }
        let (q, a1, a2) = if odd {
            let c1 = self.a[2].digit(k + 1, c, "type I_m*: a3 digit")?;
            let c2 = self.a[4].digit(2 * k + 2, c, "type I_m*: a6 digit")?;
            (padic::quad_root_count(c1, c2, p), c1, c2)
        } else {
            let lead = self.a[1].digit(1, c, "type I_m*: a2/p")?;
            let b = self.a[3].digit(k + 2, c, "type I_m*: a4 digit")?;
            let cc = self.a[4].digit(2 * k + 3, c, "type I_m*: a6 digit")?;
            let li = fp::inv(lead, p);
            let a1 = fp::mul(b, li, p);
            let a2 = fp::neg(fp::mul(cc, li, p), p);
            (padic::quad_root_count(a1, a2, p), a1, a2)
        };
        if !q.double {
            let fp = self.fp_from(m, 4, run)?;
            return Ok(self.done(TypeLabel::Ige1s, Some(m), fp, Some(if q.split() { 4 } else { 2 }), run));
        }
        let z0 = padic::quad_double_root(a1, a2, p);
        let shift = c.scaled_const(k + 1, z0);
        if odd {
            self.translate(I::from_i64(0), I::from_i64(0), shift, run)?;
            Ok(Flow::Next(Stage::ImStar { m: m + 1, k, odd: false }))
        } else {
            self.translate(shift, I::from_i64(0), I::from_i64(0), run)?;
            Ok(Flow::Next(Stage::ImStar { m: m + 1, k: k + 1, odd: true }))
        }
    }

    fn type_ivs(&mut self, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        let c = run.ctx;
        let p = c.p;
        let c1 = self.a[2].digit(2, c, "type IV*: a3/p^2")?;
        let c2 = self.a[4].digit(4, c, "type IV*: a6/p^4")?;
        let q = padic::quad_root_count(c1, c2, p);
        if !q.double {
            let fp = self.fp_from(6, 0, run)?;
            return Ok(self.done(TypeLabel::IVs, None, fp, Some(if q.split() { 3 } else { 1 }), run));
        }
        let y0 = padic::quad_double_root(c1, c2, p);
        self.translate(I::from_i64(0), I::from_i64(0), c.scaled_const(2, y0), run)?;
        Ok(Flow::Next(Stage::IIIs))
    }

    fn type_iiis(&mut self, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        if !self.a[3].v_ge(4, run.ctx, "type III*: v(a4) = 3")? {
            let fp = self.fp_from(7, 0, run)?;
            return Ok(self.done(TypeLabel::IIIs, None, fp, Some(2), run));
        }
        Ok(Flow::Next(Stage::IIs))
    }

    fn type_iis(&mut self, run: &mut Run<'_, I>) -> Result<Flow, Block> {
        let c = run.ctx;
        if !self.a[4].v_ge(6, c, "type II*: v(a6) = 5")? {
            let fp = self.fp_from(8, 0, run)?;
            return Ok(self.done(TypeLabel::IIs, None, fp, Some(1), run));
        }
        // Trivially non-minimal: every a_i is divisible by p^i.
        if self.level >= run.need.max_level {
            return Ok(Flow::Done(Summary {
                label: TypeLabel::NonMinimal,
                m: None,
                split: None,
                fp: None,
                cp: None,
                level: self.level + 1,
            }));
        }
        for (i, w) in W.iter().enumerate() {
            if !self.a[i].v_ge(*w, c, "scale-down divisibility")? {
                unreachable!("coordinate {i} is not divisible by p^{w} at the scale-down step");
            }
        }
        for (i, w) in W.iter().enumerate() {
            let mut v = self.a[i].div_p(*w, c);
            v.lim = i as u8;
            self.a[i] = v;
        }
        self.level += 1;
        self.split = None;
        if let Some(ops) = run.ops.as_deref_mut() {
            ops.push(Op::Descale);
        }
        Ok(Flow::Next(Stage::Start))
    }
}

/// The discriminant of a Weierstrass equation over F_p.
pub fn delta_mod_p(u: [u64; 5], p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = u.map(|x| x % p);
    let m = |x, y| fp::mul(x, y, p);
    let ad = |x, y| fp::add(x, y, p);
    let sb = |x, y| fp::sub(x, y, p);
    let k = |c: u64| c % p;
    let b2 = ad(m(a1, a1), m(k(4), a2));
    let b4 = ad(m(k(2), a4), m(a1, a3));
    let b6 = ad(m(a3, a3), m(k(4), a6));
    let b8 = sb(ad(sb(ad(m(m(a1, a1), a6), m(m(k(4), a2), a6)), m(m(a1, a3), a4)), m(a2, m(a3, a3))), m(a4, a4));
    let t1 = m(k(9), m(b2, m(b4, b6)));
    let t2 = m(m(b2, b2), b8);
    let t3 = m(k(8), m(b4, m(b4, b4)));
    let t4 = m(k(27), m(b6, b6));
    sb(sb(sb(t1, t2), t3), t4)
}

/// The singular point of a singular Weierstrass equation over F_p.
pub fn singular_point(u: [u64; 5], p: u64) -> (u64, u64) {
    if p < padic::BRUTE_FORCE_LIMIT {
        singular_point_search(u, p)
    } else {
        singular_point_alg(u, p)
    }
}

fn curve_partials(u: [u64; 5], x: u64, y: u64, p: u64) -> (u64, u64, u64) {
    let [a1, a2, a3, a4, a6] = u.map(|v| v % p);
    let m = |x, y| fp::mul(x, y, p);
    let ad = |x, y| fp::add(x, y, p);
    let sb = |x, y| fp::sub(x, y, p);
    let x2 = m(x, x);
    // F = y^2 + a1 x y + a3 y - x^3 - a2 x^2 - a4 x - a6
    let f = sb(sb(sb(sb(ad(ad(m(y, y), m(m(a1, x), y)), m(a3, y)), m(x2, x)), m(a2, x2)), m(a4, x)), a6);
    let fx = sb(sb(sb(m(a1, y), m(3 % p, x2)), m(m(2 % p, a2), x)), a4);
    let fy = ad(ad(m(2 % p, y), m(a1, x)), a3);
    (f, fx, fy)
}

/// Exhaustive search over F_p × F_p.
pub fn singular_point_search(u: [u64; 5], p: u64) -> (u64, u64) {
    for x in 0..p {
        for y in 0..p {
            if curve_partials(u, x, y, p) == (0, 0, 0) {
                return (x, y);
            }
        }
    }
    panic!("no singular point found for a singular equation mod {p}");
}

/// Odd p: completing the square, (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6,
/// so x0 is the multiple root of the right-hand side.
pub fn singular_point_alg(u: [u64; 5], p: u64) -> (u64, u64) {
    assert!(p != 2, "the algebraic singular point needs odd p");
    let [a1, a2, a3, a4, a6] = u.map(|v| v % p);
    let m = |x, y| fp::mul(x, y, p);
    let b2 = fp::add(m(a1, a1), m(4 % p, a2), p);
    let b4 = fp::add(m(2 % p, a4), m(a1, a3), p);
    let b6 = fp::add(m(a3, a3), m(4 % p, a6), p);
    let i4 = fp::inv(4 % p, p);
    let x0 = padic::cubic_multiple_root(m(b2, i4), m(m(2 % p, b4), i4), m(b6, i4), p);
    let y0 = fp::neg(m(fp::add(m(a1, x0), a3, p), fp::inv(2, p)), p);
    (x0, y0)
}
