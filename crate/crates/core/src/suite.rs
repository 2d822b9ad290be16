//! Self-checks of the library against its closed-form predictions, grouped
//! into suites: the counting lemmas, exact local tables, Monte Carlo local
//! tables and global densities. Each check reports pass/fail with a short
//! detail line; `quick` shrinks sample sizes to keep a full run short.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WdlError};
use crate::global::{
    a3b2_census, euler_product, mc_global, prime_conductor_scan, squarefree_a3b2_demo, EulerProductSpec,
    GlobalMcConfig, GlobalProperty,
};
use crate::local::formula::{level_measure, relative, rho_im, rho_ims};
use crate::local::{
    compare_with_formula, conditional_estimate, exact_distribution, formula_table, level_distribution,
    mc_distribution, to_f64, verify_counting_lemmas, Cell, ExactConfig, Key, KeyKind, McConfig, Verdict,
};
use crate::script::TypeLabel;

/// A group of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    Lemmas,
    LocalExact,
    LocalMc,
    Global,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::LocalExact => "local-exact",
            Suite::LocalMc => "local-mc",
            Suite::Global => "global",
            Suite::All => "all",
        }
    }

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Lemmas, Suite::LocalExact, Suite::LocalMc, Suite::Global],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = WdlError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lemmas" => Suite::Lemmas,
            "local-exact" => Suite::LocalExact,
            "local-mc" => Suite::LocalMc,
            "global" => Suite::Global,
            "all" => Suite::All,
            _ => return Err(WdlError::InvalidArgument(format!("unknown suite {s:?}"))),
        })
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: Suite, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { suite: suite.name().into(), name: name.into(), passed, detail: detail.into() }
    }
}

/// Runs a suite (every suite for [`Suite::All`]) with a fixed seed.
pub fn run_suite(suite: Suite, quick: bool, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for part in suite.parts() {
        match part {
            Suite::Lemmas => lemmas(quick, &mut out)?,
            Suite::LocalExact => local_exact(&mut out)?,
            Suite::LocalMc => local_mc(quick, seed, &mut out)?,
            Suite::Global => global(quick, seed, &mut out)?,
            Suite::All => unreachable!(),
        }
    }
    Ok(out)
}

fn lemmas(quick: bool, out: &mut Vec<Check>) -> Result<()> {
    let qs: &[u64] = if quick { &[2, 3, 5, 7] } else { &[2, 3, 5, 7, 11, 13] };
    for &q in qs {
        let r = verify_counting_lemmas(q)?;
        let bad: Vec<&str> = r.rows.iter().filter(|row| !row.ok()).map(|row| row.name.as_str()).collect();
        let detail = if bad.is_empty() { format!("{} censuses exact", r.rows.len()) } else { format!("mismatch: {}", bad.join(", ")) };
        out.push(Check::new(Suite::Lemmas, format!("counting lemmas q={q}"), r.passed(), detail));
    }
    Ok(())
}

fn exact(p: u64, kind: KeyKind, depth: u32) -> Result<crate::local::DistributionTable> {
    let cfg = ExactConfig { depth_budget: depth, ..ExactConfig::default() };
    exact_distribution(p, kind, &cfg)
}

fn local_exact(out: &mut Vec<Check>) -> Result<()> {
    for p in [2u64, 3] {
        let t = exact(p, KeyKind::Type, 40)?;
        let cmp = compare_with_formula(&t, 0.0)?;
        let matched = cmp.iter().filter(|c| c.verdict == Verdict::Match).count();
        let ok = matched == cmp.len() && cmp.len() == 11;
        out.push(Check::new(Suite::LocalExact, format!("type table p={p}"), ok, format!("{matched}/{} rows MATCH", cmp.len())));
    }

    let t = exact(2, KeyKind::Kodaira, 60)?;
    let mut bad = Vec::new();
    for m in 1..=8 {
        if t.interval(&Key::Kodaira(TypeLabel::Ige1, Some(m))) != Some(&crate::local::DensityInterval::point(rho_im(2, m))) {
            bad.push(format!("I{m}"));
        }
    }
    for m in 1..=4 {
        if t.interval(&Key::Kodaira(TypeLabel::Ige1s, Some(m))) != Some(&crate::local::DensityInterval::point(rho_ims(2, m))) {
            bad.push(format!("I{m}*"));
        }
    }
    out.push(Check::new(
        Suite::LocalExact,
        "I_m (m<=8) and I_m* (m<=4) at p=2",
        bad.is_empty(),
        if bad.is_empty() { "12 point intervals exact".to_string() } else { format!("not exact: {}", bad.join(", ")) },
    ));

    let t3 = exact(3, KeyKind::Conductor, 40)?;
    let cmp3 = compare_with_formula(&t3, 0.0)?;
    let ok3 = cmp3.iter().all(|c| c.verdict == Verdict::Match);
    out.push(Check::new(Suite::LocalExact, "conductor table p=3", ok3, format!("{} rows, all point intervals", cmp3.len())));

    let t2 = exact(2, KeyKind::Conductor, 40)?;
    let cmp2 = compare_with_formula(&t2, 0.0)?;
    let width = t2.max_width();
    let target = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
    let ok2 = cmp2.iter().all(|c| matches!(c.verdict, Verdict::Match | Verdict::Encloses)) && width <= target;
    out.push(Check::new(
        Suite::LocalExact,
        "conductor table p=2",
        ok2,
        format!("{} rows match or enclose; max width {:.3e}", cmp2.len(), to_f64(&width)),
    ));
    Ok(())
}

fn local_mc(quick: bool, seed: u64, out: &mut Vec<Check>) -> Result<()> {
    let n = if quick { 100_000 } else { 1_000_000 };
    for p in [5u64, 7] {
        let t = mc_distribution(p, KeyKind::Tamagawa, &McConfig::new(n, seed))?;
        let f = formula_table(p, KeyKind::Tamagawa, 12)?;
        let mut worst = 0.0f64;
        let mut rows = 0;
        for (key, cell) in &f.rows {
            let Cell::Interval(iv) = cell else { continue };
            let Some(rel) = relative(p, key, &iv.lower) else { continue };
            let Some(est) = conditional_estimate(&t, key) else { continue };
            if est.n == 0 {
                continue;
            }
            worst = worst.max(est.sigmas_from(to_f64(&rel)));
            rows += 1;
        }
        out.push(Check::new(
            Suite::LocalMc,
            format!("Tamagawa relative densities p={p}"),
            worst <= 4.0 && rows > 0,
            format!("{rows} rows, worst {worst:.2} sigma at n={n}"),
        ));
    }

    for (p, n) in [(2u64, if quick { 1_000_000 } else { 10_000_000 }), (3, if quick { 200_000 } else { 1_000_000 })] {
        let rows = level_distribution(p, 1, n, seed)?;
        let s0 = rows[0].estimate.sigmas_from(to_f64(&level_measure(p, 0)));
        let s1 = rows[1].estimate.sigmas_from(to_f64(&level_measure(p, 1)));
        let ok = s0 <= 4.0 && (p != 2 || s1 <= 4.0);
        out.push(Check::new(
            Suite::LocalMc,
            format!("minimal and level-1 measure p={p}"),
            ok,
            format!("W_M {s0:.2} sigma, W_1 {s1:.2} sigma at n={n}"),
        ));
    }

    let n5 = if quick { 200_000 } else { 1_000_000 };
    let rows = level_distribution(5, 1, n5, seed)?;
    let s0 = rows[0].estimate.sigmas_from(to_f64(&level_measure(5, 0)));
    let nonmin = 1.0 - rows[0].estimate.value;
    out.push(Check::new(
        Suite::LocalMc,
        "minimal measure p=5",
        s0 <= 4.0 && nonmin < 1e-5,
        format!("W_M {s0:.2} sigma, non-minimal estimate {nonmin:.1e} at n={n5}"),
    ));
    Ok(())
}

fn global(quick: bool, seed: u64, out: &mut Vec<Check>) -> Result<()> {
    use std::f64::consts::PI;
    // Eight significant digits need B = 10^7; the quick run settles for six.
    let (b, rel_tol) = if quick { (1_000_000, 1e-6) } else { (10_000_000, 1e-8) };
    for (s, closed) in [(2u32, 6.0 / (PI * PI)), (10, 93555.0 / PI.powi(10))] {
        let r = euler_product(&EulerProductSpec::inverse_zeta(s, b))?;
        let rel = (r.value - closed).abs() / closed;
        out.push(Check::new(
            Suite::Global,
            format!("1/zeta({s}) Euler product B={b}"),
            r.contains(closed) && rel <= rel_tol,
            format!("value {:.10} in [{:.10}, {:.10}], rel err {rel:.1e}", r.value, r.lower, r.upper),
        ));
    }

    let n = if quick { 20_000 } else { 100_000 };
    let cfg = GlobalMcConfig::new(1000, n, seed, 1000)?;
    for prop in [
        GlobalProperty::GloballyMinimal,
        GlobalProperty::SemistableCurve,
        GlobalProperty::SemistableEquation,
        GlobalProperty::SquarefreeDisc,
    ] {
        let r = mc_global(&prop, &cfg)?;
        out.push(Check::new(
            Suite::Global,
            format!("{prop} MC vs truncated product"),
            r.within(3.0),
            format!("estimate {:.5} vs {:.5}, |dev| {:.5} <= {:.5}", r.estimate, r.truncated_product, r.deviation(), r.tolerance(3.0)),
        ));
    }

    let census_ok = [2u64, 3, 5, 7, 11, 13].iter().map(|&p| a3b2_census(p)).collect::<Result<Vec<_>>>()?;
    out.push(Check::new(
        Suite::Global,
        "a^3 - b^2 local census p<=13",
        census_ok.iter().all(|c| c.count == c.expected),
        "count = 2p^2 - p of p^4 pairs",
    ));
    let demo = squarefree_a3b2_demo(n, 1000, 1000, seed)?;
    out.push(Check::new(
        Suite::Global,
        "a^3 - b^2 square-free MC",
        demo.within(3.0),
        format!("estimate {:.5} vs {:.5}", demo.estimate, demo.truncated_product),
    ));

    let scan = prime_conductor_scan(&[100, 1000, 10_000], &cfg)?;
    let decreasing = scan.windows(2).all(|w| w[1].comparator < w[0].comparator);
    let first = &scan[0];
    let sig = if first.stderr > 0.0 { (first.estimate - first.comparator_value).abs() / first.stderr } else { f64::INFINITY };
    out.push(Check::new(
        Suite::Global,
        "single-bad-prime comparator",
        decreasing && sig <= 3.0,
        format!("decreasing: {decreasing}; X=100 estimate {:.5} vs {:.5} ({sig:.2} sigma)", first.estimate, first.comparator_value),
    ));
    Ok(())
}
