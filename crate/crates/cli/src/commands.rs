//! The subcommands: argument structs and their execution into a [`Report`].

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use wdl_core::global::{
    enumerate_box, expected_density_at, mc_global, prime_conductor_scan, squarefree_a3b2_demo, tail_density_probe,
    EstimateReport, GlobalMcConfig, GlobalProperty, HeightBox, TailFamily, DEFAULT_BOX_LIMIT,
};
use wdl_core::local::{
    compare_with_formula, exact_distribution, formula_table, mc_distribution, p_pow_neg, Cell, DistributionTable,
    ExactConfig, KeyKind, McConfig, to_f64,
};
use wdl_core::suite::{run_suite, Suite};
use wdl_core::{tate_local, TypeLabel, WdlError, WeierstrassEq};

use crate::report::{opt_rat, rat, Report};

/// Failure of a command, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or parameters outside the supported range (exit 1).
    Usage(String),
    /// Singular input equation (exit 2).
    Singular,
    /// A verification suite reported failures (exit 1).
    Failed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Singular => 2,
            CliError::Usage(_) | CliError::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Singular => f.write_str("singular Weierstrass equation (discriminant is zero)"),
            CliError::Failed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<WdlError> for CliError {
    fn from(e: WdlError) -> Self {
        match e {
            WdlError::Singular => CliError::Singular,
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses a comma-separated list.
fn list<T: FromStr>(s: &str, what: &str) -> CliResult<Vec<T>> {
    s.split(',').map(|t| t.trim().parse::<T>().map_err(|_| usage(format!("bad {what} {t:?}")))).collect()
}

// ---------------------------------------------------------------- tate

#[derive(Debug, Args)]
pub struct TateArgs {
    /// Coefficients a1,a2,a3,a4,a6.
    #[arg(long, allow_hyphen_values = true)]
    pub curve: String,
    /// The prime.
    #[arg(long)]
    pub p: u64,
}

pub fn tate(args: &TateArgs) -> CliResult<Report> {
    let a: Vec<BigInt> = list(&args.curve, "coefficient")?;
    let a: [BigInt; 5] = a.try_into().map_err(|v: Vec<BigInt>| usage(format!("--curve needs 5 coefficients, got {}", v.len())))?;
    let e = WeierstrassEq::new(a);
    let d = tate_local(&e, args.p)?;
    let mut r = Report::new("tate");
    r.field("curve", json!(e.to_strings()))
        .field("p", d.p)
        .field("kodaira", d.kodaira.to_string())
        .field("fp", d.fp)
        .field("cp", d.cp)
        .field("n", d.n)
        .field("level", d.level)
        .field("split", json!(d.split))
        .field("minimal_eq", json!(d.minimal_eq.to_strings()));
    Ok(r)
}

// ---------------------------------------------------------------- local

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LocalMode {
    Formula,
    Exact,
    Mc,
}

#[derive(Debug, Args)]
pub struct LocalArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, value_enum)]
    pub mode: LocalMode,
    /// Row key: type, kodaira, fp, tamagawa, level[:k], curve-type, type-fp.
    #[arg(long, default_value = "type")]
    pub key: String,
    /// MC sample count.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Join against the closed-form table and report a verdict per row.
    #[arg(long)]
    pub compare_formula: bool,
    /// Standard errors allowed for an MC row to count as consistent.
    #[arg(long, default_value_t = 4.0)]
    pub sigmas: f64,
    /// Exact mode: maximum refinement rounds.
    #[arg(long, default_value_t = 40)]
    pub depth: u32,
    /// Exact mode: stop once every interval is narrower than p^-k.
    #[arg(long, default_value_t = 30)]
    pub width_exp: u32,
    /// Exact mode: worklist checkpoint file (resumed from if present).
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Formula mode: largest m listed for I_m, I_m* and split c_p = m rows.
    #[arg(long, default_value_t = 8)]
    pub m_max: u32,
}

pub fn local(args: &LocalArgs, verbose: bool) -> CliResult<Report> {
    let kind: KeyKind = args.key.parse()?;
    let table = match args.mode {
        LocalMode::Formula => formula_table(args.p, kind, args.m_max)?,
        LocalMode::Exact => {
            let cfg = ExactConfig {
                width_target: p_pow_neg(args.p, args.width_exp),
                depth_budget: args.depth,
                checkpoint: args.checkpoint.clone(),
                verbose,
                ..ExactConfig::default()
            };
            exact_distribution(args.p, kind, &cfg)?
        }
        LocalMode::Mc => mc_distribution(args.p, kind, &McConfig::new(args.n, args.seed))?,
    };
    table_report(&table, args)
}

fn table_report(t: &DistributionTable, args: &LocalArgs) -> CliResult<Report> {
    let verdicts = if args.compare_formula { Some(compare_with_formula(t, args.sigmas)?) } else { None };
    let mut r = Report::new("local");
    r.field("p", t.p).field("mode", t.mode.name()).field("key", t.kind.name());
    let m = &t.meta;
    if let Some(u) = &m.undetermined {
        r.field("undetermined", rat(u));
    }
    for (k, v) in [("rounds", m.rounds.map(u64::from)), ("states", m.states), ("samples", m.samples), ("unresolved", m.unresolved), ("seed", m.seed)] {
        if let Some(v) = v {
            r.field(k, v);
        }
    }
    if let Some(c) = m.complete {
        r.field("complete", c);
    }
    let mut cols = match t.mode {
        wdl_core::local::Mode::MonteCarlo => vec!["key", "hits", "n", "estimate", "stderr"],
        _ => vec!["key", "lower", "upper"],
    };
    if verdicts.is_some() {
        cols.extend(["formula", "verdict"]);
    }
    r.columns(&cols);
    for (i, (key, cell)) in t.rows.iter().enumerate() {
        let mut row = vec![Value::String(key.to_string())];
        match cell {
            Cell::Interval(iv) => row.extend([rat(&iv.lower), rat(&iv.upper)]),
            Cell::Estimate(e) => row.extend([json!(e.hits), json!(e.n), json!(e.value), json!(e.stderr)]),
        }
        if let Some(v) = &verdicts {
            debug_assert_eq!(v[i].key, *key);
            row.extend([opt_rat(v[i].formula.as_ref()), json!(v[i].verdict.name())]);
        }
        r.row(row);
    }
    if let Some(v) = &verdicts {
        r.field("mismatches", v.iter().filter(|c| c.verdict.is_failure()).count());
    }
    Ok(r)
}

// ---------------------------------------------------------------- global

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// globally-minimal, semistable-equation, semistable-curve, squarefree-disc,
    /// squarefree-minimal-disc, good-at, type-at, single-bad-prime,
    /// squarefree-a3b2, tail-additive, tail-weak-disc.
    #[arg(long)]
    pub property: String,
    /// Height bound X of the box |a_i| <= X^i (an integer or p/q).
    #[arg(long, default_value = "1000")]
    pub x: String,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    /// Primes p <= B are tested directly.
    #[arg(long, default_value_t = 1000)]
    pub b: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// good-at: the primes, e.g. 2,3.
    #[arg(long)]
    pub primes: Option<String>,
    /// type-at: prime:type pairs, e.g. 5:III*,7:I>=1.
    #[arg(long)]
    pub types: Option<String>,
    /// single-bad-prime: the prime cutoff(s); several give a scan.
    #[arg(long)]
    pub cutoff: Option<String>,
    /// good-at / type-at: also require semistability at every other prime.
    #[arg(long)]
    pub semistable_elsewhere: bool,
    /// Print the predicted density only.
    #[arg(long)]
    pub formula_only: bool,
    /// Bound used for the predicted Euler product.
    #[arg(long, default_value_t = 1_000_000)]
    pub product_bound: u64,
    /// Count every tuple of the box instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    /// Repeat the estimate for each of these B (density-vs-B rows).
    #[arg(long)]
    pub b_list: Option<String>,
    /// tail-*: the values of M.
    #[arg(long, default_value = "10,30,100,300")]
    pub m_list: String,
}

fn parse_property(a: &GlobalArgs) -> CliResult<GlobalProperty> {
    let se = a.semistable_elsewhere;
    let p = match a.property.as_str() {
        "globally-minimal" => GlobalProperty::GloballyMinimal,
        "semistable-equation" => GlobalProperty::SemistableEquation,
        "semistable-curve" => GlobalProperty::SemistableCurve,
        "squarefree-disc" => GlobalProperty::SquarefreeDisc,
        "squarefree-minimal-disc" => GlobalProperty::SquarefreeMinimalDisc,
        "good-at" => {
            let s = a.primes.as_deref().ok_or_else(|| usage("good-at needs --primes"))?;
            GlobalProperty::GoodAt { primes: list(s, "prime")?, semistable_elsewhere: se }
        }
        "type-at" => {
            let s = a.types.as_deref().ok_or_else(|| usage("type-at needs --types"))?;
            let conditions = s
                .split(',')
                .map(|c| {
                    let (p, t) = c.split_once(':').ok_or_else(|| usage(format!("expected prime:type, got {c:?}")))?;
                    let p = p.trim().parse().map_err(|_| usage(format!("bad prime {p:?}")))?;
                    let t = TypeLabel::parse(t.trim()).ok_or_else(|| usage(format!("unknown type {t:?}")))?;
                    Ok((p, t))
                })
                .collect::<CliResult<Vec<_>>>()?;
            GlobalProperty::TypeAt { conditions, semistable_elsewhere: se }
        }
        "single-bad-prime" => {
            let c: Vec<u64> = list(a.cutoff.as_deref().unwrap_or("100"), "cutoff")?;
            GlobalProperty::SingleBadPrimeBelow(c[0])
        }
        other => return Err(usage(format!("unknown property {other:?}"))),
    };
    p.validate()?;
    Ok(p)
}

fn estimate_fields(r: &mut Report, e: &EstimateReport) {
    r.field("property", e.property.clone())
        .field("x", e.x.clone())
        .field("n", e.n_samples)
        .field("seed", e.seed)
        .field("b", e.bound)
        .field("hits", e.hits)
        .field("estimate", e.estimate)
        .field("stderr", e.stderr)
        .field("truncated_product", e.truncated_product)
        .field("tail_allowance", rat(&e.tail_allowance))
        .field("undetermined", e.undetermined)
        .field("singular_resampled", e.singular_resampled)
        .field("deviation", e.deviation())
        .field("tolerance_3sigma", e.tolerance(3.0))
        .field("within_3sigma", e.within(3.0))
        .field("expected", json!(e.expected));
}

pub fn global(a: &GlobalArgs) -> CliResult<Report> {
    match a.property.as_str() {
        "squarefree-a3b2" => return a3b2(a),
        "tail-additive" => return tail(a, TailFamily::AdditiveOrNonminimal),
        "tail-weak-disc" => return tail(a, TailFamily::WeakDisc),
        _ => {}
    }
    let prop = parse_property(a)?;
    let mut r = Report::new("global");
    if a.formula_only {
        let d = expected_density_at(&prop, a.product_bound)?;
        r.field("property", d.property)
            .field("exact", opt_rat(d.exact.as_ref()))
            .field("value", d.value)
            .field("lower", d.lower)
            .field("upper", d.upper)
            .field("product_bound", json!(d.bound))
            .field("tail_bound", opt_rat(d.tail_bound.as_ref()))
            .field("comparator", d.comparator)
            .field("tail_treatment", prop.tail_treatment());
        return Ok(r);
    }
    let x: BigRational = a.x.parse().map_err(|_| usage(format!("bad height bound {:?}", a.x)))?;
    if a.exhaustive {
        let c = enumerate_box(&HeightBox::new(x)?, std::slice::from_ref(&prop), a.b, DEFAULT_BOX_LIMIT)?;
        let row = &c.rows[0];
        r.field("property", row.property.clone())
            .field("x", c.x)
            .field("b", c.bound)
            .field("cardinality", c.cardinality)
            .field("singular", c.singular)
            .field("hits", row.hits)
            .field("undetermined", row.undetermined)
            .field("density", rat(&row.density));
        return Ok(r);
    }
    let x_int = x.is_integer().then(|| x.to_integer()).and_then(|v| u64::try_from(v).ok());
    let x_int = x_int.ok_or_else(|| usage("Monte Carlo runs need an integer height bound"))?;

    if let (GlobalProperty::SingleBadPrimeBelow(_), Some(c)) = (&prop, &a.cutoff) {
        let cutoffs: Vec<u64> = list(c, "cutoff")?;
        if cutoffs.len() > 1 {
            let cfg = GlobalMcConfig::new(x_int, a.n, a.seed, a.b)?;
            let scan = prime_conductor_scan(&cutoffs, &cfg)?;
            r.field("property", "single-bad-prime-scan").field("x", x_int).field("n", a.n).field("seed", a.seed);
            r.columns(&["cutoff", "hits", "estimate", "stderr", "comparator", "comparator_value"]);
            for s in scan {
                r.row(vec![json!(s.cutoff), json!(s.hits), json!(s.estimate), json!(s.stderr), rat(&s.comparator), json!(s.comparator_value)]);
            }
            return Ok(r);
        }
    }

    if let Some(bs) = &a.b_list {
        let bs: Vec<u64> = list(bs, "bound")?;
        r.field("property", prop.to_string()).field("x", x_int).field("n", a.n).field("seed", a.seed);
        r.columns(&["b", "hits", "estimate", "stderr", "truncated_product", "tail_allowance", "undetermined", "within_3sigma"]);
        for b in bs {
            let e = mc_global(&prop, &GlobalMcConfig::new(x_int, a.n, a.seed, b)?)?;
            r.row(vec![
                json!(b),
                json!(e.hits),
                json!(e.estimate),
                json!(e.stderr),
                json!(e.truncated_product),
                rat(&e.tail_allowance),
                json!(e.undetermined),
                json!(e.within(3.0)),
            ]);
        }
        return Ok(r);
    }

    let e = mc_global(&prop, &GlobalMcConfig::new(x_int, a.n, a.seed, a.b)?)?;
    estimate_fields(&mut r, &e);
    r.field("tail_treatment", prop.tail_treatment());
    Ok(r)
}

fn a3b2(a: &GlobalArgs) -> CliResult<Report> {
    let x: u64 = a.x.parse().map_err(|_| usage("squarefree-a3b2 needs an integer --x"))?;
    let e = squarefree_a3b2_demo(a.n, x, a.b, a.seed)?;
    let mut r = Report::new("global");
    estimate_fields(&mut r, &e);
    Ok(r)
}

fn tail(a: &GlobalArgs, family: TailFamily) -> CliResult<Report> {
    let x: u64 = a.x.parse().map_err(|_| usage("tail probes need an integer --x"))?;
    let m: Vec<u64> = list(&a.m_list, "M")?;
    let probe = tail_density_probe(family, &m, &GlobalMcConfig::new(x, a.n, a.seed, a.b)?)?;
    let mut r = Report::new("global");
    r.field("property", format!("tail-{}", family.name()))
        .field("x", probe.x)
        .field("n", probe.n_samples)
        .field("seed", probe.seed)
        .field("b", probe.bound);
    r.columns(&["m", "hits", "estimate", "stderr", "comparator", "comparator_value", "union_bound", "union_bound_value"]);
    for t in probe.rows {
        r.row(vec![
            json!(t.m),
            json!(t.hits),
            json!(t.estimate),
            json!(t.stderr),
            rat(&t.comparator),
            json!(to_f64(&t.comparator)),
            rat(&t.union_bound),
            json!(to_f64(&t.union_bound)),
        ]);
    }
    Ok(r)
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// lemmas, local-exact, local-mc, global or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Smaller sample sizes.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Runs a suite; the report is returned alongside the number of failures.
pub fn verify(a: &VerifyArgs, verbose: bool) -> CliResult<(Report, usize)> {
    let suite: Suite = a.suite.parse()?;
    let checks = run_suite(suite, a.quick, a.seed)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut r = Report::new("verify");
    r.field("suite", suite.name()).field("quick", a.quick).field("seed", a.seed).field("passed", failed == 0).field("failed", failed);
    r.columns(&["suite", "check", "result", "detail"]);
    for c in checks {
        if verbose {
            eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        r.row(vec![json!(c.suite), json!(c.name), json!(if c.passed { "PASS" } else { "FAIL" }), json!(c.detail)]);
    }
    Ok((r, failed))
}
