//! The `tscal` command line: evaluate derivatives, integrals and
//! Y-values on a scale, check monotonicity rules and identities with
//! machine-readable reports, and export reports plus grid CSVs.
//!
//! Exit codes: 0 success / conclusion verified; 2 configuration error;
//! 3 math-domain error (the message names the offending point);
//! 4 a rule hypothesis failed; 5 a conclusion counterexample or suite
//! failure; 6 I/O error.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::calculus::{deriv, integral, DerivKind};
use crate::function::CalcError;
use crate::instance::{FunctionSpec, InstanceSpec};
use crate::rules::{
    check_mr21, check_mr22, check_mr23, check_mr31, check_prop22, check_prop32, Anchor, CheckCtx,
    CheckStatus, Conclusion, Diagnostic, HypothesisCheck, Mr22Case, RuleOutcome, RuleReport,
    Tolerances,
};
use crate::scale::{PointRef, TimeScale};
use crate::verify::{self, SuiteSummary};
use crate::yfun::FunctionPair;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MATH: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;
pub const EXIT_COUNTEREXAMPLE: i32 = 5;
pub const EXIT_IO: i32 = 6;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TSCAL_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "tscal",
    version,
    about = "Time-scale calculus: nabla/diamond-alpha derivatives, Y-functions, monotonicity rule checks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate derivatives, integrals or Y-values at points
    Eval(EvalArgs),
    /// Check a monotonicity rule or identity; JSON report on stdout
    Check(CheckArgs),
    /// Run a check and write report.json (and optionally grid.csv)
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalOp {
    Value,
    Delta,
    Nabla,
    Diamond,
    YNabla,
    YDelta,
    YDiamond,
    IntDelta,
    IntNabla,
    IntDiamond,
}

#[derive(Args)]
struct EvalArgs {
    /// Scale literal, e.g. "interval(0,1)+points(2,3)"
    #[arg(long)]
    scale: Option<String>,
    /// Function under evaluation (phi for Y ops)
    #[arg(long)]
    f: Option<String>,
    /// Second function psi, required by the Y ops
    #[arg(long)]
    g: Option<String>,
    #[arg(long, value_enum)]
    op: Option<EvalOp>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Evaluation points (repeatable)
    #[arg(long = "at")]
    at: Vec<f64>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    dense_samples: Option<usize>,
    /// Instance JSON file providing scale/phi/psi
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Key = value config file; flags win over file entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args, Clone)]
struct CheckArgs {
    /// Rule id: MR2.1, Prop2.2, MR2.2, MR2.3, Prop3.2, MR3.1,
    /// Eq2.3, Eq2.4, Prop3.1ii, Prop3.1iii, Prop2.1i
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// MR2.1 anchor: alpha | beta
    #[arg(long)]
    anchor: Option<String>,
    /// MR2.2 case: 1..4
    #[arg(long)]
    case: Option<u8>,
    /// MR2.3 ratio turning point
    #[arg(long)]
    split: Option<f64>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    dense_samples: Option<usize>,
    /// Falsification mode: number of seeded random instances
    #[arg(long)]
    fuzz: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON document here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the unix_time field for byte-identical reruns
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    check: CheckArgs,
    /// Output directory (default: $TSCAL_OUT_DIR or ".")
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write grid.csv with t, phi, psi, ratio, Y, local sign
    #[arg(long)]
    csv: bool,
}

/// A failure that already knows its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_CONFIG,
            message: msg.into(),
        }
    }

    fn io(msg: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_IO,
            message: msg.into(),
        }
    }

    fn math(e: CalcError) -> Failure {
        let code = match e {
            CalcError::Scale(_) | CalcError::InvalidAlpha { .. }
            | CalcError::RequiresDiscreteScale { .. } => EXIT_CONFIG,
            _ => EXIT_MATH,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CalcError> for Failure {
    fn from(e: CalcError) -> Failure {
        Failure::math(e)
    }
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Eval(args) => cmd_eval(args),
        Cmd::Check(args) => cmd_check(args, None),
        Cmd::Export(args) => cmd_export(args),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("tscal: {}", f.message);
            f.code
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<HashMap<String, String>, Failure> {
    let mut map = HashMap::new();
    if let Some(p) = path {
        let text = fs::read_to_string(p)
            .map_err(|e| Failure::config(format!("cannot read config {}: {e}", p.display())))?;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Failure::config(format!(
                    "config {} line {}: expected key = value",
                    p.display(),
                    ln + 1
                ))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(map)
}

fn merged<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| Failure::config(format!("config key '{key}': cannot parse '{raw}'"))),
    }
}

fn parse_scale(src: &str) -> Result<TimeScale, Failure> {
    TimeScale::parse(src).map_err(|e| Failure::config(e.to_string()))
}

fn parse_function(src: &str) -> Result<crate::function::ScaleFunction, Failure> {
    crate::function::ScaleFunction::parse(src).map_err(|e| Failure::config(e.to_string()))
}

fn locate(ts: &TimeScale, t: f64) -> Result<PointRef, Failure> {
    ts.locate(t)
        .map_err(|e| Failure::config(format!("{e} (scale is {ts})")))
}

fn load_instance(path: &Path) -> Result<FunctionPair, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read instance {}: {e}", path.display())))?;
    let spec: InstanceSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::config(format!("instance {}: {e}", path.display())))?;
    spec.build()
        .map_err(|e| Failure::config(format!("instance {}: {e}", path.display())))
}

fn cmd_eval(args: EvalArgs) -> Result<i32, Failure> {
    let cfg = load_config(&args.config)?;
    let op = match args.op {
        Some(op) => op,
        None => match cfg.get("op") {
            Some(raw) => EvalOp::from_str(raw, true)
                .map_err(|e| Failure::config(format!("config key 'op': {e}")))?,
            None => return Err(Failure::config("missing --op")),
        },
    };
    let alpha = merged(args.alpha, &cfg, "alpha")?;
    let dense_samples = merged(args.dense_samples, &cfg, "dense-samples")?.unwrap_or(16);

    let (ts, f, g) = if let Some(path) = &args.instance {
        let pair = load_instance(path)?;
        (pair.scale, pair.phi, Some(pair.psi))
    } else {
        let scale_src = merged(args.scale, &cfg, "scale")?
            .ok_or_else(|| Failure::config("missing --scale"))?;
        let ts = parse_scale(&scale_src)?;
        let f_src =
            merged(args.f, &cfg, "f")?.ok_or_else(|| Failure::config("missing --f"))?;
        let f = parse_function(&f_src)?;
        let g = match merged(args.g, &cfg, "g")? {
            Some(src) => Some(parse_function(&src)?),
            None => None,
        };
        (ts, f, g)
    };

    let kind = |k: DerivKind| -> Result<DerivKind, Failure> {
        if let DerivKind::Diamond(_) = k {
            let a = alpha.ok_or_else(|| Failure::config("diamond ops require --alpha"))?;
            Ok(DerivKind::Diamond(a))
        } else {
            Ok(k)
        }
    };
    let need_pair = |g: &Option<crate::function::ScaleFunction>| -> Result<FunctionPair, Failure> {
        let psi = g
            .clone()
            .ok_or_else(|| Failure::config("Y ops require --g (psi)"))?;
        Ok(FunctionPair::new(f.clone(), psi, ts.clone()))
    };

    let mut rows: Vec<(f64, f64)> = Vec::new();
    match op {
        EvalOp::IntDelta | EvalOp::IntNabla | EvalOp::IntDiamond => {
            let from = merged(args.from, &cfg, "from")?
                .ok_or_else(|| Failure::config("integrals require --from"))?;
            let to = merged(args.to, &cfg, "to")?
                .ok_or_else(|| Failure::config("integrals require --to"))?;
            let a = locate(&ts, from)?;
            let b = locate(&ts, to)?;
            let k = match op {
                EvalOp::IntDelta => DerivKind::Delta,
                EvalOp::IntNabla => DerivKind::Nabla,
                _ => kind(DerivKind::Diamond(f64::NAN))?,
            };
            let v = integral(&f, &ts, a, b, k)?;
            rows.push((to, v));
        }
        _ => {
            let mut points = args.at.clone();
            if points.is_empty() {
                if let Some(raw) = cfg.get("at") {
                    for part in raw.split(',') {
                        points.push(part.trim().parse::<f64>().map_err(|_| {
                            Failure::config(format!("config key 'at': bad number '{part}'"))
                        })?);
                    }
                }
            }
            if points.is_empty() {
                return Err(Failure::config("missing --at"));
            }
            for t in points {
                let p = locate(&ts, t)?;
                let v = match op {
                    EvalOp::Value => f.eval_at(&ts, p)?,
                    EvalOp::Delta => deriv(&f, &ts, p, DerivKind::Delta)?,
                    EvalOp::Nabla => deriv(&f, &ts, p, DerivKind::Nabla)?,
                    EvalOp::Diamond => deriv(&f, &ts, p, kind(DerivKind::Diamond(f64::NAN))?)?,
                    EvalOp::YNabla => need_pair(&g)?.y_nabla(p)?,
                    EvalOp::YDelta => need_pair(&g)?.y_delta(p)?,
                    EvalOp::YDiamond => {
                        let a = alpha
                            .ok_or_else(|| Failure::config("y-diamond requires --alpha"))?;
                        need_pair(&g)?.y_diamond(a, p)?
                    }
                    _ => unreachable!(),
                };
                rows.push((t, v));
            }
        }
    }

    if args.format == "json" {
        #[derive(Serialize)]
        struct EvalDoc {
            values: Vec<(f64, f64)>,
            dense_samples: usize,
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&EvalDoc {
                values: rows,
                dense_samples
            })
            .expect("finite values serialize")
        );
    } else {
        let many = rows.len() > 1;
        for (t, v) in rows {
            if many {
                println!("{t}\t{v}");
            } else {
                println!("{v}");
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Provenance {
    scale: Option<String>,
    phi: Option<FunctionSpec>,
    psi: Option<FunctionSpec>,
    alpha: Option<f64>,
    anchor: Option<String>,
    case: Option<u8>,
    split: Option<f64>,
    from: Option<f64>,
    to: Option<f64>,
    dense_samples: usize,
    seed: Option<u64>,
    fuzz: Option<usize>,
    tolerances: Tolerances,
}

#[derive(Serialize)]
struct CheckDocument<'a> {
    tool: &'static str,
    version: &'static str,
    rule: &'a str,
    provenance: &'a Provenance,
    unix_time: Option<u64>,
    report: Option<&'a RuleReport>,
    suite: Option<&'a SuiteSummary>,
}

struct CheckOutcome {
    code: i32,
    document: String,
    grid: Option<GridDump>,
}

/// Grid rows exported alongside a single-pair report.
struct GridDump {
    rows: Vec<GridRow>,
}

struct GridRow {
    t: f64,
    phi: Option<f64>,
    psi: Option<f64>,
    ratio: Option<f64>,
    y: Option<f64>,
    local_sign: Option<i8>,
}

fn cmd_check(args: CheckArgs, want_grid: Option<DerivKind>) -> Result<i32, Failure> {
    let outcome = run_check(args.clone(), want_grid)?;
    match &args.out {
        Some(path) => fs::write(path, outcome.document.as_bytes())
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{}", outcome.document),
    }
    Ok(outcome.code)
}

fn run_check(args: CheckArgs, want_grid: Option<DerivKind>) -> Result<CheckOutcome, Failure> {
    let cfg = load_config(&args.config)?;
    let rule = merged(args.rule.clone(), &cfg, "rule")?
        .ok_or_else(|| Failure::config("missing --rule"))?;
    let alpha = merged(args.alpha, &cfg, "alpha")?;
    let anchor_raw = merged(args.anchor.clone(), &cfg, "anchor")?;
    let case_raw = merged(args.case, &cfg, "case")?;
    let split = merged(args.split, &cfg, "split")?;
    let from = merged(args.from, &cfg, "from")?;
    let to = merged(args.to, &cfg, "to")?;
    let dense_samples = merged(args.dense_samples, &cfg, "dense-samples")?.unwrap_or(16);
    let fuzz = merged(args.fuzz, &cfg, "fuzz")?;
    let seed = merged(args.seed, &cfg, "seed")?.unwrap_or(0);

    let ctx = CheckCtx {
        dense_samples,
        tol: Tolerances::default(),
    };

    let timestamp = if args.no_timestamp {
        None
    } else {
        Some(
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    };

    // falsification mode: seeded random instances, summary document
    if let Some(n) = fuzz {
        let case = case_raw.and_then(Mr22Case::from_index);
        let suite = run_suite(&rule, seed, n, case)
            .ok_or_else(|| Failure::config(format!("unknown rule '{rule}'")))?;
        let provenance = Provenance {
            scale: None,
            phi: None,
            psi: None,
            alpha,
            anchor: anchor_raw,
            case: case_raw,
            split,
            from,
            to,
            dense_samples,
            seed: Some(seed),
            fuzz: Some(n),
            tolerances: ctx.tol,
        };
        let doc = CheckDocument {
            tool: "tscal",
            version: env!("CARGO_PKG_VERSION"),
            rule: &rule,
            provenance: &provenance,
            unix_time: timestamp,
            report: None,
            suite: Some(&suite),
        };
        let text = serde_json::to_string_pretty(&doc).expect("summary serializes");
        eprintln!("{}", suite.one_line());
        return Ok(CheckOutcome {
            code: if suite.passed() {
                EXIT_OK
            } else {
                EXIT_COUNTEREXAMPLE
            },
            document: text,
            grid: None,
        });
    }

    // single-pair mode
    let pair = if let Some(path) = &args.instance {
        load_instance(path)?
    } else {
        let scale_src = merged(args.scale.clone(), &cfg, "scale")?
            .ok_or_else(|| Failure::config("missing --scale (or --instance)"))?;
        let ts = parse_scale(&scale_src)?;
        let phi_src = merged(args.phi.clone(), &cfg, "phi")?
            .ok_or_else(|| Failure::config("missing --phi"))?;
        let psi_src = merged(args.psi.clone(), &cfg, "psi")?
            .ok_or_else(|| Failure::config("missing --psi"))?;
        FunctionPair::new(parse_function(&phi_src)?, parse_function(&psi_src)?, ts)
    };
    let ts = pair.scale.clone();
    let a = match from {
        Some(t) => locate(&ts, t)?,
        None => ts.min_ref(),
    };
    let b = match to {
        Some(t) => locate(&ts, t)?,
        None => ts.max_ref(),
    };

    let report = match rule.as_str() {
        "MR2.1" => {
            let anchor = match anchor_raw.as_deref() {
                None | Some("alpha") => Anchor::Alpha,
                Some("beta") => Anchor::Beta,
                Some(other) => {
                    return Err(Failure::config(format!(
                        "unknown anchor '{other}' (alpha|beta)"
                    )))
                }
            };
            check_mr21(&pair, a, b, anchor, &ctx)?
        }
        "Prop2.2" => check_prop22(&pair, a, b, &ctx)?,
        "MR2.2" => {
            let case = case_raw
                .and_then(Mr22Case::from_index)
                .ok_or_else(|| Failure::config("MR2.2 requires --case 1..4"))?;
            check_mr22(&pair, a, b, case, &ctx)?
        }
        "MR2.3" => {
            let t = split.ok_or_else(|| Failure::config("MR2.3 requires --split"))?;
            let p = locate(&ts, t)?;
            check_mr23(&pair, a, b, p, &ctx)?
        }
        "Prop3.2" => {
            let al = alpha.ok_or_else(|| Failure::config("Prop3.2 requires --alpha"))?;
            check_prop32(&pair, al, a, b, &ctx)?
        }
        "MR3.1" => {
            let al = alpha.ok_or_else(|| Failure::config("MR3.1 requires --alpha"))?;
            check_mr31(&pair, al, a, b, &ctx)?
        }
        "Eq2.3" | "Eq2.4" | "Prop3.1iii" | "Prop3.1ii" | "Prop2.1i" | "Prop3.1i" => {
            identity_report(&pair, &rule, alpha, &ctx)?
        }
        other => return Err(Failure::config(format!("unknown rule '{other}'"))),
    };

    let grid = match want_grid {
        Some(kind_hint) => Some(dump_grid(&pair, a, b, &ctx, rule_kind(&rule, alpha, kind_hint))?),
        None => None,
    };

    let provenance = Provenance {
        scale: Some(ts.to_string()),
        phi: Some(FunctionSpec::of(&pair.phi)),
        psi: Some(FunctionSpec::of(&pair.psi)),
        alpha,
        anchor: anchor_raw,
        case: case_raw,
        split,
        from,
        to,
        dense_samples,
        seed: Some(seed),
        fuzz: None,
        tolerances: ctx.tol,
    };
    let doc = CheckDocument {
        tool: "tscal",
        version: env!("CARGO_PKG_VERSION"),
        rule: &rule,
        provenance: &provenance,
        unix_time: timestamp,
        report: Some(&report),
        suite: None,
    };
    let text = serde_json::to_string_pretty(&doc).expect("report serializes");
    let code = match report.outcome() {
        RuleOutcome::Verified => EXIT_OK,
        RuleOutcome::HypothesisFailed => EXIT_HYPOTHESIS,
        RuleOutcome::ConclusionFailed => EXIT_COUNTEREXAMPLE,
    };
    Ok(CheckOutcome {
        code,
        document: text,
        grid,
    })
}

fn rule_kind(rule: &str, alpha: Option<f64>, fallback: DerivKind) -> DerivKind {
    match rule {
        "MR2.1" | "Prop2.2" | "MR2.2" | "MR2.3" | "Eq2.3" | "Eq2.4" | "Prop2.1i" => {
            DerivKind::Nabla
        }
        "Prop3.2" | "MR3.1" | "Prop3.1ii" | "Prop3.1iii" | "Prop3.1i" => {
            DerivKind::Diamond(alpha.unwrap_or(0.5))
        }
        _ => fallback,
    }
}

fn run_suite(rule: &str, seed: u64, n: usize, case: Option<Mr22Case>) -> Option<SuiteSummary> {
    Some(match rule {
        "Eq2.3" => verify::suite_eq23(seed, n),
        "Eq2.4" => verify::suite_eq24(seed, n),
        "Prop3.1iii" => verify::suite_prop31iii(seed, n),
        "Prop3.1ii" => verify::suite_prop31ii(seed, n),
        "Prop2.1i" | "Prop3.1i" => verify::suite_symmetry(seed, n),
        "MR2.1" => verify::suite_mr21(seed, n),
        "Prop2.2" => verify::suite_prop22(seed, n),
        "MR2.2" => verify::suite_mr22(seed, n, case.unwrap_or(Mr22Case::One)),
        "MR2.3" => verify::suite_mr23(seed, n),
        "Prop3.2" => verify::suite_prop32(seed, n),
        "MR3.1" => verify::suite_mr31(seed, n),
        _ => return None,
    })
}

/// Pointwise identity check over one given pair, reported in the same
/// shape as the rule checks.
fn identity_report(
    pair: &FunctionPair,
    rule: &str,
    alpha: Option<f64>,
    ctx: &CheckCtx,
) -> Result<RuleReport, Failure> {
    let ts = &pair.scale;
    if !ts.is_discrete() {
        return Err(Failure::config(format!(
            "identity checks of {rule} need a purely discrete scale \
             (dense behavior is covered by the classical reduction)"
        )));
    }
    let refs = ts.discrete_refs().unwrap();
    if refs.len() < 5 {
        return Err(Failure::config("identity checks need at least 5 points"));
    }
    let al = alpha.unwrap_or(0.5);
    let mut checked = 0usize;
    let mut max_res: f64 = 0.0;
    let mut diagnostics: Vec<Diagnostic> = Vec::new();
    let tol = match rule {
        "Prop3.1ii" => verify::SECOND_ORDER_TOL,
        "Prop2.1i" | "Prop3.1i" => 0.0,
        _ => verify::IDENTITY_TOL,
    };

    macro_rules! compare {
        ($lhs:expr, $rhs:expr) => {{
            let lhs: f64 = $lhs;
            let rhs: f64 = $rhs;
            let r = (lhs - rhs).abs() / (1.0 + rhs.abs());
            max_res = max_res.max(r);
            checked += 1;
        }};
    }

    match rule {
        "Eq2.3" => {
            let (sub, table) = pair.tabulate_y(DerivKind::Nabla).map_err(Failure::math)?;
            for &p in &refs[2..] {
                match pair.y_nabla_deriv_formula(p) {
                    Ok(formula) => {
                        let p_sub = sub.locate(ts.coord(p)).unwrap();
                        let direct =
                            deriv(&table, &sub, p_sub, DerivKind::Nabla).map_err(Failure::math)?;
                        compare!(formula, direct);
                    }
                    Err(CalcError::ZeroDenominator { .. }) => continue,
                    Err(e) => return Err(Failure::math(e)),
                }
            }
        }
        "Eq2.4" => {
            for &p in &refs[1..] {
                match (pair.quotient_nabla_via_y(p), pair.nabla_quotient_rule(p)) {
                    (Ok(formula), Ok(direct)) => compare!(formula, direct),
                    (Err(CalcError::ZeroDenominator { .. }), _)
                    | (_, Err(CalcError::ZeroDenominator { .. })) => continue,
                    (Err(e), _) | (_, Err(e)) => return Err(Failure::math(e)),
                }
            }
        }
        "Prop3.1iii" => {
            for &p in &refs[1..refs.len() - 1] {
                match (
                    pair.diamond_quotient_formula(al, p),
                    pair.quotient_deriv_direct(DerivKind::Diamond(al), p),
                ) {
                    (Ok(formula), Ok(direct)) => compare!(formula, direct),
                    (Err(CalcError::ZeroDenominator { .. }), _)
                    | (_, Err(CalcError::ZeroDenominator { .. })) => continue,
                    (Err(e), _) | (_, Err(e)) => return Err(Failure::math(e)),
                }
            }
        }
        "Prop3.1ii" => {
            if refs.len() < 6 {
                return Err(Failure::config("Prop3.1ii needs at least 6 points"));
            }
            let (sub, table) = pair
                .tabulate_y(DerivKind::Diamond(al))
                .map_err(Failure::math)?;
            let mut printed_max: f64 = 0.0;
            for &p in &refs[2..refs.len() - 2] {
                match pair.y_diamond_deriv_formulas(al, p) {
                    Ok((printed, corrected)) => {
                        let p_sub = sub.locate(ts.coord(p)).unwrap();
                        let reference = deriv(&table, &sub, p_sub, DerivKind::Diamond(al))
                            .map_err(Failure::math)?;
                        printed_max =
                            printed_max.max((printed - reference).abs() / (1.0 + reference.abs()));
                        compare!(corrected, reference);
                    }
                    Err(CalcError::ZeroDenominator { .. }) => continue,
                    Err(e) => return Err(Failure::math(e)),
                }
            }
            diagnostics.push(Diagnostic {
                name: "printed_formula_max_residual".into(),
                status: None,
                value: Some(printed_max),
                detail: "verbatim printed expansion vs reference; the gated comparison \
                         uses the amended reading"
                    .into(),
            });
        }
        "Prop2.1i" | "Prop3.1i" => {
            let kind = if rule == "Prop2.1i" {
                DerivKind::Nabla
            } else {
                DerivKind::Diamond(al)
            };
            let window: &[PointRef] = match kind {
                DerivKind::Nabla => &refs[1..],
                _ => &refs[1..refs.len() - 1],
            };
            let mut printed_middle = 0usize;
            for &p in window {
                match pair.y_symmetry(kind, p) {
                    Ok(quad) => {
                        let worst = (quad.neg_psi - quad.base)
                            .abs()
                            .max((quad.neg_phi + quad.base).abs())
                            .max((quad.neg_both + quad.base).abs());
                        max_res = max_res.max(worst / (1.0 + quad.base.abs()));
                        checked += 1;
                        if quad.printed_middle_holds() {
                            printed_middle += 1;
                        }
                    }
                    Err(CalcError::ZeroDenominator { .. }) => continue,
                    Err(e) => return Err(Failure::math(e)),
                }
            }
            diagnostics.push(Diagnostic {
                name: "printed_middle_equality".into(),
                status: None,
                value: Some(printed_middle as f64),
                detail: format!(
                    "points (of {checked}) where the printed Y[phi,psi] = Y[-phi,psi] holds; \
                     the derivable relation carries a minus sign"
                ),
            });
        }
        _ => unreachable!("caller filters rule ids"),
    }

    let valid = if checked > 0 {
        HypothesisCheck::new("valid_points_present", CheckStatus::Pass)
    } else {
        HypothesisCheck::new("valid_points_present", CheckStatus::Fail)
            .with_detail("no grid point satisfies the identity preconditions")
    };
    let failed = valid.status == CheckStatus::Fail;
    let holds = max_res <= tol;
    Ok(RuleReport {
        rule_id: rule.to_string(),
        alpha,
        hypothesis_checks: vec![valid],
        conclusion: if failed {
            None
        } else {
            Some(Conclusion::Identity {
                points_checked: checked,
                max_residual: max_res,
                tolerance: tol,
                holds,
            })
        },
        counterexample: None,
        diagnostics,
        tolerances: ctx.tol,
    })
}

fn dump_grid(
    pair: &FunctionPair,
    a: PointRef,
    b: PointRef,
    ctx: &CheckCtx,
    kind: DerivKind,
) -> Result<GridDump, Failure> {
    let ts = &pair.scale;
    let grid = ts.grid(a, b, ctx.dense_samples).map_err(CalcError::from)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut prev_q: Option<f64> = None;
    for &p in &grid {
        let t = ts.coord(p);
        let phi = pair.phi_at(p).ok();
        let psi = pair.psi_at(p).ok();
        let ratio = pair.ratio(p, kind).ok();
        let y = pair.y_value(kind, p).ok();
        let q = match (phi, psi) {
            (Some(f), Some(g)) if g != 0.0 => Some(f / g),
            _ => None,
        };
        let local_sign = match (q, prev_q) {
            (Some(cur), Some(prev)) => {
                let d = cur - prev;
                let tau = ctx.tol.eq_tol_rel * (1.0 + cur.abs().max(prev.abs()));
                Some(if d > tau {
                    1
                } else if d < -tau {
                    -1
                } else {
                    0
                })
            }
            _ => None,
        };
        prev_q = q;
        rows.push(GridRow {
            t,
            phi,
            psi,
            ratio,
            y,
            local_sign,
        });
    }
    Ok(GridDump { rows })
}

fn cmd_export(args: ExportArgs) -> Result<i32, Failure> {
    let out_dir = args
        .out_dir
        .or_else(|| std::env::var(OUT_DIR_ENV).ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::io(format!("cannot create {}: {e}", out_dir.display())))?;

    let want_grid = if args.csv {
        Some(DerivKind::Nabla)
    } else {
        None
    };
    let outcome = run_check(args.check, want_grid)?;

    let report_path = out_dir.join("report.json");
    fs::write(&report_path, outcome.document.as_bytes())
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", report_path.display())))?;
    eprintln!("wrote {}", report_path.display());

    if let Some(grid) = outcome.grid {
        let csv_path = out_dir.join("grid.csv");
        let mut text = String::from("t,phi,psi,ratio,Y,local_sign\n");
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in grid.rows {
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.t,
                cell(r.phi),
                cell(r.psi),
                cell(r.ratio),
                cell(r.y),
                r.local_sign.map(|s| s.to_string()).unwrap_or_default()
            ));
        }
        fs::write(&csv_path, text.as_bytes())
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", csv_path.display())))?;
        eprintln!("wrote {}", csv_path.display());
    }
    Ok(outcome.code)
}
