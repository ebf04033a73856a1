//! Command-line interface for exact Drinfeld module height computations:
//! local heights with termination certificates, global heights with
//! per-place breakdowns, escape-multiplier searches, threshold reports,
//! worked-example grids, and randomized verification suites.
//!
//! Module, place, and element data come from a single JSON configuration
//! document, read from the path given by --config or from standard input.
//! Results print as JSON by default, or as aligned text with --text. Exit
//! codes are stable: 0 for a certified result, 1 for an error or a failed
//! verification, 2 for an undecided computation.

use std::fmt;
use std::fs;
use std::io;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num::traits::Pow;
use num::{BigInt, BigRational, Zero};
use serde::Serialize;

use drinfeld_heights::config::{
    rational_string, E1Out, E2Out, EscapeOut, GlobalHeightOut, LocalHeightOut, RunConfig,
    ScalingOut, StepOut, ThresholdsOut, VerifyOut,
};
use drinfeld_heights::heights::{
    find_escaping_multiplier, global_height, local_height, EngineOptions, ExceptionSets,
    Thresholds,
};
use drinfeld_heights::lab;
use drinfeld_heights::twisted::LocalizedModule;

/// Exact local and global canonical heights of Drinfeld modules over
/// F_q(t), with machine-checkable certificates.
#[derive(Parser)]
#[command(name = "drinfeld", version)]
struct Cli {
    /// Path to the JSON configuration document; omitted or "-" reads
    /// standard input.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Starting absolute precision of the engine.
    #[arg(long, global = true)]
    prec: Option<i64>,
    /// Step-budget override.
    #[arg(long, global = true)]
    budget: Option<u32>,
    /// Seed for the randomized verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print JSON (the default).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Print aligned text instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    /// Evaluate global-height places on worker threads.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical local height of the configured element at the configured
    /// place.
    LocalHeight,
    /// Global canonical height of a rational element: per-place breakdown
    /// and total.
    GlobalHeight {
        /// Also verify the scaling law by rerunning on phi_t(x) and
        /// printing both sides.
        #[arg(long)]
        check_scaling: bool,
    },
    /// Run a verification suite over seeded random or gridded instances.
    Verify {
        /// Which suite to run.
        suite: Suite,
        /// Number of randomized trials.
        #[arg(long, default_value_t = 50)]
        trials: u32,
        /// Valuation window half-width for the exhaustive scans.
        #[arg(long)]
        window: Option<i64>,
        /// Base field size (subspace: fixes the draw; e1: the family cell).
        #[arg(long)]
        q: Option<u64>,
        /// Characteristic for the Carlitz grid.
        #[arg(long)]
        p: Option<u64>,
        /// Rank for the deep ramified grid.
        #[arg(long)]
        r: Option<u32>,
        /// Least twist index for the deep ramified grid.
        #[arg(long)]
        r0: Option<u32>,
        /// Depth cells for the deep ramified grid, "a" or "a..b".
        #[arg(long)]
        m: Option<String>,
        /// Ramification cells for the Carlitz grid, "a" or "a..b".
        #[arg(long)]
        d: Option<String>,
        /// Pole-order cells for the Carlitz grid, "a" or "a..b".
        #[arg(long)]
        n: Option<String>,
        /// Dimension cap for random subspaces.
        #[arg(long)]
        dim: Option<u32>,
    },
    /// Reproduce a worked example family over a grid of cells.
    Example {
        /// Which family: the deep ramified module or the Carlitz tail.
        family: Family,
        /// Base field size (e1).
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Rank (e1).
        #[arg(long, default_value_t = 2)]
        r: u32,
        /// Least twist index (e1).
        #[arg(long, default_value_t = 1)]
        r0: u32,
        /// Depth cells (e1), "a" or "a..b".
        #[arg(long, default_value = "2..4")]
        m: String,
        /// Characteristic (e2).
        #[arg(long, default_value_t = 3)]
        p: u64,
        /// Ramification cells (e2), "a" or "a..b".
        #[arg(long, default_value = "1..2")]
        d: String,
        /// Pole-order cells (e2), "a" or "a..b".
        #[arg(long, default_value = "1..3")]
        n: String,
    },
    /// Find the smallest multiplier moving the configured element out of
    /// the exception trap.
    EscapeMultiplier {
        /// Degree cap override for the search.
        #[arg(long)]
        degree_cap: Option<u32>,
    },
    /// Print the valuation thresholds and exception sets of the configured
    /// module at the configured place.
    Thresholds,
}

/// Verification suite names.
#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    /// Positive height or exception-trapped, on random in-S instances.
    Dichotomy,
    /// Valuation uniqueness of preimages outside the exception sets.
    DifferentValues,
    /// Angular-component count of preimages, at most q^r.
    Lacv,
    /// Codimension bound for exception-trapped subspaces.
    Subspace,
    /// The deep ramified example grid.
    E1,
    /// The Carlitz tail example grid.
    E2,
    /// Lower-bound inequalities on certified positive values.
    Bounds,
    /// Degree-weighted valuations of a rational function sum to zero.
    ProductFormula,
    /// Step-0 closed form on deep starts.
    ClosedForm,
    /// The scaling law under phi_t.
    Scaling,
    /// Height invariance under tame conjugation.
    Isomorphism,
    /// Escape multipliers rescale heights exactly.
    Escape,
}

/// Worked example families.
#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    /// Deep ramified module at a totally ramified finite place.
    E1,
    /// Carlitz module at a ramified infinite place.
    E2,
}

/// Errors of the command-line layer.
#[derive(Debug)]
enum CliError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Engine(drinfeld_heights::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "configuration is not valid JSON: {e}"),
            CliError::Engine(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Json(e)
    }
}

impl From<drinfeld_heights::Error> for CliError {
    fn from(e: drinfeld_heights::Error) -> CliError {
        CliError::Engine(e)
    }
}

fn main() -> ExitCode {
    // Exit codes are a stable contract (0 certified, 1 error, 2
    // undecided), so argument errors must not use clap's default code 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::LocalHeight => cmd_local_height(cli),
        Command::GlobalHeight { check_scaling } => cmd_global_height(cli, *check_scaling),
        Command::Verify {
            suite,
            trials,
            window,
            q,
            p,
            r,
            r0,
            m,
            d,
            n,
            dim,
        } => cmd_verify(
            cli,
            VerifyArgs {
                suite: *suite,
                trials: *trials,
                window: *window,
                q: *q,
                p: *p,
                r: *r,
                r0: *r0,
                m: m.clone(),
                d: d.clone(),
                n: n.clone(),
                dim: *dim,
            },
        ),
        Command::Example {
            family,
            q,
            r,
            r0,
            m,
            p,
            d,
            n,
        } => cmd_example(cli, *family, *q, *r, *r0, m, *p, d, n),
        Command::EscapeMultiplier { degree_cap } => cmd_escape(cli, *degree_cap),
        Command::Thresholds => cmd_thresholds(cli),
    }
}

/// Read the configuration document from the --config path or stdin.
fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let text = match &cli.config {
        Some(path) if path.as_os_str() != "-" => fs::read_to_string(path)?,
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    Ok(serde_json::from_str(&text)?)
}

/// Engine options from the config, the flags, and the DRINFELD_MAX_PREC
/// environment cap.
fn engine_options(cli: &Cli, config: &RunConfig) -> Result<EngineOptions, CliError> {
    let mut opts = config.engine_options();
    if let Some(p) = cli.prec {
        opts.start_prec = p;
    }
    if let Some(b) = cli.budget {
        opts.budget = Some(b);
    }
    if let Ok(s) = std::env::var("DRINFELD_MAX_PREC") {
        let cap: i64 = s.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "DRINFELD_MAX_PREC must be a positive integer, got \"{s}\""
            ))
        })?;
        if cap < 1 {
            return Err(CliError::Usage(format!(
                "DRINFELD_MAX_PREC must be a positive integer, got \"{s}\""
            )));
        }
        opts.max_prec = opts.max_prec.min(cap);
    }
    opts.start_prec = opts.start_prec.min(opts.max_prec);
    Ok(opts)
}

fn emit<T: Serialize>(cli: &Cli, value: &T, text: impl FnOnce() -> String) -> Result<(), CliError> {
    let payload = if cli.text {
        text()
    } else {
        serde_json::to_string_pretty(value)?
    };
    write_stdout(&payload)
}

/// Write a payload line to stdout. A closed pipe (the downstream consumer
/// hung up, as in `drinfeld ... | head`) ends the run quietly instead of
/// panicking.
fn write_stdout(payload: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = io::stdout().lock();
    let outcome = out
        .write_all(payload.as_bytes())
        .and_then(|()| out.write_all(b"\n"))
        .and_then(|()| out.flush());
    match outcome {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(CliError::Io(e)),
    }
}

/// Align rows under headers, two spaces between columns.
fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let format_row = |cells: Vec<String>| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect::<Vec<String>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut lines = vec![format_row(headers.iter().map(|h| h.to_string()).collect())];
    for row in rows {
        lines.push(format_row(row.clone()));
    }
    lines.join("\n")
}

fn trajectory_rows(steps: &[StepOut]) -> Vec<Vec<String>> {
    steps
        .iter()
        .map(|s| {
            vec![
                s.n.to_string(),
                s.v.map_or("zero".to_string(), |v| v.to_string()),
                s.ac.as_ref().map_or(String::new(), |a| format!("{a:?}")),
            ]
        })
        .collect()
}

fn cmd_local_height(cli: &Cli) -> Result<u8, CliError> {
    let config = load_config(cli)?;
    let module = config.module.build()?;
    let place = config.place.as_ref().ok_or_else(|| {
        CliError::Usage("the configuration needs a place for local-height".into())
    })?;
    let model = place.build(module.base())?;
    let element = config.element.as_ref().ok_or_else(|| {
        CliError::Usage("the configuration needs an element for local-height".into())
    })?;
    let x = element.build(module.base(), &model)?;
    if x.is_zero() {
        return Err(CliError::Usage("element must be nonzero".into()));
    }
    let opts = engine_options(cli, &config)?;
    let report = local_height(&module, &model, &x, &opts)?;
    let out = LocalHeightOut::from_report(&report, &model, module.base().p());
    emit(cli, &out, || local_height_text(&out))?;
    Ok(if out.value.is_some() { 0 } else { 2 })
}

fn local_height_text(out: &LocalHeightOut) -> String {
    let mut lines = Vec::new();
    match &out.value {
        Some(v) => lines.push(format!("value: {v}")),
        None => lines.push(format!(
            "value: undecided ({})",
            out.undecided_reason.as_deref().unwrap_or("no reason recorded")
        )),
    }
    if let (Some(name), Some(detail)) = (&out.certificate, &out.certificate_detail) {
        lines.push(format!("certificate: {name} ({detail})"));
    }
    lines.push(format!(
        "place: {}  deg {}  e {}  f {}  ext {}",
        out.place.place, out.place.deg, out.place.e, out.place.f, out.place.ext
    ));
    lines.push(format!("in_s: {}", out.in_s));
    lines.push(format!(
        "budget: {}  precision: {}  escalations: {}",
        out.budget, out.precision_used, out.escalations
    ));
    lines.push("trajectory:".to_string());
    lines.push(render_table(&["n", "v", "ac"], &trajectory_rows(&out.trajectory)));
    if !out.bounds.is_empty() {
        lines.push("bounds:".to_string());
        let rows: Vec<Vec<String>> = out
            .bounds
            .iter()
            .map(|b| {
                vec![
                    b.label.clone(),
                    if b.holds { "holds".to_string() } else { "FAILS".to_string() },
                    b.lhs.clone(),
                    b.rhs.clone(),
                ]
            })
            .collect();
        lines.push(render_table(&["label", "status", "lhs", "rhs"], &rows));
    }
    lines.join("\n")
}

fn cmd_global_height(cli: &Cli, check_scaling: bool) -> Result<u8, CliError> {
    let config = load_config(cli)?;
    let module = config.module.build()?;
    let element = config.element.as_ref().ok_or_else(|| {
        CliError::Usage("the configuration needs an element for global-height".into())
    })?;
    let x = element.build_rational(module.base())?;
    if x.is_zero() {
        return Err(CliError::Usage("element must be nonzero".into()));
    }
    let opts = engine_options(cli, &config)?;
    let report = global_height(&module, &x, &opts, cli.parallel)?;
    let mut out = GlobalHeightOut::from_report(&report);
    if check_scaling {
        let image = module.phi_t().apply_rational(&x)?;
        let image_total: Option<BigRational> = if image.is_zero() {
            Some(BigRational::zero())
        } else {
            global_height(&module, &image, &opts, cli.parallel)?.total
        };
        if let (Some(total), Some(image_total)) = (&report.total, &image_total) {
            let scaled = BigRational::from_integer(BigInt::from(module.q()))
                .pow(module.rank() as i32)
                * total;
            out.scaling = Some(ScalingOut {
                image_height: rational_string(image_total),
                scaled_height: rational_string(&scaled),
                holds: *image_total == scaled,
            });
        }
    }
    emit(cli, &out, || global_height_text(&out))?;
    if out.scaling.as_ref().is_some_and(|s| !s.holds) {
        return Ok(1);
    }
    if out.total.is_none() || (check_scaling && out.scaling.is_none()) {
        return Ok(2);
    }
    Ok(0)
}

fn global_height_text(out: &GlobalHeightOut) -> String {
    let rows: Vec<Vec<String>> = out
        .places
        .iter()
        .map(|p| {
            vec![
                p.place.clone(),
                p.deg.to_string(),
                p.e.to_string(),
                p.f.to_string(),
                p.value.clone().unwrap_or_else(|| "undecided".to_string()),
                p.certificate.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let mut lines = vec![render_table(
        &["place", "deg", "e", "f", "value", "certificate"],
        &rows,
    )];
    match &out.total {
        Some(t) => lines.push(format!("total: {t}")),
        None => lines.push("total: undecided".to_string()),
    }
    if let Some(s) = &out.scaling {
        lines.push(format!(
            "scaling: h(phi_t x) = {} vs q^r h(x) = {} ({})",
            s.image_height,
            s.scaled_height,
            if s.holds { "holds" } else { "FAILS" }
        ));
    }
    lines.join("\n")
}

struct VerifyArgs {
    suite: Suite,
    trials: u32,
    window: Option<i64>,
    q: Option<u64>,
    p: Option<u64>,
    r: Option<u32>,
    r0: Option<u32>,
    m: Option<String>,
    d: Option<String>,
    n: Option<String>,
    dim: Option<u32>,
}

/// Parse "a" or an inclusive "a..b" range.
fn parse_range(label: &str, s: &str) -> Result<Vec<u32>, CliError> {
    let parse_one = |part: &str| -> Result<u32, CliError> {
        part.parse().map_err(|_| {
            CliError::Usage(format!(
                "--{label} expects a number or an a..b range, got \"{s}\""
            ))
        })
    };
    match s.split_once("..") {
        None => Ok(vec![parse_one(s)?]),
        Some((lo, hi)) => {
            let lo = parse_one(lo)?;
            let hi = parse_one(hi.strip_prefix('=').unwrap_or(hi))?;
            if hi < lo {
                return Err(CliError::Usage(format!(
                    "--{label} range \"{s}\" is empty"
                )));
            }
            Ok((lo..=hi).collect())
        }
    }
}

fn cmd_verify(cli: &Cli, args: VerifyArgs) -> Result<u8, CliError> {
    let window = args.window.unwrap_or(10);
    let summary = match args.suite {
        Suite::Dichotomy => lab::verify_dichotomy(cli.seed, args.trials)?,
        Suite::DifferentValues => lab::verify_different_values(window)?,
        Suite::Lacv => lab::verify_lacv(window)?,
        Suite::Subspace => {
            lab::verify_subspace(cli.seed, args.trials, args.dim.unwrap_or(8), args.q)?
        }
        Suite::E1 => {
            let q = args.q.unwrap_or(2);
            let r = args.r.unwrap_or(2);
            let r0 = args.r0.unwrap_or(1);
            let ms = parse_range("m", args.m.as_deref().unwrap_or("2..4"))?;
            let cells: Vec<(u64, u32, u32, u32)> =
                ms.into_iter().map(|m| (q, r, r0, m)).collect();
            lab::verify_e1(&cells)?
        }
        Suite::E2 => {
            let ps = vec![args.p.unwrap_or(3)];
            let ds = parse_range("d", args.d.as_deref().unwrap_or("1"))?;
            let ns = parse_range("n", args.n.as_deref().unwrap_or("1..3"))?;
            lab::verify_e2(&ps, &ds, &ns)?
        }
        Suite::Bounds => lab::verify_bounds(cli.seed, args.trials)?,
        Suite::ProductFormula => lab::verify_product_formula(cli.seed, args.trials)?,
        Suite::ClosedForm => lab::verify_closed_form(cli.seed, args.trials)?,
        Suite::Scaling => lab::verify_scaling(cli.seed, args.trials)?,
        Suite::Isomorphism => lab::verify_isomorphism(cli.seed, args.trials)?,
        Suite::Escape => lab::verify_escape(cli.seed, args.trials)?,
    };
    let out = VerifyOut::from_summary(&summary);
    emit(cli, &out, || {
        let mut lines = vec![format!("{}: {}/{} pass", out.suite, out.passes, out.trials)];
        if let Some(first) = out.failures.first() {
            lines.push(format!("first counterexample: {first}"));
        }
        lines.join("\n")
    })?;
    Ok(if summary.ok() { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_example(
    cli: &Cli,
    family: Family,
    q: u64,
    r: u32,
    r0: u32,
    m: &str,
    p: u64,
    d: &str,
    n: &str,
) -> Result<u8, CliError> {
    match family {
        Family::E1 => {
            let rows: Vec<E1Out> = parse_range("m", m)?
                .into_iter()
                .map(|m| lab::reproduce_example_e1(q, r, r0, m).map(|rep| E1Out::from_report(&rep)))
                .collect::<Result<Vec<E1Out>, drinfeld_heights::Error>>()?;
            emit(cli, &rows, || {
                let table: Vec<Vec<String>> = rows
                    .iter()
                    .map(|row| {
                        vec![
                            row.q.to_string(),
                            row.r.to_string(),
                            row.r0.to_string(),
                            row.m.to_string(),
                            row.d.to_string(),
                            row.value.clone(),
                            row.ratio.clone().unwrap_or_default(),
                            row.certificate.clone(),
                        ]
                    })
                    .collect();
                render_table(
                    &["q", "r", "r0", "m", "d", "value", "ratio", "certificate"],
                    &table,
                )
            })?;
        }
        Family::E2 => {
            let mut rows = Vec::new();
            for d in parse_range("d", d)? {
                for n in parse_range("n", n)? {
                    rows.push(E2Out::from_report(&lab::reproduce_example_e2(p, d, n)?));
                }
            }
            emit(cli, &rows, || {
                let table: Vec<Vec<String>> = rows
                    .iter()
                    .map(|row| {
                        vec![
                            row.p.to_string(),
                            row.d.to_string(),
                            row.n.to_string(),
                            row.value.clone(),
                        ]
                    })
                    .collect();
                render_table(&["p", "d", "n", "value"], &table)
            })?;
        }
    }
    Ok(0)
}

fn cmd_escape(cli: &Cli, degree_cap: Option<u32>) -> Result<u8, CliError> {
    let config = load_config(cli)?;
    let module = config.module.build()?;
    let place = config.place.as_ref().ok_or_else(|| {
        CliError::Usage("the configuration needs a place for escape-multiplier".into())
    })?;
    let model = place.build(module.base())?;
    let element = config.element.as_ref().ok_or_else(|| {
        CliError::Usage("the configuration needs an element for escape-multiplier".into())
    })?;
    let x = element.build(module.base(), &model)?;
    if x.is_zero() {
        return Err(CliError::Usage("element must be nonzero".into()));
    }
    let opts = engine_options(cli, &config)?;
    let report = find_escaping_multiplier(&module, &model, &x, degree_cap, &opts)?;
    let out = EscapeOut::from_report(&report);
    emit(cli, &out, || {
        [
            format!("b: {}", out.b),
            format!("v: {}", out.v),
            format!("ac: {:?}", out.ac),
            format!(
                "degree_cap: {}  z: {}  f_cap: {}",
                out.degree_cap, out.z, out.f_cap
            ),
        ]
        .join("\n")
    })?;
    Ok(0)
}

fn cmd_thresholds(cli: &Cli) -> Result<u8, CliError> {
    let config = load_config(cli)?;
    let module = config.module.build()?;
    let place = config.place.as_ref().ok_or_else(|| {
        CliError::Usage("the configuration needs a place for thresholds".into())
    })?;
    let model = place.build(module.base())?;
    let loc = LocalizedModule::new(&module, &model)?;
    let thr = Thresholds::compute(&loc)?;
    let exc = ExceptionSets::compute(&loc, &thr)?;
    let out = ThresholdsOut::from_parts(&loc, &thr, &exc);
    emit(cli, &out, || {
        let v_coeffs: Vec<String> = out
            .v_coeffs
            .iter()
            .map(|v| v.map_or("zero".to_string(), |v| v.to_string()))
            .collect();
        [
            format!("q: {}  r: {}  r0: {}", out.q, out.r, out.r0),
            format!("v_coeffs: [{}]", v_coeffs.join(", ")),
            format!(
                "m_v: {}  n_v: {}  in_s: {}",
                out.m_v.as_deref().unwrap_or("+infinity"),
                out.n_v,
                out.in_s
            ),
            format!(
                "c_v0: {}  m_steps: {}  l_lcm: {}",
                out.c_v0, out.m_steps, out.l_lcm
            ),
            format!("p_all: [{}]", out.p_all.join(", ")),
            format!(
                "z: {}  f_cap: {}  budget: {}",
                out.z, out.f_cap, out.budget
            ),
        ]
        .join("\n")
    })?;
    Ok(0)
}
