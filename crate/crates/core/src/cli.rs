//! The `quatcalc` command-line front end.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 input error, 3 partition
//! error, 4 separation error. Reports are JSON (CSV for sweeps) written
//! atomically to `--output` or printed to stdout.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::discretize::{factorization_example, norm_sweep, sweep_csv, sweep_sizes, Which};
use crate::error::{Error, Result};
use crate::io::{matrix_to_json, parse_partition, read_matrix, spectrum_to_json, spheres_to_json};
use crate::irreducibility::irreducibility_report;
use crate::quaternion::ImaginaryUnit;
use crate::scalculus::{riesz_decompose, RieszOptions, RieszTolerances, DEFAULT_NODES};
use crate::spectrum::{delta_smin, point_spectrum, spherical_spectrum, SPECTRUM_TOL};
use crate::verify::{self, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PARTITION: i32 = 3;
pub const EXIT_SEPARATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "quatcalc", version, about = "Quaternionic operators: spectra, Riesz projections, factorizations")]
#[command(after_help = "Tolerances: --tol-<name> <value> (e.g. --tol-riesz-oracle 1e-9); --tol-all sets every \
tolerance of the command.\nEnvironment: QUATCALC_THREADS caps internal parallelism.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spherical spectrum with multiplicities and Δ cross-checks.
    Spectrum(SpectrumArgs),
    /// Riesz decomposition along a partition of the spectrum.
    Riesz(RieszArgs),
    /// The two factorization examples and norm sweeps.
    Examples(ExamplesArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Strong irreducibility and irreducibility decisions.
    Irreducibility(IrreducibilityArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Report destination (stdout when absent); written atomically.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RieszArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Spheres of σ as "re,rad;re,rad"; τ is the rest of the spectrum.
    #[arg(long)]
    pub partition: String,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    /// Imaginary unit of the integration slice as "x,y,z".
    #[arg(long, default_value = "1,0,0")]
    pub slice: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExamplesArgs {
    /// normal | nonnormal
    #[arg(long, default_value = "normal")]
    pub which: String,
    #[arg(long, default_value_t = 96)]
    pub n: usize,
    /// Norm sweep over n = a, 2a, 4a, … ≤ b, emitted as CSV.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Also write the assembled T, W, K, S matrices into the report.
    #[arg(long)]
    pub matrices: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Cap on random matrix sizes.
    #[arg(long)]
    pub max_n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Largest Volterra grid.
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    /// Run only these criteria (comma separated ids).
    #[arg(long)]
    pub only: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct IrreducibilityArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Cross-check against a brute-force idempotent search (n ≤ 3).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

/// Tolerance overrides pulled out of the argument list before clap sees it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TolOverrides {
    pub all: Option<f64>,
    pub named: Vec<(String, f64)>,
}

/// Splits `--tol-<name> v` and `--tol-<name>=v` from the other arguments.
pub fn split_tolerances(args: Vec<String>) -> Result<(Vec<String>, TolOverrides)> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tol = TolOverrides::default();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(spec) = a.strip_prefix("--tol-") else {
            rest.push(a);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| Error::Parse(format!("--tol-{spec} needs a value")))?;
                (spec.to_string(), v)
            }
        };
        let value: f64 = value.parse().map_err(|_| Error::Parse(format!("--tol-{name}: '{value}' is not a number")))?;
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::Parse(format!("--tol-{name} must be positive")));
        }
        if name == "all" {
            tol.all = Some(value);
        } else {
            tol.named.push((name.replace('-', "_"), value));
        }
    }
    Ok((rest, tol))
}

/// A command's tolerances: `(name, value)` in a fixed order.
struct Tols(Vec<(&'static str, f64)>);

impl Tols {
    fn apply(mut self, o: &TolOverrides) -> Result<Self> {
        if let Some(all) = o.all {
            self.0.iter_mut().for_each(|(_, v)| *v = all);
        }
        for (name, value) in &o.named {
            match self.0.iter_mut().find(|(k, _)| k == name) {
                Some(slot) => slot.1 = *value,
                None => {
                    let known: Vec<String> = self.0.iter().map(|(k, _)| format!("--tol-{}", k.replace('_', "-"))).collect();
                    return Err(Error::Parse(format!(
                        "unknown tolerance --tol-{} (known: {})",
                        name.replace('_', "-"),
                        if known.is_empty() { "none".into() } else { known.join(", ") }
                    )));
                }
            }
        }
        Ok(self)
    }

    fn get(&self, name: &str) -> f64 {
        self.0.iter().find(|(k, _)| *k == name).expect("declared tolerance").1
    }

    fn to_json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
    }
}

/// Result of a command: the report and whether every invariant held.
pub struct Outcome {
    pub report: String,
    pub ok: bool,
}

fn json_outcome(v: &Value, ok: bool) -> Outcome {
    let mut report = serde_json::to_string_pretty(v).expect("report serializes");
    report.push('\n');
    Outcome { report, ok }
}

pub fn cmd_spectrum(a: &SpectrumArgs, o: &TolOverrides) -> Result<Outcome> {
    let tols = Tols(vec![("spectrum", SPECTRUM_TOL)]).apply(o)?;
    let t = read_matrix(&a.input)?;
    let spec = spherical_spectrum(&t, tols.get("spectrum"))?;
    let points = point_spectrum(&t, tols.get("spectrum"))?;
    let checks: Vec<Value> = spec
        .entries
        .iter()
        .map(|e| json!({"re": e.sphere.re, "rad": e.sphere.rad, "delta_smin": delta_smin(&t, e.sphere)}))
        .collect();
    let report = json!({
        "n": t.rows(),
        "norm": t.op_norm(),
        "spheres": spectrum_to_json(&spec),
        "point_spectrum": points,
        "delta_check": checks,
        "tolerances": tols.to_json(),
    });
    Ok(json_outcome(&report, true))
}

fn parse_unit(s: &str) -> Result<ImaginaryUnit> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Parse(format!("slice '{s}' must be 'x,y,z'"))))
        .collect::<Result<_>>()?;
    let [x, y, z] = parts.as_slice() else {
        return Err(Error::Parse(format!("slice '{s}' must be 'x,y,z'")));
    };
    ImaginaryUnit::new(*x, *y, *z)
}

pub fn cmd_riesz(a: &RieszArgs, o: &TolOverrides) -> Result<Outcome> {
    let defaults = RieszOptions::default();
    let rt = RieszTolerances::default();
    let tols = Tols(vec![
        ("projection", rt.projection),
        ("restricted_spectrum", rt.restricted_spectrum),
        ("match", defaults.match_tol),
        ("separation", defaults.min_separation),
        ("spectrum", SPECTRUM_TOL),
    ])
    .apply(o)?;
    let t = read_matrix(&a.input)?;
    if !t.is_square() {
        return Err(Error::Validation("operator must be square".into()));
    }
    let sigma = parse_partition(&a.partition)?;
    if sigma.is_empty() {
        return Err(Error::Partition("σ empty".into()));
    }
    let spec = spherical_spectrum(&t, tols.get("spectrum"))?;
    let tie = tols.get("match") * t.op_norm().max(1.0);
    let tau: Vec<_> = spec.spheres().into_iter().filter(|s| sigma.iter().all(|x| x.dist(*s) > tie)).collect();
    if tau.is_empty() {
        return Err(Error::Partition("τ empty: the partition covers the whole spectrum".into()));
    }
    let opts = RieszOptions {
        nodes: a.nodes,
        m: parse_unit(&a.slice)?,
        match_tol: tols.get("match"),
        min_separation: tols.get("separation"),
    };
    let pair = riesz_decompose(&t, &sigma, &tau, &opts)?;
    let rt = RieszTolerances { projection: tols.get("projection"), restricted_spectrum: tols.get("restricted_spectrum") };
    let ok = pair.certificate.passes(&rt);
    let residuals = Value::Object(pair.certificate.entries().iter().map(|(k, v)| (k.to_string(), json!(v))).collect());
    let part = |p: &crate::scalculus::InvariantPart| {
        json!({
            "projection": matrix_to_json(&p.projection),
            "restricted": matrix_to_json(&p.restricted),
            "spectrum": spectrum_to_json(&p.spectrum),
            "contour": p.contour.to_json(),
        })
    };
    let report = json!({
        "sigma": spheres_to_json(&sigma),
        "tau": spheres_to_json(&tau),
        "p_sigma": part(&pair.sigma),
        "p_tau": part(&pair.tau),
        "residuals": residuals,
        "passed": ok,
        "tolerances": tols.to_json(),
    });
    Ok(json_outcome(&report, ok))
}

fn parse_sweep(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::Parse(format!("sweep '{s}' must be 'a:b'")))?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("sweep '{s}' must be 'a:b'")));
    Ok((p(a)?, p(b)?))
}

pub fn cmd_examples(a: &ExamplesArgs, o: &TolOverrides) -> Result<Outcome> {
    let tols = Tols(vec![("factorization", 1e-12), ("delta", crate::discretize::DELTA)]).apply(o)?;
    let which: Which = a.which.parse()?;
    if let Some(sweep) = &a.sweep {
        let (lo, hi) = parse_sweep(sweep)?;
        let rows = norm_sweep(which, &sweep_sizes(lo, hi)?)?;
        return Ok(Outcome { report: sweep_csv(&rows), ok: true });
    }
    let ex = factorization_example(which, a.n)?;
    let d = &ex.diagnostics;
    let ok = d.residual_rel <= tols.get("factorization") && d.k_norm < tols.get("delta");
    let mut report = json!({
        "which": which,
        "n": ex.n,
        "diagnostics": d,
        "passed": ok,
        "tolerances": tols.to_json(),
    });
    if a.matrices {
        report["matrices"] = json!({
            "t": matrix_to_json(&ex.t),
            "w": matrix_to_json(&ex.w),
            "k": matrix_to_json(&ex.k),
            "s": matrix_to_json(&ex.s),
        });
    }
    Ok(json_outcome(&report, ok))
}

pub fn cmd_verify(a: &VerifyArgs, o: &TolOverrides) -> Result<Outcome> {
    let mut cfg = VerifyConfig {
        seed: a.seed,
        max_n: a.max_n,
        nodes: a.nodes,
        volterra_n: a.n,
        trials: a.trials,
        ..VerifyConfig::default()
    };
    if cfg.nodes < crate::scalculus::MIN_NODES {
        return Err(Error::Validation(format!("--nodes must be at least {}", crate::scalculus::MIN_NODES)));
    }
    if let Some(all) = o.all {
        cfg.tol.set_all(all)?;
    }
    for (name, value) in &o.named {
        cfg.tol.set(name, *value)?;
    }
    let results = match &a.only {
        None => verify::run_all(&cfg),
        Some(ids) => ids.split(',').map(|id| verify::run_one(id.trim(), &cfg)).collect::<Result<_>>()?,
    };
    let ok = results.iter().all(verify::Criterion::passed);
    Ok(json_outcome(&verify::report_json(&cfg, &results), ok))
}

pub fn cmd_irreducibility(a: &IrreducibilityArgs, o: &TolOverrides) -> Result<Outcome> {
    Tols(vec![]).apply(o)?;
    let t = read_matrix(&a.input)?;
    let r = irreducibility_report(&t, a.oracle, a.seed)?;
    let ok = r.oracle != Some(false);
    Ok(json_outcome(&r.to_json(), ok))
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Partition(_) => EXIT_PARTITION,
        Error::Separation { .. } => EXIT_SEPARATION,
        _ => EXIT_INPUT,
    }
}

fn error_report(e: &Error) -> Value {
    let mut v = json!({"error": e.to_string(), "exit_code": exit_code(e)});
    if let Error::Separation { gap, required } = e {
        v["separation"] = json!({"gap": gap, "required": required});
    }
    v
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("QUATCALC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| Error::Parse(format!("QUATCALC_THREADS='{raw}' is not a count")))?;
    if n == 0 {
        return Err(Error::Parse("QUATCALC_THREADS must be at least 1".into()));
    }
    // a second call in the same process (tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: &Cli, tol: &TolOverrides) -> Result<(Outcome, Option<PathBuf>)> {
    let (outcome, output) = match &cli.command {
        Command::Spectrum(a) => (cmd_spectrum(a, tol)?, &a.common.output),
        Command::Riesz(a) => (cmd_riesz(a, tol)?, &a.common.output),
        Command::Examples(a) => (cmd_examples(a, tol)?, &a.common.output),
        Command::Verify(a) => (cmd_verify(a, tol)?, &a.common.output),
        Command::Irreducibility(a) => (cmd_irreducibility(a, tol)?, &a.common.output),
    };
    Ok((outcome, output.clone()))
}

fn output_of(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Spectrum(a) => a.common.output.as_ref(),
        Command::Riesz(a) => a.common.output.as_ref(),
        Command::Examples(a) => a.common.output.as_ref(),
        Command::Verify(a) => a.common.output.as_ref(),
        Command::Irreducibility(a) => a.common.output.as_ref(),
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run(args: Vec<String>) -> i32 {
    let (args, tol) = match split_tolerances(args) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    match dispatch(&cli, &tol) {
        Ok((outcome, output)) => match emit(output.as_ref(), &outcome.report) {
            Ok(()) if outcome.ok => EXIT_OK,
            Ok(()) => EXIT_INVARIANT,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            if code == EXIT_SEPARATION {
                let mut text = serde_json::to_string_pretty(&error_report(&e)).expect("report serializes");
                text.push('\n');
                let _ = emit(output_of(&cli), &text);
            }
            code
        }
    }
}
