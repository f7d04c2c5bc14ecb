//! `hoferlab` command-line front end.
//!
//! Every model subcommand reads a JSON config (see `docs/formats.md`). Tables go
//! out as CSV and barcodes as JSON, to `--out` or stdout.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hoferlab::chords::{enumerate_chords, nudge_to_transverse};
use hoferlab::exec::configure_threads;
use hoferlab::floer::{boundary_depth_scenario, build_complex};
use hoferlab::oracles::{geodesic_transport_oracle, maslov_oracle};
use hoferlab::quasiflat::{random_pairs, sweep};
use hoferlab::{
    ConfigFile, DifferentialRule, Execution, FilteredComplex, FloerScenario, ModelConfig,
    QuasiflatReport, SandwichOptions,
};

const THREADS_VAR: &str = "HOFERLAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "hoferlab",
    version,
    about = "Chords, barcodes and Hofer bounds in the local model"
)]
struct Cli {
    /// Run sweeps on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the chords of one twist/shift scenario as CSV.
    Chords(ScenarioArgs),
    /// Compare closed-form indices with the crossing-count oracle.
    Indices(ScenarioArgs),
    /// Barcode JSON of a scenario, or of a complex read from a file.
    Barcode(BarcodeArgs),
    /// Full sandwich reports for random pairs, as CSV.
    Quasiflat(PairArgs),
    /// (inf_norm, lower, upper_sigma) triples for random pairs, as CSV.
    Sweep(PairArgs),
    /// Boundary depth against its lower bound for k = 1..=kmax, as CSV.
    BoundaryDepth(DepthArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    #[arg(long)]
    config: PathBuf,
    /// Twist shell.
    #[arg(long, default_value_t = 0)]
    i: usize,
    /// Half the twist power.
    #[arg(long)]
    k: u32,
    /// Band coefficients, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    v: Vec<f64>,
    /// Shift resonant coefficients instead of rejecting them.
    #[arg(long)]
    allow_nudge: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BarcodeArgs {
    /// Model config; required unless --complex is given.
    #[arg(long, required_unless_present = "complex")]
    config: Option<PathBuf>,
    /// Read a complex JSON file instead of building a scenario.
    #[arg(long, conflicts_with_all = ["config", "k", "v", "rule"])]
    complex: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    i: usize,
    #[arg(long, required_unless_present = "complex")]
    k: Option<u32>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v: Vec<f64>,
    /// degree-vanishing, disk-pairing or symmetry-reduced.
    #[arg(long)]
    rule: Option<DifferentialRule>,
    #[arg(long)]
    allow_nudge: bool,
    /// Also write the scenario's complex as JSON.
    #[arg(long)]
    emit_complex: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coordinates are drawn from [-bound, bound].
    #[arg(long, default_value_t = 4.0)]
    bound: f64,
    /// Fixed twist power instead of the per-pair threshold.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    allow_nudge: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DepthArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    kmax: u32,
    #[arg(long, default_value_t = 0)]
    ell: u32,
    #[arg(long)]
    rule: Option<DifferentialRule>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    apply_thread_cap()?;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Chords(a) => chords(&a),
        Command::Indices(a) => indices(&a),
        Command::Barcode(a) => barcode(&a),
        Command::Quasiflat(a) => quasiflat(&a, exec),
        Command::Sweep(a) => sweep_triples(&a, exec),
        Command::BoundaryDepth(a) => boundary_depth(&a, exec),
        Command::Selftest => return Ok(selftest()),
    }?;
    Ok(ExitCode::SUCCESS)
}

fn apply_thread_cap() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_VAR}={raw:?} is not a thread count"))?;
    if threads == 0 {
        bail!("{THREADS_VAR} must be at least 1");
    }
    configure_threads(threads);
    Ok(())
}

fn load_config(path: &Path) -> Result<ModelConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let raw: ConfigFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    ModelConfig::try_from(raw).with_context(|| format!("invalid config {}", path.display()))
}

fn transverse(config: &ModelConfig, v: &[f64], allow: bool) -> Result<Vec<f64>> {
    config.check_vector(v).context("bad --v")?;
    let (out, nudged) = nudge_to_transverse(v, config);
    if nudged {
        if !allow {
            bail!("v is not transverse to delta; pass --allow-nudge to shift it");
        }
        eprintln!("note: v nudged to {}", join(&out));
    }
    Ok(out)
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn csv_writer(out: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::Writer::from_writer(sink(out)?))
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

fn chords(a: &ScenarioArgs) -> Result<()> {
    let config = load_config(&a.config)?;
    let v = transverse(&config, &a.v, a.allow_nudge)?;
    let chords = enumerate_chords(&config, &v, a.i, a.k)?;
    let mut w = csv_writer(a.out.as_deref())?;
    w.write_record(["sector", "s", "m", "branch", "index", "action"])?;
    for c in &chords {
        w.write_record([
            c.sector.to_string(),
            c.s.to_string(),
            c.m.to_string(),
            c.branch.to_string(),
            c.index.to_string(),
            c.action.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn indices(a: &ScenarioArgs) -> Result<()> {
    let config = load_config(&a.config)?;
    let v = transverse(&config, &a.v, a.allow_nudge)?;
    let chords = enumerate_chords(&config, &v, a.i, a.k)?;
    let mut w = csv_writer(a.out.as_deref())?;
    w.write_record(["label", "index", "oracle_index", "agree", "transport_ok"])?;
    let mut bad = 0usize;
    for c in &chords {
        let oracle = maslov_oracle(&config, c, &v, a.i, a.k);
        let transport = geodesic_transport_oracle(&config, c, &v, a.i, a.k);
        let agree = oracle == c.index;
        if !agree || !transport {
            bad += 1;
        }
        w.write_record([
            c.label(),
            c.index.to_string(),
            oracle.to_string(),
            agree.to_string(),
            transport.to_string(),
        ])?;
    }
    w.flush()?;
    if bad > 0 {
        bail!("{bad} of {} chords disagree with an oracle", chords.len());
    }
    Ok(())
}

fn rule_for(config: &ModelConfig, rule: Option<DifferentialRule>) -> DifferentialRule {
    rule.unwrap_or_else(|| DifferentialRule::for_dimension(config.n()))
}

fn barcode(a: &BarcodeArgs) -> Result<()> {
    let barcode = if let Some(path) = &a.complex {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading complex {}", path.display()))?;
        let complex: FilteredComplex = serde_json::from_str(&text)
            .with_context(|| format!("parsing complex {}", path.display()))?;
        complex.reduce_to_barcode()?
    } else {
        let config = load_config(a.config.as_deref().expect("clap requires --config"))?;
        let v = transverse(&config, &a.v, a.allow_nudge)?;
        let k = a.k.expect("clap requires --k");
        let rule = rule_for(&config, a.rule);
        if rule.is_assumption() {
            eprintln!(
                "note: differential rule {rule} is an assumption for n = {}",
                config.n()
            );
        }
        let fc = build_complex(&config, &FloerScenario::new(a.i, k, v), rule)?;
        if let Some(p) = &a.emit_complex {
            let mut out = sink(Some(p))?;
            serde_json::to_writer_pretty(&mut out, &fc.complex)?;
            writeln!(out)?;
            out.flush()?;
        }
        fc.barcode()?
    };
    let mut out = sink(a.out.as_deref())?;
    serde_json::to_writer(&mut out, &barcode)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn reports(a: &PairArgs, exec: Execution) -> Result<(ModelConfig, Vec<QuasiflatReport>)> {
    let config = load_config(&a.config)?;
    if !(a.bound.is_finite() && a.bound > 0.0) {
        bail!("--bound must be positive");
    }
    let pairs = random_pairs(a.seed, a.pairs, config.d(), a.bound);
    let opts = SandwichOptions {
        k: a.k,
        allow_nudge: a.allow_nudge,
    };
    let reports = sweep(&config, &pairs, opts, exec)?;
    Ok((config, reports))
}

fn opt(x: Option<f64>) -> String {
    x.map(|x| x.to_string()).unwrap_or_default()
}

fn quasiflat(a: &PairArgs, exec: Execution) -> Result<()> {
    let (_, reports) = reports(a, exec)?;
    let mut w = csv_writer(a.out.as_deref())?;
    w.write_record([
        "v",
        "w",
        "k",
        "lower",
        "upper_plain",
        "upper_sigma",
        "exact_inf_norm",
        "exact_one_norm",
        "spectral_differences",
        "nudged",
        "group_bound",
    ])?;
    for r in &reports {
        w.write_record([
            join(&r.v),
            join(&r.w),
            r.k.to_string(),
            r.lower.to_string(),
            r.upper_plain.to_string(),
            opt(r.upper_sigma),
            r.exact_inf_norm.to_string(),
            r.exact_one_norm.to_string(),
            join(&r.spectral_differences),
            r.nudged.to_string(),
            r.group_bound.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn sweep_triples(a: &PairArgs, exec: Execution) -> Result<()> {
    let (config, reports) = reports(a, exec)?;
    if !config.sigma_mode() {
        eprintln!("note: config is not in sigma mode, upper_sigma is left empty");
    }
    let mut w = csv_writer(a.out.as_deref())?;
    w.write_record(["inf_norm", "lower", "upper_sigma"])?;
    for r in &reports {
        w.write_record([
            r.exact_inf_norm.to_string(),
            r.lower.to_string(),
            opt(r.upper_sigma),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn boundary_depth(a: &DepthArgs, exec: Execution) -> Result<()> {
    let config = load_config(&a.config)?;
    if a.kmax == 0 {
        bail!("--kmax must be at least 1");
    }
    let rule = rule_for(&config, a.rule);
    let ks: Vec<u32> = (1..=a.kmax).collect();
    let rows = exec.try_map(&ks, |&k| boundary_depth_scenario(&config, k, a.ell, rule))?;
    let mut w = csv_writer(a.out.as_deref())?;
    w.write_record(["k", "beta", "lower_bound"])?;
    for r in &rows {
        w.write_record([
            r.k.to_string(),
            r.beta.to_string(),
            r.lower_bound.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn selftest() -> ExitCode {
    let results = hoferlab::selftest::run();
    let mut failed = 0;
    for r in &results {
        match &r.outcome {
            Ok(()) => println!("ok    {}", r.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {}: {msg}", r.name);
            }
        }
    }
    println!(
        "selftest: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
