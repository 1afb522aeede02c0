// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end.
//!
//! Exit status is 0 on success, 2 for usage and validation errors (the
//! message names the offending flag) and 1 for runtime failures such as
//! unreadable files.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::Error;
use crate::fgn::{build_sampler, FgnParams};
use crate::limitdist::{critical_values, CriticalValueTable, LimitSimSpec, DEFAULT_LEVELS};
use crate::montecarlo::{
    run_experiment, simulate_statistics, summarize, ExperimentKind, ExperimentResult,
    ExperimentSpec, POWER_REPLICATIONS, SIZE_REPLICATIONS,
};
use crate::rankstat::TimeSeries;
use crate::sntest::{tn_statistic, TestResult, TestWindow};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "LRD_CP_THREADS";

const SUBCOMMANDS: [&str; 5] = [
    "test",
    "generate-fgn",
    "critical-values",
    "experiment",
    "reproduce-tables",
];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let flag = match err.parameter() {
            Some("tau") => Some("--tau1/--tau2".to_string()),
            Some(name) => Some(format!("--{name}")),
            None => None,
        };
        match (flag, &err) {
            (_, Error::TableMismatch(_)) => CliError::Usage(format!("--cv/--critical-values: {err}")),
            (Some(flag), _) => CliError::Usage(format!("invalid {flag}: {err}")),
            (None, _) => CliError::Runtime(err.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Comma-separated list flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

fn parse_list<T: FromStr>(s: &str) -> std::result::Result<List<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.is_empty() {
                Err("empty list".into())
            } else {
                Ok(List(v))
            }
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "lrd-cp",
    version,
    about = "Self-normalized Wilcoxon change-point test for long-range dependent series",
    args_override_self = true
)]
pub struct CliConfig {
    /// JSON file mirroring the flags of the subcommand; flags given on the
    /// command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a series for a change in the mean.
    Test(TestArgs),
    /// Write a fractional Gaussian noise sample, one value per line.
    GenerateFgn(GenerateArgs),
    /// Simulate critical values of the limit distribution.
    CriticalValues(CriticalValuesArgs),
    /// Run a size, power, consistency or local-alternative experiment.
    Experiment(ExperimentArgs),
    /// Regenerate the critical value, size and power tables.
    ReproduceTables(ReproduceArgs),
}

#[derive(Debug, Args, Clone, Copy)]
pub struct WindowArgs {
    #[arg(long, default_value_t = 0.15)]
    pub tau1: f64,
    #[arg(long, default_value_t = 0.85)]
    pub tau2: f64,
}

impl WindowArgs {
    fn window(&self) -> CliResult<TestWindow> {
        Ok(TestWindow::new(self.tau1, self.tau2)?)
    }
}

/// Settings for critical values simulated on demand.
#[derive(Debug, Args, Clone, Copy)]
pub struct CvSimArgs {
    /// Grid size when critical values are simulated on demand.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Replications when critical values are simulated on demand.
    #[arg(long = "cv-reps", default_value_t = 10_000)]
    pub cv_reps: usize,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub hurst: f64,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Critical value table from `critical-values`; simulated when absent.
    #[arg(long = "critical-values", alias = "cv")]
    pub critical_values: Option<PathBuf>,
    #[command(flatten)]
    pub sim: CvSimArgs,
    /// Seed for on-demand critical values.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write `k,G_n(k)` for every k in the window.
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub hurst: f64,
    #[arg(long)]
    pub length: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; values go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CriticalValuesArgs {
    #[arg(long)]
    pub hurst: f64,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, value_parser = parse_list::<f64>)]
    pub levels: Option<List<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// size, power, consistency or local-alt.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub hurst: f64,
    /// Sample size, or a comma-separated list for sweeps.
    #[arg(long, value_parser = parse_list::<usize>)]
    pub n: List<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Replications; defaults to 10000 for size and 5000 otherwise.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Multiplies the default replication count.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Critical value table; simulated when absent.
    #[arg(long, alias = "critical-values")]
    pub cv: Option<PathBuf>,
    #[command(flatten)]
    pub sim: CvSimArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Multiplies every replication count (e.g. 0.05 for a quick run).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum ReadSeriesError {
    Io(io::Error),
    Parse { line: usize, text: String },
    NonFinite { line: usize },
    Empty,
}

impl fmt::Display for ReadSeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadSeriesError::Io(e) => write!(f, "{e}"),
            ReadSeriesError::Parse { line, text } => {
                write!(f, "line {line}: cannot parse {text:?} as a number")
            }
            ReadSeriesError::NonFinite { line } => write!(f, "line {line}: value is not finite"),
            ReadSeriesError::Empty => f.write_str("no observations found"),
        }
    }
}

impl std::error::Error for ReadSeriesError {}

/// Reads one decimal per line, skipping blank lines and `#` comments.
///
/// The length is not checked here; [`TimeSeries::new`] enforces the minimum.
pub fn read_series(path: &Path) -> Result<Vec<f64>, ReadSeriesError> {
    let file = fs::File::open(path).map_err(ReadSeriesError::Io)?;
    let mut values = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(ReadSeriesError::Io)?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let value: f64 = text.parse().map_err(|_| ReadSeriesError::Parse {
            line: i + 1,
            text: text.to_string(),
        })?;
        if !value.is_finite() {
            return Err(ReadSeriesError::NonFinite { line: i + 1 });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(ReadSeriesError::Empty);
    }
    Ok(values)
}

/// Parses `argv`, runs the subcommand and returns the process exit status.
pub fn parse_and_dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match apply_config_file(argv) {
        Ok(argv) => argv,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let config = match CliConfig::try_parse_from(argv) {
        Ok(config) => config,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                2
            } else {
                let _ = write!(out, "{}", e.render());
                0
            };
            return code;
        }
    };
    configure_thread_pool();
    let result = dispatch(config.command, out, err);
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Caps the global worker pool from the environment. Only the first call in
/// a process has an effect.
fn configure_thread_pool() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0);
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

/// Splices flags from `--config FILE` in right after the subcommand, so
/// anything given explicitly later on the command line overrides them.
fn apply_config_file(mut argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        let arg = argv[i].to_string_lossy().into_owned();
        if arg == "--config" {
            if i + 1 >= argv.len() {
                return Err(CliError::Usage("--config requires a file path".into()));
            }
            path = Some(PathBuf::from(argv.remove(i + 1)));
            argv.remove(i);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Runtime(format!("--config {}: {e}", path.display())))?;
    let object: serde_json::Map<String, Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;

    let mut injected = Vec::new();
    for (key, value) in object {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => injected.push(OsString::from(flag)),
            Value::Number(n) => {
                injected.push(flag.into());
                injected.push(n.to_string().into());
            }
            Value::String(s) => {
                injected.push(flag.into());
                injected.push(s.into());
            }
            Value::Array(items) => {
                let joined = items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(",");
                injected.push(flag.into());
                injected.push(joined.into());
            }
            Value::Object(_) => {
                return Err(CliError::Usage(format!(
                    "--config: nested object for key {key:?} is not supported"
                )))
            }
        }
    }
    let position = argv
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .ok_or_else(|| CliError::Usage("missing subcommand".into()))?;
    argv.splice(position + 1..position + 1, injected);
    Ok(argv)
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Test(args) => cmd_test(args, out, err),
        Command::GenerateFgn(args) => cmd_generate(args, out),
        Command::CriticalValues(args) => cmd_critical_values(args, out),
        Command::Experiment(args) => cmd_experiment(args, out),
        Command::ReproduceTables(args) => cmd_reproduce(args, out),
    }
}

fn auto_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn check_hurst(hurst: f64) -> CliResult<()> {
    FgnParams::new(hurst, 2)?;
    Ok(())
}

fn check_level(level: f64) -> CliResult<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("invalid --level: {level} not in (0, 1)")))
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn output_format(explicit: Option<Format>, path: &Path) -> Format {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Format::Csv,
        _ => Format::Json,
    })
}

/// JSON number, or a string for the infinite statistic of the degenerate rule.
fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn print_json(out: &mut dyn Write, value: &Value) -> CliResult<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json"))?;
    Ok(())
}

fn load_table(path: &Path) -> CliResult<CriticalValueTable> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    CriticalValueTable::from_json(&text)
        .map_err(|e| CliError::Usage(format!("--critical-values {}: {e}", path.display())))
}

struct TableSource {
    table: CriticalValueTable,
    origin: Value,
}

fn obtain_table(
    file: Option<&Path>,
    hurst: f64,
    window: TestWindow,
    levels: &[f64],
    sim: CvSimArgs,
    seed: Option<u64>,
) -> CliResult<TableSource> {
    match file {
        Some(path) => Ok(TableSource {
            table: load_table(path)?,
            origin: json!({ "file": path.display().to_string() }),
        }),
        None => {
            let seed = seed.unwrap_or_else(auto_seed);
            let spec = LimitSimSpec {
                hurst,
                grid_size: sim.grid,
                replications: sim.cv_reps,
                window,
                levels: levels.to_vec(),
                master_seed: seed,
            };
            let table = critical_values(&spec)?;
            Ok(TableSource {
                table,
                origin: json!({ "simulated": { "grid": sim.grid, "reps": sim.cv_reps, "seed": seed } }),
            })
        }
    }
}

fn check_table_matches(table: &CriticalValueTable, hurst: f64, window: TestWindow) -> CliResult<()> {
    if (table.hurst - hurst).abs() > 1e-9 || table.window != window {
        return Err(CliError::Usage(format!(
            "--critical-values: table is for hurst {} window [{}, {}], test uses hurst {} window [{}, {}]",
            table.hurst,
            table.window.tau1(),
            table.window.tau2(),
            hurst,
            window.tau1(),
            window.tau2()
        )));
    }
    Ok(())
}

fn cmd_test(args: TestArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    check_hurst(args.hurst)?;
    check_level(args.level)?;
    let window = args.window.window()?;

    let values = read_series(&args.input)
        .map_err(|e| CliError::Runtime(format!("--input {}: {e}", args.input.display())))?;
    let series = TimeSeries::new(values)
        .map_err(|e| CliError::Runtime(format!("--input {}: {e}", args.input.display())))?;
    let result = tn_statistic(&series, &window)?;

    let source = obtain_table(
        args.critical_values.as_deref(),
        args.hurst,
        window,
        &[args.level],
        args.sim,
        args.seed,
    )?;
    check_table_matches(&source.table, args.hurst, window)?;
    let cv = source.table.get(args.level)?;
    let result = result.with_critical_value(cv);

    if result.tie_flag {
        writeln!(err, "warning: input contains ties; midranks were used")?;
    }
    if result.degenerate {
        writeln!(
            err,
            "warning: self-normalizer vanished for some k; degenerate rule applied"
        )?;
    }
    if let Some(path) = &args.profile_out {
        write_file(path, &profile_csv(&result))?;
    }
    print_json(
        out,
        &json!({
            "n": result.n,
            "hurst": args.hurst,
            "window": { "tau1": window.tau1(), "tau2": window.tau2() },
            "level": args.level,
            "statistic": number(result.statistic),
            "argmax_k": result.argmax_k,
            "critical_value": cv,
            "reject": result.reject,
            "tie_flag": result.tie_flag,
            "degenerate": result.degenerate,
            "critical_value_source": source.origin,
        }),
    )
}

fn profile_csv(result: &TestResult) -> String {
    let mut s = String::from("k,g\n");
    for (i, g) in result.profile.iter().enumerate() {
        s.push_str(&format!("{},{}\n", result.first_k + i, g));
    }
    s
}

fn cmd_generate(args: GenerateArgs, out: &mut dyn Write) -> CliResult<()> {
    let params = FgnParams::new(args.hurst, args.length)
        .map_err(|e| match e {
            Error::TooShort { .. } => CliError::Usage(format!("invalid --length: {e}")),
            other => other.into(),
        })?;
    let seed = args.seed.unwrap_or_else(auto_seed);
    let sample = build_sampler(params)?.sample(seed);
    let mut text = String::with_capacity(sample.len() * 24);
    for v in &sample {
        text.push_str(&format!("{v}\n"));
    }
    match &args.out {
        Some(path) => {
            write_file(path, &text)?;
            print_json(
                out,
                &json!({
                    "hurst": args.hurst,
                    "length": args.length,
                    "seed": seed,
                    "out": path.display().to_string(),
                }),
            )
        }
        None => {
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_critical_values(args: CriticalValuesArgs, out: &mut dyn Write) -> CliResult<()> {
    let window = args.window.window()?;
    let seed = args.seed.unwrap_or_else(auto_seed);
    let spec = LimitSimSpec {
        hurst: args.hurst,
        grid_size: args.grid,
        replications: args.reps,
        window,
        levels: args
            .levels
            .map(|l| l.0)
            .unwrap_or_else(|| DEFAULT_LEVELS.to_vec()),
        master_seed: seed,
    };
    let table = critical_values(&spec)?;
    let json_text = table.to_json();
    if let Some(path) = &args.out {
        let body = match output_format(args.format, path) {
            Format::Json => json_text.clone() + "\n",
            Format::Csv => table.to_csv(),
        };
        write_file(path, &body)?;
    }
    writeln!(out, "{json_text}")?;
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs, out: &mut dyn Write) -> CliResult<()> {
    let kind: ExperimentKind = args.kind.parse()?;
    check_hurst(args.hurst)?;
    check_level(args.level)?;
    if args.scale.is_nan() || args.scale <= 0.0 {
        return Err(CliError::Usage("invalid --scale: must be positive".into()));
    }
    let window = args.window.window()?;
    let reps = args.reps.unwrap_or_else(|| {
        let base = match kind {
            ExperimentKind::Size => SIZE_REPLICATIONS,
            _ => POWER_REPLICATIONS,
        };
        ((base as f64 * args.scale).round() as usize).max(1)
    });
    let seed = args.seed.unwrap_or_else(auto_seed);
    let specs: Vec<ExperimentSpec> = args
        .n
        .0
        .iter()
        .map(|&n| ExperimentSpec {
            kind,
            hurst: args.hurst,
            n,
            delta: args.delta,
            tau: args.tau,
            c: args.c,
            level: args.level,
            replications: reps,
            window,
            master_seed: seed,
        })
        .collect();
    for spec in &specs {
        spec.validate()?;
    }

    let source = obtain_table(
        args.cv.as_deref(),
        args.hurst,
        window,
        &[args.level],
        args.sim,
        Some(seed),
    )?;
    let results = specs
        .iter()
        .map(|spec| run_experiment(spec, &source.table))
        .collect::<Result<Vec<_>, _>>()?;

    if let Some(path) = &args.out {
        let body = match output_format(args.format, path) {
            Format::Csv => experiment_csv(&results),
            Format::Json => serde_json::to_string_pretty(&results).expect("json") + "\n",
        };
        write_file(path, &body)?;
    }
    print_json(
        out,
        &json!({
            "critical_value_source": source.origin,
            "results": serde_json::to_value(&results).expect("json"),
        }),
    )
}

fn experiment_csv(results: &[ExperimentResult]) -> String {
    let mut s = String::from(ExperimentResult::CSV_HEADER);
    s.push('\n');
    for r in results {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

const TABLE_HURSTS: [f64; 4] = [0.6, 0.7, 0.8, 0.9];
const SIZE_NS: [usize; 5] = [10, 50, 100, 500, 1000];
const POWER_NS: [usize; 2] = [100, 500];
const POWER_DELTAS: [f64; 3] = [0.5, 1.0, 2.0];
const POWER_LEVELS: [f64; 2] = [0.10, 0.05];

fn cmd_reproduce(args: ReproduceArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.scale.is_nan() || args.scale <= 0.0 {
        return Err(CliError::Usage("invalid --scale: must be positive".into()));
    }
    let seed = args.seed.unwrap_or_else(auto_seed);
    let scaled = |base: usize| ((base as f64 * args.scale).round() as usize).max(100);
    let cv_reps = scaled(10_000);
    let size_reps = scaled(SIZE_REPLICATIONS);
    let power_reps = scaled(POWER_REPLICATIONS);
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", args.out.display())))?;
    let started = Instant::now();

    let mut tables = Vec::new();
    let mut t1 = String::from("hurst,level,critical_value\n");
    for &hurst in &TABLE_HURSTS {
        let spec = LimitSimSpec {
            replications: cv_reps,
            ..LimitSimSpec::new(hurst, seed)
        };
        let table = critical_values(&spec)?;
        for (level, value) in &table.quantiles {
            t1.push_str(&format!("{hurst},{level},{value}\n"));
        }
        write_file(
            &args.out.join(format!("critical_values_h{hurst}.json")),
            &(table.to_json() + "\n"),
        )?;
        tables.push(table);
    }
    write_file(&args.out.join("table1_critical_values.csv"), &t1)?;

    let mut t2 = String::from("n,hurst,level,reps,rejection_rate\n");
    for &n in &SIZE_NS {
        for (&hurst, table) in TABLE_HURSTS.iter().zip(&tables) {
            let spec = ExperimentSpec::size(hurst, n, 0.05, size_reps, seed);
            let r = run_experiment(&spec, table)?;
            t2.push_str(&format!("{n},{hurst},0.05,{size_reps},{}\n", r.rejection_rate));
        }
    }
    write_file(&args.out.join("table2_size.csv"), &t2)?;

    for (name, tau) in [("table3_power_tau0.5.csv", 0.5), ("table4_power_tau0.25.csv", 0.25)] {
        let mut t = String::from("hurst,n,delta,tau,level,reps,rejection_rate\n");
        for (&hurst, table) in TABLE_HURSTS.iter().zip(&tables) {
            for &n in &POWER_NS {
                for &delta in &POWER_DELTAS {
                    let spec = ExperimentSpec::power(hurst, n, delta, tau, 0.05, power_reps, seed);
                    let stats = simulate_statistics(&spec)?;
                    for &level in &POWER_LEVELS {
                        let spec = ExperimentSpec { level, ..spec.clone() };
                        let r = summarize(&spec, &stats, table.get(level)?, 0.0);
                        t.push_str(&format!(
                            "{hurst},{n},{delta},{tau},{level},{power_reps},{}\n",
                            r.rejection_rate
                        ));
                    }
                }
            }
        }
        write_file(&args.out.join(name), &t)?;
    }

    let manifest = json!({
        "seed": seed,
        "scale": args.scale,
        "critical_value_reps": cv_reps,
        "size_reps": size_reps,
        "power_reps": power_reps,
        "grid": tables[0].grid,
        "window": { "tau1": tables[0].window.tau1(), "tau2": tables[0].window.tau2() },
        "generator": tables[0].generator,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    });
    write_file(
        &args.out.join("manifest.json"),
        &(serde_json::to_string_pretty(&manifest).expect("json") + "\n"),
    )?;
    print_json(out, &manifest)
}
