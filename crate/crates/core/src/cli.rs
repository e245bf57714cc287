//! Command-line front end.
//!
//! Each subcommand writes one CSV or JSON document, either to `--out`, to
//! `$SEPCUT_OUT_DIR/<subcommand>.<ext>` when that variable is set, or to
//! standard output. Floats carry ten significant digits, so identical
//! configurations (seed included) produce byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cutoff::{cutoff_time, family_diagnostics_with, profile, WindowChoice};
use crate::error::Error;
use crate::evt::{annealed_sep, gumbel_limit, RandomRateModel};
use crate::families::{generate, FamilyDescriptor};
use crate::hypercube::{
    dkw_half_width, exact_coupling_tail, exact_sep_tail, simulate_coupling, simulate_sst,
    SimKind, WalkSpec,
};
use crate::measure::RateMeasure;
use crate::output::{fmt_sig, round_json};
use crate::separation::{sandwich_bounds, sandwich_start, sep_tuple, PerturbationEnvelope};

pub const OUT_DIR_ENV: &str = "SEPCUT_OUT_DIR";

/// Points in the simulate comparison grid.
pub const COMPARE_GRID_POINTS: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "sepcut", version, about = "Separation cutoffs for tuples of independent Markov chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output file (defaults to $SEPCUT_OUT_DIR/<subcommand>.<ext>, else stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Symmetric,
    #[value(name = "odd_windows", alias = "odd-windows")]
    OddWindows,
    #[value(name = "random_rates", alias = "random-rates")]
    RandomRates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowName {
    Left,
    Right,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindName {
    Sst,
    Coupling,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Preset family.
    #[arg(long, value_enum, conflicts_with = "measure")]
    pub family: Option<FamilyName>,

    /// Measure file (`rate,mass` / `rate,count` CSV, or JSON).
    #[arg(long)]
    pub measure: Option<PathBuf>,

    /// Tuple dimension, or a comma-separated list.
    #[arg(long)]
    pub n: Option<String>,

    /// Rate values of the random-rate model (comma-separated).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,

    /// Probabilities of the random-rate model (comma-separated).
    #[arg(long)]
    pub q: Option<String>,

    /// Seed used to draw random_rates family members.
    #[arg(long, default_value_t = 0)]
    pub family_seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    #[arg(long, value_enum, default_value = "unit", conflicts_with = "b")]
    pub window: WindowName,

    /// Custom window width.
    #[arg(long)]
    pub b: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cutoff report (JSON lines, one per n).
    Cutoff {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Separation profile around the cutoff time.
    Profile {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// c grid, `min:max:step` or a comma-separated list.
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Separation and θ sandwich bounds on a time grid.
    Bounds {
        #[command(flatten)]
        source: SourceArgs,
        /// t grid, `min:max:step` or a comma-separated list.
        #[arg(long)]
        t: String,
        /// Amplitude `a` of the envelope `g(t) = a/(1+t)`; 0 means pure exponential.
        #[arg(long, default_value_t = 0.0)]
        g_amplitude: f64,
    },
    /// Monte-Carlo strong stationary or coupling times on the hypercube.
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum)]
        kind: KindName,
        #[arg(long)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write `t,empirical,exact,abs_diff` on a comparison grid.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Averaged separation of the random-rate walk against its Gumbel limit.
    Evt {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        n: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Cutoff reports and profile sharpening along a list of n.
    Diagnose {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        c: String,
    },
}

/// Command-line failures, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Compute(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Compute(_) => 1,
        }
    }
}

fn config<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSource {
    Family(FamilyDescriptor),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Cutoff,
    Profile { window: WindowChoice, c_grid: Vec<f64> },
    Bounds { t_grid: Vec<f64>, envelope: PerturbationEnvelope },
    Simulate { kind: SimKind, replicas: usize, seed: u64, compare: Option<PathBuf> },
    Evt { model: RandomRateModel, c_grid: Vec<f64> },
    Diagnose { window: WindowChoice, c_grid: Vec<f64> },
}

impl Task {
    fn name(&self) -> &'static str {
        match self {
            Self::Cutoff => "cutoff",
            Self::Profile { .. } => "profile",
            Self::Bounds { .. } => "bounds",
            Self::Simulate { .. } => "simulate",
            Self::Evt { .. } => "evt",
            Self::Diagnose { .. } => "diagnose",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Self::Cutoff | Self::Diagnose { .. } => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    /// Absent only for `evt`.
    pub source: Option<MeasureSource>,
    pub n_list: Vec<u64>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Parses `min:max:step` (endpoints inclusive within half a step) or a
/// comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parse = |s: &str| -> Result<f64, CliError> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("invalid number `{s}` in grid `{spec}`")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            config(format!("non-finite value in grid `{spec}`"))
        }
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [min, max, step] => {
            let (min, max, step) = (parse(min)?, parse(max)?, parse(step)?);
            if step <= 0.0 {
                return config(format!("grid step must be > 0 in `{spec}`"));
            }
            if max < min {
                return config(format!("grid max < min in `{spec}`"));
            }
            let count = ((max - min) / step + 0.5).floor() as usize;
            (0..=count).map(|k| min + k as f64 * step).collect()
        }
        [list] => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(parse)
            .collect::<Result<Vec<_>, _>>()?,
        _ => return config(format!("grid must be `min:max:step` or a list, got `{spec}`")),
    };
    if grid.is_empty() {
        return config("grid is empty");
    }
    Ok(grid)
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>, CliError> {
    let values = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("invalid {what} `{s}`")))
        })
        .collect::<Result<Vec<T>, _>>()?;
    if values.is_empty() {
        return config(format!("empty {what} list"));
    }
    Ok(values)
}

fn parse_model(p: &str, q: &str) -> Result<RandomRateModel, CliError> {
    let p = parse_list::<f64>(p, "rate")?;
    let q = parse_list::<f64>(q, "probability")?;
    RandomRateModel::new(p, q).map_err(|e| CliError::Config(e.to_string()))
}

fn parse_n_list(spec: Option<&str>, required: bool) -> Result<Vec<u64>, CliError> {
    match spec {
        Some(s) => {
            let list = parse_list::<u64>(s, "n")?;
            if list.contains(&0) {
                return config("n must be >= 1");
            }
            Ok(list)
        }
        None if required => config("--n is required"),
        None => Ok(Vec::new()),
    }
}

fn resolve_source(args: &SourceArgs) -> Result<MeasureSource, CliError> {
    match (&args.family, &args.measure) {
        (Some(_), Some(_)) => config("give exactly one of --family and --measure"),
        (None, None) => config("a measure source is required: --family or --measure"),
        (None, Some(path)) => Ok(MeasureSource::File(path.clone())),
        (Some(name), None) => {
            let descriptor = match name {
                FamilyName::Symmetric => FamilyDescriptor::Symmetric,
                FamilyName::OddWindows => FamilyDescriptor::OddWindows,
                FamilyName::RandomRates => {
                    let (Some(p), Some(q)) = (&args.p, &args.q) else {
                        return config("random_rates needs --p and --q");
                    };
                    FamilyDescriptor::RandomRates {
                        model: parse_model(p, q)?,
                        seed: args.family_seed,
                    }
                }
            };
            Ok(MeasureSource::Family(descriptor))
        }
    }
}

fn resolve_window(args: &WindowArgs) -> Result<WindowChoice, CliError> {
    if let Some(b) = args.b {
        if !(b.is_finite() && b > 0.0) {
            return config(format!("--b must be > 0, got {b}"));
        }
        return Ok(WindowChoice::Custom(b));
    }
    Ok(match args.window {
        WindowName::Left => WindowChoice::Left,
        WindowName::Right => WindowChoice::Right,
        WindowName::Unit => WindowChoice::Unit,
    })
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (task, source, n_list) = match cli.command {
            Command::Cutoff { source } => {
                let n = parse_n_list(source.n.as_deref(), source.measure.is_none())?;
                (Task::Cutoff, Some(resolve_source(&source)?), n)
            }
            Command::Profile { source, window, c } => {
                let n = parse_n_list(source.n.as_deref(), source.measure.is_none())?;
                let task = Task::Profile {
                    window: resolve_window(&window)?,
                    c_grid: parse_grid(&c)?,
                };
                (task, Some(resolve_source(&source)?), n)
            }
            Command::Bounds {
                source,
                t,
                g_amplitude,
            } => {
                let n = parse_n_list(source.n.as_deref(), source.measure.is_none())?;
                let envelope = if g_amplitude == 0.0 {
                    PerturbationEnvelope::Zero
                } else {
                    PerturbationEnvelope::rational_decay(g_amplitude)
                        .map_err(|e| CliError::Config(e.to_string()))?
                };
                let task = Task::Bounds {
                    t_grid: parse_grid(&t)?,
                    envelope,
                };
                (task, Some(resolve_source(&source)?), n)
            }
            Command::Simulate {
                source,
                kind,
                replicas,
                seed,
                compare,
            } => {
                if replicas == 0 {
                    return config("--replicas must be >= 1");
                }
                let n = parse_n_list(source.n.as_deref(), source.measure.is_none())?;
                let kind = match kind {
                    KindName::Sst => SimKind::Sst,
                    KindName::Coupling => SimKind::Coupling,
                };
                let task = Task::Simulate {
                    kind,
                    replicas,
                    seed,
                    compare,
                };
                (task, Some(resolve_source(&source)?), n)
            }
            Command::Evt { p, q, n, c } => {
                let task = Task::Evt {
                    model: parse_model(&p, &q)?,
                    c_grid: parse_grid(&c)?,
                };
                (task, None, parse_n_list(Some(&n), true)?)
            }
            Command::Diagnose { source, window, c } => {
                let n = parse_n_list(source.n.as_deref(), true)?;
                if n.windows(2).any(|w| w[1] <= w[0]) {
                    return config("--n list must be strictly increasing");
                }
                let task = Task::Diagnose {
                    window: resolve_window(&window)?,
                    c_grid: parse_grid(&c)?,
                };
                (task, Some(resolve_source(&source)?), n)
            }
        };
        if !matches!(task, Task::Cutoff | Task::Diagnose { .. } | Task::Evt { .. })
            && n_list.len() > 1
        {
            return config(format!("{} takes a single n", task.name()));
        }
        let format = cli.format.unwrap_or_else(|| task.default_format());
        let output = match cli.out {
            Some(p) => Some(p),
            None => std::env::var_os(OUT_DIR_ENV)
                .map(|dir| Path::new(&dir).join(format!("{}.{}", task.name(), format.extension()))),
        };
        Ok(Self {
            task,
            source,
            n_list,
            output,
            format,
        })
    }
}

fn load_measure(source: &MeasureSource, n: Option<u64>) -> Result<(RateMeasure, Option<WalkSpec>), Error> {
    match source {
        MeasureSource::File(path) => Ok((RateMeasure::read_file(path, n)?, None)),
        MeasureSource::Family(family) => {
            let n = n.ok_or_else(|| Error::Precondition("families need --n".into()))?;
            let member = generate(family, n)?;
            Ok((member.measure, member.walk))
        }
    }
}

fn json_string<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serialisable output");
    round_json(&mut v);
    serde_json::to_string(&v).expect("serialisable output")
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_default()
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Executes a validated configuration.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let mut out = open_output(cfg.output.as_deref()).map_err(Error::from)?;
    let first_n = cfg.n_list.first().copied();
    match &cfg.task {
        Task::Cutoff => {
            let source = cfg.source.as_ref().expect("cutoff has a source");
            let ns: Vec<Option<u64>> = if cfg.n_list.is_empty() {
                vec![None]
            } else {
                cfg.n_list.iter().map(|&n| Some(n)).collect()
            };
            let reports = ns
                .into_iter()
                .map(|n| load_measure(source, n).map(|(m, _)| cutoff_time(&m)))
                .collect::<Result<Vec<_>, _>>()?;
            match cfg.format {
                Format::Json => {
                    for r in &reports {
                        writeln!(out, "{}", json_string(r)).map_err(Error::from)?;
                    }
                }
                Format::Csv => {
                    writeln!(out, "n,tau,lambda_star,kappa,beta,tau_kappa,b_left,b_right")
                        .map_err(Error::from)?;
                    for r in &reports {
                        writeln!(
                            out,
                            "{},{},{},{},{},{},{},{}",
                            r.n,
                            fmt_sig(r.tau),
                            fmt_sig(r.lambda_star),
                            fmt_sig(r.kappa),
                            fmt_sig(r.beta),
                            fmt_sig(r.tau_kappa),
                            fmt_sig(r.b_left),
                            opt_cell(r.b_right)
                        )
                        .map_err(Error::from)?;
                    }
                }
            }
            for r in reports.iter().filter(|r| r.sub_unit_first_atom) {
                eprintln!(
                    "warning: n = {}: n·μ(0,κ] < 1, the first cutoff candidate is negative",
                    r.n
                );
            }
        }
        Task::Profile { window, c_grid } => {
            let (measure, _) = load_measure(cfg.source.as_ref().unwrap(), first_n)?;
            let p = profile(&measure, *window, c_grid)?;
            match cfg.format {
                Format::Csv => p.write_csv(&mut out).map_err(Error::from)?,
                Format::Json => writeln!(out, "{}", json_string(&p)).map_err(Error::from)?,
            }
            if p.dropped > 0 {
                eprintln!("note: dropped {} grid points with t < 0", p.dropped);
            }
        }
        Task::Bounds { t_grid, envelope } => {
            let (measure, _) = load_measure(cfg.source.as_ref().unwrap(), first_n)?;
            if let Some(bad) = t_grid.iter().find(|&&t| t < 0.0) {
                return config(format!("t grid must be >= 0, got {bad}"));
            }
            let start = sandwich_start(&measure);
            #[derive(Serialize)]
            struct Row {
                t: f64,
                sep: Option<f64>,
                lower: Option<f64>,
                upper: Option<f64>,
            }
            let rows = t_grid
                .iter()
                .map(|&t| {
                    let sep = envelope.is_zero().then(|| sep_tuple(&measure, t));
                    let bounds = if t >= start {
                        Some(sandwich_bounds(&measure, t, *envelope)?)
                    } else {
                        None
                    };
                    Ok(Row {
                        t,
                        sep,
                        lower: bounds.map(|b| b.lower),
                        upper: bounds.map(|b| b.upper),
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            match cfg.format {
                Format::Csv => {
                    writeln!(out, "t,sep,lower,upper").map_err(Error::from)?;
                    for r in &rows {
                        writeln!(
                            out,
                            "{},{},{},{}",
                            fmt_sig(r.t),
                            opt_cell(r.sep),
                            opt_cell(r.lower),
                            opt_cell(r.upper)
                        )
                        .map_err(Error::from)?;
                    }
                }
                Format::Json => writeln!(out, "{}", json_string(&rows)).map_err(Error::from)?,
            }
        }
        Task::Simulate {
            kind,
            replicas,
            seed,
            compare,
        } => {
            let (measure, walk) = load_measure(cfg.source.as_ref().unwrap(), first_n)?;
            let walk = match walk {
                Some(w) => w,
                None => {
                    let rates = measure.expanded_rates().ok_or_else(|| {
                        CliError::Config(
                            "simulate needs coordinate rates: use a family or a counts file".into(),
                        )
                    })?;
                    WalkSpec::new(rates.iter().map(|l| l / 2.0).collect())?
                }
            };
            let result = match kind {
                SimKind::Sst => simulate_sst(&walk, *replicas, *seed)?,
                SimKind::Coupling => simulate_coupling(&walk, *replicas, *seed)?,
            };
            let exact = |t: f64| match kind {
                SimKind::Sst => exact_sep_tail(&walk, t),
                SimKind::Coupling => exact_coupling_tail(&walk, t),
            };
            let t_max = result.quantile(1.0);
            let grid: Vec<f64> = (0..COMPARE_GRID_POINTS)
                .map(|k| t_max * k as f64 / (COMPARE_GRID_POINTS - 1) as f64)
                .collect();
            let sup = result.sup_distance(&grid, exact);
            match cfg.format {
                Format::Csv => result.write_csv(&mut out).map_err(Error::from)?,
                Format::Json => {
                    writeln!(out, "{}", json_string(&result.summary())).map_err(Error::from)?
                }
            }
            if let Some(path) = compare {
                let mut cmp = open_output(Some(path)).map_err(Error::from)?;
                writeln!(cmp, "t,empirical,exact,abs_diff").map_err(Error::from)?;
                for &t in &grid {
                    let (e, x) = (result.survival(t), exact(t));
                    writeln!(
                        cmp,
                        "{},{},{},{}",
                        fmt_sig(t),
                        fmt_sig(e),
                        fmt_sig(x),
                        fmt_sig((e - x).abs())
                    )
                    .map_err(Error::from)?;
                }
                cmp.flush().map_err(Error::from)?;
            }
            eprintln!(
                "sup_distance={} dkw99={} grid_points={}",
                fmt_sig(sup),
                fmt_sig(dkw_half_width(*replicas, 0.01)),
                COMPARE_GRID_POINTS
            );
        }
        Task::Evt { model, c_grid } => {
            writeln!(out, "n,c,annealed,limit,abs_gap,clamped").map_err(Error::from)?;
            for &n in &cfg.n_list {
                for &c in c_grid {
                    let a = annealed_sep(model, n, c)?;
                    let lim = gumbel_limit(model, c);
                    writeln!(
                        out,
                        "{n},{},{},{},{},{}",
                        fmt_sig(c),
                        fmt_sig(a.value),
                        fmt_sig(lim),
                        fmt_sig((a.value - lim).abs()),
                        a.clamped
                    )
                    .map_err(Error::from)?;
                }
            }
        }
        Task::Diagnose { window, c_grid } => {
            let source = cfg.source.as_ref().unwrap();
            let diag = family_diagnostics_with(
                |n| load_measure(source, Some(n)).map(|(m, _)| m),
                &cfg.n_list,
                *window,
                c_grid,
            )?;
            match cfg.format {
                Format::Json => writeln!(out, "{}", json_string(&diag)).map_err(Error::from)?,
                Format::Csv => {
                    writeln!(out, "n,tau_kappa,c,t,sep").map_err(Error::from)?;
                    for m in &diag.members {
                        for p in &m.profile {
                            writeln!(
                                out,
                                "{},{},{},{},{}",
                                m.report.n,
                                fmt_sig(m.report.tau_kappa),
                                fmt_sig(p.c),
                                if p.t.is_nan() { String::new() } else { fmt_sig(p.t) },
                                opt_cell(p.sep)
                            )
                            .map_err(Error::from)?;
                        }
                    }
                    eprintln!("trend={}", diag.trend.as_str());
                }
            }
        }
    }
    out.flush().map_err(Error::from)?;
    Ok(())
}

/// Parses `args`, runs, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
