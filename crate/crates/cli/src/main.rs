// SPDX-License-Identifier: Apache-2.0

//! `bdcut`: spectra, separation curves, mixing times and cut-off scans for
//! birth-and-death chains.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use bd_cutoff::cutoff::{linear_grid, mixing_bracket, MAX_THETA_ORDER};
use bd_cutoff::distances::{compare_distances, compare_distances_spectral};
use bd_cutoff::hitting::{moments, sep_discrete_curve, theta, ContinuousTail};
use bd_cutoff::{
    cutoff_stats, mixing_time, scan_family, shape_profile, FamilySpec, ScanThresholds,
    Spectrum, TimeMode,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use input::{family_spec, parse_family_list, read_text, resolve, FamilyKind, FamilyParams, InputArgs};
use output::{emit, json_text, num, Format, Table};

#[derive(Debug)]
pub enum CliError {
    Domain(bd_cutoff::Error),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn usage(msg: String) -> Self {
        CliError::Usage(msg)
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) | CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl From<bd_cutoff::Error> for CliError {
    fn from(e: bd_cutoff::Error) -> Self {
        CliError::Domain(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "bdcut", version, about = "Exact separation analysis of birth-and-death chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; curves default to CSV and reports to JSON.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct TimeGrid {
    /// Explicit times (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Vec<f64>,
    /// Largest time of an even grid starting at 0 (default 3 × mean hitting time).
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of points of the even grid.
    #[arg(long, default_value_t = 31)]
    points: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Continuous)]
    mode: ModeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Continuous,
    Discrete,
}

impl From<ModeArg> for TimeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Continuous => TimeMode::Continuous,
            ModeArg::Discrete => TimeMode::Discrete,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Spectral,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Centering {
    /// `sep(t + cσ)`, compared with the normal tail.
    Gaussian,
    /// `sep(t - γ/λ + c/λ)`, the mean-matched Gumbel centering.
    GumbelMean,
    /// `sep((ln m + c)/λ)`, the coupon-collector centering.
    GumbelLog,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nonzero eigenvalues of I - K.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        /// Print the family's closed-form spectrum instead of computing it.
        #[arg(long)]
        closed_form: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Separation from state 0 as a function of time.
    SepCurve {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: TimeGrid,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Continuous-time separation mixing time.
    MixTime {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gap, mean hitting time, window, N and θ_k diagnostics.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Separation, total variation and L² distance from direct evolution.
    CompareDistances {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: TimeGrid,
        /// How separation is computed.
        #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
        method: MethodArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cut-off verdict along a family sequence.
    Scan {
        /// JSON array of family descriptions.
        #[arg(long, conflicts_with = "family")]
        specs: Option<PathBuf>,
        #[arg(long, value_enum)]
        family: Option<FamilyKind>,
        /// Values of the family's size parameter (comma separated).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// For bernoulli-laplace, set n = ratio × r at every point.
        #[arg(long)]
        n_ratio: Option<usize>,
        #[command(flatten)]
        params: FamilyParams,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Least slope of N against log(size) that counts as growth [default: 0.5]
        #[arg(long)]
        growth_slope: Option<f64>,
        /// max(N)/min(N) below this is read as bounded [default: 2]
        #[arg(long)]
        bounded_ratio: Option<f64>,
        /// Least slope of log(λσ) against log(size) for a Gaussian shape [default: 0.25]
        #[arg(long)]
        gaussian_slope: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Separation around the cut-off time against Gaussian and Gumbel shapes.
    Profile {
        #[command(flatten)]
        input: InputArgs,
        /// Explicit c values (comma separated).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        c: Vec<f64>,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        c_min: f64,
        #[arg(long, default_value_t = 3.0)]
        c_max: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        /// Which separation column the CSV reports.
        #[arg(long, value_enum, default_value_t = Centering::Gaussian)]
        centering: Centering,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    // Argument errors are usage errors (exit 1); exit 2 is reserved for I/O.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bdcut: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Spectrum {
            input,
            closed_form,
            output,
        } => cmd_spectrum(&input, closed_form, &output),
        Command::SepCurve {
            input,
            grid,
            output,
        } => cmd_sep_curve(&input, &grid, &output),
        Command::MixTime { input, eps, output } => cmd_mix_time(&input, eps, &output),
        Command::Stats { input, output } => cmd_stats(&input, &output),
        Command::CompareDistances {
            input,
            grid,
            method,
            output,
        } => cmd_compare(&input, &grid, method, &output),
        Command::Scan {
            specs,
            family,
            sizes,
            n_ratio,
            params,
            jobs,
            growth_slope,
            bounded_ratio,
            gaussian_slope,
            output,
        } => {
            let points = scan_points(specs, family, &sizes, n_ratio, &params)?;
            let defaults = ScanThresholds::default();
            let thresholds = ScanThresholds {
                growth_slope: growth_slope.unwrap_or(defaults.growth_slope),
                bounded_ratio: bounded_ratio.unwrap_or(defaults.bounded_ratio),
                gaussian_slope: gaussian_slope.unwrap_or(defaults.gaussian_slope),
            };
            cmd_scan(&points, &thresholds, jobs, &output)
        }
        Command::Profile {
            input,
            c,
            c_min,
            c_max,
            points,
            centering,
            output,
        } => {
            let grid = if c.is_empty() {
                linear_grid(c_min, c_max, points)
            } else {
                c
            };
            cmd_profile(&input, &grid, centering, &output)
        }
    }
}

fn cmd_spectrum(input: &InputArgs, closed_form: bool, out: &OutputArgs) -> Result<(), CliError> {
    let spectrum = if closed_form {
        let spec = match (input.family, &input.family_json) {
            (Some(kind), _) => family_spec(kind, &input.params, None)?,
            (None, Some(path)) => input::parse_family_json(&read_text(path)?)?,
            _ => {
                return Err(CliError::usage(
                    "--closed-form needs --family or --family-json".into(),
                ))
            }
        };
        spec.closed_form_spectrum()?
    } else {
        resolve(input)?.spectrum()?
    };
    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut table = Table::new(&["index", "lambda"]);
            for (i, l) in spectrum.iter().enumerate() {
                table.push(vec![(i + 1).to_string(), num(l)]);
            }
            table.to_csv()
        }
        Format::Json => json_text(json!({ "lambdas": spectrum.lambdas() })),
    };
    emit(&text, out.out.as_deref())
}

fn time_grid(grid: &TimeGrid, spectrum: &Spectrum) -> Vec<f64> {
    let mut times = if grid.t.is_empty() {
        let t_max = grid
            .t_max
            .unwrap_or_else(|| 3.0 * moments(spectrum, TimeMode::Continuous).mean);
        linear_grid(0.0, t_max, grid.points)
    } else {
        grid.t.clone()
    };
    if grid.mode == ModeArg::Discrete && grid.t.is_empty() {
        for t in &mut times {
            *t = t.round();
        }
        times.dedup();
    }
    times
}

fn cmd_sep_curve(input: &InputArgs, grid: &TimeGrid, out: &OutputArgs) -> Result<(), CliError> {
    let source = resolve(input)?;
    if let (input::Source::Chain(c), ModeArg::Discrete) = (&source, grid.mode) {
        if !c.is_monotone() {
            return Err(CliError::usage(
                "discrete-time spectral separation requires a monotone chain".into(),
            ));
        }
    }
    let spectrum = source.spectrum()?;
    let times = time_grid(grid, &spectrum);
    let seps = match grid.mode {
        ModeArg::Continuous => ContinuousTail::new(&spectrum).sep_many(&times)?,
        ModeArg::Discrete => {
            let steps = times
                .iter()
                .map(|&t| whole_step(t))
                .collect::<Result<Vec<_>, _>>()?;
            sep_discrete_curve(&spectrum, &steps)?
        }
    };
    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut table = Table::new(&["t", "sep"]);
            for (t, s) in times.iter().zip(&seps) {
                table.push(vec![num(*t), num(*s)]);
            }
            table.to_csv()
        }
        Format::Json => json_text(json!({ "t": times, "sep": seps })),
    };
    emit(&text, out.out.as_deref())
}

fn whole_step(t: f64) -> Result<u64, CliError> {
    if t.is_finite() && t >= 0.0 && t.fract() == 0.0 {
        Ok(t as u64)
    } else {
        Err(CliError::usage(format!(
            "discrete times must be nonnegative whole numbers, got {t}"
        )))
    }
}

fn cmd_mix_time(input: &InputArgs, eps: f64, out: &OutputArgs) -> Result<(), CliError> {
    let spectrum = resolve(input)?.spectrum()?;
    let tau = mixing_time(&spectrum, eps)?;
    let stats = cutoff_stats(&spectrum);
    let (lo, hi) = mixing_bracket(&stats, eps)?;
    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut table = Table::new(&["eps", "tau"]);
            table.push(vec![num(eps), num(tau)]);
            table.to_csv()
        }
        Format::Json => json_text(json!({
            "eps": eps,
            "tau": tau,
            "mean_hit": stats.mean_hit,
            "window": stats.window,
            "bracket": [lo, hi],
        })),
    };
    emit(&text, out.out.as_deref())
}

fn cmd_stats(input: &InputArgs, out: &OutputArgs) -> Result<(), CliError> {
    let source = resolve(input)?;
    let spectrum = source.spectrum()?;
    let stats = cutoff_stats(&spectrum);
    let thetas = (2..=MAX_THETA_ORDER)
        .map(|k| theta(&spectrum, k))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut value = serde_json::to_value(stats).expect("stats serialize");
            value["m"] = json!(spectrum.len());
            value["thetas"] = json!(thetas);
            json_text(value)
        }
        Format::Csv => {
            let mut table = Table::new(&["name", "value"]);
            table.push(vec!["m".into(), spectrum.len().to_string()]);
            table.push(vec!["gap".into(), num(stats.gap)]);
            table.push(vec!["mean_hit".into(), num(stats.mean_hit)]);
            table.push(vec!["window".into(), num(stats.window)]);
            table.push(vec!["N".into(), num(stats.product)]);
            table.push(vec!["theta2".into(), num(stats.theta2)]);
            for (k, v) in (2..).zip(&thetas) {
                table.push(vec![format!("theta{k}"), num(*v)]);
            }
            table.to_csv()
        }
    };
    emit(&text, out.out.as_deref())
}

fn cmd_compare(
    input: &InputArgs,
    grid: &TimeGrid,
    method: MethodArg,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let chain = resolve(input)?.chain("compare-distances")?;
    let spectrum = chain.spectrum()?.clone();
    let times = time_grid(grid, &spectrum);
    let mode = TimeMode::from(grid.mode);
    let reports = match method {
        MethodArg::Direct => compare_distances(&chain, &times, mode)?,
        MethodArg::Spectral => compare_distances_spectral(&chain, &times, mode)?,
    };
    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut table = Table::new(&["t", "sep", "tv", "l2"]);
            for r in &reports {
                table.push(vec![num(r.time), num(r.sep), num(r.tv), num(r.l2)]);
            }
            table.to_csv()
        }
        Format::Json => json_text(serde_json::to_value(&reports).expect("reports serialize")),
    };
    emit(&text, out.out.as_deref())
}

fn scan_points(
    specs: Option<PathBuf>,
    family: Option<FamilyKind>,
    sizes: &[usize],
    n_ratio: Option<usize>,
    params: &FamilyParams,
) -> Result<Vec<FamilySpec>, CliError> {
    if let Some(path) = specs {
        return parse_family_list(&read_text(&path)?);
    }
    let kind = family.ok_or_else(|| CliError::usage("scan needs --specs or --family".into()))?;
    if sizes.is_empty() {
        return Err(CliError::usage("scan --family needs --sizes".into()));
    }
    sizes
        .iter()
        .map(|&size| {
            let mut p = params.clone();
            if let (FamilyKind::BernoulliLaplace, Some(k)) = (kind, n_ratio) {
                p.n = Some(k * size);
            }
            family_spec(kind, &p, Some(size))
        })
        .collect()
}

fn cmd_scan(
    points: &[FamilySpec],
    thresholds: &ScanThresholds,
    jobs: Option<usize>,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let verdict = match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| CliError::usage(format!("cannot start {k} workers: {e}")))?
            .install(|| scan_family(points, thresholds))?,
        None => scan_family(points, thresholds)?,
    };
    let text = match out.format.unwrap_or(Format::Json) {
        Format::Json => json_text(serde_json::to_value(&verdict).expect("verdict serializes")),
        Format::Csv => {
            let mut table = Table::new(&["param", "m", "gap", "mean_hit", "window", "N", "theta2"]);
            for p in &verdict.points {
                let s = &p.stats;
                table.push(vec![
                    num(p.param),
                    p.m.to_string(),
                    num(s.gap),
                    num(s.mean_hit),
                    num(s.window),
                    num(s.product),
                    num(s.theta2),
                ]);
            }
            let mut csv = table.to_csv();
            let verdict_json = serde_json::to_value(verdict.verdict).expect("verdict serializes");
            let shape_json = serde_json::to_value(verdict.shape).expect("shape serializes");
            csv.push_str(&format!(
                "# verdict={} shape={}\n",
                verdict_json.as_str().unwrap_or_default(),
                shape_json.as_str().unwrap_or_default()
            ));
            csv
        }
    };
    emit(&text, out.out.as_deref())
}

fn cmd_profile(
    input: &InputArgs,
    grid: &[f64],
    centering: Centering,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let spectrum = resolve(input)?.spectrum()?;
    let profile = shape_profile(&spectrum, grid)?;
    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let seps = match centering {
                Centering::Gaussian => &profile.sep_values,
                Centering::GumbelMean => &profile.gumbel_sep_values,
                Centering::GumbelLog => &profile.log_centered_sep_values,
            };
            let mut table = Table::new(&["c", "sep", "gaussian_ref", "gumbel_ref"]);
            for i in 0..grid.len() {
                table.push(vec![
                    num(grid[i]),
                    num(seps[i]),
                    num(profile.reference_gaussian[i]),
                    num(profile.reference_gumbel[i]),
                ]);
            }
            table.to_csv()
        }
        Format::Json => json_text(serde_json::to_value(&profile).expect("profile serializes")),
    };
    emit(&text, out.out.as_deref())
}
