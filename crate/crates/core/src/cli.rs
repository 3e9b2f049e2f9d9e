//! `mavg-cri` command line: Bayes factors, credible intervals, figure series
//! and coverage simulations.
//!
//! Exit codes: 0 on success (an undefined interval is a result, not an
//! error), 2 for invalid configuration, 3 for numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::figures::{self, FigureId, FigureOptions};
use crate::interval::{
    self, frequentist_ci_lower, per_tail_two_sided, stochastic_bound, stochastic_two_sided, Degenerate,
    OneSidedCredible, TailSpec, TwoSidedCredible,
};
use crate::model::{DataSummary, ModelPair};
use crate::posterior::{bayes_factor_01, model_averaged_posterior, posterior_model_probs, QuantileResult};
use crate::report::{Cell, Format, Record, Report};
use crate::simulation;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mavg-cri",
    version,
    about = "Model-averaged posteriors and credible intervals under point-null priors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bayes factor and posterior model probabilities
    Bf(BfArgs),
    /// Credible interval, or the incredibility interval and stochastic bound when none exists
    Cri(CriArgs),
    /// Data series for one figure
    Figure(FigureArgs),
    /// Simulated posterior content of the stochastic bound
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Variance of the M0 normal prior (mixture of two normals)
    #[arg(long, conflicts_with = "point_null", required_unless_present = "point_null")]
    g0: Option<f64>,
    /// Use a point mass at --theta0 for M0
    #[arg(long)]
    point_null: bool,
    #[arg(long, default_value_t = 0.0)]
    theta0: f64,
    #[arg(long, default_value_t = 1.0)]
    g1: f64,
    #[arg(long, default_value_t = 0.5)]
    prior_prob_m0: f64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct DataSpec {
    /// z = √n·ȳ
    #[arg(long, allow_negative_numbers = true)]
    z: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    ybar: Option<f64>,
    /// Observations, one per line; lines starting with '#' are ignored
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Sample size; may be real-valued, e.g. 1e10
    #[arg(long)]
    n: Option<f64>,
    #[command(flatten)]
    spec: DataSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Machine-readable format; printed to stdout unless --out is given
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    /// Write the report here (format from --format, else from the extension)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BfArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CriArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Upper one-sided interval [θ*, ∞) (default)
    #[arg(long, conflicts_with = "two_sided")]
    one_sided: bool,
    /// Equal-tailed two-sided interval
    #[arg(long)]
    two_sided: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// Figure id or alias (fig1 to fig8)
    id: String,
    /// Point-null variant of prior_posterior_panels
    #[arg(long)]
    point_null: bool,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    theta_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    p_values: Option<Vec<f64>>,
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Replications; accepts forms like 1e6
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    reps: u64,
    /// Joint model/θ/data simulation binned on z instead of posterior draws
    #[arg(long)]
    joint_dgp: bool,
    #[arg(long, default_value_t = 0.02)]
    bin_half_width: f64,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_count(s: &str) -> Result<u64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("`{s}` is not a non-negative integer"))
    }
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Resolved {
    pair: ModelPair<f64>,
    data: DataSummary<f64>,
    config: Record,
}

fn resolve(command: &str, model: &ModelArgs, data: &DataArgs) -> CliResult<Resolved> {
    if model.theta0 != 0.0 && !model.point_null {
        return Err(Failure::Config("--theta0 only applies with --point-null".into()));
    }
    let pair = match model.g0 {
        Some(g0) => ModelPair::two_normals(g0, model.g1, model.prior_prob_m0)?,
        None => ModelPair::point_null(model.theta0, model.g1, model.prior_prob_m0)?,
    };
    let summary = match (&data.spec.data, data.spec.z, data.spec.ybar) {
        (Some(path), _, _) => {
            let values = read_observations(path)?;
            if let Some(n) = data.n {
                if n != values.len() as f64 {
                    return Err(Failure::Config(format!(
                        "--n {n} does not match the {} observations in {}",
                        values.len(),
                        path.display()
                    )));
                }
            }
            DataSummary::from_observations(&values)?
        }
        (None, z, ybar) => {
            let n = data.n.ok_or_else(|| Failure::Config("--n is required with --z or --ybar".into()))?;
            match (z, ybar) {
                (Some(z), _) => DataSummary::from_z(n, z)?,
                (None, Some(y)) => DataSummary::from_ybar(n, y)?,
                (None, None) => unreachable!("clap enforces one data form"),
            }
        }
    };
    let mut config = Record::new();
    config
        .push("command", command)
        .push("model", if model.point_null { "point-null" } else { "mixture" })
        .push("g0", model.g0)
        .push("theta0", model.point_null.then_some(model.theta0))
        .push("g1", model.g1)
        .push("prior_prob_m0", model.prior_prob_m0)
        .push("n", summary.n())
        .push("z", summary.z())
        .push("ybar", summary.ybar())
        .push("data_file", data.spec.data.as_ref().map(|p| p.display().to_string()));
    Ok(Resolved { pair, data: summary, config })
}

fn read_observations(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let y: f64 = line
            .parse()
            .map_err(|_| Failure::Config(format!("{}:{}: `{line}` is not a number", path.display(), i + 1)))?;
        values.push(y);
    }
    Ok(values)
}

fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Failure::Config(format!("--alpha must lie in (0, 1), got {alpha}")))
    }
}

fn resolve_format(output: &OutputArgs) -> Option<Format> {
    let from_flag = output.format.map(|f| match f {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    });
    from_flag.or_else(|| {
        output.out.as_ref().map(|p| match p.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        })
    })
}

fn format_name(format: Option<Format>) -> Cell {
    match format {
        Some(Format::Csv) => "csv".into(),
        Some(Format::Json) => "json".into(),
        None => "text".into(),
    }
}

fn emit(report: &Report, output: &OutputArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let io = |e: std::io::Error| Failure::Config(format!("cannot write output: {e}"));
    let format = resolve_format(output);
    match (&output.out, format) {
        (Some(path), Some(format)) => {
            let file = fs::File::create(path)
                .map_err(|e| Failure::Config(format!("cannot create {}: {e}", path.display())))?;
            report.write(format, std::io::BufWriter::new(file)).map_err(io)?;
            write!(stdout, "{}", report.summary()).map_err(io)
        }
        (None, Some(format)) => report.write(format, stdout).map_err(io),
        _ => write!(stdout, "{}", report.summary()).map_err(io),
    }
}

fn finish_config(config: &mut Record, output: &OutputArgs) {
    config.push("format", format_name(resolve_format(output)));
    config.push("out", output.out.as_ref().map(|p| p.display().to_string()));
}

fn cmd_bf(args: &BfArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let Resolved { pair, data, mut config } = resolve("bf", &args.model, &args.data)?;
    finish_config(&mut config, &args.output);
    let bf = bayes_factor_01(&pair, &data);
    let probs = posterior_model_probs(&pair, &data);
    let mut rec = Record::new();
    rec.push("log_bf01", bf.log_bf01)
        .push("bf01", bf.bf01())
        .push("bf01_representable", bf.is_representable())
        .push("pm0", probs.pm0)
        .push("pm1", probs.pm1)
        .push("p_value_one_sided", data.p_value_one_sided(pair.null_location()));
    emit(&Report::single("bf", config, rec), &args.output, stdout)
}

fn quantile_status(q: &QuantileResult<f64>) -> Cell {
    match q {
        QuantileResult::Exact(_) => "exact".into(),
        QuantileResult::AtAtom { open: false, .. } => "at-atom-closed".into(),
        QuantileResult::AtAtom { open: true, .. } => "at-atom-open".into(),
        QuantileResult::InsideJump(_) => "inside-jump".into(),
    }
}

fn cmd_cri(args: &CriArgs, stdout: &mut dyn Write) -> CliResult<()> {
    check_alpha(args.alpha)?;
    let Resolved { pair, data, mut config } = resolve("cri", &args.model, &args.data)?;
    let two_sided = args.two_sided;
    config.push("alpha", args.alpha).push("sided", if two_sided { "two" } else { "one" });
    finish_config(&mut config, &args.output);

    let post = model_averaged_posterior(&pair, &data);
    let jump = post.incredibility_interval();
    let mut rec = Record::new();
    rec.push("pm0", post.weights().pm0)
        .push("atom_mass", post.atom_mass())
        .push("jump_lower", jump.lower)
        .push("jump_upper", jump.upper);
    if two_sided {
        two_sided_record(&post, args.alpha, &mut rec)?;
    } else {
        rec.push("frequentist_lower", frequentist_ci_lower(&data, args.alpha)?);
        match interval::credible_one_sided(&post, args.alpha)? {
            OneSidedCredible::Interval(i) => {
                rec.push("status", "defined")
                    .push("lower", i.lower)
                    .push("lower_open", i.lower_open)
                    .push("upper", f64::INFINITY)
                    .push("level", i.level)
                    .push("closed_level", Cell::Missing)
                    .push("open_level", Cell::Missing)
                    .push("gamma", Cell::Missing);
            }
            OneSidedCredible::Undefined { jump, closed_level, open_level } => {
                let b = stochastic_bound(&post, args.alpha)?;
                rec.push("status", "undefined")
                    .push("lower", Cell::Missing)
                    .push("lower_open", Cell::Missing)
                    .push("upper", f64::INFINITY)
                    .push("level", 1.0 - args.alpha)
                    .push("closed_level", closed_level)
                    .push("open_level", open_level)
                    .push("gamma", b.prob_a)
                    .push(
                        "stochastic_bound",
                        format!("[{0}, inf) with probability gamma, otherwise ({0}, inf)", jump.atom_location),
                    );
            }
        }
    }
    emit(&Report::single("cri", config, rec), &args.output, stdout)
}

fn two_sided_record(
    post: &crate::posterior::ModelAveragedPosterior<f64>,
    alpha: f64,
    rec: &mut Record,
) -> CliResult<()> {
    let tail_gamma = |spec: &TailSpec<f64>| match spec {
        TailSpec::Stochastic(s) => Some(s.prob_a),
        TailSpec::Fixed(_) => None,
    };
    match interval::credible_two_sided(post, alpha)? {
        TwoSidedCredible::Interval(i) => {
            let degenerate = match i.degenerate {
                Degenerate::No => "no",
                Degenerate::SinglePoint(_) => "single-point",
                Degenerate::Empty => "empty",
            };
            rec.push("status", "defined")
                .push("lower", i.lower)
                .push("lower_open", i.lower_open)
                .push("upper", i.upper)
                .push("upper_closed", i.upper_closed)
                .push("degenerate", degenerate)
                .push("level", i.level);
        }
        TwoSidedCredible::Undefined { lower_tail, upper_tail } => {
            let spec = per_tail_two_sided(post, alpha)?;
            let (smallest, largest) = spec.content_range(post);
            rec.push("status", "undefined")
                .push("lower_tail", quantile_status(&lower_tail))
                .push("upper_tail", quantile_status(&upper_tail))
                .push("level", 1.0 - alpha)
                .push("largest_level", largest)
                .push("smallest_level", smallest)
                .push("gamma_lower_tail", tail_gamma(&spec.lower))
                .push("gamma_upper_tail", tail_gamma(&spec.upper));
            match stochastic_two_sided(post, alpha) {
                Ok(s) => {
                    rec.push("psi", s.prob_point).push("psi_expected_content", s.expected_content());
                }
                Err(e) => {
                    rec.push("psi", Cell::Missing).push("psi_note", e.to_string());
                }
            }
        }
    }
    Ok(())
}

fn cmd_figure(args: &FigureArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let id = FigureId::parse(&args.id, args.point_null)?;
    if let Some(alpha) = args.alpha {
        check_alpha(alpha)?;
    }
    let opts = FigureOptions {
        n_grid: args.n_grid.clone(),
        theta_grid: args.theta_grid.clone(),
        p_values: args.p_values.clone(),
        alpha: args.alpha,
    };
    let list = |v: &Option<Vec<f64>>| -> Cell {
        v.as_ref().map(|v| v.iter().map(|x| crate::report::format_full(*x)).collect::<Vec<_>>().join(";")).into()
    };
    let mut config = Record::new();
    config
        .push("command", "figure")
        .push("figure", id.name())
        .push("point_null", matches!(id, FigureId::Panels { point_null: true }))
        .push("n_grid", list(&opts.n_grid))
        .push("theta_grid", list(&opts.theta_grid))
        .push("p_values", list(&opts.p_values))
        .push("alpha", opts.alpha);
    finish_config(&mut config, &args.output);
    let report = figures::build(id, &opts, config)?;
    emit(&report, &args.output, stdout)
}

fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    check_alpha(args.alpha)?;
    let Resolved { pair, data, mut config } = resolve("simulate", &args.model, &args.data)?;
    config
        .push("alpha", args.alpha)
        .push("sided", "one")
        .push("seed", args.seed)
        .push("reps", args.reps)
        .push("mode", if args.joint_dgp { "joint-dgp" } else { "posterior-draws" })
        .push("bin_half_width", args.joint_dgp.then_some(args.bin_half_width));
    finish_config(&mut config, &args.output);

    let mut rec = Record::new();
    let report = if args.joint_dgp {
        let j = simulation::simulate_joint_dgp(
            &pair,
            data.n(),
            data.z(),
            args.bin_half_width,
            args.alpha,
            args.reps,
            args.seed,
        )?;
        rec.push("proposals", j.proposals);
        j.coverage
    } else {
        let post = model_averaged_posterior(&pair, &data);
        let b = stochastic_bound(&post, args.alpha)?;
        rec.push("gamma", b.prob_a).push("expected_content", 1.0 - b.expected_lower_tail());
        simulation::simulate_stochastic_content(&pair, &data, args.alpha, args.reps, args.seed)?
    };
    rec.push("replications", report.replications)
        .push("hits", report.hits)
        .push("target", report.target)
        .push("empirical", report.empirical)
        .push("std_error", report.std_error)
        .push("threshold", 3.0 * report.std_error)
        .push("pass", report.passes())
        .push("seed", report.seed);
    emit(&Report::single("simulate", config, rec), &args.output, stdout)
}

/// Runs the CLI on `args` (including the program name), writing results to
/// `stdout` and diagnostics to stderr. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Bf(a) => cmd_bf(a, stdout),
        Command::Cri(a) => cmd_cri(a, stdout),
        Command::Figure(a) => cmd_figure(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            EXIT_NUMERICAL
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run(std::env::args_os(), &mut lock)
}
