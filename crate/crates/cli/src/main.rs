use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use nestlab::approximator::gradient_check_suite;
use nestlab::arena::{Scenario, ShapeSpec};
use nestlab::config::ExperimentConfig;
use nestlab::ddqn::TargetRule;
use nestlab::frameworks::FrameworkKind;
use nestlab::harness::{self, ExperimentReport};
use nestlab::oracle::plan_optimal;
use nestlab::plot;
use nestlab::Error;

/// Nested, hierarchical and flat Double-DQN agents on a block-building arena.
#[derive(Debug, Parser)]
#[command(name = "nestlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train one framework on one scenario and write curves + summary CSVs.
    Train(ExperimentArgs),
    /// Train all three frameworks on one scenario; write combined CSVs and a plot.
    Compare(ExperimentArgs),
    /// Print the best achievable episode for a design.
    Oracle(OracleArgs),
    /// Render a curves CSV as an SVG line chart.
    Plot(PlotArgs),
    /// Check backprop against central finite differences.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// TOML config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
    #[arg(long, default_value = "line")]
    scenario: Scenario,
    /// 15x15 mask file ('#' design cell, '.' empty); replaces the scenario design.
    #[arg(long)]
    shape_file: Option<PathBuf>,
    #[arg(long, default_value = "nested")]
    framework: FrameworkKind,
    #[arg(long, default_value_t = 3000)]
    episodes: usize,
    #[arg(long, default_value_t = 30)]
    eval_every: usize,
    /// Greedy episodes averaged per evaluation point.
    #[arg(long, default_value_t = 1)]
    eval_episodes: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Trials run concurrently (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Step cap per episode.
    #[arg(long, default_value_t = 500)]
    max_steps: usize,
    /// Drop blocks on the cell in front of the agent instead of under it.
    #[arg(long, default_value_t = false, num_args = 0..=1, default_missing_value = "true")]
    front_cell_drop: bool,
    #[arg(long, default_value_t = 0.99)]
    gamma: f64,
    /// Learner steps between target-network syncs.
    #[arg(long, default_value_t = 100)]
    tau: u64,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 1_000_000)]
    replay_capacity: usize,
    /// Replay size before the first gradient step (per-step learners).
    #[arg(long, default_value_t = 500)]
    warmup: usize,
    /// Hidden layer widths, comma separated.
    #[arg(long, default_value = "32,32", value_delimiter = ',')]
    hidden: Vec<usize>,
    /// Bootstrap target: eq3 (DQN) or eq4 (Double DQN).
    #[arg(long, default_value = "eq4")]
    dqn_target: TargetRule,
    #[arg(long, default_value_t = 1.0)]
    eps_start: f64,
    #[arg(long, default_value_t = 0.01)]
    eps_main_floor: f64,
    #[arg(long, default_value_t = 0.001)]
    eps_nested_floor: f64,
    /// Main-agent decay horizon in episodes [default: 20% of episodes]
    #[arg(long)]
    eps_main_horizon: Option<usize>,
    /// Nested-agent decay horizon in episodes [default: 80% of episodes]
    #[arg(long)]
    eps_nested_horizon: Option<usize>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value = "line")]
    scenario: Scenario,
    #[arg(long)]
    shape_file: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    max_steps: usize,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Curves CSV written by `train` or `compare`.
    csv: PathBuf,
    /// Output SVG [default: the CSV path with an .svg extension]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    title: Option<String>,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    #[arg(long, default_value_t = 100)]
    nets: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Mask { .. } | Error::File { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

/// Builds the experiment config: file (or defaults), then every flag that was
/// typed on the command line.
fn experiment_config(args: &ExperimentArgs, m: &ArgMatches) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let given = |id: &str| m.value_source(id) == Some(ValueSource::CommandLine);
    macro_rules! apply {
        ($($flag:literal => $target:expr, $value:expr;)*) => {
            $(if given($flag) { $target = $value; })*
        };
    }
    apply! {
        "out" => cfg.experiment.out, Some(args.out.clone());
        "scenario" => cfg.experiment.scenario, args.scenario;
        "shape_file" => cfg.experiment.shape_file, args.shape_file.clone();
        "framework" => cfg.experiment.framework, args.framework;
        "episodes" => cfg.experiment.episodes, args.episodes;
        "eval_every" => cfg.experiment.eval_every, args.eval_every;
        "eval_episodes" => cfg.experiment.eval_episodes, args.eval_episodes;
        "trials" => cfg.experiment.trials, args.trials;
        "seed" => cfg.experiment.seed, args.seed;
        "jobs" => cfg.experiment.jobs, args.jobs;
        "max_steps" => cfg.arena.max_steps, args.max_steps;
        "front_cell_drop" => cfg.arena.front_cell_drop, args.front_cell_drop;
        "gamma" => cfg.ddqn.gamma, args.gamma;
        "tau" => cfg.ddqn.tau, args.tau;
        "lr" => cfg.approximator.learning_rate, args.lr;
        "batch_size" => cfg.ddqn.batch_size, args.batch_size;
        "replay_capacity" => cfg.ddqn.replay_capacity, args.replay_capacity;
        "warmup" => cfg.ddqn.warmup, args.warmup;
        "hidden" => cfg.approximator.hidden, args.hidden.clone();
        "dqn_target" => cfg.ddqn.target, args.dqn_target;
        "eps_start" => cfg.exploration.eps_start, args.eps_start;
        "eps_main_floor" => cfg.exploration.eps_main_floor, args.eps_main_floor;
        "eps_nested_floor" => cfg.exploration.eps_nested_floor, args.eps_nested_floor;
        "eps_main_horizon" => cfg.exploration.eps_main_horizon, args.eps_main_horizon;
        "eps_nested_horizon" => cfg.exploration.eps_nested_horizon, args.eps_nested_horizon;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.experiment
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn print_reports(reports: &[ExperimentReport]) {
    for r in reports {
        let finals: Vec<f64> = r.curves.iter().map(|c| c.final_mean(10)).collect();
        let mean = finals.iter().sum::<f64>() / finals.len().max(1) as f64;
        println!(
            "{} {}: {} trials, final-10 mean score {:.2}",
            r.scenario,
            r.framework,
            r.curves.len(),
            mean
        );
        for f in &r.failures {
            eprintln!(
                "  trial {} failed at episode {}: {}",
                f.trial, f.episode, f.message
            );
        }
    }
}

fn train(args: &ExperimentArgs, m: &ArgMatches) -> Result<(), CliError> {
    let cfg = experiment_config(args, m)?;
    let report = harness::run_experiment(&cfg)?;
    let dir = out_dir(&cfg);
    let reports = [report];
    harness::write_reports(&dir, &reports)?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml_string())
        .map_err(|e| CliError::Failure(e.to_string()))?;
    print_reports(&reports);
    println!("wrote {}", dir.display());
    Ok(())
}

fn compare(args: &ExperimentArgs, m: &ArgMatches) -> Result<(), CliError> {
    let base = experiment_config(args, m)?;
    let mut reports = Vec::new();
    for kind in FrameworkKind::ALL {
        let mut cfg = base.clone();
        cfg.experiment.framework = kind;
        reports.push(harness::run_experiment(&cfg)?);
    }
    let dir = out_dir(&base);
    harness::write_reports(&dir, &reports)?;
    let title = format!("{}: score during training", reports[0].scenario);
    let svg = plot::curves_to_svg(&harness::curves_csv(&reports), &title)?;
    std::fs::write(dir.join("compare.svg"), svg).map_err(|e| CliError::Failure(e.to_string()))?;
    std::fs::write(dir.join("config.toml"), base.to_toml_string())
        .map_err(|e| CliError::Failure(e.to_string()))?;
    print_reports(&reports);
    println!("wrote {}", dir.display());
    Ok(())
}

fn oracle(args: &OracleArgs) -> Result<(), CliError> {
    let shape = match &args.shape_file {
        Some(path) => ShapeSpec::from_file(path)?,
        None => args.scenario.shape(),
    };
    if args.max_steps == 0 {
        return Err(CliError::Usage("--max-steps must be at least 1".into()));
    }
    let r = plan_optimal(&shape, args.max_steps);
    println!("scenario {}", shape.name());
    println!("cells {}", shape.cell_count());
    println!("max_main_reward {}", r.max_main_reward);
    println!("max_nested_return {}", r.max_nested_return);
    println!("min_steps {}", r.min_steps);
    println!("optimal_material {}", r.optimal_material);
    println!("proven {}", r.proven);
    Ok(())
}

fn plot_cmd(args: &PlotArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.csv)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.csv.display())))?;
    let title = args.title.clone().unwrap_or_else(|| {
        args.csv
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let svg = plot::curves_to_svg(&text, &title)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| args.csv.with_extension("svg"));
    write_file(&out, &svg)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn gradcheck(args: &GradcheckArgs) -> Result<(), CliError> {
    let report = gradient_check_suite(args.nets, args.seed);
    println!(
        "checked {} networks, max relative error {:.3e} (net {})",
        report.nets, report.max_relative_error, report.worst_net
    );
    if report.max_relative_error < args.tolerance {
        println!("ok");
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "gradient check above tolerance {:e}",
            args.tolerance
        )))
    }
}

fn run(cli: Cli, matches: &ArgMatches) -> Result<(), CliError> {
    let sub = matches
        .subcommand()
        .map(|(_, m)| m)
        .expect("subcommand required");
    match &cli.command {
        Command::Train(args) => train(args, sub),
        Command::Compare(args) => compare(args, sub),
        Command::Oracle(args) => oracle(args),
        Command::Plot(args) => plot_cmd(args),
        Command::Gradcheck(args) => gradcheck(args),
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
