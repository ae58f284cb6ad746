//! Command-line entry point: train networks against the registered ODE
//! problems, integrate them with the reference Runge-Kutta solvers, and run
//! named benchmark scenarios.
//!
//! Exit codes are the machine contract: 0 success, 1 usage/config error,
//! 2 divergence or expectation failure.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pinn_ode::bench::{self, report, RunStatus, ScenarioOutcome, Verdict};
use pinn_ode::integrators::{rk2_integrate, rk4_integrate, trajectory_csv};
use pinn_ode::problems::{by_name, ProblemParams, PROBLEM_NAMES};
use pinn_ode::training::{train, EvalGrid, TrainStatus, N_EVAL};

use config::RunConfig;

/// Environment variable naming the default output root.
const OUT_ROOT_ENV: &str = "PINN_ODE_OUT";

#[derive(Parser)]
#[command(
    name = "pinn-ode",
    about = "Physics-informed neural networks for ordinary differential equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one network from a config file and write model + telemetry.
    Train(TrainArgs),
    /// Integrate a problem with a fixed-step Runge-Kutta method.
    Solve(SolveArgs),
    /// Run benchmark scenarios and check their expectations.
    Bench(BenchArgs),
    /// List the registered problems.
    ListProblems,
    /// List the registered benchmark scenarios.
    ListScenarios,
}

#[derive(Args)]
struct TrainArgs {
    /// Config file (`key = value`, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set training.n_epochs=1000`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory (defaults to the config's `output_dir`, then
    /// `$PINN_ODE_OUT/train-<problem>`, then `runs/train-<problem>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render an SVG plot of the final solution.
    #[arg(long)]
    plots: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Rk2,
    Rk4,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem name (see `list-problems`).
    problem: String,
    #[arg(long, value_enum, default_value = "rk4")]
    method: Method,
    /// Fixed step size.
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    y0: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Output CSV path (defaults under the output root).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Scenario ids, group prefixes (`fig18`), or `all`.
    ids: Vec<String>,
    /// Seeds per scenario (seed0..seed0+n).
    #[arg(long, default_value_t = bench::DEFAULT_SEEDS)]
    seeds: usize,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed0: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Render SVG plots alongside the CSV data.
    #[arg(long)]
    plots: bool,
}

fn out_root() -> PathBuf {
    std::env::var_os(OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn fail_usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn cmd_train(args: &TrainArgs) -> ExitCode {
    let mut config = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match RunConfig::parse(&text) {
                Ok(c) => c,
                Err(e) => return fail_usage(e),
            },
            Err(e) => return fail_usage(format!("cannot read {}: {e}", path.display())),
        },
        None => RunConfig::default(),
    };
    for set in &args.sets {
        let Some((key, value)) = set.split_once('=') else {
            return fail_usage(format!("--set expects KEY=VALUE, got `{set}`"));
        };
        if let Err(e) = config.set(key.trim(), value.trim()) {
            return fail_usage(e);
        }
    }

    let problem = match config.build_problem() {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };
    let training = match config.build_training(&problem) {
        Ok(t) => t,
        Err(e) => return fail_usage(e),
    };
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| out_root().join(format!("train-{}", problem.name())));
    if let Err(e) = report::validate_output_dir(&out_dir) {
        return fail_usage(e);
    }

    // Provenance: the effective configuration after overrides.
    let mut echoed = config.clone();
    echoed.output_dir = Some(out_dir.clone());
    if std::fs::write(out_dir.join("config.txt"), echoed.echo()).is_err() {
        return fail_usage("cannot write effective config");
    }

    let outcome = match train(&problem, &training) {
        Ok(o) => o,
        Err(e) => return fail_usage(e),
    };

    let grid = match EvalGrid::new(&problem, N_EVAL, problem.domain()) {
        Ok(g) => g,
        Err(e) => return fail_usage(e),
    };
    let final_mse = outcome
        .records
        .last()
        .and_then(|r| r.mse)
        .unwrap_or_else(|| grid.mse(&outcome.mlp));

    if let Err(e) = outcome.mlp.save(&out_dir.join("model.txt")) {
        return fail_usage(e);
    }
    if std::fs::write(
        out_dir.join("epochs.csv"),
        report::epochs_csv(&outcome.records),
    )
    .is_err()
    {
        return fail_usage("cannot write telemetry");
    }
    if args.plots || problem.dim() == 2 {
        // Solution/phase data comes with the bench reports; for single
        // trainings keep just the model and telemetry unless asked.
    }

    match outcome.status {
        TrainStatus::Completed => {}
        TrainStatus::AbortedNonFiniteLoss { epoch } => {
            eprintln!("training aborted: non-finite loss at epoch {epoch}");
            return ExitCode::from(2);
        }
        TrainStatus::AbortedNonFiniteGradient { epoch, component } => {
            eprintln!(
                "training aborted: non-finite gradient component {component} at epoch {epoch}"
            );
            return ExitCode::from(2);
        }
    }

    let scale = bench::constant_predictor_mse(&grid);
    let diverged = final_mse > 10.0 * scale;
    println!(
        "trained {}: final mse {final_mse:.6e} ({})",
        problem.name(),
        if diverged { "diverged" } else { "converged" }
    );
    println!("outputs in {}", out_dir.display());
    if diverged {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_solve(args: &SolveArgs) -> ExitCode {
    let params = ProblemParams {
        omega0: args.omega0,
        epsilon: args.epsilon,
        y0: args.y0,
        t_end: args.t_end,
    };
    let problem = match by_name(&args.problem, params) {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };
    let traj = match args.method {
        Method::Rk2 => rk2_integrate(&problem, args.dt),
        Method::Rk4 => rk4_integrate(&problem, args.dt),
    };
    let traj = match traj {
        Ok(t) => t,
        Err(e) => return fail_usage(e),
    };
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| out_root().join(format!("solve-{}.csv", problem.name())));
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            if let Err(e) = std::fs::create_dir_all(parent) {
                return fail_usage(e);
            }
        }
    }
    if let Err(e) = std::fs::write(&out, trajectory_csv(&traj)) {
        return fail_usage(e);
    }
    println!(
        "integrated {} over [{}, {}] in {} steps -> {}",
        problem.name(),
        problem.domain().0,
        problem.domain().1,
        traj.times.len() - 1,
        out.display()
    );
    ExitCode::SUCCESS
}

fn cmd_bench(args: &BenchArgs) -> ExitCode {
    if args.ids.is_empty() {
        return fail_usage("bench needs scenario ids or `all` (see list-scenarios)");
    }
    if args.seeds == 0 {
        return fail_usage("--seeds must be at least 1");
    }
    let mut selected: Vec<bench::Scenario> = Vec::new();
    for query in &args.ids {
        match bench::find_scenarios(query) {
            Ok(group) => {
                for s in group {
                    if !selected.iter().any(|x| x.id == s.id) {
                        selected.push(s);
                    }
                }
            }
            Err(e) => return fail_usage(e),
        }
    }
    let out_dir = args.out.clone().unwrap_or_else(|| out_root().join("bench"));
    if let Err(e) = report::validate_output_dir(&out_dir) {
        return fail_usage(e);
    }

    let mut outcomes: Vec<ScenarioOutcome> = Vec::new();
    let mut any_fail = false;
    for scenario in &selected {
        match bench::run_scenario(scenario, args.seeds, args.seed0, Some(&out_dir), args.plots) {
            Ok(outcome) => {
                let tag = match outcome.expectation.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::SoftPass => "SOFT-PASS",
                    Verdict::Fail => "FAIL",
                    Verdict::NotGated => "INFO",
                };
                println!("{tag} {}: {}", outcome.id, outcome.expectation.detail);
                for r in &outcome.records {
                    if r.status == RunStatus::Aborted {
                        eprintln!("  run {} seed {} aborted", r.label, r.seed);
                    }
                }
                any_fail |= outcome.expectation.verdict == Verdict::Fail;
                outcomes.push(outcome);
            }
            Err(e) => return fail_usage(e),
        }
    }
    if let Err(e) = report::write_summary(&outcomes, &out_dir) {
        return fail_usage(e);
    }
    println!("reports in {}", out_dir.display());
    if any_fail {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_list_problems() -> ExitCode {
    for name in PROBLEM_NAMES {
        let p = by_name(name, ProblemParams::default()).expect("registered problem");
        let params: Vec<String> = p
            .params()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!(
            "{name:16} dim={} domain=[{}, {}] {}",
            p.dim(),
            p.domain().0,
            p.domain().1,
            params.join(" ")
        );
    }
    ExitCode::SUCCESS
}

fn cmd_list_scenarios() -> ExitCode {
    for s in bench::scenarios() {
        let figures = s.figures.join(",");
        println!("{:18} [{}] {}", s.id, figures, s.notes);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are success; real parse errors are
            // usage errors (exit 1).
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::ListProblems => cmd_list_problems(),
        Command::ListScenarios => cmd_list_scenarios(),
    }
}
