//! Experiment runner: named scenario configurations, multi-seed execution,
//! MSE evaluation and report emission.
//!
//! Each scenario pins one experiment configuration (problem, network,
//! training hyperparameters) together with a declarative expectation.
//! Multi-panel source figures get one scenario per panel. Training
//! outcomes are stochastic across seeds, so expectations are evaluated on
//! order statistics (best or median of the per-seed final MSEs).

pub mod report;

use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrators::{rk4_integrate, rk2_integrate, Trajectory};
use crate::network::{Mlp, MlpConfig};
use crate::problems::{by_name, OdeProblem, ProblemParams};
use crate::training::{train, EvalGrid, LossWeights, TrainingConfig, N_EVAL};

/// Default number of seeds per scenario.
pub const DEFAULT_SEEDS: usize = 5;

/// Which order statistic of the per-seed final MSEs an expectation tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stat {
    Best,
    Median,
}

/// Declarative scenario gate.
#[derive(Debug, Clone, Copy)]
pub enum Expectation {
    /// Qualitative scenario, no gate.
    None,
    /// Whole-domain final MSE below `threshold`.
    MseBelow { threshold: f64, stat: Stat },
    /// Whole-domain final MSE above `threshold`.
    MseAbove { threshold: f64, stat: Stat },
    /// MSE restricted to `t >= from` above `threshold`.
    SubintervalMseAbove { from: f64, threshold: f64, stat: Stat },
    /// Ablation-to-main ratio of median final MSEs at least `factor`;
    /// `soft_factor` marks a degraded-but-acceptable band.
    MedianRatioAtLeast { factor: f64, soft_factor: Option<f64> },
}

/// A problem reference resolvable through the registry.
#[derive(Debug, Clone, Copy)]
pub struct ProblemSpec {
    pub name: &'static str,
    pub params: ProblemParams,
}

impl ProblemSpec {
    fn of(name: &'static str) -> Self {
        ProblemSpec {
            name,
            params: ProblemParams::default(),
        }
    }

    pub fn build(&self) -> Result<OdeProblem> {
        by_name(self.name, self.params)
    }
}

#[derive(Debug, Clone)]
pub enum ScenarioKind {
    /// One training configuration over `n_seeds` seeds.
    Train {
        problem: ProblemSpec,
        config: TrainingConfig,
    },
    /// A main/ablation pair trained with identical seed sets.
    Compare {
        problem: ProblemSpec,
        main: TrainingConfig,
        ablation: TrainingConfig,
        labels: (&'static str, &'static str),
    },
    /// Reference integration only; emits trajectory and phase data.
    Solve {
        problem: ProblemSpec,
        order: u8,
        dt: f64,
    },
}

/// One registered experiment.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: &'static str,
    /// Source figure panels this scenario reproduces.
    pub figures: &'static [&'static str],
    /// Flagged configuration choices that the source text leaves open.
    pub notes: &'static str,
    pub kind: ScenarioKind,
    pub expectation: Expectation,
}

/// Run outcome classification in the benchmark tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    Diverged,
    Aborted,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::Diverged => "diverged",
            RunStatus::Aborted => "aborted",
        }
    }
}

/// The unit of benchmark persistence: one training run.
pub struct RunRecord {
    /// Scenario id, suffixed `:variant` for comparison scenarios.
    pub label: String,
    pub seed: u64,
    /// Present unless the run aborted.
    pub final_mse: Option<f64>,
    pub status: RunStatus,
    pub wall_time: Duration,
    pub records: Vec<crate::training::EpochRecord>,
    pub mlp: Option<Mlp>,
}

/// Expectation verdict for a scenario batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Met the soft bound but not the full one.
    SoftPass,
    Fail,
    /// No gate declared (qualitative or solve-only scenarios).
    NotGated,
}

#[derive(Debug, Clone)]
pub struct ExpectationOutcome {
    pub verdict: Verdict,
    pub detail: String,
}

/// All records produced by one scenario, plus its verdict.
pub struct ScenarioOutcome {
    pub id: String,
    pub records: Vec<RunRecord>,
    pub expectation: ExpectationOutcome,
}

/// MSE between two output functions sampled on a grid:
/// `(1/N) Σᵢ ‖a(tᵢ) - b(tᵢ)‖²`, pooled over output components.
pub fn mse_between(
    a: impl Fn(f64) -> Vec<f64>,
    b: impl Fn(f64) -> Vec<f64>,
    ts: &[f64],
) -> f64 {
    let mut acc = 0.0;
    for &t in ts {
        for (x, y) in a(t).iter().zip(b(t)) {
            let d = x - y;
            acc += d * d;
        }
    }
    acc / ts.len() as f64
}

/// Standard MSE protocol: `n_eval` uniform points over the whole domain
/// against the problem's oracle.
pub fn evaluate_mse(mlp: &Mlp, problem: &OdeProblem, n_eval: usize) -> Result<f64> {
    let grid = EvalGrid::new(problem, n_eval, problem.domain())?;
    Ok(grid.mse(mlp))
}

/// MSE of predicting the oracle's mean value everywhere: the scale against
/// which divergence is judged.
pub fn constant_predictor_mse(grid: &EvalGrid) -> f64 {
    let dim = grid.oracle.first().map_or(1, Vec::len);
    let n = grid.oracle.len() as f64;
    let mut means = vec![0.0; dim];
    for row in &grid.oracle {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut acc = 0.0;
    for row in &grid.oracle {
        for (m, v) in means.iter().zip(row) {
            let d = v - m;
            acc += d * d;
        }
    }
    acc / n
}

fn run_one(
    problem: &OdeProblem,
    base: &TrainingConfig,
    label: &str,
    seed: u64,
    grid: &EvalGrid,
    divergence_scale: f64,
) -> RunRecord {
    let mut config = base.clone();
    config.seed = seed;
    let start = Instant::now();
    match train(problem, &config) {
        Ok(outcome) => {
            let wall_time = start.elapsed();
            let aborted = outcome.status.is_aborted();
            let final_mse = if aborted {
                None
            } else {
                Some(
                    outcome
                        .records
                        .last()
                        .and_then(|r| r.mse)
                        .unwrap_or_else(|| grid.mse(&outcome.mlp)),
                )
            };
            let status = match final_mse {
                None => RunStatus::Aborted,
                Some(mse) if mse > 10.0 * divergence_scale => RunStatus::Diverged,
                Some(_) => RunStatus::Converged,
            };
            RunRecord {
                label: label.to_string(),
                seed,
                final_mse,
                status,
                wall_time,
                records: outcome.records,
                mlp: Some(outcome.mlp),
            }
        }
        Err(_) => RunRecord {
            label: label.to_string(),
            seed,
            final_mse: None,
            status: RunStatus::Aborted,
            wall_time: start.elapsed(),
            records: Vec::new(),
            mlp: None,
        },
    }
}

fn run_batch(
    problem: &OdeProblem,
    config: &TrainingConfig,
    label: &str,
    seeds: &[u64],
    grid: &EvalGrid,
    divergence_scale: f64,
) -> Vec<RunRecord> {
    seeds
        .par_iter()
        .map(|&seed| run_one(problem, config, label, seed, grid, divergence_scale))
        .collect()
}

/// Final MSEs of non-aborted runs with the given label prefix.
fn final_mses(records: &[RunRecord], label: &str) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.label == label)
        .filter_map(|r| r.final_mse)
        .collect()
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

pub fn best(values: &[f64]) -> Option<f64> {
    values.iter().copied().reduce(f64::min)
}

fn stat_of(values: &[f64], stat: Stat) -> Option<f64> {
    match stat {
        Stat::Best => best(values),
        Stat::Median => median(values),
    }
}

fn stat_name(stat: Stat) -> &'static str {
    match stat {
        Stat::Best => "best",
        Stat::Median => "median",
    }
}

/// Evaluate a scenario gate over its finished records.
fn check_expectation(
    scenario: &Scenario,
    problem: &OdeProblem,
    grid: &EvalGrid,
    records: &[RunRecord],
) -> ExpectationOutcome {
    let fail = |detail: String| ExpectationOutcome {
        verdict: Verdict::Fail,
        detail,
    };
    match &scenario.expectation {
        Expectation::None => ExpectationOutcome {
            verdict: Verdict::NotGated,
            detail: "no gate".into(),
        },
        Expectation::MseBelow { threshold, stat } => {
            let mses = final_mses(records, scenario.id);
            match stat_of(&mses, *stat) {
                Some(v) if v < *threshold => ExpectationOutcome {
                    verdict: Verdict::Pass,
                    detail: format!("{} mse {v:.3e} < {threshold:.1e}", stat_name(*stat)),
                },
                Some(v) => fail(format!(
                    "{} mse {v:.3e} >= {threshold:.1e}",
                    stat_name(*stat)
                )),
                None => fail("no finished runs".into()),
            }
        }
        Expectation::MseAbove { threshold, stat } => {
            let mses = final_mses(records, scenario.id);
            match stat_of(&mses, *stat) {
                Some(v) if v > *threshold => ExpectationOutcome {
                    verdict: Verdict::Pass,
                    detail: format!("{} mse {v:.3e} > {threshold:.1e}", stat_name(*stat)),
                },
                Some(v) => fail(format!(
                    "{} mse {v:.3e} <= {threshold:.1e}",
                    stat_name(*stat)
                )),
                None => fail("no finished runs".into()),
            }
        }
        Expectation::SubintervalMseAbove {
            from,
            threshold,
            stat,
        } => {
            let (_, t1) = problem.domain();
            let mut mses = Vec::new();
            for r in records.iter().filter(|r| r.status != RunStatus::Aborted) {
                if let Some(mlp) = &r.mlp {
                    mses.push(grid.mse_within(mlp, *from, t1));
                }
            }
            match stat_of(&mses, *stat) {
                Some(v) if v > *threshold => ExpectationOutcome {
                    verdict: Verdict::Pass,
                    detail: format!(
                        "{} mse on [{from}, {t1}] = {v:.3e} > {threshold:.1e}",
                        stat_name(*stat)
                    ),
                },
                Some(v) => fail(format!(
                    "{} mse on [{from}, {t1}] = {v:.3e} <= {threshold:.1e}",
                    stat_name(*stat)
                )),
                None => fail("no finished runs".into()),
            }
        }
        Expectation::MedianRatioAtLeast {
            factor,
            soft_factor,
        } => {
            let (main_label, ablation_label) = match &scenario.kind {
                ScenarioKind::Compare { labels, .. } => (
                    format!("{}:{}", scenario.id, labels.0),
                    format!("{}:{}", scenario.id, labels.1),
                ),
                _ => return fail("ratio gate requires a comparison scenario".into()),
            };
            let main = median(&final_mses(records, &main_label));
            let ablation = median(&final_mses(records, &ablation_label));
            match (main, ablation) {
                (Some(m), Some(a)) if m > 0.0 => {
                    let ratio = a / m;
                    let detail = format!(
                        "median mse {a:.3e} ({ablation_label}) vs {m:.3e} ({main_label}): ratio {ratio:.1}"
                    );
                    if ratio >= *factor {
                        ExpectationOutcome {
                            verdict: Verdict::Pass,
                            detail,
                        }
                    } else if soft_factor.is_some_and(|s| ratio >= s) {
                        ExpectationOutcome {
                            verdict: Verdict::SoftPass,
                            detail: format!("{detail} (soft: below {factor})"),
                        }
                    } else {
                        fail(detail)
                    }
                }
                _ => fail("missing finished runs for ratio".into()),
            }
        }
    }
}

/// Execute one scenario: `n_seeds` runs with seeds `seed0..seed0+n`,
/// reports written under `out_dir` when given.
pub fn run_scenario(
    scenario: &Scenario,
    n_seeds: usize,
    seed0: u64,
    out_dir: Option<&Path>,
    plots: bool,
) -> Result<ScenarioOutcome> {
    let seeds: Vec<u64> = (0..n_seeds as u64).map(|k| seed0 + k).collect();
    match &scenario.kind {
        ScenarioKind::Train { problem, config } => {
            let problem = problem.build()?;
            let grid = EvalGrid::new(&problem, N_EVAL, problem.domain())?;
            let scale = constant_predictor_mse(&grid);
            let records = run_batch(&problem, config, scenario.id, &seeds, &grid, scale);
            if let Some(dir) = out_dir {
                report::emit_report(&problem, &records, dir, plots)?;
            }
            let expectation = check_expectation(scenario, &problem, &grid, &records);
            Ok(ScenarioOutcome {
                id: scenario.id.to_string(),
                records,
                expectation,
            })
        }
        ScenarioKind::Compare {
            problem,
            main,
            ablation,
            labels,
        } => {
            let problem = problem.build()?;
            let grid = EvalGrid::new(&problem, N_EVAL, problem.domain())?;
            let scale = constant_predictor_mse(&grid);
            let main_label = format!("{}:{}", scenario.id, labels.0);
            let ablation_label = format!("{}:{}", scenario.id, labels.1);
            let mut records = run_batch(&problem, main, &main_label, &seeds, &grid, scale);
            records.extend(run_batch(
                &problem,
                ablation,
                &ablation_label,
                &seeds,
                &grid,
                scale,
            ));
            if let Some(dir) = out_dir {
                report::emit_report(&problem, &records, dir, plots)?;
            }
            let expectation = check_expectation(scenario, &problem, &grid, &records);
            Ok(ScenarioOutcome {
                id: scenario.id.to_string(),
                records,
                expectation,
            })
        }
        ScenarioKind::Solve { problem, order, dt } => {
            let problem = problem.build()?;
            let traj: Trajectory = match order {
                2 => rk2_integrate(&problem, *dt)?,
                _ => rk4_integrate(&problem, *dt)?,
            };
            if let Some(dir) = out_dir {
                report::emit_trajectory(&problem, scenario.id, &traj, dir, plots)?;
            }
            Ok(ScenarioOutcome {
                id: scenario.id.to_string(),
                records: Vec::new(),
                expectation: ExpectationOutcome {
                    verdict: Verdict::NotGated,
                    detail: "reference integration".into(),
                },
            })
        }
    }
}

fn net(hidden: usize, out_dim: usize) -> MlpConfig {
    MlpConfig::new(hidden, 32, out_dim)
}

/// The full scenario registry, one entry per source-figure panel.
pub fn scenarios() -> Vec<Scenario> {
    let w = |w_f: f64, w_e: f64| LossWeights {
        w_f,
        w_e,
        ..Default::default()
    };
    let mut list = Vec::new();

    list.push(Scenario {
        id: "fig2",
        figures: &["fig2", "fig3"],
        notes: "plain data fit, no equation term",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("tutorial"),
            config: TrainingConfig {
                n_data: 101,
                eta: 3e-3,
                n_epochs: 24000,
                network: net(3, 1),
                ..Default::default()
            },
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Median,
        },
    });

    list.push(Scenario {
        id: "fig4-left",
        figures: &["fig4-left"],
        notes: "sparse data, no equation term: bad fit expected",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("tutorial"),
            config: TrainingConfig {
                n_data: 26,
                eta: 3e-3,
                n_epochs: 48000,
                network: net(3, 1),
                ..Default::default()
            },
        },
        expectation: Expectation::MseAbove {
            threshold: 1e-2,
            stat: Stat::Median,
        },
    });

    list.push(Scenario {
        id: "fig4-right",
        figures: &["fig4-right"],
        notes: "left-subinterval data [0,18] (61 points at 0.3 spacing); extrapolation fails",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("tutorial"),
            config: TrainingConfig {
                n_data: 61,
                data_interval: Some((0.0, 18.0)),
                eta: 3e-3,
                n_epochs: 48000,
                network: net(3, 1),
                ..Default::default()
            },
        },
        expectation: Expectation::SubintervalMseAbove {
            from: 18.0,
            threshold: 0.1,
            stat: Stat::Median,
        },
    });

    list.push(Scenario {
        id: "fig5-left",
        figures: &["fig5-left"],
        notes: "",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("tutorial"),
            config: TrainingConfig {
                n_data: 26,
                n_c: 50,
                eta: 3e-3,
                n_epochs: 40000,
                weights: w(6e-2, 0.0),
                network: net(3, 1),
                ..Default::default()
            },
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig5-right",
        figures: &["fig5-right"],
        notes: "left-subinterval data with full-domain collocation",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("tutorial"),
            config: TrainingConfig {
                n_data: 61,
                data_interval: Some((0.0, 18.0)),
                n_c: 50,
                eta: 3e-3,
                n_epochs: 40000,
                weights: w(6e-2, 0.0),
                network: net(3, 1),
                ..Default::default()
            },
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig6",
        figures: &["fig6"],
        notes: "collocation confined to the right subinterval [18,30]",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("tutorial"),
            config: TrainingConfig {
                n_data: 61,
                data_interval: Some((0.0, 18.0)),
                n_c: 30,
                collocation_interval: Some((18.0, 30.0)),
                eta: 3e-3,
                n_epochs: 40000,
                weights: w(6e-2, 0.0),
                network: net(3, 1),
                ..Default::default()
            },
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig7",
        figures: &["fig7"],
        notes: "initial condition only; eta and epoch budget not stated in the source, defaults 3e-3 / 60000",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("tutorial"),
            config: TrainingConfig {
                n_data: 1,
                n_c: 50,
                eta: 3e-3,
                n_epochs: 60000,
                weights: w(6e-2, 0.0),
                network: net(4, 1),
                ..Default::default()
            },
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig8-left",
        figures: &["fig8-left"],
        notes: "single data point, no energy term: expected to fail qualitatively",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("harmonic"),
            config: TrainingConfig {
                n_data: 1,
                n_c: 40,
                eta: 3e-4,
                n_epochs: 54000,
                weights: w(3e-4, 0.0),
                network: net(3, 1),
                ..Default::default()
            },
        },
        expectation: Expectation::None,
    });

    let fig8_right = TrainingConfig {
        n_data: 2,
        // Early-time placement: the second sample acts as the second
        // initial condition of the second-order equation.
        data_interval: Some((0.0, 0.05)),
        n_c: 40,
        eta: 3e-4,
        n_epochs: 54000,
        weights: w(3e-4, 3e-4),
        network: net(3, 1),
        ..Default::default()
    };

    list.push(Scenario {
        id: "fig8-right",
        figures: &["fig8-right"],
        notes: "two data points at early times [0, 0.05] (placement ours) plus energy conservation",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("harmonic"),
            config: fig8_right.clone(),
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig9-comparison",
        figures: &["fig9"],
        notes: "energy term ablation at N_data = 2, early-time data placement as fig8-right",
        kind: ScenarioKind::Compare {
            problem: ProblemSpec::of("harmonic"),
            main: fig8_right.clone(),
            ablation: TrainingConfig {
                weights: w(3e-4, 0.0),
                ..fig8_right
            },
            labels: ("with-energy", "without-energy"),
        },
        expectation: Expectation::MedianRatioAtLeast {
            factor: 100.0,
            soft_factor: Some(10.0),
        },
    });

    let fig10 = TrainingConfig {
        n_data: 1,
        n_c: 40,
        eta: 1e-3,
        n_epochs: 72000,
        weights: w(3e-6, 3e-7),
        network: net(4, 1),
        ..Default::default()
    };

    list.push(Scenario {
        id: "fig10-comparison",
        figures: &["fig10-left", "fig10-right", "fig11"],
        notes: "network depth sensitivity at a single data point",
        kind: ScenarioKind::Compare {
            problem: ProblemSpec::of("pendulum"),
            main: fig10.clone(),
            ablation: TrainingConfig {
                network: net(3, 1),
                ..fig10
            },
            labels: ("4-layers", "3-layers"),
        },
        expectation: Expectation::MedianRatioAtLeast {
            factor: 10.0,
            soft_factor: None,
        },
    });

    list.push(Scenario {
        id: "fig12-system",
        figures: &["fig12"],
        notes: "two-equation form with normalized derivative; epoch budget not stated, default 72000",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("pendulum-system"),
            config: TrainingConfig {
                n_data: 2,
                n_c: 40,
                eta: 3e-3,
                n_epochs: 72000,
                weights: w(1e-1, 2e-6),
                network: net(4, 2),
                ..Default::default()
            },
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig13-anharmonic",
        figures: &["fig13"],
        notes: "epoch budget not stated, default 72000; second data point at the domain end",
        kind: ScenarioKind::Train {
            problem: ProblemSpec::of("anharmonic"),
            config: TrainingConfig {
                n_data: 2,
                n_c: 40,
                eta: 1.5e-3,
                n_epochs: 72000,
                weights: w(1e-5, 1e-6),
                network: net(5, 1),
                ..Default::default()
            },
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Best,
        },
    });

    let dw = TrainingConfig {
        n_data: 4,
        n_c: 40,
        eta: 1e-3,
        n_epochs: 72000,
        weights: w(6e-3, 6e-5),
        network: net(5, 2),
        ..Default::default()
    };

    list.push(Scenario {
        id: "fig14-dw18",
        figures: &["fig14"],
        notes: "two time locations per variable, second at the domain end; epoch budget not stated, default 72000",
        kind: ScenarioKind::Train {
            problem: ProblemSpec {
                name: "double-well",
                params: ProblemParams {
                    y0: Some(1.8),
                    ..Default::default()
                },
            },
            config: dw.clone(),
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig15-dw138",
        figures: &["fig15"],
        notes: "second potential-well family",
        kind: ScenarioKind::Train {
            problem: ProblemSpec {
                name: "double-well",
                params: ProblemParams {
                    y0: Some(1.38),
                    ..Default::default()
                },
            },
            config: dw,
        },
        expectation: Expectation::MseBelow {
            threshold: 1e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig16-portrait",
        figures: &["fig16"],
        notes: "reference limit cycle, strong nonlinearity",
        kind: ScenarioKind::Solve {
            problem: ProblemSpec {
                name: "vdp",
                params: ProblemParams {
                    epsilon: Some(5.0),
                    t_end: Some(3.0),
                    ..Default::default()
                },
            },
            order: 4,
            dt: 1e-4,
        },
        expectation: Expectation::None,
    });

    list.push(Scenario {
        id: "fig17-portrait",
        figures: &["fig17"],
        notes: "reference limit cycle, moderate nonlinearity",
        kind: ScenarioKind::Solve {
            problem: ProblemSpec {
                name: "vdp",
                params: ProblemParams {
                    epsilon: Some(1.0),
                    t_end: Some(3.0),
                    ..Default::default()
                },
            },
            order: 4,
            dt: 1e-4,
        },
        expectation: Expectation::None,
    });

    let vdp = |eps: f64| ProblemSpec {
        name: "vdp",
        params: ProblemParams {
            epsilon: Some(eps),
            ..Default::default()
        },
    };
    let vdp_cfg = |n_data: usize,
                   data_iv: Option<(f64, f64)>,
                   n_c: usize,
                   w_f: f64| TrainingConfig {
        n_data,
        data_interval: data_iv,
        n_c,
        eta: 7e-4,
        n_epochs: 60000,
        weights: w(w_f, 0.0),
        network: net(3, 1),
        ..Default::default()
    };

    list.push(Scenario {
        id: "fig18-eps03",
        figures: &["fig18-top"],
        notes: "three early-time data points on [0, 0.15] (placement ours); epoch budget not stated, default 60000",
        kind: ScenarioKind::Train {
            problem: vdp(1.0 / 3.0),
            config: vdp_cfg(3, Some((0.0, 0.15)), 48, 1e-4),
        },
        expectation: Expectation::MseBelow {
            threshold: 5e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig18-eps1",
        figures: &["fig18-middle"],
        notes: "data count not stated in the source; three early-time points assumed",
        kind: ScenarioKind::Train {
            problem: vdp(1.0),
            config: vdp_cfg(3, Some((0.0, 0.15)), 60, 1e-4),
        },
        expectation: Expectation::MseBelow {
            threshold: 5e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig18-eps5",
        figures: &["fig18-bottom"],
        notes: "full-domain data, count not stated in the source; 20 points assumed",
        kind: ScenarioKind::Train {
            problem: vdp(5.0),
            config: vdp_cfg(20, None, 70, 1e-5),
        },
        expectation: Expectation::MseBelow {
            threshold: 5e-2,
            stat: Stat::Best,
        },
    });

    list.push(Scenario {
        id: "fig18-eps5-sparse",
        figures: &[],
        notes: "control: strong nonlinearity with only early-time data must not reach the sparse-data accuracy",
        kind: ScenarioKind::Train {
            problem: vdp(5.0),
            config: vdp_cfg(3, Some((0.0, 0.15)), 48, 1e-5),
        },
        expectation: Expectation::MseAbove {
            threshold: 5e-2,
            stat: Stat::Median,
        },
    });

    list
}

/// All scenario ids in registry order.
pub fn scenario_ids() -> Vec<&'static str> {
    scenarios().iter().map(|s| s.id).collect()
}

/// Resolve a query to scenarios: `all`, an exact id, or a group prefix
/// (`fig18` selects every `fig18-*`).
pub fn find_scenarios(query: &str) -> Result<Vec<Scenario>> {
    let all = scenarios();
    if query == "all" {
        return Ok(all);
    }
    let matched: Vec<Scenario> = all
        .iter()
        .filter(|s| s.id == query || s.id.starts_with(&format!("{query}-")))
        .cloned()
        .collect();
    if matched.is_empty() {
        return Err(Error::UnknownScenario(
            query.to_string(),
            scenario_ids().join(", "),
        ));
    }
    Ok(matched)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems;

    #[test]
    fn registry_ids_are_unique_and_buildable() {
        let all = scenarios();
        let mut ids: Vec<&str> = all.iter().map(|s| s.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len(), "duplicate scenario ids");
        for s in &all {
            match &s.kind {
                ScenarioKind::Train { problem, config } => {
                    let p = problem.build().unwrap();
                    assert_eq!(config.network.output_dim, p.dim(), "{}", s.id);
                }
                ScenarioKind::Compare { problem, main, ablation, .. } => {
                    let p = problem.build().unwrap();
                    assert_eq!(main.network.output_dim, p.dim());
                    assert_eq!(ablation.network.output_dim, p.dim());
                }
                ScenarioKind::Solve { problem, .. } => {
                    problem.build().unwrap();
                }
            }
        }
    }

    #[test]
    fn registry_covers_every_source_figure_panel_once() {
        let all = scenarios();
        let mut panels: Vec<&str> = all.iter().flat_map(|s| s.figures.iter().copied()).collect();
        let total = panels.len();
        panels.sort();
        panels.dedup();
        assert_eq!(panels.len(), total, "a figure panel is claimed twice");
        for n in 2..=18 {
            let fig = format!("fig{n}");
            let hit = panels
                .iter()
                .any(|p| **p == fig || p.starts_with(&format!("{fig}-")));
            assert!(hit, "figure {n} not covered");
        }
    }

    #[test]
    fn find_scenarios_handles_groups_and_unknowns() {
        assert_eq!(find_scenarios("fig7").unwrap().len(), 1);
        let group = find_scenarios("fig18").unwrap();
        assert_eq!(group.len(), 4);
        assert!(find_scenarios("all").unwrap().len() >= 18);
        assert!(find_scenarios("nosuch").is_err());
    }

    #[test]
    fn mse_between_is_symmetric_and_zero_on_identical() {
        let ts: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        let f = |t: f64| vec![(3.0 * t).sin()];
        let g = |t: f64| vec![t * t - 0.5];
        let a = mse_between(f, g, &ts);
        let b = mse_between(g, f, &ts);
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(mse_between(f, f, &ts), 0.0);
    }

    #[test]
    fn evaluate_mse_examples() {
        // A network equal to the oracle is exact: compare oracle to itself.
        let p = problems::harmonic(20.0);
        let grid = EvalGrid::new(&p, N_EVAL, p.domain()).unwrap();
        let oracle = |t: f64| p.closed_form(t).unwrap();
        assert_eq!(mse_between(oracle, oracle, &grid.ts), 0.0);

        // Constant-zero network on the harmonic problem: mean of cos²(20t)
        // over [0,1] is 1/2 + sin(40)/80.
        let mut zero = Mlp::init(MlpConfig::new(1, 4, 1)).unwrap();
        zero.params_assign(&vec![0.0; zero.param_count()]).unwrap();
        let got = evaluate_mse(&zero, &p, N_EVAL).unwrap();
        let analytic = 0.5 + (40.0f64).sin() / 80.0;
        assert!((got - analytic).abs() < 2e-3, "got {got} vs {analytic}");

        // Single evaluation point at t0 reduces to the squared error there.
        let grid1 = EvalGrid::new(&p, 1, p.domain()).unwrap();
        let got = grid1.mse(&zero);
        assert_eq!(got, 1.0);
    }

    #[test]
    fn constant_predictor_scale_for_harmonic() {
        // Variance of cos(20t) over [0,1] is about 1/2 - mean².
        let p = problems::harmonic(20.0);
        let grid = EvalGrid::new(&p, N_EVAL, p.domain()).unwrap();
        let scale = constant_predictor_mse(&grid);
        assert!(scale > 0.4 && scale < 0.6, "scale {scale}");
    }

    #[test]
    fn run_scenario_single_seed_produces_one_record() {
        let s = Scenario {
            id: "tiny",
            figures: &[],
            notes: "",
            kind: ScenarioKind::Train {
                problem: ProblemSpec::of("tutorial"),
                config: TrainingConfig {
                    n_data: 5,
                    data_interval: Some((0.0, 3.0)),
                    n_epochs: 50,
                    network: MlpConfig::new(1, 4, 1),
                    ..Default::default()
                },
            },
            expectation: Expectation::None,
        };
        let out = run_scenario(&s, 1, 0, None, false).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].seed, 0);
        assert!(out.records[0].final_mse.is_some());
        assert_eq!(out.expectation.verdict, Verdict::NotGated);
    }

    #[test]
    fn median_and_best_statistics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
        assert_eq!(best(&[3.0, 1.0, 2.0]), Some(1.0));
    }
}
