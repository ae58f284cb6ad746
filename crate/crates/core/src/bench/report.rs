//! CSV and plot-data emission for benchmark runs.
//!
//! Layout under the output directory: one subdirectory per run label and
//! seed holding `epochs.csv`, `solution.csv`, `phase.csv` (two-variable
//! problems), the trained model, and optionally a self-contained SVG line
//! plot; plus a top-level `summary.csv` across all runs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::integrators::{trajectory_csv, Trajectory};
use crate::problems::OdeProblem;
use crate::training::{EvalGrid, N_EVAL};

use super::{RunRecord, ScenarioOutcome};

/// Ensure the output directory exists and is writable before any long
/// computation starts.
pub fn validate_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"ok")?;
    fs::remove_file(&probe)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Telemetry CSV: one row per epoch, `mse` empty on non-evaluation epochs.
pub fn epochs_csv(records: &[crate::training::EpochRecord]) -> String {
    let mut out = String::from("epoch,l_data,l_f,l_e,l_total,mse\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.epoch,
            r.l_data,
            r.l_f,
            r.l_e,
            r.l_total,
            fmt_opt(r.mse)
        );
    }
    out
}

fn solution_csv(problem: &OdeProblem, grid: &EvalGrid, mlp: &crate::network::Mlp) -> String {
    let dim = problem.dim();
    let mut out = String::from("t");
    if dim == 1 {
        out.push_str(",y_hat,y_oracle");
    } else {
        for k in 1..=dim {
            let _ = write!(out, ",y{k}_hat");
        }
        for k in 1..=dim {
            let _ = write!(out, ",y{k}_oracle");
        }
    }
    out.push('\n');
    for (t, oracle) in grid.ts.iter().zip(&grid.oracle) {
        let pred = mlp.eval(*t);
        let _ = write!(out, "{t}");
        for v in &pred {
            let _ = write!(out, ",{v}");
        }
        for v in oracle {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

fn phase_csv(grid: &EvalGrid, mlp: &crate::network::Mlp) -> String {
    let mut out = String::from("y1,y2\n");
    for t in &grid.ts {
        let pred = mlp.eval(*t);
        let _ = writeln!(out, "{},{}", pred[0], pred[1]);
    }
    out
}

fn run_dir(base: &Path, label: &str, seed: u64) -> std::path::PathBuf {
    base.join(label.replace(':', "_")).join(format!("seed{seed}"))
}

/// Write per-run loss/MSE telemetry, solution-vs-oracle data, phase-space
/// data for two-variable problems, and the trained model.
pub fn emit_report(
    problem: &OdeProblem,
    records: &[RunRecord],
    out_dir: &Path,
    plots: bool,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyReport);
    }
    validate_output_dir(out_dir)?;
    let grid = EvalGrid::new(problem, N_EVAL, problem.domain())?;
    for record in records {
        let dir = run_dir(out_dir, &record.label, record.seed);
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("epochs.csv"), epochs_csv(&record.records))?;
        if let Some(mlp) = &record.mlp {
            fs::write(dir.join("solution.csv"), solution_csv(problem, &grid, mlp))?;
            if problem.dim() == 2 {
                fs::write(dir.join("phase.csv"), phase_csv(&grid, mlp))?;
            }
            mlp.save(&dir.join("model.txt"))?;
            if plots {
                let pred: Vec<(f64, f64)> = grid
                    .ts
                    .iter()
                    .map(|&t| (t, mlp.eval(t)[0]))
                    .collect();
                let oracle: Vec<(f64, f64)> = grid
                    .ts
                    .iter()
                    .zip(&grid.oracle)
                    .map(|(&t, o)| (t, o[0]))
                    .collect();
                let svg = svg_lines(
                    &format!("{} seed {}", record.label, record.seed),
                    &[
                        SvgSeries {
                            label: "predicted",
                            color: "#d62728",
                            points: &pred,
                        },
                        SvgSeries {
                            label: "oracle",
                            color: "#1f77b4",
                            points: &oracle,
                        },
                    ],
                );
                fs::write(dir.join("solution.svg"), svg)?;
            }
        }
    }
    Ok(())
}

/// Write a reference trajectory (`trajectory.csv`, and `phase.csv` for
/// second-order/state-pair problems) for a solve-only scenario.
pub fn emit_trajectory(
    problem: &OdeProblem,
    id: &str,
    traj: &Trajectory,
    out_dir: &Path,
    plots: bool,
) -> Result<()> {
    let dir = out_dir.join(id);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("trajectory.csv"), trajectory_csv(traj))?;
    if problem.state_dim() == 2 {
        let mut out = String::from("y1,y2\n");
        for s in &traj.states {
            let _ = writeln!(out, "{},{}", s[0], s[1]);
        }
        fs::write(dir.join("phase.csv"), out)?;
    }
    if plots {
        let pts: Vec<(f64, f64)> = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(&t, s)| (t, s[0]))
            .collect();
        let svg = svg_lines(
            id,
            &[SvgSeries {
                label: "y1",
                color: "#1f77b4",
                points: &pts,
            }],
        );
        fs::write(dir.join("trajectory.svg"), svg)?;
    }
    Ok(())
}

/// Cross-run summary CSV: `scenario,seed,final_mse,status,wall_time_s`.
pub fn summary_csv(outcomes: &[ScenarioOutcome]) -> String {
    let mut out = String::from("scenario,seed,final_mse,status,wall_time_s\n");
    for outcome in outcomes {
        for r in &outcome.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.3}",
                r.label,
                r.seed,
                fmt_opt(r.final_mse),
                r.status.as_str(),
                r.wall_time.as_secs_f64()
            );
        }
    }
    out
}

pub fn write_summary(outcomes: &[ScenarioOutcome], out_dir: &Path) -> Result<()> {
    validate_output_dir(out_dir)?;
    fs::write(out_dir.join("summary.csv"), summary_csv(outcomes))?;
    Ok(())
}

pub(crate) struct SvgSeries<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Minimal self-contained SVG line plot.
pub(crate) fn svg_lines(title: &str, series: &[SvgSeries]) -> String {
    const W: f64 = 820.0;
    const H: f64 = 500.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 40.0;

    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for (x, y) in s.points {
            xs = (xs.0.min(*x), xs.1.max(*x));
            ys = (ys.0.min(*y), ys.1.max(*y));
        }
    }
    if !xs.0.is_finite() || xs.0 == xs.1 {
        xs = (xs.0.min(0.0), xs.0.min(0.0) + 1.0);
    }
    if !ys.0.is_finite() || ys.0 == ys.1 {
        ys = (ys.0.min(0.0), ys.0.min(0.0) + 1.0);
    }
    let sx = (W - ML - MR) / (xs.1 - xs.0);
    let sy = (H - MT - MB) / (ys.1 - ys.0);
    let map = |x: f64, y: f64| (ML + (x - xs.0) * sx, H - MB - (y - ys.0) * sy);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16">{}</text>"#,
        ML, title
    );
    // axes
    let (x0, y0) = (ML, H - MB);
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#,
        W - MR
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{MT}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{x0}" y="{}" font-family="sans-serif" font-size="11">{:.3}</text>"#,
        H - MB + 16.0,
        xs.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{:.3}</text>"#,
        W - MR,
        H - MB + 16.0,
        xs.1
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{y0}" font-family="sans-serif" font-size="11" text-anchor="end">{:.3}</text>"#,
        ML - 6.0,
        ys.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{MT}" font-family="sans-serif" font-size="11" text-anchor="end">{:.3}</text>"#,
        ML - 6.0,
        ys.1
    );
    for (k, s) in series.iter().enumerate() {
        let mut pts = String::new();
        for (x, y) in s.points {
            let (px, py) = map(*x, *y);
            let _ = write!(pts, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            pts.trim_end(),
            s.color
        );
        let ly = MT + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="12" height="3" fill="{}"/><text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            W - MR - 120.0,
            ly - 4.0,
            s.color,
            W - MR - 102.0,
            ly,
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}
