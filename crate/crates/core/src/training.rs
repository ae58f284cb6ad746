//! Composite loss assembly and full-batch Adam training.
//!
//! Each epoch rebuilds one tape: the network parameters are registered as
//! leaves, the data / physics / energy losses are recorded as variables,
//! and a single reverse sweep yields the full parameter gradient for one
//! Adam update. Zero-weighted loss terms are skipped entirely and reported
//! as 0 in the telemetry.

use crate::autodiff::{Gradient, Jet2, Tape, Var};
use crate::error::{Error, Result};
use crate::integrators::{sample_collocation, sample_training_data, uniform_grid};
use crate::network::{Mlp, MlpConfig, MlpVars};
use crate::problems::OdeProblem;

/// Number of uniform points in the standard MSE evaluation protocol.
pub const N_EVAL: usize = 1000;
/// Step bound for the RK4 oracle behind MSE evaluation.
pub const EVAL_ORACLE_DT: f64 = 1e-4;

/// Weights of the composite loss. `w_data` defaults to one; `w_b` stays
/// zero for ODE problems, which have no boundary set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub w_data: f64,
    pub w_b: f64,
    pub w_f: f64,
    pub w_e: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            w_data: 1.0,
            w_b: 0.0,
            w_f: 0.0,
            w_e: 0.0,
        }
    }
}

/// Full configuration of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    /// Number of scalar training samples (a two-variable system consumes
    /// two per time location).
    pub n_data: usize,
    /// Data sampling interval; `None` means the whole domain.
    pub data_interval: Option<(f64, f64)>,
    /// Number of collocation points.
    pub n_c: usize,
    /// Collocation interval; `None` means the whole domain.
    pub collocation_interval: Option<(f64, f64)>,
    /// Learning rate.
    pub eta: f64,
    /// Number of full-batch epochs.
    pub n_epochs: usize,
    pub weights: LossWeights,
    pub network: MlpConfig,
    /// Master seed: feeds the network initialization.
    pub seed: u64,
    /// Telemetry MSE cadence in epochs.
    pub mse_every: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            n_data: 1,
            data_interval: None,
            n_c: 1,
            collocation_interval: None,
            eta: 1e-3,
            n_epochs: 1000,
            weights: LossWeights::default(),
            network: MlpConfig::new(3, 32, 1),
            seed: 0,
            mse_every: 100,
        }
    }
}

impl TrainingConfig {
    fn validate(&self, problem: &OdeProblem) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(Error::config(format!("eta must be positive, got {}", self.eta)));
        }
        if self.mse_every == 0 {
            return Err(Error::config("mse_every must be at least 1"));
        }
        let w = &self.weights;
        for (name, v) in [
            ("w_data", w.w_data),
            ("w_b", w.w_b),
            ("w_f", w.w_f),
            ("w_e", w.w_e),
        ] {
            if !(v >= 0.0) {
                return Err(Error::config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if w.w_b != 0.0 {
            return Err(Error::config(
                "w_b must be 0: ODE problems carry no boundary set",
            ));
        }
        if w.w_e != 0.0 && !problem.has_energy() {
            return Err(Error::config(format!(
                "problem `{}` has no energy function; set w_e = 0",
                problem.name()
            )));
        }
        if self.network.output_dim != problem.dim() {
            return Err(Error::config(format!(
                "network output_dim {} does not match problem dimension {}",
                self.network.output_dim,
                problem.dim()
            )));
        }
        Ok(())
    }
}

/// Telemetry for one epoch. Partial losses are unweighted; `l_total` is the
/// weighted combination actually minimized. `mse` is present on evaluation
/// epochs only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub l_data: f64,
    pub l_f: f64,
    pub l_e: f64,
    pub l_total: f64,
    pub mse: Option<f64>,
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainStatus {
    Completed,
    /// The loss became non-finite at this epoch; the last good telemetry
    /// is retained.
    AbortedNonFiniteLoss { epoch: usize },
    /// A gradient component became non-finite.
    AbortedNonFiniteGradient { epoch: usize, component: usize },
}

impl TrainStatus {
    pub fn is_aborted(&self) -> bool {
        !matches!(self, TrainStatus::Completed)
    }
}

/// Result of a training run: the final network and the telemetry stream.
pub struct TrainOutcome {
    pub mlp: Mlp,
    pub records: Vec<EpochRecord>,
    pub status: TrainStatus,
}

/// Mean squared data misfit (Eq.-style MSE over every scalar sample).
pub fn loss_data<'t>(vars: &MlpVars<'t>, data: &[(f64, Vec<f64>)]) -> Result<Var<'t>> {
    if data.is_empty() {
        return Err(Error::config("data set must not be empty"));
    }
    let tape = vars.tape();
    let mut terms = Vec::new();
    for (t, targets) in data {
        let outputs = vars.forward(tape.leaf(*t));
        debug_assert_eq!(outputs.len(), targets.len());
        for (out, y) in outputs.iter().zip(targets) {
            terms.push(out.add_const(-y).square());
        }
    }
    let n = terms.len() as f64;
    Ok(tape.sum(&terms).mul_const(1.0 / n))
}

/// Boundary-data misfit, same form as [`loss_data`]. ODE problems have no
/// boundary set, in which case this is identically zero and its weight
/// stays zero.
pub fn loss_boundary<'t>(vars: &MlpVars<'t>, boundary: &[(f64, Vec<f64>)]) -> Var<'t> {
    if boundary.is_empty() {
        return vars.tape().leaf(0.0);
    }
    loss_data(vars, boundary).expect("non-empty boundary set")
}

fn check_collocation(problem: &OdeProblem, collocation: &[f64]) -> Result<()> {
    if collocation.is_empty() {
        return Err(Error::config("collocation set must not be empty"));
    }
    let (t0, t1) = problem.domain();
    let slack = 1e-9 * (t1 - t0).abs();
    if collocation
        .iter()
        .any(|&t| t < t0 - slack || t > t1 + slack)
    {
        return Err(Error::config("collocation point outside the problem domain"));
    }
    Ok(())
}

/// Push the squared residuals of one collocation point into per-equation
/// accumulators.
fn physics_terms<'t>(
    problem: &OdeProblem,
    tape: &'t Tape,
    t: f64,
    jets: &[Jet2<'t>],
    acc: &mut [Vec<Var<'t>>],
) {
    for (k, r) in problem.residual(tape, t, jets).into_iter().enumerate() {
        acc[k].push(r.square());
    }
}

fn physics_loss_from_terms<'t>(tape: &'t Tape, acc: &[Vec<Var<'t>>], n_points: usize) -> Var<'t> {
    // Sum of per-equation means: L_F = L_F1 + L_F2 for systems.
    let inv = 1.0 / n_points as f64;
    let mut total: Option<Var<'t>> = None;
    for terms in acc {
        let eq = tape.sum(terms).mul_const(inv);
        total = Some(match total {
            None => eq,
            Some(t) => t + eq,
        });
    }
    total.expect("at least one equation")
}

/// Mean squared equation residual over the collocation points, summed over
/// the equations of a system.
pub fn loss_physics<'t>(
    vars: &MlpVars<'t>,
    problem: &OdeProblem,
    collocation: &[f64],
) -> Result<Var<'t>> {
    check_collocation(problem, collocation)?;
    let tape = vars.tape();
    let mut acc = vec![Vec::with_capacity(collocation.len()); problem.dim()];
    for &t in collocation {
        let jets = vars.forward_jet(t);
        physics_terms(problem, tape, t, &jets, &mut acc);
    }
    Ok(physics_loss_from_terms(tape, &acc, collocation.len()))
}

fn energy_term<'t>(
    problem: &OdeProblem,
    tape: &'t Tape,
    jets: &[Jet2<'t>],
    e0: f64,
) -> Var<'t> {
    let e = problem
        .energy_jets(tape, jets)
        .expect("energy availability checked by caller");
    e.add_const(-e0).square()
}

/// Mean squared deviation of the conserved energy from its initial value,
/// over the collocation points.
pub fn loss_energy<'t>(
    vars: &MlpVars<'t>,
    problem: &OdeProblem,
    collocation: &[f64],
) -> Result<Var<'t>> {
    let e0 = problem
        .energy_reference()
        .ok_or_else(|| Error::config(format!("problem `{}` has no energy function", problem.name())))?;
    check_collocation(problem, collocation)?;
    let tape = vars.tape();
    let terms: Vec<Var<'t>> = collocation
        .iter()
        .map(|&t| energy_term(problem, tape, &vars.forward_jet(t), e0))
        .collect();
    Ok(tape.sum(&terms).mul_const(1.0 / collocation.len() as f64))
}

struct EpochLoss<'t> {
    total: Var<'t>,
    l_data: f64,
    l_f: f64,
    l_e: f64,
}

/// Record all loss terms for one epoch on the tape behind `vars`.
///
/// Jets are built once per collocation point and shared between the
/// physics and energy terms. Terms with zero weight are skipped and
/// reported as 0.
fn build_epoch_loss<'t>(
    vars: &MlpVars<'t>,
    problem: &OdeProblem,
    data: &[(f64, Vec<f64>)],
    collocation: &[f64],
    weights: &LossWeights,
) -> Result<EpochLoss<'t>> {
    let tape = vars.tape();
    let mut terms: Vec<Var<'t>> = Vec::with_capacity(3);
    let mut l_data = 0.0;
    let mut l_f = 0.0;
    let mut l_e = 0.0;

    if weights.w_data != 0.0 {
        let ld = loss_data(vars, data)?;
        l_data = ld.value();
        terms.push(ld.mul_const(weights.w_data));
    }

    let use_physics = weights.w_f != 0.0;
    let use_energy = weights.w_e != 0.0;
    if use_physics || use_energy {
        check_collocation(problem, collocation)?;
        let e0 = if use_energy {
            problem.energy_reference().ok_or_else(|| {
                Error::config(format!("problem `{}` has no energy function", problem.name()))
            })?
        } else {
            0.0
        };
        let mut acc = vec![Vec::with_capacity(collocation.len()); problem.dim()];
        let mut e_terms = Vec::with_capacity(collocation.len());
        for &t in collocation {
            let jets = vars.forward_jet(t);
            if use_physics {
                physics_terms(problem, tape, t, &jets, &mut acc);
            }
            if use_energy {
                e_terms.push(energy_term(problem, tape, &jets, e0));
            }
        }
        if use_physics {
            let lf = physics_loss_from_terms(tape, &acc, collocation.len());
            l_f = lf.value();
            terms.push(lf.mul_const(weights.w_f));
        }
        if use_energy {
            let le = tape.sum(&e_terms).mul_const(1.0 / collocation.len() as f64);
            l_e = le.value();
            terms.push(le.mul_const(weights.w_e));
        }
    }

    let total = match terms.len() {
        0 => tape.leaf(0.0),
        1 => terms[0],
        _ => {
            let mut acc = terms[0];
            for t in &terms[1..] {
                acc = acc + *t;
            }
            acc
        }
    };
    Ok(EpochLoss {
        total,
        l_data,
        l_f,
        l_e,
    })
}

/// One-shot assembly of the composite loss for a network bound to a tape,
/// sampling data and collocation points from the configuration.
pub fn loss_total<'t>(
    vars: &MlpVars<'t>,
    problem: &OdeProblem,
    config: &TrainingConfig,
) -> Result<(Var<'t>, EpochRecord)> {
    config.validate(problem)?;
    let (t0, t1) = problem.domain();
    let data = sample_training_data(
        problem,
        config.n_data,
        config.data_interval.unwrap_or((t0, t1)),
    )?;
    let collocation = if config.weights.w_f != 0.0 || config.weights.w_e != 0.0 {
        sample_collocation(config.n_c, config.collocation_interval.unwrap_or((t0, t1)))?
    } else {
        Vec::new()
    };
    let ep = build_epoch_loss(vars, problem, &data, &collocation, &config.weights)?;
    let record = EpochRecord {
        epoch: 0,
        l_data: ep.l_data,
        l_f: ep.l_f,
        l_e: ep.l_e,
        l_total: ep.total.value(),
        mse: None,
    };
    Ok((ep.total, record))
}

/// Adam optimizer state (first/second moment estimates with bias
/// correction). Constants follow the usual defaults.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_hat: f64,
}

impl AdamState {
    pub fn new(n_params: usize) -> Self {
        AdamState {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps_hat: 1e-8,
        }
    }

    /// One in-place update. Returns the index of the first non-finite
    /// gradient component, if any, without touching the parameters.
    pub fn step(
        &mut self,
        params: &mut [f64],
        grad: &[f64],
        eta: f64,
    ) -> std::result::Result<(), usize> {
        assert_eq!(params.len(), self.m.len(), "parameter count mismatch");
        assert_eq!(grad.len(), self.m.len(), "gradient length mismatch");
        if let Some(bad) = grad.iter().position(|g| !g.is_finite()) {
            return Err(bad);
        }
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= eta * m_hat / (v_hat.sqrt() + self.eps_hat);
        }
        Ok(())
    }
}

/// Oracle values cached on the standard evaluation grid.
pub struct EvalGrid {
    pub ts: Vec<f64>,
    pub oracle: Vec<Vec<f64>>,
}

impl EvalGrid {
    pub fn new(problem: &OdeProblem, n_eval: usize, interval: (f64, f64)) -> Result<Self> {
        let ts = uniform_grid(n_eval, interval);
        let oracle = problem.oracle_outputs(&ts, EVAL_ORACLE_DT)?;
        Ok(EvalGrid { ts, oracle })
    }

    /// `(1/N) Σᵢ ‖ŷ(tᵢ) - yᵢ‖²` pooled over all output variables.
    pub fn mse(&self, mlp: &Mlp) -> f64 {
        let mut acc = 0.0;
        for (t, target) in self.ts.iter().zip(&self.oracle) {
            let out = mlp.eval(*t);
            for (a, b) in out.iter().zip(target) {
                let d = a - b;
                acc += d * d;
            }
        }
        acc / self.ts.len() as f64
    }

    /// MSE restricted to grid points with `t` inside `[lo, hi]`.
    pub fn mse_within(&self, mlp: &Mlp, lo: f64, hi: f64) -> f64 {
        let mut acc = 0.0;
        let mut n = 0usize;
        for (t, target) in self.ts.iter().zip(&self.oracle) {
            if *t < lo || *t > hi {
                continue;
            }
            let out = mlp.eval(*t);
            for (a, b) in out.iter().zip(target) {
                let d = a - b;
                acc += d * d;
            }
            n += 1;
        }
        acc / n.max(1) as f64
    }
}

/// Run `config.n_epochs` full-batch Adam epochs on `problem`.
///
/// Fully reproducible from `config.seed`: the seed determines the network
/// initialization and everything else is deterministic. Non-finite losses
/// or gradients abort the run, keeping the telemetry gathered so far.
pub fn train(problem: &OdeProblem, config: &TrainingConfig) -> Result<TrainOutcome> {
    config.validate(problem)?;
    let (t0, t1) = problem.domain();
    let data = sample_training_data(
        problem,
        config.n_data,
        config.data_interval.unwrap_or((t0, t1)),
    )?;
    let needs_collocation = config.weights.w_f != 0.0 || config.weights.w_e != 0.0;
    let collocation = if needs_collocation {
        let iv = config.collocation_interval.unwrap_or((t0, t1));
        let points = sample_collocation(config.n_c, iv)?;
        check_collocation(problem, &points)?;
        points
    } else {
        Vec::new()
    };

    let mut mlp = Mlp::init(config.network.with_seed(config.seed))?;
    let mut params = mlp.params_flatten();
    let mut adam = AdamState::new(params.len());
    let eval = EvalGrid::new(problem, N_EVAL, problem.domain())?;

    let tape = Tape::new();
    let mut grad = Gradient::default();
    let mut grad_vec: Vec<f64> = Vec::with_capacity(params.len());
    let mut records: Vec<EpochRecord> = Vec::with_capacity(config.n_epochs);

    for epoch in 1..=config.n_epochs {
        tape.clear();
        let vars = mlp.bind(&tape);
        let ep = build_epoch_loss(&vars, problem, &data, &collocation, &config.weights)?;
        if !ep.total.value().is_finite() {
            return Ok(TrainOutcome {
                mlp,
                records,
                status: TrainStatus::AbortedNonFiniteLoss { epoch },
            });
        }
        let mut record = EpochRecord {
            epoch,
            l_data: ep.l_data,
            l_f: ep.l_f,
            l_e: ep.l_e,
            l_total: ep.total.value(),
            mse: None,
        };
        tape.backward_into(ep.total, &mut grad);
        vars.gradient(&grad, &mut grad_vec);
        if let Err(component) = adam.step(&mut params, &grad_vec, config.eta) {
            records.push(record);
            return Ok(TrainOutcome {
                mlp,
                records,
                status: TrainStatus::AbortedNonFiniteGradient { epoch, component },
            });
        }
        mlp.params_assign(&params).expect("length preserved");
        if epoch % config.mse_every == 0 || epoch == config.n_epochs {
            record.mse = Some(eval.mse(&mlp));
        }
        records.push(record);
    }

    Ok(TrainOutcome {
        mlp,
        records,
        status: TrainStatus::Completed,
    })
}
