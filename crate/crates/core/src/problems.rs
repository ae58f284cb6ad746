//! The benchmark ODE definitions.
//!
//! Each problem bundles the equation residual over jets (the trainable
//! form), the equivalent first-order system for the Runge-Kutta oracles,
//! optional closed-form and energy functions, initial conditions and the
//! time domain. Problems are immutable value objects and freely shareable.

use std::f64::consts::PI;

use crate::autodiff::{powi_det, Jet2, Tape, Var};
use crate::error::{Error, Result};
use crate::integrators;

type RhsFn = Box<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;
type ResidualFn = Box<dyn for<'t> Fn(&'t Tape, f64, &[Jet2<'t>]) -> Vec<Var<'t>> + Send + Sync>;
type EnergyJetsFn = Box<dyn for<'t> Fn(&'t Tape, &[Jet2<'t>]) -> Var<'t> + Send + Sync>;
type EnergyStateFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type ClosedFormFn = Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Conserved-energy handles: the taped form used in the loss and the plain
/// form used on trajectories, plus the reference value at the initial state.
struct EnergyFns {
    jets: EnergyJetsFn,
    state: EnergyStateFn,
    reference: f64,
}

/// A benchmark ordinary differential equation.
pub struct OdeProblem {
    name: String,
    /// Number of network outputs (1 for scalar equations, 2 for systems).
    dim: usize,
    /// Dimension of the equivalent first-order system.
    state_dim: usize,
    domain: (f64, f64),
    initial_state: Vec<f64>,
    params: Vec<(&'static str, f64)>,
    rhs: RhsFn,
    residual: ResidualFn,
    energy: Option<EnergyFns>,
    closed_form: Option<ClosedFormFn>,
}

impl OdeProblem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Initial first-order state at `domain.0`.
    pub fn initial_state(&self) -> &[f64] {
        &self.initial_state
    }

    /// Initial conditions as (state index, t0, value) triples.
    pub fn initial_conditions(&self) -> Vec<(usize, f64, f64)> {
        self.initial_state
            .iter()
            .enumerate()
            .map(|(k, &v)| (k, self.domain.0, v))
            .collect()
    }

    /// Named constants of the problem (angular frequency, nonlinearity, ...).
    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }

    /// Right-hand side of the first-order system `dy/dt = f(t, y)`.
    pub fn rhs(&self, t: f64, state: &[f64], out: &mut [f64]) {
        (self.rhs)(t, state, out)
    }

    /// Equation residual(s) evaluated on network jets, one per equation.
    pub fn residual<'t>(&self, tape: &'t Tape, t: f64, jets: &[Jet2<'t>]) -> Vec<Var<'t>> {
        debug_assert_eq!(jets.len(), self.dim);
        (self.residual)(tape, t, jets)
    }

    pub fn has_energy(&self) -> bool {
        self.energy.is_some()
    }

    /// Conserved energy built from jets, for the energy loss.
    pub fn energy_jets<'t>(&self, tape: &'t Tape, jets: &[Jet2<'t>]) -> Option<Var<'t>> {
        self.energy.as_ref().map(|e| (e.jets)(tape, jets))
    }

    /// Conserved energy of a first-order state.
    pub fn energy_state(&self, state: &[f64]) -> Option<f64> {
        self.energy.as_ref().map(|e| (e.state)(state))
    }

    /// Energy at the initial state; the energy loss penalizes `E(t) - E₀`.
    pub fn energy_reference(&self) -> Option<f64> {
        self.energy.as_ref().map(|e| e.reference)
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    /// Closed-form solution outputs, where one exists.
    pub fn closed_form(&self, t: f64) -> Option<Vec<f64>> {
        self.closed_form.as_ref().map(|f| f(t))
    }

    /// Observable outputs of a first-order state (the leading components).
    pub fn outputs_from_state(&self, state: &[f64]) -> Vec<f64> {
        state[..self.dim].to_vec()
    }

    /// Reference solution outputs at ascending times within the domain:
    /// the closed form when available, otherwise a Runge-Kutta march of
    /// order four landing exactly on each requested time.
    pub fn oracle_outputs(&self, ts: &[f64], dt_max: f64) -> Result<Vec<Vec<f64>>> {
        if let Some(f) = &self.closed_form {
            return Ok(ts.iter().map(|&t| f(t)).collect());
        }
        let states = integrators::rk4_states_at(self, ts, dt_max)?;
        Ok(states
            .iter()
            .map(|s| self.outputs_from_state(s))
            .collect())
    }
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::config(format!("{what} must be finite")))
    }
}

/// First-order linear equation with sinusoidal forcing:
/// `dy/dt + 0.1·t - sin(πt/2) = 0` on `[0, 30]`, `y(0) = 1`.
///
/// The closed form `y(t) = 1 + (2/π)(1 - cos(πt/2)) - 0.05·t²` is used as
/// the oracle.
pub fn tutorial() -> OdeProblem {
    OdeProblem {
        name: "tutorial".into(),
        dim: 1,
        state_dim: 1,
        domain: (0.0, 30.0),
        initial_state: vec![1.0],
        params: vec![],
        rhs: Box::new(|t, _y, out| {
            out[0] = (PI * t / 2.0).sin() - 0.1 * t;
        }),
        residual: Box::new(|_tape, t, jets| {
            vec![jets[0].du.add_const(0.1 * t - (PI * t / 2.0).sin())]
        }),
        energy: None,
        closed_form: Some(Box::new(|t| {
            vec![1.0 + (2.0 / PI) * (1.0 - (PI * t / 2.0).cos()) - 0.05 * t * t]
        })),
    }
}

/// Harmonic oscillator `d²y/dt² + ω₀²·y = 0` on `[0, 1]`,
/// `y(0) = 1`, `y'(0) = 0`; exact solution `cos(ω₀t)`.
pub fn harmonic(omega0: f64) -> OdeProblem {
    let w2 = omega0 * omega0;
    OdeProblem {
        name: "harmonic".into(),
        dim: 1,
        state_dim: 2,
        domain: (0.0, 1.0),
        initial_state: vec![1.0, 0.0],
        params: vec![("omega0", omega0)],
        rhs: Box::new(move |_t, y, out| {
            out[0] = y[1];
            out[1] = -(w2 * y[0]);
        }),
        residual: Box::new(move |_tape, _t, jets| {
            vec![jets[0].ddu + jets[0].u.mul_const(w2)]
        }),
        energy: Some(EnergyFns {
            jets: Box::new(move |_tape, jets| {
                jets[0].du.square().mul_const(0.5) + jets[0].u.square().mul_const(0.5 * w2)
            }),
            state: Box::new(move |s| (s[1] * s[1]) * 0.5 + (s[0] * s[0]) * (0.5 * w2)),
            reference: (0.0_f64) * 0.5 + 1.0 * (0.5 * w2),
        }),
        closed_form: Some(Box::new(move |t| vec![(omega0 * t).cos()])),
    }
}

/// Nonlinear pendulum `d²y/dt² + ω₀²·sin(y) = 0` on `[0, 1]`,
/// `y(0) = 0.1`, `y'(0) = 40`.
pub fn pendulum_scalar(omega0: f64) -> OdeProblem {
    let w2 = omega0 * omega0;
    let y0 = 0.1;
    let v0 = 40.0;
    OdeProblem {
        name: "pendulum".into(),
        dim: 1,
        state_dim: 2,
        domain: (0.0, 1.0),
        initial_state: vec![y0, v0],
        params: vec![("omega0", omega0)],
        rhs: Box::new(move |_t, y, out| {
            out[0] = y[1];
            out[1] = -(w2 * y[0].sin());
        }),
        residual: Box::new(move |_tape, _t, jets| {
            vec![jets[0].ddu + jets[0].u.sin().mul_const(w2)]
        }),
        energy: Some(EnergyFns {
            jets: Box::new(move |_tape, jets| {
                jets[0].du.square().mul_const(0.5) + jets[0].u.cos().mul_const(-w2)
            }),
            state: Box::new(move |s| (s[1] * s[1]) * 0.5 + s[0].cos() * (-w2)),
            reference: (v0 * v0) * 0.5 + y0.cos() * (-w2),
        }),
        closed_form: None,
    }
}

/// The pendulum as a two-equation system over `(y₁, y₂)` where
/// `y₂ = (dy/dt)/ω₀`: `dy₁/dt - ω₀·y₂ = 0`, `dy₂/dt + ω₀·sin(y₁) = 0`.
///
/// Normalizing the derivative by `ω₀` keeps both variables at the same
/// order of magnitude so a single two-output network serves both.
pub fn pendulum_system(omega0: f64) -> OdeProblem {
    let w2 = omega0 * omega0;
    let y0 = 0.1;
    let v0 = 40.0;
    OdeProblem {
        name: "pendulum-system".into(),
        dim: 2,
        state_dim: 2,
        domain: (0.0, 1.0),
        initial_state: vec![y0, v0 / omega0],
        params: vec![("omega0", omega0)],
        rhs: Box::new(move |_t, y, out| {
            out[0] = omega0 * y[1];
            out[1] = -(omega0 * y[0].sin());
        }),
        residual: Box::new(move |_tape, _t, jets| {
            vec![
                jets[0].du - jets[1].u.mul_const(omega0),
                jets[1].du + jets[0].u.sin().mul_const(omega0),
            ]
        }),
        energy: Some(EnergyFns {
            jets: Box::new(move |_tape, jets| {
                (jets[1].u.square().mul_const(0.5) - jets[0].u.cos()).mul_const(w2)
            }),
            state: Box::new(move |s| ((s[1] * s[1]) * 0.5 - s[0].cos()) * w2),
            reference: (((v0 / omega0) * (v0 / omega0)) * 0.5 - y0.cos()) * w2,
        }),
        closed_form: None,
    }
}

/// Anharmonic oscillator `d²y/dt² + ω₀²·y³ = 0` with quartic potential,
/// `y(0) = y0`, `y'(0) = 0` on `[0, 1]`.
pub fn anharmonic(omega0: f64, y0: f64) -> OdeProblem {
    let w2 = omega0 * omega0;
    OdeProblem {
        name: "anharmonic".into(),
        dim: 1,
        state_dim: 2,
        domain: (0.0, 1.0),
        initial_state: vec![y0, 0.0],
        params: vec![("omega0", omega0), ("y0", y0)],
        rhs: Box::new(move |_t, y, out| {
            out[0] = y[1];
            out[1] = -(w2 * y[0] * y[0] * y[0]);
        }),
        residual: Box::new(move |_tape, _t, jets| {
            vec![jets[0].ddu + jets[0].u.powi(3).mul_const(w2)]
        }),
        energy: Some(EnergyFns {
            jets: Box::new(move |_tape, jets| {
                jets[0].du.square().mul_const(0.5) + jets[0].u.powi(4).mul_const(0.25 * w2)
            }),
            state: Box::new(move |s| (s[1] * s[1]) * 0.5 + powi_det(s[0], 4) * (0.25 * w2)),
            reference: 0.0 + powi_det(y0, 4) * (0.25 * w2),
        }),
        closed_form: None,
    }
}

/// Double-well oscillator as a system: `dy₁/dt - ω₀·y₂ = 0`,
/// `dy₂/dt + ω₀·(y₁³ - y₁) = 0`, with `y₁(0) = y0`, `y₂(0) = 0`.
///
/// The scalar form `d²y/dt² + ω₀²(y³ - y) = 0` is integrated only through
/// this system, mirroring how the experiments impose the two initial
/// conditions.
pub fn double_well_system(omega0: f64, y0: f64) -> OdeProblem {
    let w2 = omega0 * omega0;
    OdeProblem {
        name: "double-well".into(),
        dim: 2,
        state_dim: 2,
        domain: (0.0, 1.0),
        initial_state: vec![y0, 0.0],
        params: vec![("omega0", omega0), ("y0", y0)],
        rhs: Box::new(move |_t, y, out| {
            out[0] = omega0 * y[1];
            out[1] = -(omega0 * (y[0] * y[0] * y[0] - y[0]));
        }),
        residual: Box::new(move |_tape, _t, jets| {
            vec![
                jets[0].du - jets[1].u.mul_const(omega0),
                jets[1].du + (jets[0].u.powi(3) - jets[0].u).mul_const(omega0),
            ]
        }),
        energy: Some(EnergyFns {
            jets: Box::new(move |_tape, jets| {
                ((jets[1].u.square().mul_const(0.5) + jets[0].u.powi(4).mul_const(0.25))
                    - jets[0].u.square().mul_const(0.5))
                .mul_const(w2)
            }),
            state: Box::new(move |s| {
                (((s[1] * s[1]) * 0.5 + powi_det(s[0], 4) * 0.25) - (s[0] * s[0]) * 0.5) * w2
            }),
            reference: ((0.0 + powi_det(y0, 4) * 0.25) - (y0 * y0) * 0.5) * w2,
        }),
        closed_form: None,
    }
}

/// Van der Pol oscillator
/// `d²y/dt² + ω₀²·y - ε·ω₀·(1 - y²)·dy/dt = 0`, `y(0) = 1`, `y'(0) = 0`.
///
/// Non-conservative, so there is no energy function. The harmonic
/// oscillator is recovered for `ε = 0`.
pub fn van_der_pol(omega0: f64, epsilon: f64, t_end: f64) -> OdeProblem {
    let w2 = omega0 * omega0;
    OdeProblem {
        name: "vdp".into(),
        dim: 1,
        state_dim: 2,
        domain: (0.0, t_end),
        initial_state: vec![1.0, 0.0],
        params: vec![("omega0", omega0), ("epsilon", epsilon)],
        rhs: Box::new(move |_t, y, out| {
            out[0] = y[1];
            out[1] = -(w2 * y[0]) + epsilon * omega0 * (1.0 - y[0] * y[0]) * y[1];
        }),
        residual: Box::new(move |_tape, _t, jets| {
            let damp = jets[0].u.square().mul_const(-1.0).add_const(1.0);
            vec![
                jets[0].ddu + jets[0].u.mul_const(w2)
                    - (damp * jets[0].du).mul_const(epsilon * omega0),
            ]
        }),
        energy: None,
        closed_form: None,
    }
}

/// Optional parameter overrides accepted by the problem registry.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProblemParams {
    pub omega0: Option<f64>,
    pub epsilon: Option<f64>,
    pub y0: Option<f64>,
    pub t_end: Option<f64>,
}

/// Names accepted by [`by_name`].
pub const PROBLEM_NAMES: [&str; 7] = [
    "tutorial",
    "harmonic",
    "pendulum",
    "pendulum-system",
    "anharmonic",
    "double-well",
    "vdp",
];

/// Build a registered problem by name, applying parameter overrides.
///
/// Parameters that a problem does not accept are rejected rather than
/// silently ignored.
pub fn by_name(name: &str, params: ProblemParams) -> Result<OdeProblem> {
    let reject = |what: &str, set: bool| {
        if set {
            Err(Error::config(format!(
                "problem `{name}` does not accept parameter `{what}`"
            )))
        } else {
            Ok(())
        }
    };
    let problem = match name {
        "tutorial" => {
            reject("omega0", params.omega0.is_some())?;
            reject("epsilon", params.epsilon.is_some())?;
            reject("y0", params.y0.is_some())?;
            reject("t_end", params.t_end.is_some())?;
            tutorial()
        }
        "harmonic" => {
            reject("epsilon", params.epsilon.is_some())?;
            reject("y0", params.y0.is_some())?;
            reject("t_end", params.t_end.is_some())?;
            harmonic(params.omega0.unwrap_or(20.0))
        }
        "pendulum" => {
            reject("epsilon", params.epsilon.is_some())?;
            reject("y0", params.y0.is_some())?;
            reject("t_end", params.t_end.is_some())?;
            pendulum_scalar(params.omega0.unwrap_or(25.0))
        }
        "pendulum-system" => {
            reject("epsilon", params.epsilon.is_some())?;
            reject("y0", params.y0.is_some())?;
            reject("t_end", params.t_end.is_some())?;
            pendulum_system(params.omega0.unwrap_or(25.0))
        }
        "anharmonic" => {
            reject("epsilon", params.epsilon.is_some())?;
            reject("t_end", params.t_end.is_some())?;
            anharmonic(params.omega0.unwrap_or(15.5), params.y0.unwrap_or(1.5))
        }
        "double-well" => {
            reject("epsilon", params.epsilon.is_some())?;
            reject("t_end", params.t_end.is_some())?;
            double_well_system(params.omega0.unwrap_or(12.0), params.y0.unwrap_or(1.8))
        }
        "vdp" => {
            reject("y0", params.y0.is_some())?;
            van_der_pol(
                params.omega0.unwrap_or(15.0),
                params.epsilon.unwrap_or(1.0),
                params.t_end.unwrap_or(1.5),
            )
        }
        other => {
            return Err(Error::UnknownProblem(
                other.to_string(),
                PROBLEM_NAMES.join(", "),
            ))
        }
    };
    check_finite(&problem.initial_state, "initial state")?;
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::rel_err;
    use crate::integrators::{rk4_integrate, rk4_states_at};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Jets built from known values of (y, dy/dt, d²y/dt²): the analytic
    /// route around the network, for residual checks.
    fn analytic_jets<'t>(tape: &'t Tape, rows: &[[f64; 3]]) -> Vec<Jet2<'t>> {
        rows.iter()
            .map(|r| Jet2 {
                u: tape.leaf(r[0]),
                du: tape.leaf(r[1]),
                ddu: tape.leaf(r[2]),
            })
            .collect()
    }

    /// Jets built from an oracle state and the problem's own right-hand
    /// side, so the residual function is checked against the integration
    /// form of the same equation.
    fn jets_from_state<'t>(p: &OdeProblem, tape: &'t Tape, t: f64, state: &[f64]) -> Vec<Jet2<'t>> {
        let mut deriv = vec![0.0; p.state_dim()];
        p.rhs(t, state, &mut deriv);
        if p.dim() == 1 && p.state_dim() == 2 {
            analytic_jets(tape, &[[state[0], state[1], deriv[1]]])
        } else if p.dim() == 1 {
            analytic_jets(tape, &[[state[0], deriv[0], 0.0]])
        } else {
            analytic_jets(
                tape,
                &[
                    [state[0], deriv[0], 0.0],
                    [state[1], deriv[1], 0.0],
                ],
            )
        }
    }

    fn max_residual_on_oracle(p: &OdeProblem, n_points: usize) -> f64 {
        let (t0, t1) = p.domain();
        let ts: Vec<f64> = (0..n_points)
            .map(|i| t0 + (t1 - t0) * i as f64 / (n_points - 1) as f64)
            .collect();
        let states = rk4_states_at(p, &ts, 1e-4).unwrap();
        let mut worst: f64 = 0.0;
        for (t, s) in ts.iter().zip(&states) {
            let tape = Tape::new();
            let jets = jets_from_state(p, &tape, *t, s);
            for r in p.residual(&tape, *t, &jets) {
                worst = worst.max(r.value().abs());
            }
        }
        worst
    }

    #[test]
    fn tutorial_exact_solution_satisfies_equation() {
        let p = tutorial();
        // Closed-form value at the right end of the domain.
        let y30 = p.closed_form(30.0).unwrap()[0];
        assert!((y30 - (1.0 + 4.0 / PI - 45.0)).abs() < 1e-12);
        // Pointwise residual of the closed form with analytic derivative.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(0.0..30.0);
            let y = p.closed_form(t).unwrap()[0];
            let dy = (PI * t / 2.0).sin() - 0.1 * t;
            let tape = Tape::new();
            let jets = analytic_jets(&tape, &[[y, dy, 0.0]]);
            let r = p.residual(&tape, t, &jets)[0].value();
            assert!(r.abs() <= 1e-10, "residual {r} at t={t}");
        }
    }

    #[test]
    fn tutorial_residual_of_constant_one_at_origin_is_zero() {
        let p = tutorial();
        let tape = Tape::new();
        let jets = analytic_jets(&tape, &[[1.0, 0.0, 0.0]]);
        assert_eq!(p.residual(&tape, 0.0, &jets)[0].value(), 0.0);
    }

    #[test]
    fn tutorial_closed_form_cross_checked_by_rk4() {
        let p = tutorial();
        let ts: Vec<f64> = (0..=300).map(|i| i as f64 * 0.1).collect();
        let states = rk4_states_at(&p, &ts, 1e-4).unwrap();
        for (t, s) in ts.iter().zip(&states) {
            let exact = p.closed_form(*t).unwrap()[0];
            assert!((s[0] - exact).abs() <= 1e-6, "t={t}");
        }
    }

    #[test]
    fn harmonic_initial_value_and_exact_residual() {
        let p = harmonic(20.0);
        assert_eq!(p.closed_form(0.0).unwrap()[0], 1.0);
        let w0 = 20.0_f64;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(0.0..1.0);
            let y = (w0 * t).cos();
            let dy = -w0 * (w0 * t).sin();
            let ddy = -(w0 * w0) * (w0 * t).cos();
            let tape = Tape::new();
            let jets = analytic_jets(&tape, &[[y, dy, ddy]]);
            let r = p.residual(&tape, t, &jets)[0].value();
            assert!(r.abs() <= 1e-10, "residual {r} at t={t}");
        }
    }

    #[test]
    fn harmonic_energy_constant_along_exact_solution() {
        let p = harmonic(20.0);
        let e0 = p.energy_reference().unwrap();
        assert!((e0 - 0.5 * 400.0).abs() < 1e-12);
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let state = [(20.0 * t).cos(), -20.0 * (20.0 * t).sin()];
            let e = p.energy_state(&state).unwrap();
            assert!(rel_err(e, e0) < 1e-13);
        }
    }

    #[test]
    fn pendulum_system_initial_condition_is_normalized_derivative() {
        let p = pendulum_system(25.0);
        assert_eq!(p.initial_state()[1], 40.0 / 25.0);
        assert_eq!(p.initial_state()[1], 1.6);
    }

    #[test]
    fn pendulum_system_energy_reference_matches_hand_value() {
        let p = pendulum_system(25.0);
        let e0 = p.energy_reference().unwrap();
        assert!((e0 - 625.0 * (1.28 - 0.1f64.cos())).abs() < 1e-9);
    }

    #[test]
    fn pendulum_small_angle_limit_matches_cosine() {
        let y0 = 1e-4;
        let w0 = 25.0;
        let mut p = pendulum_scalar(w0);
        // Rebuild with the small-angle initial state through the registry
        // path is not exposed; patch the state directly for this check.
        p.initial_state = vec![y0, 0.0];
        p.energy = None;
        let traj = rk4_integrate(&p, 1e-4).unwrap();
        let mut worst: f64 = 0.0;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let linear = y0 * (w0 * t).cos();
            worst = worst.max((s[0] - linear).abs() / y0);
        }
        assert!(worst <= 1e-4, "relative deviation {worst}");
    }

    #[test]
    fn pendulum_scalar_and_system_trajectories_agree() {
        let scalar = pendulum_scalar(25.0);
        let system = pendulum_system(25.0);
        let a = rk4_integrate(&scalar, 1e-5).unwrap();
        let b = rk4_integrate(&system, 1e-5).unwrap();
        assert_eq!(a.times.len(), b.times.len());
        let mut worst: f64 = 0.0;
        for (sa, sb) in a.states.iter().zip(&b.states) {
            worst = worst.max((sa[0] - sb[0]).abs());
        }
        assert!(worst <= 1e-8, "max |y - y1| = {worst}");
    }

    #[test]
    fn double_well_scalar_and_system_trajectories_agree() {
        // Scalar form of the double-well equation, built ad hoc for the
        // equivalence check only.
        let w0 = 12.0;
        let scalar = OdeProblem {
            name: "double-well-scalar".into(),
            dim: 1,
            state_dim: 2,
            domain: (0.0, 1.0),
            initial_state: vec![1.8, 0.0],
            params: vec![],
            rhs: Box::new(move |_t, y, out| {
                out[0] = y[1];
                out[1] = -(w0 * w0 * (y[0] * y[0] * y[0] - y[0]));
            }),
            residual: Box::new(|_tape, _t, _jets| vec![]),
            energy: None,
            closed_form: None,
        };
        let system = double_well_system(w0, 1.8);
        let a = rk4_integrate(&scalar, 1e-5).unwrap();
        let b = rk4_integrate(&system, 1e-5).unwrap();
        let mut worst: f64 = 0.0;
        for (sa, sb) in a.states.iter().zip(&b.states) {
            worst = worst.max((sa[0] - sb[0]).abs());
        }
        assert!(worst <= 1e-8, "max |y - y1| = {worst}");
    }

    #[test]
    fn anharmonic_oracle_residual_and_equilibrium() {
        let p = anharmonic(15.5, 1.5);
        assert!(max_residual_on_oracle(&p, 200) <= 1e-6);
        let tape = Tape::new();
        let jets = analytic_jets(&tape, &[[0.0, 0.0, 0.0]]);
        assert_eq!(p.residual(&tape, 0.3, &jets)[0].value(), 0.0);
    }

    #[test]
    fn anharmonic_rk4_energy_drift_is_tiny() {
        let p = anharmonic(15.5, 1.5);
        let e0 = p.energy_reference().unwrap();
        let traj = rk4_integrate(&p, 1e-4).unwrap();
        let mut drift: f64 = 0.0;
        for s in &traj.states {
            let e = p.energy_state(s).unwrap();
            drift = drift.max((e - e0).abs() / e0.abs());
        }
        assert!(drift <= 1e-8, "relative drift {drift}");
    }

    #[test]
    fn double_well_equilibria_and_energy_values() {
        let p = double_well_system(12.0, 1.8);
        for y in [-1.0, 0.0, 1.0] {
            let tape = Tape::new();
            let jets = analytic_jets(&tape, &[[y, 0.0, 0.0], [0.0, 0.0, 0.0]]);
            for r in p.residual(&tape, 0.0, &jets) {
                assert_eq!(r.value(), 0.0, "equilibrium y1={y}");
            }
        }
        let e0 = p.energy_reference().unwrap();
        assert!((e0 - 144.0 * (2.6244 - 1.62)).abs() < 1e-9);
        // Separatrix: potential at y0 = sqrt(2) equals the potential at 0.
        let sep = 2.0_f64.sqrt();
        assert!((sep.powi(4) / 4.0 - sep * sep / 2.0).abs() < 1e-15);
    }

    #[test]
    fn vdp_with_zero_epsilon_recovers_harmonic() {
        let vdp = van_der_pol(15.0, 0.0, 1.0);
        let harm = harmonic(15.0);
        let a = rk4_integrate(&vdp, 1e-4).unwrap();
        let b = rk4_integrate(&harm, 1e-4).unwrap();
        for (sa, sb) in a.states.iter().zip(&b.states) {
            assert!((sa[0] - sb[0]).abs() <= 1e-12);
            assert!((sa[1] - sb[1]).abs() <= 1e-12);
        }
    }

    #[test]
    fn vdp_limit_cycle_amplitude_near_two() {
        let p = van_der_pol(15.0, 5.0, 3.0);
        let traj = rk4_integrate(&p, 1e-4).unwrap();
        let half = traj.states.len() / 2;
        let amp = traj.states[half..]
            .iter()
            .map(|s| s[0].abs())
            .fold(0.0, f64::max);
        assert!((amp - 2.0).abs() / 2.0 <= 0.10, "amplitude {amp}");
    }

    #[test]
    fn vdp_oracle_residual_small() {
        let p = van_der_pol(15.0, 1.0, 1.5);
        assert!(max_residual_on_oracle(&p, 200) <= 1e-5);
    }

    #[test]
    fn conservative_problems_conserve_energy_under_rk4() {
        for p in [
            harmonic(20.0),
            pendulum_scalar(25.0),
            pendulum_system(25.0),
            anharmonic(15.5, 1.5),
            double_well_system(12.0, 1.8),
            double_well_system(12.0, 1.38),
        ] {
            let e0 = p.energy_reference().unwrap();
            let traj = rk4_integrate(&p, 1e-4).unwrap();
            let scale = e0.abs().max(1.0);
            let mut drift: f64 = 0.0;
            for s in &traj.states {
                drift = drift.max((p.energy_state(s).unwrap() - e0).abs() / scale);
            }
            assert!(drift <= 1e-7, "{}: relative drift {drift}", p.name());
        }
    }

    #[test]
    fn initial_conditions_are_residual_consistent() {
        for p in [
            tutorial(),
            harmonic(20.0),
            pendulum_scalar(25.0),
            pendulum_system(25.0),
            anharmonic(15.5, 1.5),
            double_well_system(12.0, 1.8),
            van_der_pol(15.0, 1.0, 1.5),
        ] {
            let (t0, _) = p.domain();
            let state = p.initial_state().to_vec();
            let tape = Tape::new();
            let jets = jets_from_state(&p, &tape, t0, &state);
            for r in p.residual(&tape, t0, &jets) {
                assert!(r.value().abs() <= 1e-10, "{} at t0: {}", p.name(), r.value());
            }
        }
    }

    #[test]
    fn registry_resolves_all_names_and_rejects_unknown() {
        for name in PROBLEM_NAMES {
            let p = by_name(name, ProblemParams::default()).unwrap();
            assert_eq!(p.name(), name);
        }
        assert!(by_name("nosuch", ProblemParams::default()).is_err());
        // Inapplicable parameters are rejected.
        let bad = by_name(
            "harmonic",
            ProblemParams {
                epsilon: Some(1.0),
                ..Default::default()
            },
        );
        assert!(bad.is_err());
    }

    #[test]
    fn exact_solutions_have_negligible_mean_square_residual() {
        // Mean-square residual over 1000 uniform points for every problem
        // with a closed form, using analytic derivatives of that form.
        let p = tutorial();
        let mut acc = 0.0;
        for i in 0..1000 {
            let t = 30.0 * i as f64 / 999.0;
            let y = p.closed_form(t).unwrap()[0];
            let dy = (PI * t / 2.0).sin() - 0.1 * t;
            let tape = Tape::new();
            let jets = analytic_jets(&tape, &[[y, dy, 0.0]]);
            acc += p.residual(&tape, t, &jets)[0].value().powi(2);
        }
        assert!(acc / 1000.0 <= 1e-12);

        let w0 = 20.0_f64;
        let p = harmonic(w0);
        let mut acc = 0.0;
        for i in 0..1000 {
            let t = i as f64 / 999.0;
            let y = (w0 * t).cos();
            let dy = -w0 * (w0 * t).sin();
            let ddy = -(w0 * w0) * (w0 * t).cos();
            let tape = Tape::new();
            let jets = analytic_jets(&tape, &[[y, dy, ddy]]);
            acc += p.residual(&tape, t, &jets)[0].value().powi(2);
        }
        assert!(acc / 1000.0 <= 1e-12);
    }
}
