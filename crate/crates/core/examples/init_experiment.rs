// Experiment: does bias-spread initialization fix the single-data-point
// tutorial fit on [0,30]?

use pinn_ode::autodiff::{Gradient, Tape};
use pinn_ode::network::{Mlp, MlpConfig};
use pinn_ode::problems;
use pinn_ode::training::{loss_data, loss_physics, AdamState, EvalGrid, N_EVAL};
use pinn_ode::integrators::{sample_collocation, sample_training_data};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn torch_style_params(cfg: MlpConfig, seed: u64) -> Vec<f64> {
    // U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for both weights and biases,
    // drawn in canonical order.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut widths = vec![cfg.input_dim];
    widths.extend(std::iter::repeat(cfg.neurons_per_layer).take(cfg.hidden_layers));
    widths.push(cfg.output_dim);
    let mut out = Vec::new();
    for w in widths.windows(2) {
        let limit = 1.0 / (w[0] as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit);
        for _ in 0..w[0] * w[1] + w[1] {
            out.push(dist.sample(&mut rng));
        }
    }
    out
}

fn main() {
    let p = problems::tutorial();
    let cfg = MlpConfig::new(4, 32, 1);
    let data = sample_training_data(&p, 1, (0.0, 30.0)).unwrap();
    let colloc = sample_collocation(50, (0.0, 30.0)).unwrap();
    let grid = EvalGrid::new(&p, N_EVAL, p.domain()).unwrap();

    for seed in [0u64, 1, 2] {
        let mut mlp = Mlp::init(cfg.with_seed(seed)).unwrap();
        mlp.params_assign(&torch_style_params(cfg, seed)).unwrap();
        let mut params = mlp.params_flatten();
        let mut adam = AdamState::new(params.len());
        let tape = Tape::new();
        let mut grad = Gradient::default();
        let mut gv = Vec::new();
        let mut last_loss = 0.0;
        for _epoch in 0..60000 {
            tape.clear();
            let vars = mlp.bind(&tape);
            let ld = loss_data(&vars, &data).unwrap();
            let lf = loss_physics(&vars, &p, &colloc).unwrap();
            let total = ld + lf.mul_const(6e-2);
            last_loss = total.value();
            tape.backward_into(total, &mut grad);
            vars.gradient(&grad, &mut gv);
            adam.step(&mut params, &gv, 3e-3).unwrap();
            mlp.params_assign(&params).unwrap();
        }
        println!("torch-init seed={seed}: mse={:.3e} loss={:.3e}", grid.mse(&mlp), last_loss);
    }
}
