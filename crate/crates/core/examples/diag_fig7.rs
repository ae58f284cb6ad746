// Diagnose the single-data-point tutorial fit: dense residual vs
// collocation residual, and the learned curve vs the closed form.

use pinn_ode::autodiff::Tape;
use pinn_ode::network::MlpConfig;
use pinn_ode::problems;
use pinn_ode::training::{train, LossWeights, TrainingConfig};

fn main() {
    let p = problems::tutorial();
    let cfg = TrainingConfig {
        n_data: 1,
        n_c: 50,
        eta: 3e-3,
        n_epochs: 60000,
        weights: LossWeights { w_f: 6e-2, ..Default::default() },
        network: MlpConfig::new(4, 32, 1),
        seed: 0,
        ..Default::default()
    };
    let out = train(&p, &cfg).unwrap();
    let mlp = out.mlp;
    println!("final: {:?}", out.records.last().unwrap());

    // Sample y_hat vs oracle and the dense residual.
    println!("t, y_hat, y_exact, dense_residual");
    for i in 0..=60 {
        let t = 30.0 * i as f64 / 60.0;
        let tape = Tape::new();
        let jets = mlp.bind(&tape).forward_jet(t);
        let r = p.residual(&tape, t, &jets)[0].value();
        let y = mlp.eval(t)[0];
        let yx = p.closed_form(t).unwrap()[0];
        println!("{t:6.2} {y:10.3} {yx:10.3} {r:10.3e}");
    }
    // Residual at collocation points for comparison.
    let mut worst = 0.0f64;
    for k in 0..50 {
        let t = 30.0 * k as f64 / 49.0;
        let tape = Tape::new();
        let jets = mlp.bind(&tape).forward_jet(t);
        worst = worst.max(p.residual(&tape, t, &jets)[0].value().abs());
    }
    println!("worst residual at the 50 collocation points: {worst:.3e}");
}
