use pinn_ode::network::MlpConfig;
use pinn_ode::problems;
use pinn_ode::training::{train, LossWeights, TrainingConfig};
use std::time::Instant;

fn run(label: &str, p: &pinn_ode::problems::OdeProblem, cfg: &TrainingConfig, seeds: &[u64]) {
    for &seed in seeds {
        let mut cfg = cfg.clone();
        cfg.seed = seed;
        let t = Instant::now();
        match train(p, &cfg) {
            Ok(out) => {
                let last = out.records.last().unwrap();
                println!(
                    "{label} seed={seed}: mse={:.3e} l_total={:.3e} status={:?} ({:.0}s)",
                    last.mse.unwrap_or(f64::NAN),
                    last.l_total,
                    out.status,
                    t.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("{label} seed={seed}: error {e}"),
        }
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("all");
    let seeds: Vec<u64> = vec![0, 1, 2];

    if which == "fig5" || which == "all" {
        let p = problems::tutorial();
        let cfg = TrainingConfig {
            n_data: 26, n_c: 50, eta: 3e-3, n_epochs: 40000,
            weights: LossWeights { w_f: 6e-2, ..Default::default() },
            network: MlpConfig::new(3, 32, 1),
            ..Default::default()
        };
        run("fig5-left", &p, &cfg, &seeds);
    }
    if which == "fig7" || which == "all" {
        let p = problems::tutorial();
        let cfg = TrainingConfig {
            n_data: 1, n_c: 50, eta: 3e-3, n_epochs: 60000,
            weights: LossWeights { w_f: 6e-2, ..Default::default() },
            network: MlpConfig::new(4, 32, 1),
            ..Default::default()
        };
        run("fig7", &p, &cfg, &seeds);
    }
    if which == "fig9" || which == "all" {
        let p = problems::harmonic(20.0);
        let base = TrainingConfig {
            n_data: 2, n_c: 40, eta: 3e-4, n_epochs: 54000,
            weights: LossWeights { w_f: 3e-4, w_e: 3e-4, ..Default::default() },
            network: MlpConfig::new(3, 32, 1),
            ..Default::default()
        };
        run("fig9-energy", &p, &base, &seeds);
        let mut noe = base.clone();
        noe.weights.w_e = 0.0;
        run("fig9-no-energy", &p, &noe, &seeds);
    }
}
