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
                    last.mse.unwrap_or(f64::NAN), last.l_total, out.status,
                    t.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("{label} seed={seed}: error {e}"),
        }
    }
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "fig9b".into());
    let seeds: Vec<u64> = vec![0, 1, 2, 3, 4];

    match which.as_str() {
        "fig9b" => {
            let p = problems::harmonic(20.0);
            let base = TrainingConfig {
                n_data: 2, data_interval: Some((0.0, 0.05)), n_c: 40,
                eta: 3e-4, n_epochs: 54000,
                weights: LossWeights { w_f: 3e-4, w_e: 3e-4, ..Default::default() },
                network: MlpConfig::new(3, 32, 1), ..Default::default()
            };
            run("fig9b-energy", &p, &base, &seeds);
            let mut noe = base.clone();
            noe.weights.w_e = 0.0;
            run("fig9b-no-energy", &p, &noe, &seeds);
        }
        "fig10" => {
            let p = problems::pendulum_scalar(25.0);
            let base = TrainingConfig {
                n_data: 1, n_c: 40, eta: 1e-3, n_epochs: 72000,
                weights: LossWeights { w_f: 3e-6, w_e: 3e-7, ..Default::default() },
                network: MlpConfig::new(4, 32, 1), ..Default::default()
            };
            run("fig10-4layer", &p, &base, &seeds);
            let mut l3 = base.clone();
            l3.network = MlpConfig::new(3, 32, 1);
            run("fig10-3layer", &p, &l3, &seeds);
        }
        "fig7" => {
            let p = problems::tutorial();
            let cfg = TrainingConfig {
                n_data: 1, n_c: 50, eta: 3e-3, n_epochs: 60000,
                weights: LossWeights { w_f: 6e-2, ..Default::default() },
                network: MlpConfig::new(4, 32, 1), ..Default::default()
            };
            run("fig7", &p, &cfg, &seeds);
        }
        "fig18" => {
            let mk = |eps: f64, n_data: usize, iv: Option<(f64,f64)>, n_c: usize, w_f: f64| {
                (problems::van_der_pol(15.0, eps, 1.5), TrainingConfig {
                    n_data, data_interval: iv, n_c, eta: 7e-4, n_epochs: 60000,
                    weights: LossWeights { w_f, ..Default::default() },
                    network: MlpConfig::new(3, 32, 1), ..Default::default()
                })
            };
            let (p, cfg) = mk(1.0/3.0, 3, Some((0.0, 0.15)), 48, 1e-4);
            run("fig18-eps03", &p, &cfg, &seeds);
            let (p, cfg) = mk(5.0, 3, Some((0.0, 0.15)), 48, 1e-5);
            run("fig18-eps5-sparse", &p, &cfg, &seeds);
            let (p, cfg) = mk(5.0, 20, None, 70, 1e-5);
            run("fig18-eps5", &p, &cfg, &seeds);
        }
        "fig7seeds" => {
            let p = problems::tutorial();
            let cfg = TrainingConfig {
                n_data: 1, n_c: 50, eta: 3e-3, n_epochs: 60000,
                weights: LossWeights { w_f: 6e-2, ..Default::default() },
                network: MlpConfig::new(4, 32, 1), ..Default::default()
            };
            run("fig7-acc", &p, &cfg, &[3, 4]);
        }
        "fig7eta" => {
            let p = problems::tutorial();
            for eta in [1e-3, 3e-4] {
                let cfg = TrainingConfig {
                    n_data: 1, n_c: 50, eta, n_epochs: 60000,
                    weights: LossWeights { w_f: 6e-2, ..Default::default() },
                    network: MlpConfig::new(4, 32, 1), ..Default::default()
                };
                run(&format!("fig7-eta{eta:.0e}"), &p, &cfg, &[0, 1]);
            }
        }
        "fig18mid" => {
            let (p, cfg) = (problems::van_der_pol(15.0, 1.0, 1.5), TrainingConfig {
                n_data: 3, data_interval: Some((0.0, 0.15)), n_c: 60, eta: 7e-4, n_epochs: 60000,
                weights: LossWeights { w_f: 1e-4, ..Default::default() },
                network: MlpConfig::new(3, 32, 1), ..Default::default()
            });
            run("fig18-eps1", &p, &cfg, &seeds);
        }
        other => eprintln!("unknown calibration {other}"),
    }
}
