use pinn_ode::network::MlpConfig;
use pinn_ode::problems;
use pinn_ode::training::{train, LossWeights, TrainingConfig};
use std::time::Instant;

fn main() {
    // fig5-left-like: tutorial, N_data=26, N_c=50, 3x32, w_f=6e-2
    let p = problems::tutorial();
    let cfg = TrainingConfig {
        n_data: 26,
        n_c: 50,
        eta: 3e-3,
        n_epochs: 2000,
        weights: LossWeights { w_f: 6e-2, ..Default::default() },
        network: MlpConfig::new(3, 32, 1),
        seed: 0,
        ..Default::default()
    };
    let t = Instant::now();
    let out = train(&p, &cfg).unwrap();
    let dt = t.elapsed();
    let last = out.records.last().unwrap();
    println!("3x32 jets(50)+data(26): {:?} total, {:.3} ms/epoch, l_total={:.4e} mse={:?}",
        dt, dt.as_secs_f64()*1e3/2000.0, last.l_total, last.mse);

    // fig7-like: 4x32, N_data=1, N_c=50
    let cfg2 = TrainingConfig {
        n_data: 1,
        n_c: 50,
        eta: 3e-3,
        n_epochs: 2000,
        weights: LossWeights { w_f: 6e-2, ..Default::default() },
        network: MlpConfig::new(4, 32, 1),
        seed: 0,
        ..Default::default()
    };
    let t = Instant::now();
    let out = train(&p, &cfg2).unwrap();
    let dt = t.elapsed();
    println!("4x32 jets(50)+data(1): {:.3} ms/epoch, mse={:?}",
        dt.as_secs_f64()*1e3/2000.0, out.records.last().unwrap().mse);

    // fig4-right-like: data only, N_data=61
    let cfg3 = TrainingConfig {
        n_data: 61,
        data_interval: Some((0.0, 18.0)),
        eta: 3e-3,
        n_epochs: 2000,
        network: MlpConfig::new(3, 32, 1),
        seed: 0,
        ..Default::default()
    };
    let t = Instant::now();
    let _ = train(&p, &cfg3).unwrap();
    println!("3x32 data-only(61): {:.3} ms/epoch", t.elapsed().as_secs_f64()*1e3/2000.0);
}
