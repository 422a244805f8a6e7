//! The long-scale mean-price law: explicit Euler against the closed form,
//! then a full coupled run whose fitted decay rate is compared with the
//! rate implied by the measured price variance.
//!
//! ```bash
//! cargo run --release --example mean_price_decay
//! ```

use evomarket::price::{
    decline_rate, mean_price_closed_form, mean_price_ode_step, MeanPriceCoeffs,
};
use evomarket::scenario::ScenarioFile;
use evomarket::sim::run_scenario;

fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let sxx: f64 = x.iter().map(|a| (a - xm) * (a - xm)).sum();
    sxy / sxx
}

fn main() {
    // deterministic check: Euler vs closed form
    let coeffs = MeanPriceCoeffs {
        epsilon: 0.02,
        mean_preference: 1.0,
        mean_gamma: 0.25,
        psi0: 1.0,
        alpha: 2.0,
        price_variance: 0.05,
    };
    let a = decline_rate(&coeffs);
    let mu_nat = 0.5;
    let mut mu = 1.2;
    let dt = 1e-3;
    let mut worst: f64 = 0.0;
    for k in 1..=(50.0 / dt) as usize {
        mu = mean_price_ode_step(mu, mu_nat, &coeffs, dt);
        let exact = mean_price_closed_form(k as f64 * dt, 0.7, a, mu_nat);
        worst = worst.max((mu - exact).abs() / exact);
    }
    println!("decline rate a = {a:.4e}; Euler vs closed form worst error {worst:.2e}");

    // stochastic check: the coupled loop decays at the rate set by the
    // live price variance it measures
    let text = r#"[params]
market_potential = 1000000.0
alpha = 2.0
d_max = 1.0
mu_nat = 0.5
epsilon = 0.2
psi0 = 1.0
noise_d = 0.01
response_b = 0.3
rng_seed = 5

[[brands]]
sales = 0.0875
price = 0.75
preference = 1.0
gamma = 0.4
inventory = 1.0

[run]
dt_tau = 0.02
dt_long = 0.4
horizon = 1670.0
snapshot_stride = 5
burn_in_short_steps = 5000
"#;
    let mut file = ScenarioFile::parse(text).unwrap();
    let brand = file.brands[0].clone();
    file.brands = vec![brand; 10];
    let scenario = file.validate().unwrap();
    let traj = run_scenario(&scenario, None).unwrap();

    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.time_long).collect();
    let logs: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|s| (s.mean_price - 0.5).ln())
        .collect();
    let fitted = -ols_slope(&times, &logs);
    let mean_var: f64 = traj
        .snapshots
        .iter()
        .skip(1)
        .map(|s| s.price_variance)
        .sum::<f64>()
        / (traj.snapshots.len() - 1) as f64;
    let implied = decline_rate(&MeanPriceCoeffs {
        epsilon: 0.2,
        mean_preference: 1.0,
        mean_gamma: 0.4,
        psi0: 1.0,
        alpha: 2.0,
        price_variance: mean_var,
    });
    println!("coupled run over t in [0, 1670], 10 brands:");
    println!("  mean measured price variance {mean_var:.4e}");
    println!("  fitted decay rate  {fitted:.4e}");
    println!("  implied decay rate {implied:.4e}");
    println!(
        "  start {:.4} -> end {:.4} (natural price 0.5)",
        traj.snapshots.first().unwrap().mean_price,
        traj.snapshots.last().unwrap().mean_price
    );
}
