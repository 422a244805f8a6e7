//! A demand surge pushes the market to clearing: competition breaks down,
//! the regime flips to unstable, and an upward price jump restores excess
//! supply.
//!
//! ```bash
//! cargo run --release --example supply_shock
//! ```

use evomarket::market::Regime;
use evomarket::scenario::ScenarioFile;
use evomarket::sim::run_scenario;

fn main() {
    let text = r#"[params]
market_potential = 1000000.0
alpha = 2.0
d_max = 1.0
mu_nat = 0.5
epsilon = 0.02
psi0 = 1.0
noise_d = 0.005
response_b = 0.1
rng_seed = 11

[[brands]]
sales = 0.46
price = 0.71
preference = 1.0
gamma = 0.25
inventory = 1.0

[[brands]]
sales = 0.46
price = 0.69
preference = 1.0
gamma = 0.25
inventory = 1.0

[[shocks]]
kind = "demand"
time = 10.0
factor = 1.4

[run]
dt_tau = 0.05
dt_long = 1.0
horizon = 20.0
snapshot_stride = 1
jump_mean = 0.02
"#;
    let scenario = ScenarioFile::parse(text).unwrap().validate().unwrap();
    let trajectory = run_scenario(&scenario, None).unwrap();

    println!("demand surges by a factor 1.4 at t = 10:");
    println!(
        "{:>4} {:>10} {:>9} {:>9} {:>9} {:>9}",
        "t", "mean_price", "supply", "demand", "gamma", "regime"
    );
    for snap in &trajectory.snapshots {
        println!(
            "{:>4.0} {:>10.5} {:>9.4} {:>9.4} {:>+9.4} {:>9}",
            snap.time_long,
            snap.mean_price,
            snap.total_supply,
            snap.demand_rate,
            snap.mean_gamma,
            snap.regime.as_str()
        );
    }

    for jump in &trajectory.jumps {
        println!(
            "\nprice jump at t = {}: {:.4} -> {:.4} (size {:.4})",
            jump.time_long, jump.pre_price, jump.post_price, jump.jump
        );
    }
    let flips = trajectory
        .snapshots
        .iter()
        .filter(|s| s.regime == Regime::Unstable)
        .count();
    println!("unstable detections: {flips}; final regime: {:?}", trajectory
        .snapshots
        .last()
        .unwrap()
        .regime);
}
