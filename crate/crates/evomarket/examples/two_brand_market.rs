//! Build a two-brand market, run the coupled two-time-scale loop, and print
//! a compact view of the trajectory.
//!
//! ```bash
//! cargo run --release --example two_brand_market
//! ```

use evomarket::scenario::{default_scenario_text, ScenarioFile};
use evomarket::sim::run_scenario;
use evomarket::timeseries;

fn main() {
    let scenario = ScenarioFile::parse(default_scenario_text())
        .unwrap()
        .validate()
        .unwrap();
    println!(
        "market: {} brands, natural price {}, horizon {} long units (seed {})",
        scenario.brands.len(),
        scenario.params.mu_nat,
        scenario.run.horizon,
        scenario.params.rng_seed
    );

    let trajectory = run_scenario(&scenario, None).unwrap();
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>9} {:>8}",
        "t", "mean_price", "sales", "supply", "gamma", "regime"
    );
    for snap in trajectory.snapshots.iter().step_by(10) {
        println!(
            "{:>6.1} {:>10.5} {:>10.5} {:>10.5} {:>9.4} {:>8}",
            snap.time_long,
            snap.mean_price,
            snap.total_sales,
            snap.total_supply,
            snap.mean_gamma,
            snap.regime.as_str()
        );
    }

    let out = std::env::temp_dir().join("evomarket-two-brand.csv");
    timeseries::write_file(&trajectory, &out).unwrap();
    println!(
        "\nwrote {} snapshots to {} (jumps: {}, halt: {:?})",
        trajectory.snapshots.len(),
        out.display(),
        trajectory.jumps.len(),
        trajectory.halt
    );
}
