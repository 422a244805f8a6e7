//! A constant fitness advantage makes one brand replace the other along a
//! logistic path: the log sales ratio is a straight line in time.
//!
//! ```bash
//! cargo run --release --example logistic_substitution
//! ```

use evomarket::market::{new_scenario, BrandState, MarketParams, Snapshot, Trajectory};
use evomarket::replicator::{replicator_step, substitution_analysis};

fn main() {
    let theta = 0.05; // fitness advantage of brand 0
    let epsilon = 0.02;
    let params = MarketParams {
        market_potential: 1e6,
        mean_amount: 1.0,
        alpha: 2.0,
        d_max: 1.0,
        mu_nat: 0.5,
        epsilon,
        psi0: 1.0,
        noise_d: 0.0,
        response_b: 0.1,
        rng_seed: 1,
    };
    let brands = vec![
        BrandState::new(0.1, 1.0, 1.0, 0.2, 1.0), // starts with a 10% share
        BrandState::new(0.9, 1.0, 1.0, 0.2, 1.0),
    ];
    let mut state = new_scenario(&params, brands, 1.0).unwrap();
    state.brands[0].fitness = theta;
    state.brands[1].fitness = 0.0;

    let dt_tau = 1e-3;
    let mut trajectory = Trajectory::default();
    let mut record = |state: &evomarket::MarketState, tau: f64| {
        trajectory.push(Snapshot {
            time_long: tau / epsilon,
            time_short: tau,
            mean_price: state.mean_price,
            mean_fitness: state.mean_fitness,
            mean_gamma: state.mean_gamma,
            regime: state.regime,
            total_sales: state.total_sales(),
            total_supply: state.total_supply(),
            demand_rate: 0.0,
            consumer_density: state.consumer_density,
            adopter_fraction: 1.0,
            price_variance: 0.0,
            brand_sales: state.brands.iter().map(|b| b.sales).collect(),
            brand_prices: state.brands.iter().map(|b| b.price).collect(),
            brand_fitness: state.brands.iter().map(|b| b.fitness).collect(),
        });
    };
    record(&state, 0.0);
    for step in 1..=100_000usize {
        replicator_step(&mut state, dt_tau).unwrap();
        if step % 1000 == 0 {
            record(&state, step as f64 * dt_tau);
        }
    }

    let fit = substitution_analysis(&trajectory, 0, 1).unwrap();
    println!("constant fitness advantage {theta}, time-scale ratio {epsilon}");
    println!(
        "log share ratio against long time: slope {:.6} (theory theta * epsilon = {}), r^2 {:.6}",
        fit.slope,
        theta * epsilon,
        fit.r_squared
    );
    println!("\nhalf-log substitution diagram (market share of the fitter brand):");
    for snap in trajectory.snapshots.iter().step_by(10) {
        let share = snap.brand_sales[0] / snap.total_sales;
        let bar = "#".repeat((share * 50.0) as usize);
        println!("  t {:>6.0}  share {:.3}  {bar}", snap.time_long, share);
    }
}
