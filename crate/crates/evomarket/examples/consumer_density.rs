//! The consumer-density balance relaxes to its stationary state at a rate
//! set by the preference-weighted inventory mass; in that state total sales
//! equal the demand rate.
//!
//! ```bash
//! cargo run --release --example consumer_density
//! ```

use evomarket::demand::{
    demand_rate, stationary_consumer_density, step_consumer_density, DemandParams,
};
use evomarket::market::{new_scenario, BrandState, MarketParams};

fn main() {
    let params = MarketParams {
        market_potential: 1e6,
        mean_amount: 1.0,
        alpha: 2.0,
        d_max: 1.0,
        mu_nat: 0.5,
        epsilon: 0.02,
        psi0: 1.0,
        noise_d: 0.0,
        response_b: 0.1,
        rng_seed: 1,
    };
    let brands = vec![
        BrandState::new(0.3, 0.8, 1.2, 0.2, 0.7),
        BrandState::new(0.4, 0.7, 0.9, 0.1, 0.5),
        BrandState::new(0.3, 0.75, 1.1, 0.3, 0.3),
    ];
    let state = new_scenario(&params, brands, 1.0).unwrap();
    let demand_params = DemandParams::from_market(&params);

    let mass = state.preference_inventory_mass();
    let stationary = stationary_consumer_density(&state, &demand_params).unwrap();
    let d = demand_rate(state.mean_price, 0.0, &demand_params, 1.0);
    println!("preference-inventory mass  {mass:.4}");
    println!("stationary density psi_S   {:.4}", stationary.psi_s);
    println!("implied normalizer psi_0   {:.4}", stationary.implied_psi0);
    println!("sales in the stationary state: {:.6} = demand rate {d:.6}", mass * stationary.psi_s);

    println!("\nrelaxation from psi = 0 (decay exponent should be -{mass:.4}):");
    let dt = 0.02;
    let mut psi: f64 = 0.0;
    let mut prev_dev = (psi - stationary.psi_s).abs();
    for k in 1..=200 {
        psi = step_consumer_density(psi, d, mass, dt);
        if k % 25 == 0 {
            let dev = (psi - stationary.psi_s).abs();
            let rate = (dev / prev_dev).ln() / (25.0 * dt);
            println!(
                "  tau {:>5.2}  psi {:.5}  |psi - psi_S| {:.2e}  measured exponent {rate:+.4}",
                k as f64 * dt,
                psi,
                dev
            );
            prev_dev = dev;
        }
    }
}
