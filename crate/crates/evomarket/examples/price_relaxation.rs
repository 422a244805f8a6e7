//! Sample the short-scale price process and compare its stationary
//! statistics with the double-exponential law: scale D/(2b), variance
//! D^2/(2 b^2), excess kurtosis 3, and a tent-shaped log histogram.
//!
//! ```bash
//! cargo run --release --example price_relaxation
//! ```

use evomarket::estimators::{fit_laplace, moments};
use evomarket::market::Regime;
use evomarket::price::{langevin_step, stationary_price_density, NoiseModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let noise = NoiseModel {
        amplitude_d: 0.02,
        response_b: 0.1,
    };
    let dt = 0.01;
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    let mut dmu = 0.0;
    for _ in 0..10_000 {
        dmu = langevin_step(dmu, 1.0, &noise, Regime::Stable, dt, &mut rng);
    }
    // record decorrelated samples: one every hundred steps
    let mut samples = Vec::with_capacity(200_000);
    for _ in 0..200_000 {
        for _ in 0..100 {
            dmu = langevin_step(dmu, 1.0, &noise, Regime::Stable, dt, &mut rng);
        }
        samples.push(dmu);
    }

    let m = moments(&samples);
    let mean_abs = samples.iter().map(|x| x.abs()).sum::<f64>() / samples.len() as f64;
    println!("stationary law of the price deviations ({} samples)", samples.len());
    println!(
        "  mean |dmu|     {:.5}  (theory D/(2b)      = {:.5})",
        mean_abs,
        noise.laplace_scale()
    );
    println!(
        "  variance       {:.5}  (theory D^2/(2b^2)  = {:.5})",
        m.variance,
        noise.stationary_variance()
    );
    println!("  excess kurtosis {:.3}  (double exponential = 3)", m.excess_kurtosis);

    let fit = fit_laplace(&samples).unwrap();
    println!(
        "  Laplace fit: location {:.5}, scale {:.5}, KS p = {:.3} ({})",
        fit.location,
        fit.scale,
        fit.ks_p_value,
        if fit.ks_pass { "pass" } else { "reject" }
    );
    if let Some(tent) = fit.tent_shape {
        println!(
            "  tent shape: left slope {:+.1}, right slope {:+.1} (log-density, {})",
            tent.left_slope,
            tent.right_slope,
            if tent.pass { "tent" } else { "not a tent" }
        );
    }

    println!("\nlog-density against theory:");
    for k in -4i32..=4 {
        let x = k as f64 * 0.05;
        let theory = stationary_price_density(x, &noise).unwrap();
        let half_bin = 0.005;
        let count = samples
            .iter()
            .filter(|s| (**s - x).abs() < half_bin)
            .count();
        let empirical = count as f64 / (samples.len() as f64 * 2.0 * half_bin);
        println!("  dmu {:+.2}: empirical {:>7.3}, theory {:>7.3}", x, empirical, theory);
    }
}
