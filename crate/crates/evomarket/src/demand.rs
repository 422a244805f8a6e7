//! Demand side: the quadratic demand rate with its maximum at the natural
//! price, adopter growth, and the consumer-density balance that relaxes to
//! a stable stationary state.
//!
//! The demand rate is
//!
//! ```text
//! d(mu, t) = max(0, d_m(t) - alpha (mu - mu_nat)^2) * n
//! ```
//!
//! with `d_m(t) = d_max (1 + A sin(2 pi t / T))` an optional seasonal
//! modulation and `n` the adopter fraction. Negative values of the quadratic
//! are clamped to zero: the expansion is only meaningful near the natural
//! price and rates cannot be negative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{MarketParams, MarketState};

/// Demand-side parameters: the quadratic, adopter diffusion and seasonality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandParams {
    /// Demand curvature around the natural price (>= 0).
    pub alpha: f64,
    /// Maximum demand rate at the natural price (> 0).
    pub d_max: f64,
    /// Natural price (> 0).
    pub mu_nat: f64,
    /// Innovation coefficient of adopter diffusion (>= 0).
    pub bass_p: f64,
    /// Imitation coefficient of adopter diffusion (>= 0).
    pub bass_q: f64,
    /// Seasonal modulation amplitude of `d_max`, in [0, 1).
    pub seasonal_amplitude: f64,
    /// Seasonal period in long time (> 0).
    pub seasonal_period: f64,
}

impl DemandParams {
    pub fn from_market(params: &MarketParams) -> Self {
        DemandParams {
            alpha: params.alpha,
            d_max: params.d_max,
            mu_nat: params.mu_nat,
            bass_p: 0.0,
            bass_q: 0.0,
            seasonal_amplitude: 0.0,
            seasonal_period: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.seasonal_amplitude) {
            return Err(Error::invalid(
                "seasonal_amplitude",
                format!("must lie in [0, 1): {}", self.seasonal_amplitude),
            ));
        }
        if self.seasonal_period <= 0.0 {
            return Err(Error::invalid(
                "seasonal_period",
                format!("must be positive: {}", self.seasonal_period),
            ));
        }
        if self.bass_p < 0.0 || self.bass_q < 0.0 {
            return Err(Error::invalid(
                "bass_p/bass_q",
                "diffusion coefficients must be non-negative".to_string(),
            ));
        }
        if self.alpha < 0.0 || self.d_max <= 0.0 || self.mu_nat <= 0.0 {
            return Err(Error::invalid(
                "alpha/d_max/mu_nat",
                "demand quadratic parameters out of range".to_string(),
            ));
        }
        Ok(())
    }

    /// Seasonally modulated maximum demand at long time `t`.
    pub fn d_max_at(&self, t: f64) -> f64 {
        self.d_max
            * (1.0
                + self.seasonal_amplitude
                    * (2.0 * std::f64::consts::PI * t / self.seasonal_period).sin())
    }
}

/// Demand rate at a given mean price, long time and adopter fraction.
pub fn demand_rate(mean_price: f64, t: f64, params: &DemandParams, adopter_fraction: f64) -> f64 {
    let quad = params.d_max_at(t) - params.alpha * (mean_price - params.mu_nat).powi(2);
    quad.max(0.0) * adopter_fraction
}

/// Price derivative of the demand rate, `-2 alpha (mu - mu_nat) n`.
///
/// Defined only inside the unclamped quadratic region; the clamped branch is
/// flat at zero and the model assigns it no slope.
pub fn demand_slope(
    mean_price: f64,
    t: f64,
    params: &DemandParams,
    adopter_fraction: f64,
) -> Result<f64> {
    let quad = params.d_max_at(t) - params.alpha * (mean_price - params.mu_nat).powi(2);
    if quad <= 0.0 {
        return Err(Error::ClampedDemand { mean_price });
    }
    Ok(-2.0 * params.alpha * (mean_price - params.mu_nat) * adopter_fraction)
}

/// One explicit Euler step of adopter diffusion,
/// `dn/dt = (p + q n)(1 - n)`, clamped to [0, 1].
pub fn step_adopters(n: f64, dt: f64, params: &DemandParams) -> f64 {
    let next = n + dt * (params.bass_p + params.bass_q * n) * (1.0 - n);
    next.clamp(0.0, 1.0)
}

/// One explicit Euler step of the consumer-density balance,
/// `dpsi/dtau = d - psi * sum(eta_i x_i)`, clamped at zero.
///
/// The sink term is the total purchase flow written through the encounter
/// rule `y_i = eta_i x_i psi`, which makes the balance a linear relaxation
/// toward `psi_S = d / sum(eta_i x_i)`.
pub fn step_consumer_density(psi: f64, demand: f64, eta_inventory_mass: f64, dt_tau: f64) -> f64 {
    (psi + dt_tau * (demand - psi * eta_inventory_mass)).max(0.0)
}

/// Stationary consumer density and the implied normalizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryDensity {
    /// `psi_S = d / sum(eta_i x_i)`.
    pub psi_s: f64,
    /// Implied normalizer `1 / sum(eta_i x_i)`, for cross-checks against the
    /// scenario constant.
    pub implied_psi0: f64,
}

/// Stationary consumer density for a market state at its mean price.
pub fn stationary_consumer_density(
    state: &MarketState,
    params: &DemandParams,
) -> Result<StationaryDensity> {
    let mass = state.preference_inventory_mass();
    if mass <= 0.0 {
        return Err(Error::NoInventoryMass);
    }
    let d = demand_rate(
        state.mean_price,
        state.time_long,
        params,
        state.adopter_fraction,
    );
    Ok(StationaryDensity {
        psi_s: d / mass,
        implied_psi0: 1.0 / mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{new_scenario, BrandState, MarketParams};

    fn dp() -> DemandParams {
        DemandParams {
            alpha: 2.0,
            d_max: 1.0,
            mu_nat: 0.5,
            bass_p: 0.0,
            bass_q: 0.0,
            seasonal_amplitude: 0.0,
            seasonal_period: 1.0,
        }
    }

    #[test]
    fn demand_peaks_at_natural_price() {
        let p = dp();
        assert_eq!(demand_rate(0.5, 0.0, &p, 1.0), 1.0);
        // maximum over a price sweep sits at mu_nat
        let best = (0..200)
            .map(|i| 0.1 + i as f64 * 0.005)
            .max_by(|a, b| {
                demand_rate(*a, 0.0, &p, 1.0)
                    .partial_cmp(&demand_rate(*b, 0.0, &p, 1.0))
                    .unwrap()
            })
            .unwrap();
        assert!((best - 0.5).abs() < 0.005);
    }

    #[test]
    fn demand_by_hand_and_clamped() {
        let p = dp();
        // 1 - 2 * 0.25 = 0.5
        assert!((demand_rate(1.0, 0.0, &p, 1.0) - 0.5).abs() < 1e-15);
        // 1 - 2 * 2.25 = -3.5, clamped to 0
        assert_eq!(demand_rate(2.0, 0.0, &p, 1.0), 0.0);
    }

    #[test]
    fn demand_symmetric_about_natural_price() {
        let p = dp();
        for delta in [0.05, 0.1, 0.2, 0.3] {
            let lo = demand_rate(0.5 - delta, 0.0, &p, 1.0);
            let hi = demand_rate(0.5 + delta, 0.0, &p, 1.0);
            assert!((lo - hi).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_values() {
        let p = dp();
        assert_eq!(demand_slope(0.5, 0.0, &p, 1.0).unwrap(), 0.0);
        // alpha = 2, mu - mu_nat = 0.5: slope = -2
        assert!((demand_slope(1.0, 0.0, &p, 1.0).unwrap() + 2.0).abs() < 1e-15);
        assert!(demand_slope(0.3, 0.0, &p, 1.0).unwrap() > 0.0);
        assert!(matches!(
            demand_slope(2.0, 0.0, &p, 1.0),
            Err(Error::ClampedDemand { .. })
        ));
    }

    #[test]
    fn adopters_saturate_and_freeze() {
        let p = dp();
        assert_eq!(step_adopters(1.0, 1.0, &p), 1.0);
        assert_eq!(step_adopters(0.4, 1.0, &p), 0.4); // no diffusion coefficients
        let mut p2 = p;
        p2.bass_p = 0.03;
        assert!((step_adopters(0.0, 1.0, &p2) - 0.03).abs() < 1e-15);
        // monotone non-decreasing
        let mut n = 0.0;
        for _ in 0..100 {
            let next = step_adopters(n, 0.5, &p2);
            assert!(next >= n);
            n = next;
        }
    }

    #[test]
    fn consumer_density_stationary_point() {
        // psi_S = d / mass is a fixed point of the Euler step
        let d = 0.5;
        let mass = 2.0;
        let psi_s = d / mass;
        assert_eq!(step_consumer_density(psi_s, d, mass, 0.05), psi_s);
        // growth from zero: psi grows by d * dt
        let grown = step_consumer_density(0.0, 0.5, 1.0, 0.1);
        assert!((grown - 0.05).abs() < 1e-15);
    }

    #[test]
    fn consumer_density_relaxation_exponent() {
        // |psi - psi_S| decays like exp(-mass * tau)
        let d = 0.5;
        let mass = 1.3;
        let psi_s = d / mass;
        let dt = 0.01;
        let mut psi: f64 = 0.9;
        let mut log_dev = Vec::new();
        let mut times = Vec::new();
        for k in 0..400 {
            log_dev.push(((psi - psi_s).abs()).ln());
            times.push(k as f64 * dt);
            psi = step_consumer_density(psi, d, mass, dt);
        }
        let slope = ols_slope(&times, &log_dev);
        assert!(
            (slope + mass).abs() / mass < 0.05,
            "decay exponent {slope} vs {}",
            -mass
        );
    }

    fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let xm = x.iter().sum::<f64>() / n;
        let ym = y.iter().sum::<f64>() / n;
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
        let sxx: f64 = x.iter().map(|a| (a - xm) * (a - xm)).sum();
        sxy / sxx
    }

    #[test]
    fn stationary_density_values() {
        let params = MarketParams {
            market_potential: 1e6,
            mean_amount: 1.0,
            alpha: 0.0,
            d_max: 0.5,
            mu_nat: 0.5,
            epsilon: 0.02,
            psi0: 1.0,
            noise_d: 0.0,
            response_b: 0.1,
            rng_seed: 1,
        };
        // two brands, eta * x summing to 2.0
        let brands = vec![
            BrandState::new(1.0, 0.5, 1.0, 0.1, 1.0),
            BrandState::new(1.0, 0.5, 1.0, 0.1, 1.0),
        ];
        let state = new_scenario(&params, brands, 1.0).unwrap();
        let dp = DemandParams::from_market(&params);
        let sd = stationary_consumer_density(&state, &dp).unwrap();
        assert!((sd.psi_s - 0.25).abs() < 1e-15);
        assert!((sd.implied_psi0 - 0.5).abs() < 1e-15);

        // doubling every inventory halves psi_S
        let mut doubled = state.clone();
        for b in &mut doubled.brands {
            b.inventory *= 2.0;
        }
        let sd2 = stationary_consumer_density(&doubled, &dp).unwrap();
        assert!((sd2.psi_s - sd.psi_s / 2.0).abs() < 1e-15);

        // zero demand gives zero density
        let mut p0 = dp;
        p0.alpha = 10.0;
        let mut far = state.clone();
        for b in &mut far.brands {
            b.price = 5.0;
        }
        far.refresh_aggregates().unwrap();
        assert_eq!(
            stationary_consumer_density(&far, &p0).unwrap().psi_s,
            0.0
        );

        // zero inventory mass errors
        let mut empty = state;
        for b in &mut empty.brands {
            b.inventory = 0.0;
        }
        assert!(matches!(
            stationary_consumer_density(&empty, &dp),
            Err(Error::NoInventoryMass)
        ));
    }

    #[test]
    fn seasonal_modulation_is_periodic() {
        let mut p = dp();
        p.seasonal_amplitude = 0.3;
        p.seasonal_period = 4.0;
        assert!((p.d_max_at(1.0) - 1.3).abs() < 1e-12);
        assert!((p.d_max_at(3.0) - 0.7).abs() < 1e-12);
        assert!((p.d_max_at(0.0) - p.d_max_at(4.0)).abs() < 1e-12);
        // always positive while the amplitude stays below one
        for k in 0..100 {
            assert!(p.d_max_at(k as f64 * 0.13) > 0.0);
        }
    }

    #[test]
    fn stationary_sales_match_demand() {
        // In the stationary state the total purchase flow equals the demand
        // rate: y_t = sum(eta x) * psi_S = d.
        let d: f64 = 0.37;
        let mass = 1.7;
        let psi_s = d / mass;
        let y_t = mass * psi_s;
        assert!((y_t - d).abs() / d <= 1e-9);
    }
}
