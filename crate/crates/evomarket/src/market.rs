//! Core market state: model constants, per-brand variables and the
//! sales-weighted aggregates shared by every engine.
//!
//! All extensive quantities are stored as densities (scaled by the market
//! potential `M`); `M` itself is kept only to report absolute figures.
//! Brand order is the stable identity of a market: engines never reorder
//! the brand vector, so seeded runs are reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for aggregate consistency checks.
pub const AGGREGATE_REL_TOL: f64 = 1e-12;

/// A brand whose sales share falls below this fraction of total sales is
/// frozen there and flagged extinct instead of being removed.
pub const EXTINCTION_FLOOR_REL: f64 = 1e-12;

/// Scalar model constants of a market scenario.
///
/// `alpha`, `d_max` and `mu_nat` parametrize the demand quadratic
/// `d(mu) = d_max - alpha (mu - mu_nat)^2`; `epsilon` relates the long and
/// short time scales via `t = epsilon * tau`; `psi0` converts a demand rate
/// into the stationary consumer density; `noise_d` and `response_b` drive
/// the short-scale price dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Market potential `M`: total number of potentially interested agents.
    pub market_potential: f64,
    /// Mean amount per purchase decision, in units (>= 1).
    pub mean_amount: f64,
    /// Demand curvature around the natural price (>= 0).
    pub alpha: f64,
    /// Maximum demand rate, attained at the natural price (> 0).
    pub d_max: f64,
    /// Natural price: the price at which the demand rate peaks (> 0).
    pub mu_nat: f64,
    /// Time-scale ratio in (0, 1): long time = epsilon * short time.
    pub epsilon: f64,
    /// Stationary-density normalizer: psi_S = psi0 * d (> 0).
    pub psi0: f64,
    /// White-noise amplitude of short-scale price fluctuations (>= 0).
    pub noise_d: f64,
    /// Mean price response of a business unit per unit short time (> 0).
    pub response_b: f64,
    /// Seed for all random streams derived from this scenario.
    pub rng_seed: u64,
}

impl MarketParams {
    /// Validate every scalar invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 9] = [
            (
                "market_potential",
                self.market_potential,
                self.market_potential > 0.0,
            ),
            ("mean_amount", self.mean_amount, self.mean_amount >= 1.0),
            ("alpha", self.alpha, self.alpha >= 0.0),
            ("d_max", self.d_max, self.d_max > 0.0),
            ("mu_nat", self.mu_nat, self.mu_nat > 0.0),
            (
                "epsilon",
                self.epsilon,
                self.epsilon > 0.0 && self.epsilon < 1.0,
            ),
            ("psi0", self.psi0, self.psi0 > 0.0),
            ("noise_d", self.noise_d, self.noise_d >= 0.0),
            ("response_b", self.response_b, self.response_b > 0.0),
        ];
        for (field, value, ok) in checks {
            if !value.is_finite() {
                return Err(Error::invalid(field, format!("not finite: {value}")));
            }
            if !ok {
                return Err(Error::invalid(field, format!("out of range: {value}")));
            }
        }
        Ok(())
    }
}

/// Dynamic variables of one brand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrandState {
    /// Purchase-flow density per unit time (>= 0).
    pub sales: f64,
    /// Supply-flow density, `(1 + gamma) * sales` whenever recomputed.
    pub supply: f64,
    /// Density of units available in stores (>= 0).
    pub inventory: f64,
    /// Real price of the brand (> 0).
    pub price: f64,
    /// Preference parameter: probability rate that an encounter ends in a
    /// purchase (> 0).
    pub preference: f64,
    /// Reproduction coefficient: relative excess of supply over sales
    /// (may be negative, but never below -1).
    pub gamma: f64,
    /// Product fitness, the growth driver of the replicator dynamics.
    pub fitness: f64,
    /// Set once sales hit the extinction floor; the brand is frozen there.
    #[serde(default)]
    pub extinct: bool,
}

impl BrandState {
    /// Build a brand from its primitive variables, deriving the supply flow.
    pub fn new(sales: f64, price: f64, preference: f64, gamma: f64, inventory: f64) -> Self {
        BrandState {
            sales,
            supply: (1.0 + gamma) * sales,
            inventory,
            price,
            preference,
            gamma,
            fitness: 0.0,
            extinct: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("sales", self.sales),
            ("supply", self.supply),
            ("inventory", self.inventory),
            ("price", self.price),
            ("preference", self.preference),
            ("gamma", self.gamma),
            ("fitness", self.fitness),
        ] {
            if !value.is_finite() {
                return Err(Error::invalid(field, format!("not finite: {value}")));
            }
        }
        if self.sales < 0.0 {
            return Err(Error::invalid("sales", format!("negative: {}", self.sales)));
        }
        if self.inventory < 0.0 {
            return Err(Error::invalid(
                "inventory",
                format!("negative: {}", self.inventory),
            ));
        }
        if self.price <= 0.0 {
            return Err(Error::invalid(
                "price",
                format!("not positive: {}", self.price),
            ));
        }
        if self.preference <= 0.0 {
            return Err(Error::invalid(
                "preference",
                format!("not positive: {}", self.preference),
            ));
        }
        if self.gamma < -1.0 {
            return Err(Error::GammaBelowFloor(self.gamma));
        }
        Ok(())
    }
}

/// Market regime: stable under excess supply, unstable at or past clearing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Stable,
    Unstable,
}

impl Regime {
    /// The regime is a pure function of the mean reproduction coefficient.
    pub fn from_mean_gamma(mean_gamma: f64) -> Regime {
        if mean_gamma > 0.0 {
            Regime::Stable
        } else {
            Regime::Unstable
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Stable => "stable",
            Regime::Unstable => "unstable",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "stable" => Ok(Regime::Stable),
            "unstable" => Ok(Regime::Unstable),
            other => Err(format!("unknown regime: {other}")),
        }
    }
}

/// Full market state: brand vector plus sales-weighted aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketState {
    pub brands: Vec<BrandState>,
    /// Density of potential consumers.
    pub consumer_density: f64,
    /// Fraction of the market potential that has adopted, in [0, 1].
    pub adopter_fraction: f64,
    /// Sales-weighted mean price.
    pub mean_price: f64,
    /// Sales-weighted mean fitness.
    pub mean_fitness: f64,
    /// Mean reproduction coefficient: `s_t = (1 + mean_gamma) * y_t`.
    pub mean_gamma: f64,
    pub regime: Regime,
    /// Long-scale time.
    pub time_long: f64,
    /// Short-scale time.
    pub time_short: f64,
}

/// Sales-weighted aggregates recomputed from the brand vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregates {
    pub total_sales: f64,
    pub total_supply: f64,
    pub mean_price: f64,
    pub mean_fitness: f64,
    pub mean_gamma: f64,
}

/// Recompute totals and sales-weighted means from the brand vector.
///
/// Total sales and supply are plain sums; the means weight each brand by its
/// sales share; `mean_gamma` solves `s_t = (1 + mean_gamma) * y_t`. Errors on
/// zero total sales rather than propagating NaN.
pub fn aggregate(brands: &[BrandState]) -> Result<Aggregates> {
    let total_sales: f64 = brands.iter().map(|b| b.sales).sum();
    let total_supply: f64 = brands.iter().map(|b| b.supply).sum();
    if total_sales <= 0.0 {
        return Err(Error::DegenerateMarket);
    }
    let mut mean_price = 0.0;
    let mut mean_fitness = 0.0;
    for b in brands {
        let w = b.sales / total_sales;
        mean_price += w * b.price;
        mean_fitness += w * b.fitness;
    }
    Ok(Aggregates {
        total_sales,
        total_supply,
        mean_price,
        mean_fitness,
        mean_gamma: total_supply / total_sales - 1.0,
    })
}

/// Construct a market state from validated inputs.
///
/// Requires at least two brands and finite, invariant-satisfying fields.
/// Aggregates are computed from the inputs; the consumer density starts at
/// its stationary value for the given mean price; initial fitness values are
/// derived from each brand's own price through the demand quadratic.
pub fn new_scenario(
    params: &MarketParams,
    brands: Vec<BrandState>,
    adopter_fraction: f64,
) -> Result<MarketState> {
    params.validate()?;
    if brands.len() < 2 {
        return Err(Error::Monopoly(brands.len()));
    }
    for b in &brands {
        b.validate()?;
    }
    if !(0.0..=1.0).contains(&adopter_fraction) || !adopter_fraction.is_finite() {
        return Err(Error::invalid(
            "adopter_fraction",
            format!("must lie in [0, 1]: {adopter_fraction}"),
        ));
    }

    let mut brands = brands;
    for b in &mut brands {
        let quad = params.d_max - params.alpha * (b.price - params.mu_nat).powi(2);
        let demand_at_price = quad.max(0.0) * adopter_fraction;
        b.fitness = b.preference * b.gamma * params.psi0 * demand_at_price;
        b.supply = (1.0 + b.gamma) * b.sales;
    }

    let agg = aggregate(&brands)?;
    let demand_at_mean =
        (params.d_max - params.alpha * (agg.mean_price - params.mu_nat).powi(2)).max(0.0)
            * adopter_fraction;

    Ok(MarketState {
        brands,
        consumer_density: params.psi0 * demand_at_mean,
        adopter_fraction,
        mean_price: agg.mean_price,
        mean_fitness: agg.mean_fitness,
        mean_gamma: agg.mean_gamma,
        regime: Regime::from_mean_gamma(agg.mean_gamma),
        time_long: 0.0,
        time_short: 0.0,
    })
}

impl MarketState {
    /// Refresh stored aggregates and the regime flag from the brand vector.
    pub fn refresh_aggregates(&mut self) -> Result<()> {
        let agg = aggregate(&self.brands)?;
        self.mean_price = agg.mean_price;
        self.mean_fitness = agg.mean_fitness;
        self.mean_gamma = agg.mean_gamma;
        self.regime = Regime::from_mean_gamma(agg.mean_gamma);
        Ok(())
    }

    pub fn total_sales(&self) -> f64 {
        self.brands.iter().map(|b| b.sales).sum()
    }

    pub fn total_supply(&self) -> f64 {
        self.brands.iter().map(|b| b.supply).sum()
    }

    /// Preference-weighted inventory mass, the relaxation rate of the
    /// consumer density.
    pub fn preference_inventory_mass(&self) -> f64 {
        self.brands.iter().map(|b| b.preference * b.inventory).sum()
    }

    /// Sales-weighted variance of brand prices around the mean price.
    pub fn price_variance(&self) -> f64 {
        let y_t = self.total_sales();
        if y_t <= 0.0 {
            return 0.0;
        }
        self.brands
            .iter()
            .map(|b| (b.sales / y_t) * (b.price - self.mean_price).powi(2))
            .sum()
    }
}

/// Convert long-scale time to short-scale time, `tau = t / epsilon`.
pub fn scale_time(t_long: f64, params: &MarketParams) -> f64 {
    t_long / params.epsilon
}

/// One recorded point of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time_long: f64,
    pub time_short: f64,
    pub mean_price: f64,
    pub mean_fitness: f64,
    pub mean_gamma: f64,
    pub regime: Regime,
    pub total_sales: f64,
    pub total_supply: f64,
    pub demand_rate: f64,
    pub consumer_density: f64,
    pub adopter_fraction: f64,
    pub price_variance: f64,
    pub brand_sales: Vec<f64>,
    pub brand_prices: Vec<f64>,
    pub brand_fitness: Vec<f64>,
}

impl Snapshot {
    /// Price deviations of each brand from the mean price.
    pub fn price_deviations(&self) -> Vec<f64> {
        self.brand_prices
            .iter()
            .map(|p| p - self.mean_price)
            .collect()
    }

    /// Growth rates relative to the mean: `r_i = f_i - <f>`.
    pub fn growth_rates(&self) -> Vec<f64> {
        self.brand_fitness
            .iter()
            .map(|f| f - self.mean_fitness)
            .collect()
    }
}

/// A recorded price jump out of the unstable regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time_long: f64,
    pub pre_price: f64,
    pub jump: f64,
    pub post_price: f64,
}

/// Why a run ended before its horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    /// No price jump inside the demand region could restore excess supply.
    ShortageUnresolved,
    /// The demand rate collapsed to zero at the mean price.
    DemandCollapsed,
}

impl HaltReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            HaltReason::ShortageUnresolved => "shortage-unresolved",
            HaltReason::DemandCollapsed => "demand-collapsed",
        }
    }
}

/// Time-indexed record of a run: snapshots, jump events and halt status.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub jumps: Vec<JumpEvent>,
    pub halt: Option<HaltReason>,
}

impl Trajectory {
    pub fn brand_count(&self) -> usize {
        self.snapshots.first().map_or(0, |s| s.brand_sales.len())
    }

    /// Append a snapshot; sample times must be strictly increasing.
    pub fn push(&mut self, snapshot: Snapshot) {
        if let Some(last) = self.snapshots.last() {
            assert!(
                snapshot.time_long > last.time_long,
                "snapshot times must be strictly increasing"
            );
        }
        self.snapshots.push(snapshot);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> MarketParams {
        MarketParams {
            market_potential: 1e6,
            mean_amount: 1.0,
            alpha: 2.0,
            d_max: 1.0,
            mu_nat: 0.5,
            epsilon: 0.02,
            psi0: 1.0,
            noise_d: 0.02,
            response_b: 0.1,
            rng_seed: 7,
        }
    }

    fn brand(sales: f64, price: f64) -> BrandState {
        BrandState::new(sales, price, 1.0, 0.2, 1.0)
    }

    #[test]
    fn symmetric_two_brand_mean_price() {
        let state = new_scenario(&params(), vec![brand(0.5, 1.0), brand(0.5, 1.0)], 1.0).unwrap();
        assert_eq!(state.mean_price, 1.0);
        assert_eq!(state.time_long, 0.0);
        assert_eq!(state.time_short, 0.0);
    }

    #[test]
    fn weighted_mean_price_by_hand() {
        // y = (1, 3), mu = (2, 1): (1*2 + 3*1) / 4 = 1.25
        let state = new_scenario(&params(), vec![brand(1.0, 2.0), brand(3.0, 1.0)], 1.0).unwrap();
        assert!((state.mean_price - 1.25).abs() < 1e-15);
    }

    #[test]
    fn monopoly_rejected() {
        let err = new_scenario(&params(), vec![brand(1.0, 1.0)], 1.0).unwrap_err();
        assert!(matches!(err, Error::Monopoly(1)));
    }

    #[test]
    fn non_finite_field_rejected() {
        let mut b = brand(1.0, 1.0);
        b.price = f64::NAN;
        let err = new_scenario(&params(), vec![b, brand(1.0, 1.0)], 1.0).unwrap_err();
        assert!(matches!(err, Error::InvalidField { field: "price", .. }));
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = params();
        p.epsilon = 1.0;
        assert!(matches!(
            p.validate().unwrap_err(),
            Error::InvalidField {
                field: "epsilon",
                ..
            }
        ));
        let mut p = params();
        p.mean_amount = 0.5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn mean_gamma_solves_supply_relation() {
        // y = (1, 1), s = (1.1, 1.3): gamma = 2.4 / 2 - 1 = 0.2
        let mut a = brand(1.0, 1.0);
        a.supply = 1.1;
        let mut b = brand(1.0, 1.0);
        b.supply = 1.3;
        let agg = aggregate(&[a, b]).unwrap();
        assert!((agg.mean_gamma - 0.2).abs() < 1e-15);
    }

    #[test]
    fn identity_supply_means_zero_gamma() {
        let mut a = brand(1.0, 1.0);
        a.supply = a.sales;
        let mut b = brand(2.0, 1.0);
        b.supply = b.sales;
        let agg = aggregate(&[a, b]).unwrap();
        assert_eq!(agg.mean_gamma, 0.0);
    }

    #[test]
    fn zero_sales_is_degenerate() {
        let err = aggregate(&[brand(0.0, 1.0), brand(0.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::DegenerateMarket));
    }

    #[test]
    fn time_scaling() {
        let mut p = params();
        p.epsilon = 1.0 / 50.0;
        assert!((scale_time(1.0, &p) - 50.0).abs() < 1e-12);
        assert_eq!(scale_time(0.0, &p), 0.0);
        p.epsilon = 0.02;
        assert!((scale_time(0.02, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regime_is_pure_sign_function() {
        assert_eq!(Regime::from_mean_gamma(0.2), Regime::Stable);
        assert_eq!(Regime::from_mean_gamma(0.0), Regime::Unstable);
        assert_eq!(Regime::from_mean_gamma(-0.2), Regime::Unstable);
    }

    #[test]
    fn aggregates_reproduce_stored_values() {
        let state = new_scenario(
            &params(),
            vec![brand(1.0, 0.9), brand(3.0, 0.6), brand(0.5, 0.7)],
            1.0,
        )
        .unwrap();
        let agg = aggregate(&state.brands).unwrap();
        assert!((agg.mean_price - state.mean_price).abs() <= AGGREGATE_REL_TOL * state.mean_price);
        assert!(
            (agg.mean_gamma - state.mean_gamma).abs()
                <= AGGREGATE_REL_TOL * state.mean_gamma.abs().max(1.0)
        );
        assert_eq!(state.regime, Regime::from_mean_gamma(agg.mean_gamma));
    }

    #[test]
    fn trajectory_rejects_non_increasing_times() {
        let snap = Snapshot {
            time_long: 1.0,
            time_short: 50.0,
            mean_price: 1.0,
            mean_fitness: 0.0,
            mean_gamma: 0.1,
            regime: Regime::Stable,
            total_sales: 1.0,
            total_supply: 1.1,
            demand_rate: 1.0,
            consumer_density: 0.5,
            adopter_fraction: 1.0,
            price_variance: 0.0,
            brand_sales: vec![0.5, 0.5],
            brand_prices: vec![1.0, 1.0],
            brand_fitness: vec![0.0, 0.0],
        };
        let mut traj = Trajectory::default();
        traj.push(snap.clone());
        let result = std::panic::catch_unwind(move || {
            let mut t = traj;
            t.push(snap);
        });
        assert!(result.is_err());
    }
}
