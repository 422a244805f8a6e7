//! The coupled two-time-scale simulation loop and the seeded ensemble
//! runner.
//!
//! Each long step of size `dt_long` runs four phases:
//!
//! 1. relax the price deviations (and with them sales, inventories and the
//!    consumer density) through `dt_long / (epsilon * dt_tau)` short steps;
//! 2. measure the sales-weighted price variance of the relaxed deviations;
//! 3. advance the mean price by one explicit Euler step of the mean-price
//!    law, using the live variance unless a frozen one is configured;
//! 4. update adopters, scripted shocks and the demand rate, decide the
//!    regime from supply against demand, and resolve an unstable detection
//!    with an upward price jump (or halt when the shortage is unresolvable).
//!
//! After a stable step the total sales are re-equilibrated onto the demand
//! rate, which keeps the supply-vs-demand and brand-weighted reproduction
//! coefficients identical outside of shock transients.
//!
//! The mean price is engine state: short-scale deviations are re-centered to
//! a zero sales-weighted mean every step, so share reweighting cannot move
//! the mean price a second time on top of the long-scale law it follows.
//!
//! Ensembles derive one independent ChaCha stream per replicate from the
//! base seed (`set_stream(replicate index)`), so sequential and concurrent
//! execution produce identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::demand::{demand_rate, step_adopters, step_consumer_density, DemandParams};
use crate::error::{Error, Result};
use crate::estimators::{fit_laplace_at, fit_lognormal_at, FitReport};
use crate::market::{
    HaltReason, JumpEvent, MarketParams, MarketState, Regime, Snapshot, Trajectory,
};
use crate::price::{
    clearing_price, decline_rate, langevin_step, mean_price_ode_step, JumpDist, MeanPriceCoeffs,
    NoiseModel, PriceField,
};
use crate::replicator::{replicator_step_with, FitnessShock, FitnessVector};
use crate::scenario::Scenario;
use crate::supply::{mean_reproduction, step_inventory, supply_flow, SupplyPolicy};

/// Numerical controls of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Short-scale step size.
    pub dt_tau: f64,
    /// Long-scale step size.
    pub dt_long: f64,
    /// Long-time horizon.
    pub horizon: f64,
    /// Record a snapshot every this many long steps.
    pub snapshot_stride: usize,
    /// Short steps used to thermalize the price deviations before t = 0.
    pub burn_in_short_steps: usize,
    /// Use this price variance in the mean-price law instead of the live
    /// measurement (for exact closed-form comparisons).
    pub frozen_variance: Option<f64>,
    /// Mean of the exponential excess of unstable-regime price jumps.
    pub jump_mean: f64,
    /// Standard deviation of i.i.d. fitness shocks; zero disables them.
    pub fitness_shock_std: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dt_tau: 0.05,
            dt_long: 1.0,
            horizon: 100.0,
            snapshot_stride: 1,
            burn_in_short_steps: 0,
            frozen_variance: None,
            jump_mean: 0.05,
            fitness_shock_std: 0.0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.dt_tau.is_finite() || self.dt_tau <= 0.0 {
            return Err(Error::invalid("run.dt_tau", "must be positive"));
        }
        if !self.dt_long.is_finite() || self.dt_long <= 0.0 {
            return Err(Error::invalid("run.dt_long", "must be positive"));
        }
        if !self.horizon.is_finite() || self.horizon < 0.0 {
            return Err(Error::invalid("run.horizon", "must be non-negative"));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::invalid("run.snapshot_stride", "must be at least 1"));
        }
        if !self.jump_mean.is_finite() || self.jump_mean < 0.0 {
            return Err(Error::invalid("run.jump_mean", "must be non-negative"));
        }
        if !self.fitness_shock_std.is_finite() || self.fitness_shock_std < 0.0 {
            return Err(Error::invalid(
                "run.fitness_shock_std",
                "must be non-negative",
            ));
        }
        Ok(())
    }
}

/// One market simulation instance: single writer over its state.
pub struct Simulation {
    pub state: MarketState,
    pub params: MarketParams,
    demand: DemandParams,
    policy: SupplyPolicy,
    cfg: RunConfig,
    noise: NoiseModel,
    rng: ChaCha8Rng,
    /// Price diagnostics refreshed every long step.
    pub price_field: PriceField,
    baseline_sales: Vec<f64>,
}

impl Simulation {
    /// Build a simulation from a validated scenario, optionally overriding
    /// the seed, and derive its random stream index (0 for a single run).
    pub fn from_scenario(scenario: &Scenario, seed: Option<u64>, stream: u64) -> Result<Self> {
        let params = scenario.params;
        let state = crate::market::new_scenario(
            &params,
            scenario.brands.clone(),
            scenario.initial_adopters,
        )?;
        scenario.run.validate()?;
        scenario.demand.validate()?;
        for shock in &scenario.policy.shocks {
            shock.validate()?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(params.rng_seed));
        rng.set_stream(stream);
        let baseline_sales = state.brands.iter().map(|b| b.sales).collect();
        Ok(Simulation {
            noise: NoiseModel {
                amplitude_d: params.noise_d,
                response_b: params.response_b,
            },
            price_field: PriceField {
                mean_price: state.mean_price,
                ..PriceField::default()
            },
            state,
            params,
            demand: scenario.demand,
            policy: scenario.policy.clone(),
            cfg: scenario.run,
            rng,
            baseline_sales,
        })
    }

    fn short_steps_per_long(&self) -> usize {
        let n = self.cfg.dt_long / (self.params.epsilon * self.cfg.dt_tau);
        (n.round() as usize).max(1)
    }

    /// Demand parameters with scripted demand shocks applied at long time t.
    fn live_demand(&self, t: f64) -> DemandParams {
        let mut d = self.demand;
        d.d_max *= self.policy.demand_factor_at(t);
        d
    }

    /// Re-center price deviations onto a zero sales-weighted mean and write
    /// the implied brand prices.
    fn recenter_prices(&mut self, deviations: &mut [f64]) {
        let y_t = self.state.total_sales();
        let weighted: f64 = self
            .state
            .brands
            .iter()
            .zip(deviations.iter())
            .map(|(b, d)| b.sales / y_t * d)
            .sum();
        for (brand, dev) in self.state.brands.iter_mut().zip(deviations.iter_mut()) {
            *dev -= weighted;
            brand.price = self.state.mean_price + *dev;
        }
    }

    /// Recompute per-brand fitness from the current prices:
    /// `f_i = eta_i gamma_i psi0 d(mu_i)`.
    fn refresh_fitness(&mut self, demand: &DemandParams) {
        let t = self.state.time_long;
        let n = self.state.adopter_fraction;
        let psi0 = self.params.psi0;
        for brand in &mut self.state.brands {
            let d_at = demand_rate(brand.price, t, demand, n);
            brand.fitness = brand.preference * brand.gamma * psi0 * d_at;
        }
    }

    /// One short step: price relaxation, fitness refresh, replicator update,
    /// supply and inventory balances, consumer-density relaxation.
    fn short_step(&mut self, demand: &DemandParams, deviations: &mut [f64]) -> Result<()> {
        let regime = self.state.regime;
        let mean_price = self.state.mean_price;
        for (brand, dev) in self.state.brands.iter_mut().zip(deviations.iter_mut()) {
            if brand.extinct {
                continue;
            }
            *dev = langevin_step(*dev, mean_price, &self.noise, regime, self.cfg.dt_tau, &mut self.rng);
        }
        self.recenter_prices(deviations);
        self.refresh_fitness(demand);

        if self.cfg.fitness_shock_std > 0.0 {
            let shock = FitnessShock::Normal {
                std_dev: self.cfg.fitness_shock_std,
            };
            crate::replicator::fitness_perturbation_step(
                &mut self.state,
                self.cfg.dt_tau,
                &shock,
                &mut self.rng,
            )?;
        } else {
            let fitness = FitnessVector::from_state(&self.state)?;
            replicator_step_with(&mut self.state, &fitness, self.cfg.dt_tau)?;
        }

        let d_at_mean = demand_rate(mean_price, self.state.time_long, demand, self.state.adopter_fraction);
        let mut eta_x_mass = 0.0;
        for brand in &mut self.state.brands {
            brand.supply = supply_flow(brand.sales, brand.gamma)?;
            brand.inventory =
                step_inventory(brand.inventory, brand.sales, brand.gamma, self.cfg.dt_tau)
                    .inventory;
            eta_x_mass += brand.preference * brand.inventory;
        }
        self.state.consumer_density = step_consumer_density(
            self.state.consumer_density,
            d_at_mean,
            eta_x_mass,
            self.cfg.dt_tau,
        );
        self.state.time_short += self.cfg.dt_tau;
        Ok(())
    }

    /// Sales-weighted variance of the deviations (mean is zero after
    /// re-centering).
    fn measure_variance(&self, deviations: &[f64]) -> f64 {
        let y_t = self.state.total_sales();
        self.state
            .brands
            .iter()
            .zip(deviations)
            .map(|(b, d)| b.sales / y_t * d * d)
            .sum()
    }

    fn weighted_preference(&self) -> f64 {
        let y_t = self.state.total_sales();
        self.state
            .brands
            .iter()
            .map(|b| b.sales / y_t * b.preference)
            .sum()
    }

    /// One long step. Returns the detected regime and reproduction
    /// coefficient (before any jump resolution), or the halt reason.
    fn long_step(
        &mut self,
        trajectory: &mut Trajectory,
    ) -> Result<std::result::Result<(Regime, f64), HaltReason>> {
        let demand_now = self.live_demand(self.state.time_long);

        // (1) short-phase relaxation
        let mut deviations: Vec<f64> = self
            .state
            .brands
            .iter()
            .map(|b| b.price - self.state.mean_price)
            .collect();
        for _ in 0..self.short_steps_per_long() {
            self.short_step(&demand_now, &mut deviations)?;
        }

        // (2) measure the price variance; re-center first so the share
        // reweighting of the final short step cannot leak into the mean
        // price through the aggregate refresh below
        self.recenter_prices(&mut deviations);
        let live_variance = self.measure_variance(&deviations);
        let variance_used = self.cfg.frozen_variance.unwrap_or(live_variance);

        // (3) advance the mean price by the long-scale law
        let coeffs = MeanPriceCoeffs {
            epsilon: self.params.epsilon,
            mean_preference: self.weighted_preference(),
            mean_gamma: self.state.mean_gamma,
            psi0: self.params.psi0,
            alpha: self.demand.alpha,
            price_variance: variance_used,
        };
        let old_mean = self.state.mean_price;
        let new_mean = mean_price_ode_step(old_mean, self.params.mu_nat, &coeffs, self.cfg.dt_long);
        let shift = new_mean - old_mean;
        for brand in &mut self.state.brands {
            brand.price += shift;
        }
        self.state.mean_price = new_mean;
        self.state.time_long += self.cfg.dt_long;

        // (4) adopters, shocks, demand, regime
        self.state.adopter_fraction =
            step_adopters(self.state.adopter_fraction, self.cfg.dt_long, &self.demand);
        let t = self.state.time_long;
        for (i, brand) in self.state.brands.iter_mut().enumerate() {
            brand.gamma = self.policy.gamma_at(i, t);
        }
        let demand_now = self.live_demand(t);
        for brand in &mut self.state.brands {
            brand.supply = supply_flow(brand.sales, brand.gamma)?;
        }

        let mut d_now = demand_rate(
            self.state.mean_price,
            t,
            &demand_now,
            self.state.adopter_fraction,
        );
        if d_now <= 0.0 {
            return Ok(Err(HaltReason::DemandCollapsed));
        }
        let s_t = self.state.total_supply();
        let detected_gamma = mean_reproduction(s_t, d_now)?;
        let detected_regime = Regime::from_mean_gamma(detected_gamma);

        if detected_regime == Regime::Unstable {
            let jump = crate::price::unstable_jump(
                self.state.mean_price,
                s_t,
                d_now,
                demand_now.d_max_at(t),
                demand_now.alpha,
                demand_now.mu_nat,
                self.state.adopter_fraction,
                &JumpDist::Exponential {
                    mean: self.cfg.jump_mean,
                },
                &mut self.rng,
            );
            match jump {
                Ok(j) => {
                    for brand in &mut self.state.brands {
                        brand.price += j.jump;
                    }
                    trajectory.jumps.push(JumpEvent {
                        time_long: t,
                        pre_price: self.state.mean_price,
                        jump: j.jump,
                        post_price: j.new_mean_price,
                    });
                    self.state.mean_price = j.new_mean_price;
                    d_now = demand_rate(
                        self.state.mean_price,
                        t,
                        &demand_now,
                        self.state.adopter_fraction,
                    );
                }
                Err(Error::ShortageUnresolved) => {
                    return Ok(Err(HaltReason::ShortageUnresolved));
                }
                Err(other) => return Err(other),
            }
        }

        // re-equilibrate total sales onto the demand rate, preserving shares
        let y_t = self.state.total_sales();
        let rescale = d_now / y_t;
        for brand in &mut self.state.brands {
            brand.sales *= rescale;
            brand.supply = supply_flow(brand.sales, brand.gamma)?;
        }

        self.state.refresh_aggregates()?;
        // keep the engine's mean price authoritative: refresh_aggregates
        // recomputes it from brand prices, which match by construction
        self.refresh_fitness(&demand_now);
        let mean_fitness = FitnessVector::from_state(&self.state)?.mean;
        self.state.mean_fitness = mean_fitness;

        // preference and reproduction fluctuations are recorded for
        // inspection but play no role in the dynamics
        let y_t = self.state.total_sales();
        let mean_eta: f64 = self
            .state
            .brands
            .iter()
            .map(|b| b.sales / y_t * b.preference)
            .sum();
        self.price_field = PriceField {
            deviations,
            mean_price: self.state.mean_price,
            price_variance: live_variance,
            decline_rate_a: decline_rate(&coeffs),
            mu_clearing: clearing_price(
                self.state.total_supply(),
                demand_now.d_max_at(t),
                demand_now.alpha,
                demand_now.mu_nat,
                self.state.adopter_fraction,
            ),
            preference_deviations: self
                .state
                .brands
                .iter()
                .map(|b| b.preference - mean_eta)
                .collect(),
            gamma_deviations: self
                .state
                .brands
                .iter()
                .map(|b| b.gamma - self.state.mean_gamma)
                .collect(),
        };

        Ok(Ok((detected_regime, detected_gamma)))
    }

    fn snapshot(&self, regime: Regime, mean_gamma: f64, demand: f64) -> Snapshot {
        Snapshot {
            time_long: self.state.time_long,
            time_short: self.state.time_short,
            mean_price: self.state.mean_price,
            mean_fitness: self.state.mean_fitness,
            mean_gamma,
            regime,
            total_sales: self.state.total_sales(),
            total_supply: self.state.total_supply(),
            demand_rate: demand,
            consumer_density: self.state.consumer_density,
            adopter_fraction: self.state.adopter_fraction,
            price_variance: self.price_field.price_variance,
            brand_sales: self.state.brands.iter().map(|b| b.sales).collect(),
            brand_prices: self.state.brands.iter().map(|b| b.price).collect(),
            brand_fitness: self.state.brands.iter().map(|b| b.fitness).collect(),
        }
    }

    /// Run to the horizon, recording snapshots every stride.
    pub fn run(mut self) -> Result<Trajectory> {
        let mut trajectory = Trajectory::default();

        // thermalize price deviations before recording anything
        if self.cfg.burn_in_short_steps > 0 {
            let demand_now = self.live_demand(0.0);
            let mut deviations: Vec<f64> = self
                .state
                .brands
                .iter()
                .map(|b| b.price - self.state.mean_price)
                .collect();
            for _ in 0..self.cfg.burn_in_short_steps {
                let regime = self.state.regime;
                let mean_price = self.state.mean_price;
                for dev in deviations.iter_mut() {
                    *dev = langevin_step(
                        *dev,
                        mean_price,
                        &self.noise,
                        regime,
                        self.cfg.dt_tau,
                        &mut self.rng,
                    );
                }
                self.recenter_prices(&mut deviations);
            }
            self.refresh_fitness(&demand_now);
            self.state.refresh_aggregates()?;
            self.price_field.price_variance = self.measure_variance(&deviations);
        }

        let d0 = demand_rate(
            self.state.mean_price,
            0.0,
            &self.live_demand(0.0),
            self.state.adopter_fraction,
        );
        trajectory.push(self.snapshot(self.state.regime, self.state.mean_gamma, d0));

        let steps = (self.cfg.horizon / self.cfg.dt_long).round() as usize;
        for step in 1..=steps {
            match self.long_step(&mut trajectory) {
                Ok(Ok((regime, gamma))) => {
                    if step % self.cfg.snapshot_stride == 0 {
                        let d = demand_rate(
                            self.state.mean_price,
                            self.state.time_long,
                            &self.live_demand(self.state.time_long),
                            self.state.adopter_fraction,
                        );
                        trajectory.push(self.snapshot(regime, gamma, d));
                    }
                }
                Ok(Err(halt)) => {
                    trajectory.halt = Some(halt);
                    break;
                }
                Err(e) => return Err(e.at_step(step)),
            }
        }
        Ok(trajectory)
    }

    /// Baseline sales the run started from, for size statistics.
    pub fn baseline_sales(&self) -> &[f64] {
        &self.baseline_sales
    }
}

/// Run a scenario to completion (stream 0 of its seed).
pub fn run_scenario(scenario: &Scenario, seed: Option<u64>) -> Result<Trajectory> {
    Simulation::from_scenario(scenario, seed, 0)?.run()
}

/// Compact per-replicate output kept by the ensemble runner.
#[derive(Debug, Clone)]
struct ReplicateSummary {
    final_log_sizes: Vec<f64>,
    checkpoint_log_sizes: Vec<Vec<f64>>,
    growth_samples: Vec<f64>,
}

/// Aggregated ensemble statistics and fit reports.
#[derive(Debug, Clone)]
pub struct EnsembleReport {
    pub replicates: usize,
    /// Replicates that failed, with the step-indexed error text.
    pub failed: Vec<(usize, String)>,
    /// Normality fit of pooled log-sizes, reported per unit long time.
    pub lognormal_sizes: Option<FitReport>,
    /// Laplace fit of pooled short-scale growth rates.
    pub laplace_growth: Option<FitReport>,
    /// (long time, variance of pooled log-sizes) at evenly spaced times.
    pub log_size_variance: Vec<(f64, f64)>,
    pub growth_samples: usize,
    pub size_samples: usize,
}

/// Ensemble controls on top of a base scenario.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleConfig {
    pub replicates: usize,
    /// Number of evenly spaced log-size variance checkpoints.
    pub checkpoints: usize,
    /// Pool at most this many growth samples across all replicates.
    pub max_growth_samples: usize,
    /// Significance for the ensemble fit reports.
    pub significance: f64,
    /// Run replicates sequentially instead of in parallel.
    pub sequential: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            replicates: 1,
            checkpoints: 5,
            max_growth_samples: 200_000,
            significance: crate::estimators::DEFAULT_KS_SIGNIFICANCE,
            sequential: false,
        }
    }
}

fn summarize_replicate(
    scenario: &Scenario,
    seed: Option<u64>,
    replicate: usize,
    cfg: &EnsembleConfig,
    per_replicate_growth: usize,
) -> Result<ReplicateSummary> {
    let sim = Simulation::from_scenario(scenario, seed, replicate as u64)?;
    let baseline = sim.baseline_sales().to_vec();
    let trajectory = sim.run()?;
    let last = trajectory
        .snapshots
        .last()
        .ok_or(Error::SeriesTooShort { need: 1, got: 0 })?;

    let final_log_sizes: Vec<f64> = last
        .brand_sales
        .iter()
        .zip(&baseline)
        .map(|(y, y0)| (y / y0).ln())
        .collect();

    let n_snaps = trajectory.snapshots.len();
    let mut checkpoint_log_sizes = Vec::with_capacity(cfg.checkpoints);
    for k in 1..=cfg.checkpoints {
        let idx = (k * (n_snaps - 1)) / cfg.checkpoints;
        let snap = &trajectory.snapshots[idx];
        checkpoint_log_sizes.push(
            snap.brand_sales
                .iter()
                .zip(&baseline)
                .map(|(y, y0)| (y / y0).ln())
                .collect(),
        );
    }

    let growth = crate::estimators::growth_rates(&trajectory, 1)?;
    let stride = (growth.samples.len() / per_replicate_growth.max(1)).max(1);
    let growth_samples = growth.samples.into_iter().step_by(stride).collect();

    Ok(ReplicateSummary {
        final_log_sizes,
        checkpoint_log_sizes,
        growth_samples,
    })
}

/// Run independent seeded replicates and pool their size and growth-rate
/// statistics. Replicate `i` uses random stream `i` of the base seed, so the
/// report does not depend on execution order.
pub fn run_ensemble(
    scenario: &Scenario,
    seed: Option<u64>,
    cfg: &EnsembleConfig,
) -> Result<EnsembleReport> {
    if cfg.replicates == 0 {
        return Err(Error::invalid("replicates", "must be at least 1"));
    }
    let per_replicate_growth = (cfg.max_growth_samples / cfg.replicates).max(1);

    let results: Vec<(usize, Result<ReplicateSummary>)> = if cfg.sequential {
        (0..cfg.replicates)
            .map(|i| (i, summarize_replicate(scenario, seed, i, cfg, per_replicate_growth)))
            .collect()
    } else {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|i| (i, summarize_replicate(scenario, seed, i, cfg, per_replicate_growth)))
            .collect()
    };

    let mut failed = Vec::new();
    let mut final_log_sizes = Vec::new();
    let mut checkpoints: Vec<Vec<f64>> = vec![Vec::new(); cfg.checkpoints];
    let mut growth_pool = Vec::new();
    for (i, result) in results {
        match result {
            Ok(summary) => {
                final_log_sizes.extend(summary.final_log_sizes);
                for (k, sizes) in summary.checkpoint_log_sizes.into_iter().enumerate() {
                    checkpoints[k].extend(sizes);
                }
                growth_pool.extend(summary.growth_samples);
            }
            Err(e) => failed.push((i, e.to_string())),
        }
    }

    let horizon = scenario.run.horizon;
    let lognormal_sizes = if final_log_sizes.len() >= 5 {
        let ratios: Vec<f64> = final_log_sizes.iter().map(|l| l.exp()).collect();
        fit_lognormal_at(&ratios, horizon, cfg.significance).ok()
    } else {
        None
    };
    let laplace_growth = if growth_pool.len() >= 30 {
        fit_laplace_at(&growth_pool, cfg.significance).ok()
    } else {
        None
    };

    let log_size_variance = checkpoints
        .iter()
        .enumerate()
        .filter(|(_, pool)| pool.len() >= 2)
        .map(|(k, pool)| {
            let t = horizon * (k + 1) as f64 / cfg.checkpoints as f64;
            (t, crate::estimators::moments(pool).variance)
        })
        .collect();

    Ok(EnsembleReport {
        replicates: cfg.replicates,
        failed,
        lognormal_sizes,
        laplace_growth,
        log_size_variance,
        growth_samples: growth_pool.len(),
        size_samples: final_log_sizes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioFile;
    use crate::supply::ShockEvent;

    fn default_scenario() -> Scenario {
        ScenarioFile::parse(crate::scenario::default_scenario_text())
            .unwrap()
            .validate()
            .unwrap()
    }

    #[test]
    fn short_steps_per_long_rounds_to_at_least_one() {
        let scenario = default_scenario();
        // dt_long = 1, epsilon = 0.02, dt_tau = 0.05: 1 / 0.001 = 1000
        let sim = Simulation::from_scenario(&scenario, None, 0).unwrap();
        assert_eq!(sim.short_steps_per_long(), 1000);

        let mut tight = default_scenario();
        tight.run.dt_long = 0.001; // shorter than one short step
        let sim = Simulation::from_scenario(&tight, None, 0).unwrap();
        assert_eq!(sim.short_steps_per_long(), 1);
    }

    #[test]
    fn price_field_reconstructs_brand_prices() {
        let scenario = default_scenario();
        let mut sim = Simulation::from_scenario(&scenario, None, 0).unwrap();
        let mut trajectory = Trajectory::default();
        for _ in 0..5 {
            sim.long_step(&mut trajectory).unwrap().unwrap();
            for (brand, dev) in sim.state.brands.iter().zip(&sim.price_field.deviations) {
                assert!(
                    (brand.price - (sim.price_field.mean_price + dev)).abs() <= 1e-12,
                    "price {} vs mean {} + dev {dev}",
                    brand.price,
                    sim.price_field.mean_price
                );
            }
        }
    }

    #[test]
    fn production_halt_is_a_shortage_unresolved() {
        // production stops entirely (gamma hits -1): zero supply can never
        // exceed demand, so no price jump restores the stable regime
        let mut scenario = default_scenario();
        scenario.policy.shocks = vec![ShockEvent::Gamma {
            time: 3.0,
            delta: -1.1, // base gamma 0.1: lands exactly on the halt
            brand: None,
        }];
        let trajectory = run_scenario(&scenario, None).unwrap();
        assert_eq!(trajectory.halt, Some(HaltReason::ShortageUnresolved));
        let last = trajectory.snapshots.last().unwrap();
        assert!(last.time_long < scenario.run.horizon);

        // pushing gamma below -1 violates the supply relation outright
        scenario.policy.shocks = vec![ShockEvent::Gamma {
            time: 3.0,
            delta: -1.2,
            brand: None,
        }];
        assert!(run_scenario(&scenario, None).is_err());
    }

    #[test]
    fn demand_collapse_halts() {
        let mut scenario = default_scenario();
        scenario.policy.shocks = vec![ShockEvent::Demand {
            time: 4.0,
            factor: 1e-9,
        }];
        let trajectory = run_scenario(&scenario, None).unwrap();
        // with demand scaled to nothing the quadratic clamps to zero at the
        // running mean price
        assert_eq!(trajectory.halt, Some(HaltReason::DemandCollapsed));
    }

    #[test]
    fn frozen_variance_reproduces_the_closed_form() {
        let mut scenario = default_scenario();
        scenario.params.noise_d = 0.0; // no price noise at all
        scenario.run.frozen_variance = Some(0.02);
        scenario.run.horizon = 50.0;
        let mu_nat = scenario.params.mu_nat;
        let trajectory = run_scenario(&scenario, None).unwrap();

        let coeffs = MeanPriceCoeffs {
            epsilon: scenario.params.epsilon,
            mean_preference: 1.0,
            mean_gamma: 0.1,
            psi0: 1.0,
            alpha: scenario.params.alpha,
            price_variance: 0.02,
        };
        let a = decline_rate(&coeffs);
        let mu0 = trajectory.snapshots[0].mean_price - mu_nat;
        for snap in &trajectory.snapshots {
            let exact = crate::price::mean_price_closed_form(snap.time_long, mu0, a, mu_nat);
            // first-order Euler at dt_long = 1 stays within a percent here
            assert!(
                (snap.mean_price - exact).abs() / exact <= 1e-2,
                "t {} price {} vs {}",
                snap.time_long,
                snap.mean_price,
                exact
            );
        }
    }

    #[test]
    fn ensemble_rejects_zero_replicates() {
        let scenario = default_scenario();
        let cfg = EnsembleConfig {
            replicates: 0,
            ..EnsembleConfig::default()
        };
        assert!(run_ensemble(&scenario, None, &cfg).is_err());
    }

    #[test]
    fn ensemble_lists_failed_replicates() {
        // a scheduled gamma below -1 makes every replicate fail at the same
        // step; the report carries them instead of aborting the ensemble
        let mut scenario = default_scenario();
        scenario.run.horizon = 10.0;
        scenario.policy.shocks = vec![ShockEvent::Gamma {
            time: 4.0,
            delta: -1.5,
            brand: None,
        }];
        let cfg = EnsembleConfig {
            replicates: 3,
            sequential: true,
            ..EnsembleConfig::default()
        };
        let report = run_ensemble(&scenario, None, &cfg).unwrap();
        assert_eq!(report.failed.len(), 3);
        assert!(report.failed[0].1.contains("long step"));
        assert_eq!(report.size_samples, 0);
    }
}
