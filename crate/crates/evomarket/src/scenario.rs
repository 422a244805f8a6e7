//! Scenario files: the TOML document that fully determines a run.
//!
//! ```toml
//! [params]
//! market_potential = 1000000.0
//! mean_amount = 1.0
//! alpha = 2.0
//! d_max = 1.0
//! mu_nat = 0.5
//! epsilon = 0.02
//! psi0 = 1.0
//! noise_d = 0.02
//! response_b = 0.1
//! rng_seed = 42
//!
//! [demand]
//! bass_p = 0.0
//! bass_q = 0.0
//! seasonal_amplitude = 0.0
//! seasonal_period = 1.0
//! initial_adopters = 1.0
//!
//! [[brands]]
//! sales = 0.5
//! price = 0.9
//! preference = 1.0
//! gamma = 0.25
//! inventory = 1.0
//!
//! [[shocks]]
//! kind = "demand"
//! time = 50.0
//! factor = 1.4
//!
//! [run]
//! dt_tau = 0.05
//! dt_long = 1.0
//! horizon = 100.0
//! snapshot_stride = 1
//! ensemble_size = 1
//!
//! [outputs]
//! directory = "out"
//! ```
//!
//! Parsing either produces a valid simulation input or fails with an error
//! that names the offending line or field. Seeds live in the TOML integer
//! range (0 through 2^63 - 1).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::DemandParams;
use crate::market::{BrandState, MarketParams};
use crate::sim::RunConfig;
use crate::supply::{ShockEvent, SupplyPolicy};

/// Scenario-file errors, addressed to a line (syntax) or a field (semantics).
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("scenario field {path}: {reason}")]
    Field { path: String, reason: String },
    #[error("scenario io: {0}")]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    fn field(path: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Field {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

/// Raw scenario document, one-to-one with the TOML schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub params: ParamsSection,
    #[serde(default)]
    pub demand: DemandSection,
    pub brands: Vec<BrandSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shocks: Vec<ShockEvent>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub outputs: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub market_potential: f64,
    #[serde(default = "one")]
    pub mean_amount: f64,
    pub alpha: f64,
    pub d_max: f64,
    pub mu_nat: f64,
    pub epsilon: f64,
    pub psi0: f64,
    #[serde(default)]
    pub noise_d: f64,
    pub response_b: f64,
    pub rng_seed: u64,
}

/// Adopter diffusion defaults are conventional literature magnitudes; they
/// are inert while `initial_adopters` stays at its saturated default of 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSection {
    #[serde(default = "default_bass_p")]
    pub bass_p: f64,
    #[serde(default = "default_bass_q")]
    pub bass_q: f64,
    #[serde(default)]
    pub seasonal_amplitude: f64,
    #[serde(default = "one")]
    pub seasonal_period: f64,
    #[serde(default = "one")]
    pub initial_adopters: f64,
}

impl Default for DemandSection {
    fn default() -> Self {
        DemandSection {
            bass_p: default_bass_p(),
            bass_q: default_bass_q(),
            seasonal_amplitude: 0.0,
            seasonal_period: 1.0,
            initial_adopters: 1.0,
        }
    }
}

fn default_bass_p() -> f64 {
    0.03
}
fn default_bass_q() -> f64 {
    0.38
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrandSection {
    pub sales: f64,
    pub price: f64,
    pub preference: f64,
    pub gamma: f64,
    pub inventory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_dt_tau")]
    pub dt_tau: f64,
    #[serde(default = "one")]
    pub dt_long: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "one_usize")]
    pub snapshot_stride: usize,
    #[serde(default = "one_usize")]
    pub ensemble_size: usize,
    #[serde(default)]
    pub burn_in_short_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frozen_variance: Option<f64>,
    #[serde(default = "default_jump_mean")]
    pub jump_mean: f64,
    #[serde(default)]
    pub fitness_shock_std: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            dt_tau: default_dt_tau(),
            dt_long: 1.0,
            horizon: default_horizon(),
            snapshot_stride: 1,
            ensemble_size: 1,
            burn_in_short_steps: 0,
            frozen_variance: None,
            jump_mean: default_jump_mean(),
            fitness_shock_std: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_timeseries")]
    pub timeseries: String,
    #[serde(default = "default_report")]
    pub report: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_dir(),
            timeseries: default_timeseries(),
            report: default_report(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn default_dt_tau() -> f64 {
    0.05
}
fn default_horizon() -> f64 {
    100.0
}
fn default_jump_mean() -> f64 {
    0.05
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_timeseries() -> String {
    "timeseries.csv".to_string()
}
fn default_report() -> String {
    "report.json".to_string()
}

/// A validated scenario, ready to drive a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: MarketParams,
    pub demand: DemandParams,
    pub brands: Vec<BrandState>,
    pub policy: SupplyPolicy,
    pub initial_adopters: f64,
    pub run: RunConfig,
    pub ensemble_size: usize,
    pub outputs: OutputSection,
}

impl ScenarioFile {
    /// Parse a TOML document; syntax errors carry line and column spans.
    pub fn parse(text: &str) -> Result<ScenarioFile, ScenarioError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<ScenarioFile, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        ScenarioFile::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    /// Validate every field and assemble the simulation inputs.
    pub fn validate(&self) -> Result<Scenario, ScenarioError> {
        let params = MarketParams {
            market_potential: self.params.market_potential,
            mean_amount: self.params.mean_amount,
            alpha: self.params.alpha,
            d_max: self.params.d_max,
            mu_nat: self.params.mu_nat,
            epsilon: self.params.epsilon,
            psi0: self.params.psi0,
            noise_d: self.params.noise_d,
            response_b: self.params.response_b,
            rng_seed: self.params.rng_seed,
        };
        params
            .validate()
            .map_err(|e| ScenarioError::field(format!("params.{}", field_of(&e)), e.to_string()))?;

        if self.brands.len() < 2 {
            return Err(ScenarioError::field(
                "brands",
                format!(
                    "a competitive market needs at least two brands, got {}",
                    self.brands.len()
                ),
            ));
        }
        let mut brands = Vec::with_capacity(self.brands.len());
        for (i, b) in self.brands.iter().enumerate() {
            let brand = BrandState::new(b.sales, b.price, b.preference, b.gamma, b.inventory);
            brand.validate().map_err(|e| {
                ScenarioError::field(format!("brands[{i}].{}", field_of(&e)), e.to_string())
            })?;
            brands.push(brand);
        }

        let demand = DemandParams {
            alpha: params.alpha,
            d_max: params.d_max,
            mu_nat: params.mu_nat,
            bass_p: self.demand.bass_p,
            bass_q: self.demand.bass_q,
            seasonal_amplitude: self.demand.seasonal_amplitude,
            seasonal_period: self.demand.seasonal_period,
        };
        demand
            .validate()
            .map_err(|e| ScenarioError::field(format!("demand.{}", field_of(&e)), e.to_string()))?;
        if !(0.0..=1.0).contains(&self.demand.initial_adopters) {
            return Err(ScenarioError::field(
                "demand.initial_adopters",
                format!("must lie in [0, 1]: {}", self.demand.initial_adopters),
            ));
        }

        for (i, shock) in self.shocks.iter().enumerate() {
            shock
                .validate()
                .map_err(|e| ScenarioError::field(format!("shocks[{i}]"), e.to_string()))?;
            if let ShockEvent::Gamma {
                brand: Some(b), ..
            } = shock
            {
                if *b >= brands.len() {
                    return Err(ScenarioError::field(
                        format!("shocks[{i}].brand"),
                        format!("brand index {b} out of range (N = {})", brands.len()),
                    ));
                }
            }
        }
        let policy = SupplyPolicy {
            base_gamma: brands.iter().map(|b| b.gamma).collect(),
            shocks: self.shocks.clone(),
        };

        let run = RunConfig {
            dt_tau: self.run.dt_tau,
            dt_long: self.run.dt_long,
            horizon: self.run.horizon,
            snapshot_stride: self.run.snapshot_stride,
            burn_in_short_steps: self.run.burn_in_short_steps,
            frozen_variance: self.run.frozen_variance,
            jump_mean: self.run.jump_mean,
            fitness_shock_std: self.run.fitness_shock_std,
        };
        run.validate()
            .map_err(|e| ScenarioError::field(field_of(&e), e.to_string()))?;
        if self.run.ensemble_size == 0 {
            return Err(ScenarioError::field(
                "run.ensemble_size",
                "must be at least 1",
            ));
        }

        Ok(Scenario {
            params,
            demand,
            brands,
            policy,
            initial_adopters: self.demand.initial_adopters,
            run,
            ensemble_size: self.run.ensemble_size,
            outputs: self.outputs.clone(),
        })
    }
}

fn field_of(e: &crate::error::Error) -> String {
    match e {
        crate::error::Error::InvalidField { field, .. } => (*field).to_string(),
        _ => "value".to_string(),
    }
}

/// A ready-to-run two-brand scenario with mild excess supply, the starting
/// point the examples modify. Prices sit close to the natural price so the
/// fitness gap stays small and the market remains competitive over the whole
/// horizon.
pub fn default_scenario_text() -> &'static str {
    r#"[params]
market_potential = 1000000.0
mean_amount = 1.0
alpha = 0.5
d_max = 1.0
mu_nat = 0.5
epsilon = 0.02
psi0 = 1.0
noise_d = 0.02
response_b = 0.1
rng_seed = 42

[demand]
initial_adopters = 1.0

[[brands]]
sales = 0.5
price = 0.6
preference = 1.0
gamma = 0.1
inventory = 1.0

[[brands]]
sales = 0.5
price = 0.55
preference = 1.0
gamma = 0.1
inventory = 1.0

[run]
dt_tau = 0.05
dt_long = 1.0
horizon = 100.0
snapshot_stride = 1
"#
}
