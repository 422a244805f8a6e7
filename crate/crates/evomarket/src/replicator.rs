//! Replicator dynamics of brand sales.
//!
//! Each brand grows or shrinks according to its fitness relative to the
//! sales-weighted mean,
//!
//! ```text
//! dy_i/dtau = (f_i - <f>) y_i,      f_i = eta_i gamma_i psi_s(mu_i)
//! ```
//!
//! so that total sales are conserved on the short time scale. Conservation
//! is enforced by an exact rescaling after every explicit Euler step instead
//! of trusting the discretized mean-fitness subtraction, which would drift.
//!
//! Under i.i.d. fitness shocks the same step turns sales into a
//! multiplicative stochastic process: log-sizes become normal, their
//! variance grows linearly in time, and a constant fitness gap makes one
//! brand replace another along a logistic path.

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::market::{MarketState, Trajectory, EXTINCTION_FLOOR_REL};

/// Per-brand and aggregate fitness at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessVector {
    pub values: Vec<f64>,
    /// Sales-weighted mean fitness.
    pub mean: f64,
    /// Sales-weighted fitness variance.
    pub variance: f64,
}

impl FitnessVector {
    /// Weighted statistics of the given fitness values under the state's
    /// current sales weights.
    pub fn from_values(state: &MarketState, values: Vec<f64>) -> Result<FitnessVector> {
        let y_t = state.total_sales();
        if y_t <= 0.0 {
            return Err(Error::DegenerateMarket);
        }
        let mean = state
            .brands
            .iter()
            .zip(&values)
            .map(|(b, f)| b.sales / y_t * f)
            .sum();
        let variance = state
            .brands
            .iter()
            .zip(&values)
            .map(|(b, f)| b.sales / y_t * (f - mean) * (f - mean))
            .sum();
        Ok(FitnessVector {
            values,
            mean,
            variance,
        })
    }

    pub fn from_state(state: &MarketState) -> Result<FitnessVector> {
        let values = state.brands.iter().map(|b| b.fitness).collect();
        FitnessVector::from_values(state, values)
    }
}

/// Growth rates relative to the mean and log-sizes relative to a baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRecord {
    /// `r_i = f_i - <f>`; sales-weighted mean is zero by construction.
    pub rates: Vec<f64>,
    /// `ln(y_i / y_i(0))` against the provided baseline sales.
    pub log_sizes: Vec<f64>,
}

/// Growth rates and log-sizes of a state against baseline sales.
pub fn growth_record(state: &MarketState, baseline_sales: &[f64]) -> Result<GrowthRecord> {
    let fv = FitnessVector::from_state(state)?;
    let rates = fv.values.iter().map(|f| f - fv.mean).collect();
    let log_sizes = state
        .brands
        .iter()
        .zip(baseline_sales)
        .map(|(b, y0)| (b.sales / y0).ln())
        .collect();
    Ok(GrowthRecord { rates, log_sizes })
}

/// Product fitness: preference times reproduction coefficient times the
/// stationary consumer density at the brand's own price.
pub fn fitness(preference: f64, gamma: f64, psi_s_at_price: f64) -> f64 {
    preference * gamma * psi_s_at_price
}

/// Sales-weighted fitness variance of the current state.
pub fn fitness_variance(state: &MarketState) -> Result<f64> {
    Ok(FitnessVector::from_state(state)?.variance)
}

/// Distribution of the i.i.d. zero-mean fitness shocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitnessShock {
    Normal { std_dev: f64 },
    Uniform { half_width: f64 },
}

impl FitnessShock {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FitnessShock::Normal { std_dev } => {
                if *std_dev == 0.0 {
                    0.0
                } else {
                    Normal::new(0.0, *std_dev).unwrap().sample(rng)
                }
            }
            FitnessShock::Uniform { half_width } => {
                if *half_width == 0.0 {
                    0.0
                } else {
                    Uniform::new_inclusive(-half_width, *half_width).sample(rng)
                }
            }
        }
    }
}

/// One explicit Euler replicator step under the state's stored fitness.
///
/// After the step the sales vector is rescaled so the total matches its
/// pre-step value exactly. A brand whose share drops below the extinction
/// floor is frozen there and flagged extinct, keeping the vector shape
/// stable. Errors when `dt * max|r_i| >= 1`, which would cross zero.
pub fn replicator_step(state: &mut MarketState, dt_tau: f64) -> Result<()> {
    let fitness = FitnessVector::from_state(state)?;
    replicator_step_with(state, &fitness, dt_tau)
}

/// Replicator step driven by an explicit fitness vector (weighted mean taken
/// over current sales). The stored per-brand fitness fields are untouched.
pub fn replicator_step_with(
    state: &mut MarketState,
    fitness: &FitnessVector,
    dt_tau: f64,
) -> Result<()> {
    let total_before = state.total_sales();
    if total_before <= 0.0 {
        return Err(Error::DegenerateMarket);
    }

    let max_rate = fitness
        .values
        .iter()
        .map(|f| (f - fitness.mean).abs())
        .fold(0.0, f64::max);
    if dt_tau * max_rate >= 1.0 {
        return Err(Error::StepTooLarge(dt_tau * max_rate));
    }

    let floor = EXTINCTION_FLOOR_REL * total_before;
    let mut live_sum = 0.0;
    let mut frozen_sum = 0.0;
    for (brand, f) in state.brands.iter_mut().zip(&fitness.values) {
        if brand.extinct {
            frozen_sum += brand.sales;
            continue;
        }
        let grown = brand.sales * (1.0 + (f - fitness.mean) * dt_tau);
        if grown < floor {
            brand.sales = floor;
            brand.extinct = true;
            frozen_sum += brand.sales;
        } else {
            brand.sales = grown;
            live_sum += grown;
        }
    }

    // Exact conservation: rescale the live brands onto the pre-step total.
    if live_sum > 0.0 {
        let scale = (total_before - frozen_sum) / live_sum;
        for brand in state.brands.iter_mut().filter(|b| !b.extinct) {
            brand.sales *= scale;
        }
    }
    Ok(())
}

/// Replicator step with i.i.d. zero-mean shocks added to each brand's
/// fitness before the update. The shocks are fresh every call; stored
/// fitness fields stay at their base values.
pub fn fitness_perturbation_step<R: Rng + ?Sized>(
    state: &mut MarketState,
    dt_tau: f64,
    shock: &FitnessShock,
    rng: &mut R,
) -> Result<()> {
    let shocked: Vec<f64> = state
        .brands
        .iter()
        .map(|b| b.fitness + shock.sample(rng))
        .collect();
    let fitness = FitnessVector::from_values(state, shocked)?;
    replicator_step_with(state, &fitness, dt_tau)
}

/// Least-squares fit of `ln(y_a / y_b)` against long time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstitutionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fit the log sales ratio of two brands against the trajectory's long-time
/// axis. Under a constant fitness gap the ratio follows a logistic
/// substitution path, so the fit is a straight line whose slope estimates
/// the gap times the time-scale ratio.
pub fn substitution_analysis(
    trajectory: &Trajectory,
    brand_a: usize,
    brand_b: usize,
) -> Result<SubstitutionFit> {
    if trajectory.snapshots.len() < 2 {
        return Err(Error::SeriesTooShort {
            need: 2,
            got: trajectory.snapshots.len(),
        });
    }
    let mut times = Vec::with_capacity(trajectory.snapshots.len());
    let mut log_ratio = Vec::with_capacity(trajectory.snapshots.len());
    for snap in &trajectory.snapshots {
        let ya = snap.brand_sales[brand_a];
        let yb = snap.brand_sales[brand_b];
        if ya <= 0.0 {
            return Err(Error::ZeroSalesInWindow { brand: brand_a });
        }
        if yb <= 0.0 {
            return Err(Error::ZeroSalesInWindow { brand: brand_b });
        }
        times.push(snap.time_long);
        log_ratio.push((ya / yb).ln());
    }

    let n = times.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let lm = log_ratio.iter().sum::<f64>() / n;
    let sxx: f64 = times.iter().map(|t| (t - tm) * (t - tm)).sum();
    let sxy: f64 = times
        .iter()
        .zip(&log_ratio)
        .map(|(t, l)| (t - tm) * (l - lm))
        .sum();
    let syy: f64 = log_ratio.iter().map(|l| (l - lm) * (l - lm)).sum();
    let slope = sxy / sxx;
    let intercept = lm - slope * tm;
    let r_squared = if syy == 0.0 {
        1.0 // a flat ratio is fit perfectly by a zero-slope line
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(SubstitutionFit {
        slope,
        intercept,
        r_squared,
    })
}
