//! Short-scale price dynamics and the long-scale mean-price law.
//!
//! Individual brand prices fluctuate around the mean price under a
//! sign-restoring force plus white noise,
//!
//! ```text
//! d(dmu)/dtau = -b sign(dmu) + noise,     <noise noise'> = D delta(tau - tau')
//! ```
//!
//! whose stationary law is the double-exponential (Laplace) density
//! `P(dmu) = (b/D) exp(-2b |dmu| / D)` with variance `D^2 / (2 b^2)`.
//! The force only restores while the market holds excess supply; at or past
//! market clearing it reverses sign and deviations grow.
//!
//! On the long scale the mean price relaxes exponentially toward the natural
//! price,
//!
//! ```text
//! d<mu>/dt = -a (<mu> - mu_nat),    a = 2 eps <eta> <gamma> psi0 alpha Var(P_mu)
//! ```
//!
//! The decline rate vanishes for a single brand (zero price variance):
//! the decline is a consequence of competition, not of any exogenous drift.

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::error::{Error, Result};
use crate::market::Regime;

/// Factor applied on top of `eps <eta> <gamma> psi0 alpha Var` in the decline
/// rate. Kept as one named constant so tests can evaluate both conventions
/// through [`decline_rate_with_factor`].
pub const DECLINE_RATE_FACTOR: f64 = 2.0;

/// Brand prices are floored at this fraction of the mean price; the
/// short-scale update reflects there instead of crossing zero.
pub const PRICE_FLOOR_REL: f64 = 1e-9;

/// White-noise amplitude and mean response magnitude of the price process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Noise amplitude `D` (>= 0).
    pub amplitude_d: f64,
    /// Mean business-unit price response per unit short time `b` (> 0).
    pub response_b: f64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if !self.amplitude_d.is_finite() || self.amplitude_d < 0.0 {
            return Err(Error::invalid(
                "noise_d",
                format!("must be finite and >= 0: {}", self.amplitude_d),
            ));
        }
        if !self.response_b.is_finite() || self.response_b <= 0.0 {
            return Err(Error::invalid(
                "response_b",
                format!("must be finite and > 0: {}", self.response_b),
            ));
        }
        Ok(())
    }

    /// Stationary Laplace scale `D / (2b)`.
    pub fn laplace_scale(&self) -> f64 {
        self.amplitude_d / (2.0 * self.response_b)
    }

    /// Stationary price variance `D^2 / (2 b^2)`.
    pub fn stationary_variance(&self) -> f64 {
        0.5 * (self.amplitude_d / self.response_b).powi(2)
    }
}

/// Per-brand price deviations plus the long-scale price diagnostics.
///
/// `preference_deviations` and `gamma_deviations` are recorded for
/// inspection but deliberately play no role in the dynamics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PriceField {
    /// Per-brand deviations from the mean price.
    pub deviations: Vec<f64>,
    pub mean_price: f64,
    /// Sales-weighted variance of the deviations.
    pub price_variance: f64,
    /// Current decline rate of the mean price.
    pub decline_rate_a: f64,
    /// Price at which supply and demand would clear, when it exists.
    pub mu_clearing: Option<f64>,
    /// Recorded but neglected preference fluctuations.
    pub preference_deviations: Vec<f64>,
    /// Recorded but neglected reproduction-coefficient fluctuations.
    pub gamma_deviations: Vec<f64>,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Deterministic drift on a price deviation.
///
/// Stable regime: `-b sign(dmu)`, pulling brand prices back to the mean.
/// Unstable regime: `+b sign(dmu)`; with no excess supply there is no
/// restoring force and deviations grow. `sign(0) = 0`, so the mean price is
/// a fixed point of the drift in both regimes.
pub fn restoring_force(delta_mu: f64, regime: Regime, response_b: f64) -> f64 {
    match regime {
        Regime::Stable => -response_b * sign(delta_mu),
        Regime::Unstable => response_b * sign(delta_mu),
    }
}

/// One Euler-Maruyama step of the price-deviation dynamics.
///
/// The implied brand price `mean_price + dmu` is kept positive by reflecting
/// at `PRICE_FLOOR_REL * mean_price`.
pub fn langevin_step<R: Rng + ?Sized>(
    delta_mu: f64,
    mean_price: f64,
    noise: &NoiseModel,
    regime: Regime,
    dt_tau: f64,
    rng: &mut R,
) -> f64 {
    let drift = restoring_force(delta_mu, regime, noise.response_b);
    let diffusion = if noise.amplitude_d > 0.0 {
        let xi: f64 = StandardNormal.sample(rng);
        (noise.amplitude_d * dt_tau).sqrt() * xi
    } else {
        0.0
    };
    let mut next = delta_mu + drift * dt_tau + diffusion;
    let floor = PRICE_FLOOR_REL * mean_price;
    let price = mean_price + next;
    if price < floor {
        next = (2.0 * floor - price) - mean_price;
    }
    next
}

/// Stationary probability density of a price deviation,
/// `(b/D) exp(-2b |dmu| / D)`.
///
/// Integrates to one over the real line. Zero noise amplitude is signalled
/// as a degenerate point mass rather than returning an infinity.
pub fn stationary_price_density(delta_mu: f64, noise: &NoiseModel) -> Result<f64> {
    if noise.amplitude_d == 0.0 {
        return Err(Error::DegenerateNoise);
    }
    let rate = 2.0 * noise.response_b / noise.amplitude_d;
    Ok(0.5 * rate * (-rate * delta_mu.abs()).exp())
}

/// Cumulative distribution of the stationary price-deviation law.
pub fn stationary_price_cdf(delta_mu: f64, noise: &NoiseModel) -> Result<f64> {
    if noise.amplitude_d == 0.0 {
        return Err(Error::DegenerateNoise);
    }
    let scale = noise.laplace_scale();
    Ok(if delta_mu < 0.0 {
        0.5 * (delta_mu / scale).exp()
    } else {
        1.0 - 0.5 * (-delta_mu / scale).exp()
    })
}

/// Estimate the mean response magnitude `b` from a deviation series sampled
/// at uniform spacing `dt`.
///
/// `b` enters the model as an input parameter; this estimator exists for
/// consistency checks against simulation output. The drift of the process is
/// `-b sign(dmu)`, so the sign-weighted mean increment recovers `-b dt`
/// while the noise averages out.
pub fn estimate_response(deviations: &[f64], dt: f64) -> Result<f64> {
    if deviations.len() < 100 {
        return Err(Error::SeriesTooShort {
            need: 100,
            got: deviations.len(),
        });
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for pair in deviations.windows(2) {
        let s = sign(pair[0]);
        if s == 0.0 {
            continue;
        }
        total += s * (pair[1] - pair[0]);
        count += 1;
    }
    if count == 0 {
        return Err(Error::DegenerateSeries);
    }
    Ok(-total / (count as f64 * dt))
}

/// Market-level coefficients entering the mean-price law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPriceCoeffs {
    pub epsilon: f64,
    pub mean_preference: f64,
    pub mean_gamma: f64,
    pub psi0: f64,
    pub alpha: f64,
    pub price_variance: f64,
}

/// Decline rate `a` with an explicit leading factor.
pub fn decline_rate_with_factor(coeffs: &MeanPriceCoeffs, factor: f64) -> f64 {
    factor
        * coeffs.epsilon
        * coeffs.mean_preference
        * coeffs.mean_gamma
        * coeffs.psi0
        * coeffs.alpha
        * coeffs.price_variance
}

/// Decline rate `a = 2 eps <eta> <gamma> psi0 alpha Var(P_mu)`.
pub fn decline_rate(coeffs: &MeanPriceCoeffs) -> f64 {
    decline_rate_with_factor(coeffs, DECLINE_RATE_FACTOR)
}

/// One explicit Euler step of the mean-price law
/// `d<mu>/dt = -a (<mu> - mu_nat)`.
///
/// With a positive mean reproduction coefficient the mean price decays
/// toward the natural price; with a negative one it moves away from it.
/// Zero price variance (a one-brand market) leaves the price unchanged.
pub fn mean_price_ode_step(
    mean_price: f64,
    mu_nat: f64,
    coeffs: &MeanPriceCoeffs,
    dt_long: f64,
) -> f64 {
    mean_price - decline_rate(coeffs) * (mean_price - mu_nat) * dt_long
}

/// Closed form of the mean-price law: `mu0 exp(-a t) + mu_nat`.
pub fn mean_price_closed_form(t: f64, mu0_offset: f64, decline_rate_a: f64, mu_nat: f64) -> f64 {
    mu0_offset * (-decline_rate_a * t).exp() + mu_nat
}

/// Regime decision plus the fitness-slope consistency diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `s_t / d - 1`, the supply-demand reproduction coefficient.
    pub mean_gamma: f64,
    /// `df(<mu>)/dmu = -2 <eta> <gamma> psi0 alpha (<mu> - mu_nat)`.
    pub fitness_slope: f64,
    /// For `<mu> > mu_nat`: the slope should be negative in the stable
    /// regime and non-negative in the unstable one. `None` below the
    /// natural price, where the check does not apply.
    pub slope_consistent: Option<bool>,
}

/// Decide the regime from total supply against the demand rate.
pub fn detect_regime(
    total_supply: f64,
    demand: f64,
    mean_price: f64,
    mu_nat: f64,
    mean_preference: f64,
    psi0: f64,
    alpha: f64,
) -> Result<RegimeReport> {
    let mean_gamma = crate::supply::mean_reproduction(total_supply, demand)?;
    let regime = Regime::from_mean_gamma(mean_gamma);
    let fitness_slope =
        -2.0 * mean_preference * mean_gamma * psi0 * alpha * (mean_price - mu_nat);
    let slope_consistent = if mean_price > mu_nat {
        Some(match regime {
            Regime::Stable => fitness_slope < 0.0,
            Regime::Unstable => fitness_slope >= 0.0,
        })
    } else {
        None
    };
    Ok(RegimeReport {
        regime,
        mean_gamma,
        fitness_slope,
        slope_consistent,
    })
}

/// Price at which the demand quadratic would equal total supply, on the
/// upper branch. `None` when no such price exists in the demand region.
pub fn clearing_price(
    total_supply: f64,
    d_max_t: f64,
    alpha: f64,
    mu_nat: f64,
    adopter_fraction: f64,
) -> Option<f64> {
    if alpha <= 0.0 || adopter_fraction <= 0.0 {
        return None;
    }
    let gap = d_max_t - total_supply / adopter_fraction;
    if gap < 0.0 {
        return None;
    }
    Some(mu_nat + (gap / alpha).sqrt())
}

/// Smallest upward jump that pushes demand strictly below total supply, the
/// root of the demand quadratic above the current mean price. `None` when no
/// jump inside the demand region restores excess supply.
pub fn minimal_restabilizing_jump(
    mean_price: f64,
    total_supply: f64,
    d_max_t: f64,
    alpha: f64,
    mu_nat: f64,
    adopter_fraction: f64,
) -> Option<f64> {
    if total_supply <= 0.0 {
        return None;
    }
    let target = clearing_price(total_supply, d_max_t, alpha, mu_nat, adopter_fraction)?;
    let edge = mu_nat + (d_max_t / alpha).sqrt();
    if target >= edge {
        // demand only falls below supply outside the region where the
        // quadratic is valid
        return None;
    }
    Some((target - mean_price).max(0.0))
}

/// Distribution of upward price jumps out of the unstable regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpDist {
    /// Exponential excess over the minimal re-stabilizing jump.
    Exponential { mean: f64 },
    /// Gaussian excess, truncated at zero.
    Gaussian { mean: f64, std_dev: f64 },
}

impl JumpDist {
    pub(crate) fn sample_excess<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpDist::Exponential { mean } => {
                if *mean <= 0.0 {
                    0.0
                } else {
                    Exp::new(1.0 / mean).unwrap().sample(rng)
                }
            }
            JumpDist::Gaussian { mean, std_dev } => {
                let xi: f64 = StandardNormal.sample(rng);
                (mean + std_dev * xi).max(0.0)
            }
        }
    }
}

/// Result of an unstable-regime price jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceJump {
    pub new_mean_price: f64,
    pub jump: f64,
}

/// Apply an upward price jump that re-enters the stable regime.
///
/// Requires the market to be unstable (`mean_gamma <= 0`), otherwise errors.
/// The jump is the minimal re-stabilizing size plus a random excess, capped
/// inside the region where the demand quadratic stays positive. When no jump
/// inside that region restores excess supply the shortage is unresolved and
/// the caller must halt: speculative dynamics are out of scope.
#[allow(clippy::too_many_arguments)]
pub fn unstable_jump<R: Rng + ?Sized>(
    mean_price: f64,
    total_supply: f64,
    demand_at_mean: f64,
    d_max_t: f64,
    alpha: f64,
    mu_nat: f64,
    adopter_fraction: f64,
    dist: &JumpDist,
    rng: &mut R,
) -> Result<PriceJump> {
    let gamma = crate::supply::mean_reproduction(total_supply, demand_at_mean)?;
    if gamma > 0.0 {
        return Err(Error::AlreadyStable);
    }
    let j_min = minimal_restabilizing_jump(
        mean_price,
        total_supply,
        d_max_t,
        alpha,
        mu_nat,
        adopter_fraction,
    )
    .ok_or(Error::ShortageUnresolved)?;

    let edge = mu_nat + (d_max_t / alpha).sqrt();
    let j_max = edge - mean_price;
    if j_max <= j_min {
        return Err(Error::ShortageUnresolved);
    }

    let width = j_max - j_min;
    let mut excess = dist.sample_excess(rng).max(1e-12 * width);
    if j_min + excess >= j_max {
        // overshooting the demand region: land mid-window instead
        excess = 0.5 * width;
    }
    let jump = j_min + excess;
    Ok(PriceJump {
        new_mean_price: mean_price + jump,
        jump,
    })
}
