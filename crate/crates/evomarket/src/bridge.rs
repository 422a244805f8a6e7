//! Reduced-form spot-price models the evolutionary dynamics maps onto:
//! Ornstein-Uhlenbeck mean reversion and Poisson jump-diffusion.
//!
//! ```text
//! dmu = -lambda (mu - mean) dtau + sigma dW              (mean reversion)
//! dmu = -lambda (mu - mean) dtau + sigma dW + J dQ(f)    (with jumps)
//! ```
//!
//! The diffusion term is Gaussian, so its stationary tails are thin; the
//! full short-scale price process carries fat Laplace tails instead. The
//! estimator suite exists to tell the two apart. Proportional volatility
//! (`sigma` scaled by the current price) is available as an option for fat
//! tails within the diffusion family.
//!
//! Jump arrivals are discretized by Bernoulli thinning of a Poisson process,
//! valid while `f * dt <= 0.1`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::price::JumpDist;

/// Maximum jump arrival probability per step for Bernoulli thinning.
pub const MAX_JUMP_PROB_PER_STEP: f64 = 0.1;

/// Mean-reverting diffusion parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    /// Reversion velocity toward the long-term mean (> 0 for stationarity).
    pub reversion_lambda: f64,
    /// Constant volatility (>= 0).
    pub volatility_sigma: f64,
    /// Long-term mean price the process reverts to.
    pub long_term_mean: f64,
}

impl OuParams {
    pub fn validate(&self) -> Result<()> {
        if !self.reversion_lambda.is_finite() || self.reversion_lambda <= 0.0 {
            return Err(Error::invalid(
                "reversion_lambda",
                format!("must be finite and > 0: {}", self.reversion_lambda),
            ));
        }
        if !self.volatility_sigma.is_finite() || self.volatility_sigma < 0.0 {
            return Err(Error::invalid(
                "volatility_sigma",
                format!("must be finite and >= 0: {}", self.volatility_sigma),
            ));
        }
        Ok(())
    }

    /// Stationary variance `sigma^2 / (2 lambda)`.
    pub fn stationary_variance(&self) -> f64 {
        self.volatility_sigma * self.volatility_sigma / (2.0 * self.reversion_lambda)
    }
}

/// One Euler-Maruyama step of the mean-reverting diffusion.
pub fn ou_step<R: Rng + ?Sized>(mu: f64, params: &OuParams, dt: f64, rng: &mut R) -> f64 {
    let xi: f64 = StandardNormal.sample(rng);
    mu - params.reversion_lambda * (mu - params.long_term_mean) * dt
        + params.volatility_sigma * dt.sqrt() * xi
}

/// Jump-diffusion parameters: a diffusion core plus Poisson-arriving jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpDiffusionParams {
    pub ou: OuParams,
    /// Jump arrival frequency per unit time (>= 0).
    pub jump_frequency: f64,
    /// Distribution of the jump size.
    pub jump_size: JumpDist,
    /// Volatility proportional to the current price instead of constant.
    pub pilipovic_mode: bool,
}

/// One jump-diffusion step: a diffusion update plus, with probability
/// `f * dt`, an added jump. Returns the new price and whether a jump fired.
pub fn jump_diffusion_step<R: Rng + ?Sized>(
    mu: f64,
    params: &JumpDiffusionParams,
    dt: f64,
    rng: &mut R,
) -> Result<(f64, bool)> {
    let p_jump = params.jump_frequency * dt;
    if p_jump > MAX_JUMP_PROB_PER_STEP {
        return Err(Error::JumpRateTooHigh(p_jump));
    }

    let sigma = if params.pilipovic_mode {
        params.ou.volatility_sigma * mu
    } else {
        params.ou.volatility_sigma
    };
    let xi: f64 = StandardNormal.sample(rng);
    let mut next = mu - params.ou.reversion_lambda * (mu - params.ou.long_term_mean) * dt
        + sigma * dt.sqrt() * xi;

    let fired = p_jump > 0.0 && rng.gen::<f64>() < p_jump;
    if fired {
        next += params.jump_size.sample_excess(rng);
    }
    Ok((next, fired))
}

/// Calibrated mean-reversion parameters with asymptotic standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuFit {
    pub params: OuParams,
    /// Lag-one autoregression coefficient, `exp(-lambda dt)` in theory.
    pub ar_coefficient: f64,
    pub lambda_std_error: f64,
    pub sigma_std_error: f64,
}

/// Estimate reversion velocity, volatility and long-term mean from a
/// uniformly sampled series via its lag-one autoregression.
///
/// Needs at least 100 samples and a non-constant series.
pub fn calibrate_ou(series: &[f64], dt: f64) -> Result<OuFit> {
    if series.len() < 100 {
        return Err(Error::SeriesTooShort {
            need: 100,
            got: series.len(),
        });
    }
    let n = series.len() - 1;
    let xs = &series[..n];
    let ys = &series[1..];
    let xm = xs.iter().sum::<f64>() / n as f64;
    let ym = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let phi = sxy / sxx;
    let intercept = ym - phi * xm;

    let residual_var = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + phi * x);
            e * e
        })
        .sum::<f64>()
        / (n as f64 - 2.0);

    if phi <= 0.0 || phi >= 1.0 {
        return Err(Error::invalid(
            "series",
            format!("autoregression coefficient {phi} outside (0, 1); not mean reverting"),
        ));
    }

    let lambda = -phi.ln() / dt;
    let mean = intercept / (1.0 - phi);
    // invert the exact AR(1) innovation variance sigma^2 (1 - phi^2) / (2 lambda)
    let sigma_sq = residual_var * 2.0 * lambda / (1.0 - phi * phi);

    let phi_std_error = (residual_var / sxx).sqrt();
    let lambda_std_error = phi_std_error / (phi * dt);
    let sigma = sigma_sq.sqrt();
    let sigma_std_error = sigma * (0.5 / n as f64).sqrt();

    Ok(OuFit {
        params: OuParams {
            reversion_lambda: lambda,
            volatility_sigma: sigma,
            long_term_mean: mean,
        },
        ar_coefficient: phi,
        lambda_std_error,
        sigma_std_error,
    })
}

/// Empirical autocorrelation of a series at the given lag.
pub fn autocorrelation(series: &[f64], lag: usize) -> f64 {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum();
    if var == 0.0 || lag >= n {
        return 0.0;
    }
    let cov: f64 = series[..n - lag]
        .iter()
        .zip(&series[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    cov / var
}
