//! Statistical verification layer: distribution fits and hypothesis checks
//! for the model's emergent laws — Laplace price deviations and growth
//! rates, lognormal business-unit sizes.
//!
//! Only the tests the model's claims require live here; this is not a
//! general statistics library.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::Trajectory;

/// Default significance level for Kolmogorov-Smirnov checks. Loose enough
/// to bound flakiness in Monte-Carlo suites.
pub const DEFAULT_KS_SIGNIFICANCE: f64 = 0.01;

/// Sample moments used across every fit report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Central sample moments up to the fourth.
pub fn moments(samples: &[f64]) -> Moments {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for x in samples {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    Moments {
        mean,
        variance: m2,
        skewness,
        excess_kurtosis,
    }
}

/// Kolmogorov-Smirnov statistic and asymptotic p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Sup-norm distance between the empirical CDF of `samples` and a reference
/// CDF, with the asymptotic two-sided Kolmogorov p-value.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if samples.len() < 5 {
        return Err(Error::SeriesTooShort {
            need: 5,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x).clamp(0.0, 1.0);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        sup = sup.max(above).max(below);
    }
    Ok(KsResult {
        statistic: sup,
        p_value: kolmogorov_p_value(n.sqrt() * sup),
    })
}

/// Two-sided tail of the Kolmogorov distribution at `z = sqrt(n) * D`.
pub fn kolmogorov_p_value(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 1.18 {
        // theta-function form, fast for small z
        let factor = (2.0 * std::f64::consts::PI).sqrt() / z;
        let t = (-std::f64::consts::PI * std::f64::consts::PI / (8.0 * z * z)).exp();
        let cdf = factor * (t + t.powi(9) + t.powi(25) + t.powi(49));
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        // alternating series, fast for large z
        let mut sum = 0.0;
        for k in 1..=100 {
            let term = (-2.0 * (k as f64) * (k as f64) * z * z).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-16 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Error function via the rational approximation with |error| < 1.5e-7.
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

/// CDF of the normal distribution.
pub fn normal_cdf(x: f64, mean: f64, std_dev: f64) -> f64 {
    if std_dev <= 0.0 {
        return if x < mean { 0.0 } else { 1.0 };
    }
    0.5 * (1.0 + erf((x - mean) / (std_dev * std::f64::consts::SQRT_2)))
}

/// CDF of the Laplace distribution.
pub fn laplace_cdf(x: f64, location: f64, scale: f64) -> f64 {
    let z = (x - location) / scale;
    if z < 0.0 {
        0.5 * z.exp()
    } else {
        1.0 - 0.5 * (-z).exp()
    }
}

/// Tent-shape diagnostic: linearity of the log-density on each side of the
/// location, the signature of a double-exponential law in a semi-log plot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TentShape {
    pub left_slope: f64,
    pub right_slope: f64,
    pub left_r_squared: f64,
    pub right_r_squared: f64,
    /// Log-counts rise toward the location and fall past it.
    pub pass: bool,
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - xm) * (a - xm)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let syy: f64 = y.iter().map(|b| (b - ym) * (b - ym)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

fn tent_shape(sorted: &[f64], location: f64) -> Option<TentShape> {
    let n = sorted.len();
    if n < 200 {
        return None;
    }
    let bins = 41usize;
    let lo = sorted[(n as f64 * 0.005) as usize];
    let hi = sorted[((n as f64 * 0.995) as usize).min(n - 1)];
    if hi <= lo {
        return None;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for x in sorted {
        if *x < lo || *x >= hi {
            continue;
        }
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let mut left_x = Vec::new();
    let mut left_y = Vec::new();
    let mut right_x = Vec::new();
    let mut right_y = Vec::new();
    for (i, c) in counts.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let center = lo + (i as f64 + 0.5) * width;
        let log_count = (*c as f64).ln();
        if center < location {
            left_x.push(center);
            left_y.push(log_count);
        } else {
            right_x.push(center);
            right_y.push(log_count);
        }
    }
    if left_x.len() < 3 || right_x.len() < 3 {
        return None;
    }
    let (left_slope, left_r_squared) = linear_fit(&left_x, &left_y);
    let (right_slope, right_r_squared) = linear_fit(&right_x, &right_y);
    Some(TentShape {
        left_slope,
        right_slope,
        left_r_squared,
        right_r_squared,
        pass: left_slope > 0.0 && right_slope < 0.0,
    })
}

/// Outcome of a distribution fit: parameters, goodness-of-fit and moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub distribution: String,
    pub location: f64,
    pub scale: f64,
    /// Drift per unit time for size fits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
    pub log_likelihood: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    pub ks_pass: bool,
    pub significance: f64,
    pub sample_count: usize,
    pub moments: Moments,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tent_shape: Option<TentShape>,
    /// All samples identical: parameters are boundary values, no test ran.
    pub degenerate: bool,
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Maximum-likelihood Laplace fit: location is the sample median, scale the
/// mean absolute deviation from it. Includes a KS test against the fitted
/// law and the tent-shape diagnostic.
pub fn fit_laplace(samples: &[f64]) -> Result<FitReport> {
    fit_laplace_at(samples, DEFAULT_KS_SIGNIFICANCE)
}

/// [`fit_laplace`] at an explicit significance level.
pub fn fit_laplace_at(samples: &[f64], significance: f64) -> Result<FitReport> {
    if samples.len() < 30 {
        return Err(Error::SeriesTooShort {
            need: 30,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted.first() == sorted.last() {
        return Err(Error::IdenticalSamples);
    }
    let location = median_of_sorted(&sorted);
    let scale = sorted.iter().map(|x| (x - location).abs()).sum::<f64>() / sorted.len() as f64;
    let n = sorted.len() as f64;
    let log_likelihood = -n * (2.0 * scale).ln()
        - sorted.iter().map(|x| (x - location).abs()).sum::<f64>() / scale;
    let ks = ks_statistic(&sorted, |x| laplace_cdf(x, location, scale))?;
    Ok(FitReport {
        distribution: "laplace".to_string(),
        location,
        scale,
        drift: None,
        log_likelihood,
        ks_statistic: ks.statistic,
        ks_p_value: ks.p_value,
        ks_pass: ks.p_value > significance,
        significance,
        sample_count: sorted.len(),
        moments: moments(&sorted),
        tent_shape: tent_shape(&sorted, location),
        degenerate: false,
    })
}

/// Normal fit to log-sizes `ln(size / size0)` with the drift and volatility
/// reported per unit elapsed time: `u = mean / t`, `omega^2 = variance / t`.
///
/// `size_ratios` are sizes already scaled by their baseline. All ratios must
/// be positive. An all-equal sample yields the degenerate zero-drift,
/// zero-volatility edge report.
pub fn fit_lognormal(size_ratios: &[f64], elapsed_t: f64) -> Result<FitReport> {
    fit_lognormal_at(size_ratios, elapsed_t, DEFAULT_KS_SIGNIFICANCE)
}

/// [`fit_lognormal`] at an explicit significance level.
pub fn fit_lognormal_at(
    size_ratios: &[f64],
    elapsed_t: f64,
    significance: f64,
) -> Result<FitReport> {
    if size_ratios.is_empty() {
        return Err(Error::SeriesTooShort { need: 1, got: 0 });
    }
    if elapsed_t <= 0.0 {
        return Err(Error::invalid(
            "elapsed_t",
            format!("must be positive: {elapsed_t}"),
        ));
    }
    if size_ratios.iter().any(|s| *s <= 0.0) {
        return Err(Error::NonPositiveSize);
    }
    let logs: Vec<f64> = size_ratios.iter().map(|s| s.ln()).collect();
    let m = moments(&logs);
    let drift = m.mean / elapsed_t;
    let omega = (m.variance / elapsed_t).sqrt();

    if m.variance == 0.0 {
        return Ok(FitReport {
            distribution: "lognormal".to_string(),
            location: m.mean,
            scale: 0.0,
            drift: Some(drift),
            log_likelihood: f64::NEG_INFINITY,
            ks_statistic: 0.0,
            ks_p_value: 1.0,
            ks_pass: true,
            significance,
            sample_count: logs.len(),
            moments: m,
            tent_shape: None,
            degenerate: true,
        });
    }

    let std_dev = m.variance.sqrt();
    let n = logs.len() as f64;
    let log_likelihood = -0.5
        * n
        * ((2.0 * std::f64::consts::PI * m.variance).ln() + 1.0);
    let ks = ks_statistic(&logs, |x| normal_cdf(x, m.mean, std_dev))?;
    Ok(FitReport {
        distribution: "lognormal".to_string(),
        location: m.mean,
        scale: omega,
        drift: Some(drift),
        log_likelihood,
        ks_statistic: ks.statistic,
        ks_p_value: ks.p_value,
        ks_pass: ks.p_value > significance,
        significance,
        sample_count: logs.len(),
        moments: m,
        tent_shape: None,
        degenerate: false,
    })
}

/// Pooled per-brand growth rates extracted from a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSamples {
    /// `ln(y(tau + w) / y(tau)) / w` pooled over brands and windows.
    pub samples: Vec<f64>,
    /// Windows skipped because a brand had no positive sales in them.
    pub skipped: usize,
}

/// Log growth rates over `window` snapshots, pooled across brands.
///
/// Windows touching zero or floored sales are skipped and counted.
pub fn growth_rates(trajectory: &Trajectory, window: usize) -> Result<GrowthSamples> {
    let snaps = &trajectory.snapshots;
    if snaps.len() < window + 1 || window == 0 {
        return Err(Error::SeriesTooShort {
            need: window + 1,
            got: snaps.len(),
        });
    }
    let brands = trajectory.brand_count();
    let mut samples = Vec::new();
    let mut skipped = 0usize;
    for k in 0..snaps.len() - window {
        let a = &snaps[k];
        let b = &snaps[k + window];
        let dt = b.time_short - a.time_short;
        for i in 0..brands {
            let ya = a.brand_sales[i];
            let yb = b.brand_sales[i];
            if ya <= 0.0 || yb <= 0.0 {
                skipped += 1;
                continue;
            }
            samples.push((yb / ya).ln() / dt);
        }
    }
    Ok(GrowthSamples { samples, skipped })
}
