//! Plot-data emission: delimited columns ready for external plotting tools.
//! No chart rendering happens here.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::demand::{demand_rate, DemandParams};
use crate::error::{Error, Result};
use crate::market::Trajectory;

/// The supported plot-data kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// `t, mean_price`: the long-term price path.
    PricePath,
    /// `mu, demand, supply`: demand and supply against price, with the
    /// clearing point marked in a comment line.
    DemandSupplyCurves,
    /// `t, ln(y_a / y_b)`: half-log substitution diagram for two brands.
    LogShareRatio,
    /// `bin_center, count`: histogram of recorded price deviations.
    PriceHistogram,
}

pub const VALID_KINDS: [&str; 4] = [
    "price_path",
    "demand_supply_curves",
    "log_share_ratio",
    "price_histogram",
];

impl FromStr for PlotKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "price_path" => Ok(PlotKind::PricePath),
            "demand_supply_curves" => Ok(PlotKind::DemandSupplyCurves),
            "log_share_ratio" => Ok(PlotKind::LogShareRatio),
            "price_histogram" => Ok(PlotKind::PriceHistogram),
            other => Err(Error::invalid(
                "plot.kind",
                format!("unknown kind {other:?}; valid kinds: {}", VALID_KINDS.join(", ")),
            )),
        }
    }
}

/// Render plot data for a trajectory.
///
/// `demand` is required for the demand/supply sweep and ignored otherwise.
pub fn emit_plot_data(
    trajectory: &Trajectory,
    kind: PlotKind,
    demand: Option<&DemandParams>,
) -> Result<String> {
    if trajectory.snapshots.is_empty() {
        return Err(Error::SeriesTooShort { need: 1, got: 0 });
    }
    match kind {
        PlotKind::PricePath => {
            let mut out = String::from("t,mean_price\n");
            for s in &trajectory.snapshots {
                let _ = writeln!(out, "{},{}", s.time_long, s.mean_price);
            }
            Ok(out)
        }
        PlotKind::DemandSupplyCurves => {
            let demand = demand.ok_or_else(|| {
                Error::invalid(
                    "plot.kind",
                    "demand_supply_curves needs the scenario's demand parameters",
                )
            })?;
            let last = trajectory.snapshots.last().unwrap();
            let t = last.time_long;
            let n = if last.adopter_fraction.is_finite() {
                last.adopter_fraction
            } else {
                1.0
            };
            let s_t = last.total_supply;
            let half_width = if demand.alpha > 0.0 {
                (demand.d_max_at(t) / demand.alpha).sqrt()
            } else {
                demand.mu_nat
            };
            let lo = (demand.mu_nat - half_width).max(half_width * 1e-3);
            let hi = demand.mu_nat + half_width;
            let mut out = String::new();
            if let Some(mu_c) = crate::price::clearing_price(
                s_t,
                demand.d_max_at(t),
                demand.alpha,
                demand.mu_nat,
                n,
            ) {
                let _ = writeln!(out, "# clearing_price={mu_c}");
            }
            out.push_str("mu,demand,supply\n");
            let points = 200;
            for k in 0..=points {
                let mu = lo + (hi - lo) * k as f64 / points as f64;
                let d = demand_rate(mu, t, demand, n);
                let _ = writeln!(out, "{mu},{d},{s_t}");
            }
            Ok(out)
        }
        PlotKind::LogShareRatio => {
            let mut out = String::from("t,log_share_ratio\n");
            for s in &trajectory.snapshots {
                let (ya, yb) = (s.brand_sales[0], s.brand_sales[1]);
                if ya <= 0.0 || yb <= 0.0 {
                    continue;
                }
                let _ = writeln!(out, "{},{}", s.time_long, (ya / yb).ln());
            }
            Ok(out)
        }
        PlotKind::PriceHistogram => {
            let mut deviations = Vec::new();
            for s in &trajectory.snapshots {
                deviations.extend(s.price_deviations());
            }
            if deviations.is_empty() {
                return Err(Error::SeriesTooShort { need: 1, got: 0 });
            }
            deviations.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let lo = deviations[0];
            let hi = *deviations.last().unwrap();
            let bins = 41usize;
            let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
            let mut counts = vec![0usize; bins];
            for d in &deviations {
                let idx = (((d - lo) / width) as usize).min(bins - 1);
                counts[idx] += 1;
            }
            let mut out = String::from("bin_center,count\n");
            for (i, c) in counts.iter().enumerate() {
                let center = lo + (i as f64 + 0.5) * width;
                let _ = writeln!(out, "{center},{c}");
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{Regime, Snapshot};

    fn trajectory() -> Trajectory {
        let mut traj = Trajectory::default();
        for k in 0..50 {
            let t = k as f64;
            let ratio = (0.002 * t).exp();
            traj.push(Snapshot {
                time_long: t,
                time_short: t / 0.02,
                mean_price: 0.5 + 0.4 * (-0.01 * t).exp(),
                mean_fitness: 0.05,
                mean_gamma: 0.25,
                regime: Regime::Stable,
                total_sales: 0.72,
                total_supply: 0.9,
                demand_rate: 0.9,
                consumer_density: 0.4,
                adopter_fraction: 1.0,
                price_variance: 0.02,
                brand_sales: vec![0.45 * ratio, 0.45],
                brand_prices: vec![0.91, 0.89],
                brand_fitness: vec![0.05, 0.05],
            });
        }
        traj
    }

    #[test]
    fn price_path_trends_to_natural_price() {
        let out = emit_plot_data(&trajectory(), PlotKind::PricePath, None).unwrap();
        let prices: Vec<f64> = out
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(prices.windows(2).all(|w| w[1] <= w[0]));
        assert!(*prices.last().unwrap() > 0.5);
    }

    #[test]
    fn log_share_ratio_is_linear() {
        let out = emit_plot_data(&trajectory(), PlotKind::LogShareRatio, None).unwrap();
        let rows: Vec<(f64, f64)> = out
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split(',');
                (
                    it.next().unwrap().parse().unwrap(),
                    it.next().unwrap().parse().unwrap(),
                )
            })
            .collect();
        // slope between consecutive points is constant at 0.002
        for w in rows.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert!((slope - 0.002).abs() < 1e-12);
        }
    }

    #[test]
    fn demand_supply_marks_clearing_point() {
        let demand = DemandParams {
            alpha: 2.0,
            d_max: 1.0,
            mu_nat: 0.5,
            bass_p: 0.0,
            bass_q: 0.0,
            seasonal_amplitude: 0.0,
            seasonal_period: 1.0,
        };
        let out =
            emit_plot_data(&trajectory(), PlotKind::DemandSupplyCurves, Some(&demand)).unwrap();
        assert!(out.starts_with("# clearing_price="));
        assert!(out.contains("mu,demand,supply"));
        assert!(emit_plot_data(&trajectory(), PlotKind::DemandSupplyCurves, None).is_err());
    }

    #[test]
    fn price_histogram_has_a_tent_profile() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        use rand_distr::{Distribution, Exp1};

        // snapshots whose price deviations are double-exponential draws
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut traj = Trajectory::default();
        for k in 0..500 {
            let deviations: Vec<f64> = (0..40)
                .map(|_| {
                    let e: f64 = Exp1.sample(&mut rng);
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    sign * 0.1 * e
                })
                .collect();
            traj.push(Snapshot {
                time_long: k as f64,
                time_short: k as f64 * 50.0,
                mean_price: 1.0,
                mean_fitness: 0.0,
                mean_gamma: 0.1,
                regime: Regime::Stable,
                total_sales: 1.0,
                total_supply: 1.1,
                demand_rate: 1.0,
                consumer_density: 0.4,
                adopter_fraction: 1.0,
                price_variance: 0.02,
                brand_sales: vec![1.0 / 40.0; 40],
                brand_prices: deviations.iter().map(|d| 1.0 + d).collect(),
                brand_fitness: vec![0.0; 40],
            });
        }
        let out = emit_plot_data(&traj, PlotKind::PriceHistogram, None).unwrap();
        let rows: Vec<(f64, f64)> = out
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split(',');
                (
                    it.next().unwrap().parse().unwrap(),
                    it.next().unwrap().parse().unwrap(),
                )
            })
            .collect();
        // log-counts rise toward the center and fall past it, within noise:
        // compare averaged log-counts over thirds of each side
        let peak_idx = rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
            .unwrap()
            .0;
        assert!((rows[peak_idx].0).abs() < 0.05, "peak off center");
        let log_mean = |slice: &[(f64, f64)]| {
            let vals: Vec<f64> = slice
                .iter()
                .filter(|(_, c)| *c > 0.0)
                .map(|(_, c)| c.ln())
                .collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        let left = &rows[..peak_idx];
        let right = &rows[peak_idx + 1..];
        assert!(log_mean(&left[left.len() / 2..]) > log_mean(&left[..left.len() / 2]));
        assert!(log_mean(&right[..right.len() / 2]) > log_mean(&right[right.len() / 2..]));
    }

    #[test]
    fn unknown_kind_lists_valid_kinds() {
        let err = "histogram".parse::<PlotKind>().unwrap_err();
        let text = err.to_string();
        for kind in VALID_KINDS {
            assert!(text.contains(kind), "{text}");
        }
    }
}
