//! Time-series persistence: one delimited text file per run.
//!
//! Layout (`SCHEMA_VERSION` guards golden files):
//!
//! ```text
//! # evomarket-timeseries v1 brands=N
//! t,tau,mean_price,mean_fitness,mean_gamma,regime,y_t,s_t,y_0,mu_0,f_0,...
//! ```
//!
//! One row per snapshot, `8 + 3 N` columns, strictly increasing `t`.
//! Numbers are written in shortest round-trip decimal form, so identical
//! runs produce byte-identical files on every platform.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::market::{Regime, Snapshot, Trajectory};

/// Version tag written into the header line.
pub const SCHEMA_VERSION: u32 = 1;

/// Fixed columns before the per-brand blocks.
pub const FIXED_COLUMNS: usize = 8;

/// Render a trajectory to the delimited text format.
pub fn render(trajectory: &Trajectory) -> String {
    let n = trajectory.brand_count();
    let mut out = String::new();
    let _ = writeln!(out, "# evomarket-timeseries v{SCHEMA_VERSION} brands={n}");
    out.push_str("t,tau,mean_price,mean_fitness,mean_gamma,regime,y_t,s_t");
    for i in 0..n {
        let _ = write!(out, ",y_{i},mu_{i},f_{i}");
    }
    out.push('\n');
    for snap in &trajectory.snapshots {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            snap.time_long,
            snap.time_short,
            snap.mean_price,
            snap.mean_fitness,
            snap.mean_gamma,
            snap.regime.as_str(),
            snap.total_sales,
            snap.total_supply
        );
        for i in 0..n {
            let _ = write!(
                out,
                ",{},{},{}",
                snap.brand_sales[i], snap.brand_prices[i], snap.brand_fitness[i]
            );
        }
        out.push('\n');
    }
    if let Some(halt) = trajectory.halt {
        let _ = writeln!(out, "# halt={}", halt.as_str());
    }
    out
}

/// Write a trajectory to a file.
pub fn write_file(trajectory: &Trajectory, path: &std::path::Path) -> std::io::Result<()> {
    std::fs::write(path, render(trajectory))
}

fn parse_field<T: FromStr>(field: &str, line: usize, what: &'static str) -> Result<T> {
    field.parse().map_err(|_| {
        Error::invalid(
            "timeseries",
            format!("line {line}: cannot parse {what} from {field:?}"),
        )
    })
}

/// Parse the delimited text format back into a trajectory.
///
/// Only the columns present in the schema are recovered; jump events are not
/// part of the file.
pub fn parse(text: &str) -> Result<Trajectory> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::invalid("timeseries", "empty file"))?;
    let expected_prefix = format!("# evomarket-timeseries v{SCHEMA_VERSION} brands=");
    let brand_count: usize = header
        .strip_prefix(&expected_prefix)
        .ok_or_else(|| {
            Error::invalid(
                "timeseries",
                format!("unrecognized header {header:?}; expected {expected_prefix}N"),
            )
        })?
        .trim()
        .parse()
        .map_err(|_| Error::invalid("timeseries", "bad brand count in header"))?;

    let (_, _columns) = lines
        .next()
        .ok_or_else(|| Error::invalid("timeseries", "missing column header"))?;

    let mut trajectory = Trajectory::default();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# halt=") {
            trajectory.halt = match rest.trim() {
                "shortage-unresolved" => Some(crate::market::HaltReason::ShortageUnresolved),
                "demand-collapsed" => Some(crate::market::HaltReason::DemandCollapsed),
                other => {
                    return Err(Error::invalid(
                        "timeseries",
                        format!("unknown halt reason {other:?}"),
                    ))
                }
            };
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = FIXED_COLUMNS + 3 * brand_count;
        if fields.len() != expected {
            return Err(Error::invalid(
                "timeseries",
                format!(
                    "line {}: expected {expected} columns, got {}",
                    lineno + 1,
                    fields.len()
                ),
            ));
        }
        let ln = lineno + 1;
        let regime = Regime::from_str(fields[5])
            .map_err(|e| Error::invalid("timeseries", format!("line {ln}: {e}")))?;
        let mut brand_sales = Vec::with_capacity(brand_count);
        let mut brand_prices = Vec::with_capacity(brand_count);
        let mut brand_fitness = Vec::with_capacity(brand_count);
        for i in 0..brand_count {
            brand_sales.push(parse_field(fields[FIXED_COLUMNS + 3 * i], ln, "sales")?);
            brand_prices.push(parse_field(fields[FIXED_COLUMNS + 3 * i + 1], ln, "price")?);
            brand_fitness.push(parse_field(
                fields[FIXED_COLUMNS + 3 * i + 2],
                ln,
                "fitness",
            )?);
        }
        trajectory.push(Snapshot {
            time_long: parse_field(fields[0], ln, "t")?,
            time_short: parse_field(fields[1], ln, "tau")?,
            mean_price: parse_field(fields[2], ln, "mean_price")?,
            mean_fitness: parse_field(fields[3], ln, "mean_fitness")?,
            mean_gamma: parse_field(fields[4], ln, "mean_gamma")?,
            regime,
            total_sales: parse_field(fields[6], ln, "y_t")?,
            total_supply: parse_field(fields[7], ln, "s_t")?,
            demand_rate: f64::NAN,
            consumer_density: f64::NAN,
            adopter_fraction: f64::NAN,
            price_variance: f64::NAN,
            brand_sales,
            brand_prices,
            brand_fitness,
        });
    }
    Ok(trajectory)
}

/// Read a time-series file from disk.
pub fn read_file(path: &std::path::Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid("timeseries", format!("{}: {e}", path.display())))?;
    parse(&text)
}

/// Wrap a bare price path in the shared schema (zero brand blocks), so
/// reduced-model sample paths move through the same files as full runs.
pub fn from_price_path(epsilon: f64, dt: f64, prices: &[f64]) -> Trajectory {
    let mut trajectory = Trajectory::default();
    for (k, price) in prices.iter().enumerate() {
        let tau = k as f64 * dt;
        trajectory.push(Snapshot {
            time_long: epsilon * tau,
            time_short: tau,
            mean_price: *price,
            mean_fitness: 0.0,
            mean_gamma: 0.0,
            regime: Regime::Stable,
            total_sales: 0.0,
            total_supply: 0.0,
            demand_rate: 0.0,
            consumer_density: 0.0,
            adopter_fraction: 1.0,
            price_variance: 0.0,
            brand_sales: Vec::new(),
            brand_prices: Vec::new(),
            brand_fitness: Vec::new(),
        });
    }
    trajectory
}

/// Extract the mean-price column at its (uniform) long-time spacing.
pub fn mean_price_series(trajectory: &Trajectory) -> (Vec<f64>, Option<f64>) {
    let prices: Vec<f64> = trajectory.snapshots.iter().map(|s| s.mean_price).collect();
    let dt = if trajectory.snapshots.len() >= 2 {
        let steps: Vec<f64> = trajectory
            .snapshots
            .windows(2)
            .map(|w| w[1].time_long - w[0].time_long)
            .collect();
        let first = steps[0];
        if steps.iter().all(|s| (s - first).abs() <= 1e-9 * first.abs().max(1e-12)) {
            Some(first)
        } else {
            None
        }
    } else {
        None
    };
    (prices, dt)
}
