//! Command-line entry points behind the `evomarket` binary.
//!
//! Verbs: `simulate`, `ensemble`, `fit`, `plot`, `validate`.
//! Exit codes: 0 success, 1 scenario validation error, 2 runtime error,
//! 3 statistical-test failure under `ensemble --check`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::estimators::{fit_laplace, growth_rates, FitReport};
use crate::plot::PlotKind;
use crate::scenario::{Scenario, ScenarioFile};
use crate::sim::{run_ensemble, run_scenario, EnsembleConfig};
use crate::timeseries;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_STATISTICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "evomarket",
    about = "Evolutionary market simulator: replicator sales dynamics, Laplace price law, \
             regime detection, jump-diffusion bridge",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file (TOML).
    #[arg(long, short = 's')]
    scenario: PathBuf,
    /// Output directory; overrides the scenario's `outputs.directory`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Seed override for this invocation.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one seeded simulation and write its time series.
    Simulate(ScenarioArgs),
    /// Run independent replicates and write size/growth fit reports.
    Ensemble {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Replicate count; overrides the scenario's `run.ensemble_size`.
        #[arg(long, short = 'r')]
        replicates: Option<usize>,
        /// Run replicates one after another instead of in parallel.
        #[arg(long)]
        sequential: bool,
        /// Acceptance mode: exit 3 if a distribution test fails.
        #[arg(long)]
        check: bool,
    },
    /// Run the estimators on an existing time-series file.
    Fit {
        /// Time-series file written by `simulate`.
        #[arg(long, short = 'i')]
        input: PathBuf,
        /// Where to write the JSON report (stdout when omitted).
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
        /// Growth-rate window in snapshots.
        #[arg(long, default_value_t = 1)]
        window: usize,
    },
    /// Emit plot data from an existing time-series file.
    Plot {
        #[arg(long, short = 'i')]
        input: PathBuf,
        /// One of: price_path, demand_supply_curves, log_share_ratio,
        /// price_histogram.
        #[arg(long, short = 'k')]
        kind: String,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
        /// Scenario file, needed by demand_supply_curves.
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Parse and validate a scenario file without running it.
    Validate {
        #[arg(long, short = 's')]
        scenario: PathBuf,
    },
}

fn load_scenario(path: &Path) -> Result<Scenario, String> {
    let file = ScenarioFile::load(path).map_err(|e| e.to_string())?;
    file.validate().map_err(|e| e.to_string())
}

fn write_or_print(output: Option<&Path>, content: &str) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn out_dir(args: &ScenarioArgs, scenario: &Scenario) -> PathBuf {
    args.out_dir
        .clone()
        .unwrap_or_else(|| scenario.outputs.directory.clone())
}

fn cmd_simulate(args: &ScenarioArgs) -> Result<i32, (i32, String)> {
    let scenario =
        load_scenario(&args.scenario).map_err(|e| (EXIT_VALIDATION, e))?;
    let trajectory =
        run_scenario(&scenario, args.seed).map_err(|e| (EXIT_RUNTIME, e.to_string()))?;
    let dir = out_dir(args, &scenario);
    std::fs::create_dir_all(&dir)
        .map_err(|e| (EXIT_RUNTIME, format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(&scenario.outputs.timeseries);
    timeseries::write_file(&trajectory, &path)
        .map_err(|e| (EXIT_RUNTIME, format!("cannot write {}: {e}", path.display())))?;
    println!(
        "wrote {} ({} snapshots, {} jumps{})",
        path.display(),
        trajectory.snapshots.len(),
        trajectory.jumps.len(),
        trajectory
            .halt
            .map(|h| format!(", halted: {}", h.as_str()))
            .unwrap_or_default()
    );
    Ok(EXIT_OK)
}

fn cmd_ensemble(
    args: &ScenarioArgs,
    replicates: Option<usize>,
    sequential: bool,
    check: bool,
) -> Result<i32, (i32, String)> {
    let scenario =
        load_scenario(&args.scenario).map_err(|e| (EXIT_VALIDATION, e))?;
    let cfg = EnsembleConfig {
        replicates: replicates.unwrap_or(scenario.ensemble_size),
        sequential,
        ..EnsembleConfig::default()
    };
    let report =
        run_ensemble(&scenario, args.seed, &cfg).map_err(|e| (EXIT_RUNTIME, e.to_string()))?;

    let dir = out_dir(args, &scenario);
    std::fs::create_dir_all(&dir)
        .map_err(|e| (EXIT_RUNTIME, format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(&scenario.outputs.report);

    let json = serde_json::json!({
        "replicates": report.replicates,
        "failed": report.failed,
        "size_samples": report.size_samples,
        "growth_samples": report.growth_samples,
        "lognormal_sizes": report.lognormal_sizes,
        "laplace_growth": report.laplace_growth,
        "log_size_variance": report.log_size_variance,
    });
    std::fs::write(&path, serde_json::to_string_pretty(&json).unwrap())
        .map_err(|e| (EXIT_RUNTIME, format!("cannot write {}: {e}", path.display())))?;

    let passes = |r: &Option<FitReport>| r.as_ref().is_none_or(|f| f.ks_pass);
    let all_pass = passes(&report.lognormal_sizes) && passes(&report.laplace_growth);
    println!(
        "wrote {} ({} replicates, {} failed, lognormal {} / laplace {})",
        path.display(),
        report.replicates,
        report.failed.len(),
        report
            .lognormal_sizes
            .as_ref()
            .map_or("n/a".into(), |f| format!("p={:.4}", f.ks_p_value)),
        report
            .laplace_growth
            .as_ref()
            .map_or("n/a".into(), |f| format!("p={:.4}", f.ks_p_value)),
    );
    if check && (!all_pass || !report.failed.is_empty()) {
        return Ok(EXIT_STATISTICAL);
    }
    Ok(EXIT_OK)
}

fn cmd_fit(input: &Path, output: Option<&Path>, window: usize) -> Result<i32, (i32, String)> {
    let trajectory = timeseries::read_file(input).map_err(|e| (EXIT_VALIDATION, e.to_string()))?;

    // per-brand statistics only exist for runs with brand blocks
    let (growth_fit, deviation_fit, skipped) = if trajectory.brand_count() > 0 {
        let growth =
            growth_rates(&trajectory, window).map_err(|e| (EXIT_RUNTIME, e.to_string()))?;
        let mut deviations = Vec::new();
        for snap in &trajectory.snapshots {
            deviations.extend(snap.price_deviations());
        }
        let fit = fit_laplace(&growth.samples).map_err(|e| (EXIT_RUNTIME, e.to_string()))?;
        (Some(fit), fit_laplace(&deviations).ok(), growth.skipped)
    } else {
        (None, None, 0)
    };

    // mean-reversion calibration of the mean-price column, for uniformly
    // sampled series long enough to carry a signal
    let (prices, spacing) = timeseries::mean_price_series(&trajectory);
    let reversion = spacing.and_then(|dt| {
        crate::bridge::calibrate_ou(&prices, dt).ok().map(|fit| {
            serde_json::json!({
                "reversion_lambda": fit.params.reversion_lambda,
                "volatility_sigma": fit.params.volatility_sigma,
                "long_term_mean": fit.params.long_term_mean,
                "ar_coefficient": fit.ar_coefficient,
                "lambda_std_error": fit.lambda_std_error,
                "sigma_std_error": fit.sigma_std_error,
            })
        })
    });

    let json = serde_json::json!({
        "growth_rates": growth_fit,
        "price_deviations": deviation_fit,
        "skipped_growth_windows": skipped,
        "mean_price_reversion": reversion,
    });
    write_or_print(output, &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()))
        .map_err(|e| (EXIT_RUNTIME, e))?;
    Ok(EXIT_OK)
}

fn cmd_plot(
    input: &Path,
    kind: &str,
    output: Option<&Path>,
    scenario: Option<&Path>,
) -> Result<i32, (i32, String)> {
    let kind = PlotKind::from_str(kind).map_err(|e| (EXIT_VALIDATION, e.to_string()))?;
    let trajectory = timeseries::read_file(input).map_err(|e| (EXIT_VALIDATION, e.to_string()))?;
    let demand = match scenario {
        Some(path) => Some(load_scenario(path).map_err(|e| (EXIT_VALIDATION, e))?.demand),
        None => None,
    };
    let data = crate::plot::emit_plot_data(&trajectory, kind, demand.as_ref())
        .map_err(|e| (EXIT_RUNTIME, e.to_string()))?;
    write_or_print(output, &data).map_err(|e| (EXIT_RUNTIME, e))?;
    Ok(EXIT_OK)
}

fn cmd_validate(path: &Path) -> Result<i32, (i32, String)> {
    let scenario = load_scenario(path).map_err(|e| (EXIT_VALIDATION, e))?;
    println!(
        "ok: {} brands, horizon {}, seed {}",
        scenario.brands.len(),
        scenario.run.horizon,
        scenario.params.rng_seed
    );
    Ok(EXIT_OK)
}

/// Parse arguments, dispatch, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with code 0
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Ensemble {
            scenario,
            replicates,
            sequential,
            check,
        } => cmd_ensemble(scenario, *replicates, *sequential, *check),
        Command::Fit {
            input,
            output,
            window,
        } => cmd_fit(input, output.as_deref(), *window),
        Command::Plot {
            input,
            kind,
            output,
            scenario,
        } => cmd_plot(input, kind, output.as_deref(), scenario.as_deref()),
        Command::Validate { scenario } => cmd_validate(scenario),
    };
    match result {
        Ok(code) => code,
        Err((code, message)) => {
            eprintln!("error: {message}");
            code
        }
    }
}
