//! Command-line front end: scenario execution, the coupled-versus-baseline
//! comparison, and the derivative self-check.
//!
//! Exit codes: `0` success, `1` scenario timeout (or a failed self-check),
//! `2` configuration error, `3` solver numeric failure. The `DOCKMPC_LOG`
//! environment variable (`off`, `info` or `trace`) controls diagnostics;
//! `--verbose` is shorthand for `info`.

use crate::export::{
    write_metrics_json, write_plot_svg, write_residuals_csv, write_trajectory_csv, ExportError,
};
use crate::gradient_check::{run_gradient_check, CheckSettings};
use crate::metrics::MetricsReport;
use crate::scenario::{load_config, preset, ConfigError, ScenarioConfig};
use crate::simulation::{run_scenario, RunOutcome, RunResult, SimError};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TIMEOUT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "dockmpc",
    version,
    about = "Model-predictive in-motion docking and coupled transport simulator"
)]
struct Cli {
    /// Log at info level (DOCKMPC_LOG overrides).
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and write its logs, plot and metrics.
    Run(RunArgs),
    /// Run the logistics pair (coupled and baseline) and report improvements.
    Compare(CompareArgs),
    /// Compare analytic derivatives against central finite differences.
    CheckGradients(CheckArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Built-in scenario: exp1, exp2, exp3_coupled or exp3_baseline.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Path to a scenario document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the disturbance seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Comparison pair to run; only `exp3` is defined.
    #[arg(long, default_value = "exp3")]
    preset: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Run the two scenarios on separate threads.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Number of randomized instances.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Sampling seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn init_logging(verbose: bool) {
    let default = if verbose { "info" } else { "off" };
    let env = env_logger::Env::new()
        .filter_or("DOCKMPC_LOG", default)
        .write_style("DOCKMPC_LOG_STYLE");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

/// Parses `args` (including the program name) and runs to an exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outcomes; real parse errors are
            // configuration errors.
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose);
    match cli.command {
        Command::Run(args) => run_command(args),
        Command::Compare(args) => compare_command(args),
        Command::CheckGradients(args) => check_command(args),
    }
}

fn config_failure(e: &ConfigError) -> i32 {
    eprintln!("error: {e}");
    EXIT_CONFIG
}

fn export_failure(e: &ExportError) -> i32 {
    eprintln!("error: {e}");
    EXIT_CONFIG
}

fn resolve_config(args: &RunArgs) -> Result<ScenarioConfig, ConfigError> {
    match (&args.preset, &args.config) {
        (Some(name), None) => preset(name),
        (None, Some(path)) => load_config(path),
        _ => Err(ConfigError::Invalid(
            "exactly one of --preset or --config is required".into(),
        )),
    }
}

fn execute(config: &ScenarioConfig) -> Result<RunResult, SimError> {
    let scenario = config
        .to_scenario()
        .map_err(|e| SimError::InvalidScenario(e.to_string()))?;
    run_scenario(&scenario)
}

fn write_outputs(dir: &Path, result: &RunResult) -> Result<(), ExportError> {
    std::fs::create_dir_all(dir).map_err(|source| ExportError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    write_trajectory_csv(dir.join("trajectory.csv"), &result.log)?;
    write_residuals_csv(dir.join("residuals.csv"), &result.log)?;
    write_plot_svg(dir.join("plot.svg"), &result.log)?;
    write_metrics_json(dir.join("metrics.json"), &result.metrics)?;
    Ok(())
}

fn summarize(name: &str, result: &RunResult) {
    let m = &result.metrics;
    let end = result.log.rows.last().map(|r| r.t).unwrap_or(0.0);
    println!(
        "{name}: {} after {end:.2} s simulated | total energy {:.2} J, distance {:.2} m | {} solves ({} converged), mean {:.0} inner iterations",
        match result.outcome {
            RunOutcome::Completed => "completed",
            RunOutcome::TimedOut => "TIMED OUT",
        },
        m.total.energy,
        m.total.distance,
        m.solver.solves,
        m.solver.converged,
        m.solver.mean_inner_iterations,
    );
    if let Some(t) = m.dock_time {
        println!("{name}: docked at {t:.2} s");
    }
    if let Some(t) = m.undock_time {
        println!("{name}: undocked at {t:.2} s");
    }
}

fn run_command(args: RunArgs) -> i32 {
    let mut config = match resolve_config(&args) {
        Ok(c) => c,
        Err(e) => return config_failure(&e),
    };
    if let Some(seed) = args.seed {
        config.options.seed = seed;
    }
    let name = if config.name.is_empty() {
        "scenario".to_string()
    } else {
        config.name.clone()
    };
    match execute(&config) {
        Ok(result) => {
            if let Err(e) = write_outputs(&args.out, &result) {
                return export_failure(&e);
            }
            summarize(&name, &result);
            println!("{name}: outputs in {}", args.out.display());
            match result.outcome {
                RunOutcome::Completed => EXIT_OK,
                RunOutcome::TimedOut => EXIT_TIMEOUT,
            }
        }
        Err(SimError::InvalidScenario(msg)) => {
            eprintln!("error: invalid scenario: {msg}");
            EXIT_CONFIG
        }
        Err(e @ SimError::Numeric { .. }) => {
            eprintln!("error: {e}");
            EXIT_NUMERIC
        }
    }
}

struct ComparisonRow {
    label: &'static str,
    unit: &'static str,
    baseline: f64,
    coupled: f64,
    improvement_pct: f64,
}

/// Improvement table of the coupled run over the baseline (positive = the
/// coupled run is better).
fn comparison_rows(baseline: &MetricsReport, coupled: &MetricsReport) -> Vec<ComparisonRow> {
    let imp = coupled.improvement_over(baseline);
    vec![
        ComparisonRow {
            label: "time",
            unit: "s",
            baseline: baseline.total.time,
            coupled: coupled.total.time,
            improvement_pct: imp.time_pct,
        },
        ComparisonRow {
            label: "energy",
            unit: "J",
            baseline: baseline.total.energy,
            coupled: coupled.total.energy,
            improvement_pct: imp.energy_pct,
        },
        ComparisonRow {
            label: "distance",
            unit: "m",
            baseline: baseline.total.distance,
            coupled: coupled.total.distance,
            improvement_pct: imp.distance_pct,
        },
    ]
}

fn compare_command(args: CompareArgs) -> i32 {
    if args.preset != "exp3" {
        eprintln!("error: unknown comparison '{}' (only exp3 is defined)", args.preset);
        return EXIT_CONFIG;
    }
    let coupled_cfg = preset("exp3_coupled").expect("built-in preset");
    let baseline_cfg = preset("exp3_baseline").expect("built-in preset");

    let (coupled, baseline) = if args.parallel {
        let pair = std::thread::scope(|scope| {
            let c = scope.spawn(|| execute(&coupled_cfg));
            let b = scope.spawn(|| execute(&baseline_cfg));
            (c.join(), b.join())
        });
        match pair {
            (Ok(c), Ok(b)) => (c, b),
            _ => {
                eprintln!("error: a comparison worker panicked");
                return EXIT_NUMERIC;
            }
        }
    } else {
        (execute(&coupled_cfg), execute(&baseline_cfg))
    };

    let mut code = EXIT_OK;
    let mut unwrap_run = |label: &str, run: Result<RunResult, SimError>| match run {
        Ok(result) => {
            if result.outcome == RunOutcome::TimedOut {
                eprintln!("error: {label} run timed out");
                code = code.max(EXIT_TIMEOUT);
            }
            Some(result)
        }
        Err(SimError::InvalidScenario(msg)) => {
            eprintln!("error: {label}: {msg}");
            code = code.max(EXIT_CONFIG);
            None
        }
        Err(e @ SimError::Numeric { .. }) => {
            eprintln!("error: {label}: {e}");
            code = code.max(EXIT_NUMERIC);
            None
        }
    };
    let coupled = unwrap_run("coupled", coupled);
    let baseline = unwrap_run("baseline", baseline);
    let (Some(coupled), Some(baseline)) = (coupled, baseline) else {
        return code;
    };

    for (sub, result) in [("coupled", &coupled), ("baseline", &baseline)] {
        if let Err(e) = write_outputs(&args.out.join(sub), result) {
            return export_failure(&e);
        }
        summarize(sub, result);
    }

    println!();
    println!("{:<10} {:>12} {:>12} {:>13}", "metric", "baseline", "coupled", "improvement");
    for row in comparison_rows(&baseline.metrics, &coupled.metrics) {
        println!(
            "{:<10} {:>10.2} {} {:>10.2} {} {:>11.2}%",
            row.label, row.baseline, row.unit, row.coupled, row.unit, row.improvement_pct
        );
    }

    let imp = coupled.metrics.improvement_over(&baseline.metrics);
    let path = args.out.join("improvements.json");
    let text = serde_json::to_string_pretty(&imp).expect("summary serialization is infallible");
    if let Err(source) = std::fs::write(&path, text + "\n") {
        return export_failure(&ExportError::Io {
            path: path.display().to_string(),
            source,
        });
    }
    println!("\ncomparison written to {}", args.out.display());
    code
}

fn check_command(args: CheckArgs) -> i32 {
    let outcome = run_gradient_check(&CheckSettings {
        trials: args.trials,
        seed: args.seed,
        ..CheckSettings::default()
    });
    println!(
        "{} instances | max relative error {:.3e} (tolerance {:.0e}) | {:.0} ms",
        outcome.instances,
        outcome.max_rel_error,
        CheckSettings::default().tolerance,
        outcome.elapsed.as_secs_f64() * 1e3,
    );
    if outcome.pass {
        println!("derivative check passed");
        EXIT_OK
    } else {
        eprintln!(
            "derivative check FAILED (worst instance {})",
            outcome.worst_instance
        );
        EXIT_TIMEOUT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<OsString> {
        std::iter::once("dockmpc")
            .chain(list.iter().copied())
            .map(OsString::from)
            .collect()
    }

    #[test]
    fn missing_config_file_exits_2() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let code = run_cli(args(&[
            "run",
            "--config",
            "/nonexistent/missing.json",
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn unknown_preset_exits_2() {
        let code = run_cli(args(&["run", "--preset", "exp99"]));
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn run_requires_a_source() {
        let code = run_cli(args(&["run"]));
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn compare_rejects_unknown_pair() {
        let code = run_cli(args(&["compare", "--preset", "exp1"]));
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(run_cli(args(&["--help"])), EXIT_OK);
    }

    #[test]
    fn check_gradients_small_sweep_passes() {
        assert_eq!(run_cli(args(&["check-gradients", "--trials", "10"])), EXIT_OK);
    }

    #[test]
    fn timed_out_scenario_exits_1() {
        // A goal far outside reach within a tiny time budget.
        let dir = tempfile::tempdir().unwrap();
        let config_path = dir.path().join("slow.json");
        std::fs::write(
            &config_path,
            r#"{"schema":1,"initial":{"robot1":{"x":0,"y":-2},"robot2":{"x":0,"y":2}},
                "script":[{"event":"goto","robot":1,"pose":{"x":50,"y":0}}],
                "options":{"max_sim_time":1.0}}"#,
        )
        .unwrap();
        let out = dir.path().join("out");
        let code = run_cli(args(&[
            "run",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]));
        assert_eq!(code, EXIT_TIMEOUT);
        assert!(out.join("trajectory.csv").exists());
        assert!(out.join("metrics.json").exists());
    }
}
