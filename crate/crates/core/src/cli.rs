//! Command execution behind the `secrecy-region` binary.
//!
//! Exit codes: 0 success, 2 invalid input, 3 verification failure, 1 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::{Command, OutputFormat, PowerSpec, RunConfig};
use crate::error::Error;
use crate::model::{ChannelParams, PowerConstraint};
use crate::optima::{compare_operating_modes, critical_power, maxmin_point, single_user_point};
use crate::oracle::GridSpec;
use crate::region::sample_region;
use crate::report::{self, channel_cells, fmt_num, strategy_cells, Table};
use crate::verify::{run_suite, ClosedForms};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_VERIFICATION_FAILED: i32 = 3;

/// Power-axis density for region sampling with the splits pinned at zero.
pub const PINNED_REGION_POWER_SAMPLES: usize = 200;

pub const MAXMIN_COLUMNS: &[&str] =
    &["a", "a_c", "N", "P", "power_limited", "r_min_star", "p_min_star", "lambda_max", "chosen_lambda", "p_star"];
pub const SINGLE_USER_COLUMNS: &[&str] =
    &["a", "a_c", "N", "P", "user", "r_su_star", "delta", "p1", "p2", "lambda1", "lambda2"];
pub const CRITICAL_COLUMNS: &[&str] = &["a", "a_c", "N", "P_c", "P", "mode", "maxmin_rate", "timeshare_rate"];
pub const VERIFY_COLUMNS: &[&str] = &["check", "passed", "measured", "threshold"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INVALID_INPUT,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn resolve_power(ch: &ChannelParams, spec: PowerSpec) -> Result<PowerConstraint, Error> {
    match spec {
        PowerSpec::Value(p) => PowerConstraint::new(p),
        PowerSpec::Critical => PowerConstraint::new(critical_power(ch)?),
    }
}

fn emit(config: &RunConfig, body: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &config.out {
        Some(path) => fs::write(path, body).map_err(io_err(path)),
        None => stdout.write_all(body.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn emit_table(config: &RunConfig, table: &Table, stdout: &mut dyn Write) -> Result<(), CliError> {
    let body = match config.format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => report::document(config, table.to_json_rows()),
    };
    emit(config, &body, stdout)
}

/// Runs the configured command and returns the process exit code.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    execute_with(config, &ClosedForms::default(), stdout)
}

/// As [`execute`], with the closed forms `verify` checks against.
pub fn execute_with(config: &RunConfig, forms: &ClosedForms, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match config.command {
        Command::Maxmin => cmd_maxmin(config, stdout),
        Command::SingleUser => cmd_single_user(config, stdout),
        Command::Critical => cmd_critical(config, stdout),
        Command::Region => cmd_region(config, stdout),
        Command::Verify => cmd_verify(config, forms, stdout),
    }
}

fn cmd_maxmin(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut table = Table::new(MAXMIN_COLUMNS);
    for ch in &config.channels {
        for &spec in &config.powers {
            let power = resolve_power(ch, spec)?;
            let sol = maxmin_point(ch, power, config.lambda)?;
            let mut row = channel_cells(ch);
            row.extend([
                fmt_num(power.peak()),
                sol.power_limited.to_string(),
                fmt_num(sol.r_min_star),
                fmt_num(sol.p_min_star),
                fmt_num(sol.lambda_max),
                fmt_num(sol.chosen_lambda),
                fmt_num(sol.p_star),
            ]);
            table.push(row);
        }
    }
    emit_table(config, &table, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_single_user(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut table = Table::new(SINGLE_USER_COLUMNS);
    for ch in &config.channels {
        for &spec in &config.powers {
            let power = resolve_power(ch, spec)?;
            let sol = single_user_point(ch, power, config.user)?;
            let mut row = channel_cells(ch);
            row.extend([
                fmt_num(power.peak()),
                sol.user.index().to_string(),
                fmt_num(sol.r_su_star),
                fmt_num(sol.delta),
            ]);
            row.extend(strategy_cells(&sol.strategy));
            table.push(row);
        }
    }
    emit_table(config, &table, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_critical(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut table = Table::new(CRITICAL_COLUMNS);
    for ch in &config.channels {
        let pc = critical_power(ch)?;
        let specs = if config.powers.is_empty() { vec![PowerSpec::Critical] } else { config.powers.clone() };
        for spec in specs {
            let power = resolve_power(ch, spec)?;
            let cmp = compare_operating_modes(ch, power)?;
            let mut row = channel_cells(ch);
            row.extend([
                fmt_num(pc),
                fmt_num(power.peak()),
                cmp.mode.as_str().to_string(),
                fmt_num(cmp.maxmin_rate),
                fmt_num(cmp.timeshare_rate),
            ]);
            table.push(row);
        }
    }
    emit_table(config, &table, stdout)?;
    Ok(EXIT_OK)
}

/// File name for one region export, e.g. `region_a1_ac0.05_n1_p100_an.csv`.
pub fn region_file_name(ch: &ChannelParams, power: PowerConstraint, an: bool, format: OutputFormat) -> String {
    format!(
        "region_a{}_ac{}_n{}_p{}_{}.{}",
        fmt_num(ch.a()),
        fmt_num(ch.a_c()),
        fmt_num(ch.noise()),
        fmt_num(power.peak()),
        if an { "an" } else { "noan" },
        match format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    )
}

fn cmd_region(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let dir = config
        .out
        .as_ref()
        .ok_or_else(|| Error::Domain("region writes one file per case; pass --out <directory>".into()))?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let modes: &[bool] = if config.allow_artificial_noise { &[true, false] } else { &[false] };
    for ch in &config.channels {
        for &spec in &config.powers {
            let power = resolve_power(ch, spec)?;
            for &an in modes {
                let grid = if an || config.grid_power_explicit {
                    config.grid
                } else {
                    GridSpec::new(
                        PINNED_REGION_POWER_SAMPLES,
                        config.grid.n_lambda(),
                        config.grid.refine_rounds(),
                        config.grid.zoom_factor(),
                    )?
                };
                let region = sample_region(ch, power, &grid, an);
                let body = match config.format {
                    OutputFormat::Csv => report::region_csv(&region, config.with_frontier),
                    OutputFormat::Json => report::region_json(config, &region),
                };
                let path = dir.join(region_file_name(ch, power, an, config.format));
                fs::write(&path, body).map_err(io_err(&path))?;
                writeln!(stdout, "{}", path.display()).map_err(io_err(Path::new("<stdout>")))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(config: &RunConfig, forms: &ClosedForms, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut base = Vec::new();
    for ch in &config.channels {
        ch.require_secrecy()?;
        for &spec in &config.powers {
            base.push((*ch, resolve_power(ch, spec)?));
        }
    }
    let report = run_suite(&base, &config.grid, config.draws, config.seed, forms);

    let mut table = Table::new(VERIFY_COLUMNS);
    for c in &report.checks {
        table.push(vec![c.name.clone(), c.passed.to_string(), fmt_num(c.measured), fmt_num(c.threshold)]);
    }
    match config.format {
        OutputFormat::Csv => emit(config, &table.to_csv(), stdout)?,
        OutputFormat::Json => {
            let results = json!({ "passed": report.passed(), "checks": table.to_json_rows() });
            emit(config, &report::document(config, results), stdout)?
        }
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFICATION_FAILED })
}
