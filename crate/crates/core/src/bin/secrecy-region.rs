use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use secrecy_region::cli::{execute, EXIT_INVALID_INPUT};
use secrecy_region::config::{Command, RunConfig, Settings};

/// Secrecy-rate regions of the symmetric Gaussian interference channel with
/// artificial noise.
#[derive(Parser)]
#[command(name = "secrecy-region", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Closed-form max-min point
    Maxmin(Flags),
    /// Closed-form single-user point
    SingleUser(Flags),
    /// Critical power and max-min vs time-sharing comparison
    Critical(Flags),
    /// Export sampled rate regions (hull, optionally frontier), one file per case
    Region(Flags),
    /// Cross-check closed forms against the brute-force oracle
    Verify(Flags),
}

#[derive(Args)]
struct Flags {
    /// Flat key=value file using the flag names below; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Direct channel gain (linear)
    #[arg(long)]
    a: Option<String>,
    /// Cross channel gain (linear)
    #[arg(long)]
    ac: Option<String>,
    /// Noise variance
    #[arg(long)]
    n: Option<String>,
    /// Peak power per user
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated peak powers; `pc` means the critical power
    #[arg(long = "p-list")]
    p_list: Option<String>,
    /// Comma-separated cross gains (one case each)
    #[arg(long = "ac-list")]
    ac_list: Option<String>,
    /// Samples per power axis
    #[arg(long = "grid-power")]
    grid_power: Option<String>,
    /// Samples per artificial-noise axis
    #[arg(long = "grid-lambda")]
    grid_lambda: Option<String>,
    /// Oracle refinement rounds
    #[arg(long)]
    refine: Option<String>,
    /// Oracle zoom factor per refinement round
    #[arg(long)]
    zoom: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Output file (region: output directory)
    #[arg(long)]
    out: Option<String>,
    /// Seed for randomized verification draws
    #[arg(long)]
    seed: Option<String>,
    /// Disable artificial noise (region: only the no-noise region)
    #[arg(long = "no-an")]
    no_an: bool,
    /// Served user for single-user (1 or 2)
    #[arg(long)]
    user: Option<String>,
    /// Artificial-noise fraction within the admissible max-min interval
    #[arg(long)]
    lambda: Option<String>,
    /// Random channel draws for verify
    #[arg(long)]
    draws: Option<String>,
    /// Also emit Pareto frontier rows in region CSV files
    #[arg(long = "with-frontier")]
    with_frontier: bool,
}

impl Flags {
    fn settings(&self) -> Result<Settings, String> {
        let mut settings = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                Settings::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => Settings::default(),
        };
        let values = [
            ("a", &self.a),
            ("ac", &self.ac),
            ("n", &self.n),
            ("p", &self.p),
            ("p-list", &self.p_list),
            ("ac-list", &self.ac_list),
            ("grid-power", &self.grid_power),
            ("grid-lambda", &self.grid_lambda),
            ("refine", &self.refine),
            ("zoom", &self.zoom),
            ("format", &self.format),
            ("out", &self.out),
            ("seed", &self.seed),
            ("user", &self.user),
            ("lambda", &self.lambda),
            ("draws", &self.draws),
        ];
        for (key, value) in values {
            if let Some(v) = value {
                settings.set(key, v.as_str()).map_err(|e| e.to_string())?;
            }
        }
        if self.no_an {
            settings.set("no-an", "true").map_err(|e| e.to_string())?;
        }
        if self.with_frontier {
            settings.set("with-frontier", "true").map_err(|e| e.to_string())?;
        }
        Ok(settings)
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("SECRECY_REGION_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size worker pool: {e}");
                }
            }
            _ => log::warn!("ignoring SECRECY_REGION_THREADS={v:?}: expected a positive integer"),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();

    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Sub::Maxmin(f) => (Command::Maxmin, f),
        Sub::SingleUser(f) => (Command::SingleUser, f),
        Sub::Critical(f) => (Command::Critical, f),
        Sub::Region(f) => (Command::Region, f),
        Sub::Verify(f) => (Command::Verify, f),
    };

    let config = match flags.settings().and_then(|s| RunConfig::from_settings(command, &s).map_err(|e| e.to_string())) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID_INPUT as u8);
        }
    };

    let mut stdout = std::io::stdout().lock();
    match execute(&config, &mut stdout) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
