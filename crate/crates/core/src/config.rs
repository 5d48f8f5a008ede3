//! Run configuration: flat `key = value` files, list syntax and validation.
//!
//! Keys are the long CLI flag names without the leading dashes. Blank lines
//! and lines starting with `#` are ignored. Later occurrences of a key win,
//! and command-line flags override the file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChannelParams, User};
use crate::oracle::GridSpec;

pub const KNOWN_KEYS: &[&str] = &[
    "a",
    "ac",
    "n",
    "p",
    "p-list",
    "ac-list",
    "grid-power",
    "grid-lambda",
    "refine",
    "zoom",
    "format",
    "out",
    "seed",
    "no-an",
    "user",
    "lambda",
    "draws",
    "with-frontier",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Maxmin,
    SingleUser,
    Critical,
    Region,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Maxmin => "maxmin",
            Command::SingleUser => "single-user",
            Command::Critical => "critical",
            Command::Region => "region",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// One entry of a power list: a number, or `pc` for the channel's critical power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerSpec {
    Value(f64),
    Critical,
}

/// Raw settings keyed by flag name. Values keep the line they came from (0 for
/// command-line flags) so errors can point at it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    entries: BTreeMap<String, (usize, String)>,
}

impl Settings {
    /// Parses a flat `key = value` file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(Error::Parse { line, message: format!("expected key = value, got {trimmed:?}") });
            };
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Parse { line, message: format!("unknown key {key:?}") });
            }
            settings.entries.insert(key.to_string(), (line, value.trim().to_string()));
        }
        Ok(settings)
    }

    /// Sets a value from the command line, overriding any file entry.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::domain(format!("unknown setting {key:?}")));
        }
        self.entries.insert(key.to_string(), (0, value.into()));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    fn fail(&self, key: &str, message: String) -> Error {
        match self.entries.get(key) {
            Some(&(line, _)) if line > 0 => Error::Parse { line, message: format!("{key}: {message}") },
            _ => Error::domain(format!("--{key}: {message}")),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_float(v).map_err(|m| self.fail(key, m))).transpose()
    }

    fn integer(&self, key: &str) -> Result<Option<u64>> {
        self.get(key).map(|v| v.parse::<u64>().map_err(|e| self.fail(key, format!("{v:?}: {e}")))).transpose()
    }

    fn flag(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "1" | "yes" | "") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(self.fail(key, format!("expected true or false, got {v:?}"))),
        }
    }
}

fn parse_float(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = v.trim().parse().map_err(|e| format!("{v:?}: {e}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{v:?} is not finite"))
    }
}

/// Comma-separated finite numbers.
pub fn parse_float_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().all(|s| s.is_empty()) {
        return Err("empty list".to_string());
    }
    items.into_iter().map(parse_float).collect()
}

/// Comma-separated powers; the token `pc` stands for the critical power.
pub fn parse_power_list(text: &str) -> std::result::Result<Vec<PowerSpec>, String> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().all(|s| s.is_empty()) {
        return Err("empty list".to_string());
    }
    items
        .into_iter()
        .map(|s| {
            if s.eq_ignore_ascii_case("pc") {
                Ok(PowerSpec::Critical)
            } else {
                let x = parse_float(s)?;
                if x < 0.0 {
                    Err(format!("power {x} is negative"))
                } else {
                    Ok(PowerSpec::Value(x))
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    /// One channel per cross gain; a single entry unless `ac-list` is given.
    pub channels: Vec<ChannelParams>,
    /// Empty only for `critical`, which then reports at the critical power.
    pub powers: Vec<PowerSpec>,
    pub grid: GridSpec,
    /// Explicit power-axis density; `region` otherwise samples 200 points per
    /// axis when the splits are pinned at zero.
    pub grid_power_explicit: bool,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub allow_artificial_noise: bool,
    pub user: User,
    pub lambda: Option<f64>,
    pub draws: usize,
    pub with_frontier: bool,
}

pub const DEFAULT_SEED: u64 = 2010;
pub const DEFAULT_DRAWS: usize = 50;

impl RunConfig {
    pub fn from_settings(command: Command, s: &Settings) -> Result<Self> {
        let require = |key: &str| -> Result<f64> {
            s.float(key)?.ok_or_else(|| Error::domain(format!("missing required setting --{key}")))
        };
        let a = require("a")?;
        let noise = require("n")?;
        let cross_gains = match s.get("ac-list") {
            Some(list) => parse_float_list(list).map_err(|m| s.fail("ac-list", m))?,
            None => vec![require("ac")?],
        };
        let channels =
            cross_gains.into_iter().map(|ac| ChannelParams::new(a, ac, noise)).collect::<Result<Vec<_>>>()?;

        let powers = match (s.get("p-list"), s.float("p")?) {
            (Some(list), _) => parse_power_list(list).map_err(|m| s.fail("p-list", m))?,
            (None, Some(p)) if p >= 0.0 => vec![PowerSpec::Value(p)],
            (None, Some(p)) => return Err(s.fail("p", format!("power {p} is negative"))),
            (None, None) if command == Command::Critical => Vec::new(),
            (None, None) => return Err(Error::domain("missing required setting --p (or --p-list)")),
        };

        let defaults = GridSpec::default();
        let count =
            |key: &str, default: usize| -> Result<usize> { Ok(s.integer(key)?.map(|v| v as usize).unwrap_or(default)) };
        let grid = GridSpec::new(
            count("grid-power", defaults.n_power())?,
            count("grid-lambda", defaults.n_lambda())?,
            count("refine", defaults.refine_rounds())?,
            s.float("zoom")?.unwrap_or(defaults.zoom_factor()),
        )?;

        let format = match s.get("format") {
            None | Some("csv") => OutputFormat::Csv,
            Some("json") => OutputFormat::Json,
            Some(other) => return Err(s.fail("format", format!("expected csv or json, got {other:?}"))),
        };

        let user = match s.integer("user")? {
            None => User::One,
            Some(u) => User::try_from(u8::try_from(u).unwrap_or(0))?,
        };

        Ok(RunConfig {
            command,
            channels,
            powers,
            grid,
            grid_power_explicit: s.get("grid-power").is_some(),
            format,
            out: s.get("out").map(PathBuf::from),
            seed: s.integer("seed")?.unwrap_or(DEFAULT_SEED),
            allow_artificial_noise: !s.flag("no-an")?,
            user,
            lambda: s.float("lambda")?,
            draws: count("draws", DEFAULT_DRAWS)?,
            with_frontier: s.flag("with-frontier")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_settings() -> Settings {
        Settings::parse("a = 1\nac = 0.05\nn = 1\np = 100\n").unwrap()
    }

    #[test]
    fn parses_file_with_comments() {
        let s = Settings::parse("# reference channel\n\na=1\n  ac = 0.05 \nn=1\np-list = 30, pc ,100\n").unwrap();
        let cfg = RunConfig::from_settings(Command::Critical, &s).unwrap();
        assert_eq!(cfg.channels[0].a_c(), 0.05);
        assert_eq!(cfg.powers, vec![PowerSpec::Value(30.0), PowerSpec::Critical, PowerSpec::Value(100.0)]);
        assert_eq!(cfg.grid, GridSpec::default());
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert!(cfg.allow_artificial_noise);
    }

    #[test]
    fn flags_override_file() {
        let mut s = fig2_settings();
        s.set("p", "10").unwrap();
        s.set("no-an", "true").unwrap();
        let cfg = RunConfig::from_settings(Command::Maxmin, &s).unwrap();
        assert_eq!(cfg.powers, vec![PowerSpec::Value(10.0)]);
        assert!(!cfg.allow_artificial_noise);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            Settings::parse("a = 1\nbogus line\n").unwrap_err(),
            Error::Parse { line: 2, message: "expected key = value, got \"bogus line\"".into() }
        );
        assert!(matches!(Settings::parse("colour = red"), Err(Error::Parse { line: 1, .. })));
        let s = Settings::parse("a = 1\nac = x\nn = 1\np = 1").unwrap();
        assert!(matches!(RunConfig::from_settings(Command::Maxmin, &s), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn missing_and_invalid_values() {
        let s = Settings::parse("a = 1\nn = 1\np = 1").unwrap();
        assert!(RunConfig::from_settings(Command::Maxmin, &s).is_err());
        let mut s = fig2_settings();
        s.set("format", "xml").unwrap();
        assert!(RunConfig::from_settings(Command::Maxmin, &s).is_err());
        let mut s = fig2_settings();
        s.set("grid-power", "1").unwrap();
        assert!(RunConfig::from_settings(Command::Verify, &s).is_err());
        let mut s = fig2_settings();
        s.set("user", "3").unwrap();
        assert!(RunConfig::from_settings(Command::SingleUser, &s).is_err());
        let mut s = fig2_settings();
        s.set("n", "-1").unwrap();
        assert!(RunConfig::from_settings(Command::Maxmin, &s).is_err());
        let mut s = fig2_settings();
        s.set("p", "inf").unwrap();
        assert!(RunConfig::from_settings(Command::Maxmin, &s).is_err());
        assert!(fig2_settings().set("unknown", "1").is_err());
    }

    #[test]
    fn critical_allows_missing_power() {
        let s = Settings::parse("a = 1\nac = 0.05\nn = 1").unwrap();
        assert!(RunConfig::from_settings(Command::Critical, &s).unwrap().powers.is_empty());
        assert!(RunConfig::from_settings(Command::Region, &s).is_err());
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_float_list("0.01, 0.2,0.5").unwrap(), vec![0.01, 0.2, 0.5]);
        assert!(parse_float_list("").is_err());
        assert!(parse_float_list("1,,2").is_err());
        assert!(parse_float_list("1,nan").is_err());
        assert!(parse_power_list("-3").is_err());
        assert_eq!(parse_power_list("PC").unwrap(), vec![PowerSpec::Critical]);
    }
}
