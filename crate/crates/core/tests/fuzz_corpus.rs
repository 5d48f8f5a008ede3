//! Replays the checked-in fuzz corpus through the parser entry points on stable.

use std::fs;
use std::path::Path;

use secrecy_region::config::{parse_float_list, parse_power_list, Command, PowerSpec, RunConfig, Settings};

fn corpus(target: &str) -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files.iter().map(|p| String::from_utf8_lossy(&fs::read(p).unwrap()).into_owned()).collect()
}

#[test]
fn config_seeds() {
    let mut accepted = 0;
    for text in corpus("config_parse") {
        if let Ok(settings) = Settings::parse(&text) {
            for command in [Command::Maxmin, Command::SingleUser, Command::Critical, Command::Region, Command::Verify] {
                if let Ok(cfg) = RunConfig::from_settings(command, &settings) {
                    assert!(!cfg.channels.is_empty());
                    accepted += 1;
                }
            }
        }
    }
    assert!(accepted > 0);
}

#[test]
fn power_list_seeds() {
    for text in corpus("power_list") {
        if let Ok(list) = parse_power_list(&text) {
            assert!(list.iter().all(|s| !matches!(s, PowerSpec::Value(p) if !(p.is_finite() && *p >= 0.0))));
        }
    }
}

#[test]
fn float_list_seeds() {
    for text in corpus("float_list") {
        if let Ok(list) = parse_float_list(&text) {
            assert!(list.iter().all(|x| x.is_finite()));
        }
    }
}
