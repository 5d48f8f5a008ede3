#![no_main]

use libfuzzer_sys::fuzz_target;
use secrecy_region::config::{Command, RunConfig, Settings};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(settings) = Settings::parse(text) else { return };
    for command in [Command::Maxmin, Command::SingleUser, Command::Critical, Command::Region, Command::Verify] {
        if let Ok(cfg) = RunConfig::from_settings(command, &settings) {
            assert!(!cfg.channels.is_empty());
        }
    }
});
