#![no_main]

use libfuzzer_sys::fuzz_target;
use secrecy_region::config::{parse_power_list, PowerSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(list) = parse_power_list(text) {
        for spec in list {
            if let PowerSpec::Value(p) = spec {
                assert!(p.is_finite() && p >= 0.0);
            }
        }
    }
});
