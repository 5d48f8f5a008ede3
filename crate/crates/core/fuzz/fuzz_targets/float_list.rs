#![no_main]

use libfuzzer_sys::fuzz_target;
use secrecy_region::config::parse_float_list;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(list) = parse_float_list(text) {
        assert!(list.iter().all(|x| x.is_finite()));
    }
});
