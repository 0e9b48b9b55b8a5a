#![no_main]

use crsp::cli::SweepConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = SweepConfig::from_json(s) {
        let text = serde_json::to_string(&cfg).unwrap();
        SweepConfig::from_json(&text).unwrap();
    }
});
