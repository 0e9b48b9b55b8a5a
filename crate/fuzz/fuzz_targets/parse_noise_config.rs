#![no_main]

use crsp::channels::{NoiseConfig, NoiseKind, NoiseSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let _ = s.parse::<NoiseKind>();
    if let Ok(spec) = s.parse::<NoiseSpec>() {
        assert!((0.0..=1.0).contains(&spec.rate()));
    }
    if let Ok(cfg) = s.parse::<NoiseConfig>() {
        assert_eq!(cfg.to_string().parse::<NoiseConfig>().unwrap(), cfg);
    }
});
