#![no_main]

use crsp::cli::{AxisSpec, RangeSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = s.parse::<RangeSpec>() {
        // Cap the allocation; the parser itself accepts any step count.
        if r.steps <= 1 << 16 {
            assert_eq!(r.values().len(), r.steps);
        }
    }
    if let Ok(a) = s.parse::<AxisSpec>() {
        assert_eq!(a.to_string().parse::<AxisSpec>().unwrap(), a);
    }
});
