#![no_main]

use crsp::catalog::CatalogKey;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(key) = s.parse::<CatalogKey>() {
        assert_eq!(key.to_string().parse::<CatalogKey>().unwrap(), key);
    }
});
