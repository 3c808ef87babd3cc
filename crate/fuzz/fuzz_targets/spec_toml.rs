#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(loaded) = adoption_index_cli::parse_spec(text, Path::new("fuzz.toml")) {
            assert_eq!(loaded.shift.len(), loaded.spec.k());
            let sum: f64 = loaded.spec.weights().sum();
            assert!((sum - 1.0).abs() <= 1e-9);
        }
    }
});
