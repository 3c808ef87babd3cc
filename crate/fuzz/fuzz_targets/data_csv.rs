#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;

const SPEC: &str = "[[model]]\nname = \"TAM\"\nm = 5\nadd_no_adoption_stage = true\n\
                    [[model]]\nname = \"CMM\"\nm = 5\n";

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let loaded = adoption_index_cli::parse_spec(SPEC, Path::new("spec.toml")).unwrap();
    if let Ok(ds) = adoption_index_cli::parse_data(text, Path::new("fuzz.csv"), &loaded) {
        assert!(ds.n() > ds.k());
        assert!(ds.rows().all(|row| row.iter().all(|&v| v <= 5)));
        // downstream estimators must not panic on anything that validates
        let _ = adoption_index::estimate_moments(&ds)
            .and_then(|m| adoption_index::index_variance(&m, ds.spec()));
    }
});
