#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;

const SPEC: &str =
    "[[model]]\nname = \"TAM\"\nm = 2\n[[model]]\nname = \"CMM\"\nm = 3\nalpha = 2.0\nbeta = 1.5\n";

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let spec = adoption_index_cli::parse_spec(SPEC, Path::new("spec.toml"))
        .unwrap()
        .spec;
    if let Ok(mut plan) = adoption_index_cli::parse_plan(text, Path::new("fuzz.toml"), spec) {
        // keep each run cheap; the parser is the target
        plan.n = plan.n.min(40);
        plan.replications = plan.replications.min(3);
        let _ = adoption_index::run_study(&plan);
    }
});
