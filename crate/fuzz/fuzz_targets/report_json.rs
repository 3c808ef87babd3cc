#![no_main]

use adoption_index_cli::{parse_structured, render, Format};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = parse_structured(text) {
        let again = render(&report, Format::Structured);
        assert_eq!(parse_structured(&again).unwrap(), report);
        let _ = render(&report, Format::Table);
    }
});
