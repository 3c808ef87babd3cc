//! Replays the checked-in fuzz corpus through the parser entry points with
//! the same invariants the fuzz targets assert.

use std::fs;
use std::path::{Path, PathBuf};

use adoption_index_cli::{parse_data, parse_plan, parse_spec, parse_structured, render, Format};

fn corpus(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| entry.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds for {target}");
    files
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect()
}

#[test]
fn spec_seeds() {
    let mut parsed = 0;
    for (path, text) in corpus("spec_toml") {
        if let Ok(loaded) = parse_spec(&text, &path) {
            assert_eq!(loaded.shift.len(), loaded.spec.k());
            parsed += 1;
        }
    }
    assert!(parsed >= 3);
}

#[test]
fn data_seeds() {
    let spec = "[[model]]\nname = \"TAM\"\nm = 5\nadd_no_adoption_stage = true\n[[model]]\nname = \"CMM\"\nm = 5\n";
    let loaded = parse_spec(spec, Path::new("spec.toml")).unwrap();
    let mut outcomes = Vec::new();
    for (path, text) in corpus("data_csv") {
        let result = parse_data(&text, &path, &loaded);
        if let Ok(ds) = &result {
            assert!(ds.n() > ds.k());
        }
        outcomes.push(result.is_ok());
    }
    assert!(outcomes.contains(&true) && outcomes.contains(&false));
}

#[test]
fn plan_seeds() {
    let spec = "[[model]]\nname = \"TAM\"\nm = 5\nalpha = 1.0\nbeta = 2.0\n\
                [[model]]\nname = \"CMM\"\nm = 5\nalpha = 2.0\nbeta = 1.0\n";
    let spec = parse_spec(spec, Path::new("spec.toml")).unwrap().spec;
    for (path, text) in corpus("plan_toml") {
        if let Ok(mut plan) = parse_plan(&text, &path, spec.clone()) {
            plan.n = plan.n.min(40);
            plan.replications = plan.replications.min(3);
            let _ = adoption_index::run_study(&plan);
        }
    }
}

#[test]
fn report_seeds() {
    for (path, text) in corpus("report_json") {
        let report = parse_structured(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = render(&report, Format::Structured);
        assert_eq!(again, text, "{}", path.display());
        assert_eq!(parse_structured(&again).unwrap(), report);
        let _ = render(&report, Format::Table);
    }
}

mod mutated {
    use super::*;
    use proptest::prelude::*;

    fn mutate(seed: &str, edits: &[(usize, char)]) -> String {
        let mut chars: Vec<char> = seed.chars().collect();
        for &(pos, c) in edits {
            if chars.is_empty() {
                chars.push(c);
                continue;
            }
            let at = pos % chars.len();
            match pos % 3 {
                0 => chars[at] = c,
                1 => chars.insert(at, c),
                _ => {
                    chars.remove(at);
                }
            }
        }
        chars.into_iter().collect()
    }

    fn edits() -> impl Strategy<Value = Vec<(usize, char)>> {
        proptest::collection::vec(
            (
                any::<usize>(),
                prop::sample::select("0159,.-\n\"[]=ex ".chars().collect::<Vec<_>>()),
            ),
            1..8,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn parsers_never_panic(which in 0usize..64, edits in edits()) {
            let spec_seeds = corpus("spec_toml");
            let data_seeds = corpus("data_csv");
            let plan_seeds = corpus("plan_toml");
            let report_seeds = corpus("report_json");

            let (path, text) = &spec_seeds[which % spec_seeds.len()];
            if let Ok(loaded) = parse_spec(&mutate(text, &edits), path) {
                prop_assert_eq!(loaded.shift.len(), loaded.spec.k());
            }

            let spec = parse_spec("[[model]]\nname = \"TAM\"\nm = 5\n[[model]]\nname = \"CMM\"\nm = 5\n", Path::new("s")).unwrap();
            let (path, text) = &data_seeds[which % data_seeds.len()];
            if let Ok(ds) = parse_data(&mutate(text, &edits), path, &spec) {
                prop_assert!(ds.n() > ds.k());
            }

            let (path, text) = &plan_seeds[which % plan_seeds.len()];
            if let Ok(plan) = parse_plan(&mutate(text, &edits), path, spec.spec.clone()) {
                prop_assert!(plan.n > 2);
            }

            let (_, text) = &report_seeds[which % report_seeds.len()];
            if let Ok(report) = parse_structured(&mutate(text, &edits)) {
                let again = render(&report, Format::Structured);
                prop_assert_eq!(parse_structured(&again).unwrap(), report);
            }
        }
    }
}
