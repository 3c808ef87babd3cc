//! TOML study specs and simulation plans.
//!
//! A study spec lists models in data-column order:
//!
//! ```toml
//! [[model]]
//! name = "TAM"
//! m = 5
//! alpha = 1.0                     # default 1
//! beta = 1.0                      # default 1
//! weight = 0.5                    # all or none; none means equal weights
//! add_no_adoption_stage = false   # default false
//! # preset = "s-shaped"           # instead of alpha/beta
//! ```
//!
//! A simulation plan describes the population and the study to run:
//!
//! ```toml
//! study = "coverage"      # normality | coverage | size | power | variance-ratio
//! n = 500
//! replications = 10000
//! seed = 7
//! significance = 0.05     # optional
//! level = 0.95            # optional
//! pmf = [[0.1, 0.2, 0.2, 0.2, 0.2, 0.1], [0.2, 0.2, 0.2, 0.2, 0.1, 0.1]]
//! latent_corr = [[1.0, 0.4], [0.4, 1.0]]       # optional
//! alternative = [[...], [...]]                  # power studies
//! [tolerances]                                  # optional overrides
//! coverage = [0.94, 0.96]
//! ```

use std::fs;
use std::path::Path;

use adoption_index::{
    ModelSpec, PmfSpec, ShapePreset, SimulationPlan, StudyKind, StudySpec, Tolerances,
};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSpec {
    pub spec: StudySpec,
    /// Per-model "add no-adoption stage" flags.
    pub shift: Vec<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default)]
    model: Vec<ModelEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelEntry {
    name: String,
    m: u32,
    alpha: Option<f64>,
    beta: Option<f64>,
    weight: Option<f64>,
    preset: Option<String>,
    #[serde(default)]
    add_no_adoption_stage: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    study: StudyKind,
    n: usize,
    replications: usize,
    seed: u64,
    significance: Option<f64>,
    level: Option<f64>,
    pmf: Vec<Vec<f64>>,
    latent_corr: Option<Vec<Vec<f64>>>,
    alternative: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    tolerances: Tolerances,
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn toml_error(path: &Path, text: &str, err: toml::de::Error) -> CliError {
    match err.span() {
        Some(span) => CliError::Parse {
            path: path.to_path_buf(),
            line: line_of(text, span.start),
            message: err.message().to_string(),
        },
        None => CliError::Config {
            path: path.to_path_buf(),
            message: err.message().to_string(),
        },
    }
}

fn line_of(text: &str, offset: usize) -> u64 {
    text.as_bytes()[..offset.min(text.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count() as u64
        + 1
}

pub fn parse_spec(text: &str, path: &Path) -> Result<LoadedSpec> {
    let file: SpecFile = toml::from_str(text).map_err(|e| toml_error(path, text, e))?;
    let in_file = |e| CliError::in_file(path, e);
    let given = file.model.iter().filter(|m| m.weight.is_some()).count();
    if given != 0 && given != file.model.len() {
        return Err(CliError::Config {
            path: path.to_path_buf(),
            message: "give a weight for every model or for none".into(),
        });
    }
    let mut models = Vec::with_capacity(file.model.len());
    let mut shift = Vec::with_capacity(file.model.len());
    for entry in file.model {
        let (alpha, beta) = match &entry.preset {
            Some(name) => {
                if entry.alpha.is_some() || entry.beta.is_some() {
                    return Err(CliError::Config {
                        path: path.to_path_buf(),
                        message: format!(
                            "model `{}`: preset and alpha/beta are exclusive",
                            entry.name
                        ),
                    });
                }
                name.parse::<ShapePreset>().map_err(in_file)?.shape()
            }
            None => (entry.alpha.unwrap_or(1.0), entry.beta.unwrap_or(1.0)),
        };
        let weight = entry.weight.unwrap_or(1.0);
        models.push(
            ModelSpec::with_params(entry.name, entry.m, alpha, beta, weight).map_err(in_file)?,
        );
        shift.push(entry.add_no_adoption_stage);
    }
    let spec = if given == 0 {
        StudySpec::equal_weights(models)
    } else {
        StudySpec::new(models)
    }
    .map_err(in_file)?;
    Ok(LoadedSpec { spec, shift })
}

pub fn load_spec(path: &Path) -> Result<LoadedSpec> {
    parse_spec(&read_text(path)?, path)
}

pub fn parse_plan(text: &str, path: &Path, spec: StudySpec) -> Result<SimulationPlan> {
    let file: PlanFile = toml::from_str(text).map_err(|e| toml_error(path, text, e))?;
    let in_file = |e| CliError::in_file(path, e);
    let pmf = PmfSpec::new(file.pmf, file.latent_corr.clone()).map_err(in_file)?;
    let alternative = file
        .alternative
        .map(|alt| PmfSpec::new(alt, file.latent_corr))
        .transpose()
        .map_err(in_file)?;
    let mut plan = SimulationPlan::new(spec, pmf, file.study, file.n, file.replications, file.seed);
    plan.alternative = alternative;
    plan.significance = file.significance.unwrap_or(plan.significance);
    plan.level = file.level.unwrap_or(plan.level);
    plan.tolerances = file.tolerances;
    plan.validate().map_err(in_file)?;
    Ok(plan)
}

pub fn load_plan(path: &Path, spec: StudySpec) -> Result<SimulationPlan> {
    parse_plan(&read_text(path)?, path, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> Result<LoadedSpec> {
        parse_spec(text, Path::new("spec.toml"))
    }

    #[test]
    fn defaults_to_linear_equal_weights() {
        let loaded =
            spec("[[model]]\nname = \"TAM\"\nm = 5\n[[model]]\nname = \"CMM\"\nm = 5\n").unwrap();
        assert_eq!(loaded.spec.k(), 2);
        assert!(loaded.spec.is_linear());
        assert_eq!(loaded.spec.weights().collect::<Vec<_>>(), vec![0.5, 0.5]);
        assert_eq!(loaded.shift, vec![false, false]);
    }

    #[test]
    fn presets_and_flags() {
        let loaded = spec(
            "[[model]]\nname = \"a\"\nm = 5\npreset = \"s-shaped\"\nadd_no_adoption_stage = true\n\
             [[model]]\nname = \"b\"\nm = 4\nalpha = 2.0\nbeta = 1.5\n",
        )
        .unwrap();
        let a = &loaded.spec.models()[0];
        assert_eq!((a.alpha(), a.beta()), (1.0, 3.0));
        assert_eq!(loaded.spec.models()[1].beta(), 1.5);
        assert_eq!(loaded.shift, vec![true, false]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            spec(""),
            Err(CliError::InFile {
                source: adoption_index::Error::EmptySpec,
                ..
            })
        ));
        let partial =
            spec("[[model]]\nname = \"a\"\nm = 5\nweight = 0.5\n[[model]]\nname = \"b\"\nm = 5\n");
        assert!(matches!(partial, Err(CliError::Config { .. })));
        let sum = spec("[[model]]\nname = \"a\"\nm = 5\nweight = 0.5\n[[model]]\nname = \"b\"\nm = 5\nweight = 0.6\n");
        assert!(matches!(
            sum,
            Err(CliError::InFile {
                source: adoption_index::Error::WeightSum { .. },
                ..
            })
        ));
        let both = spec("[[model]]\nname = \"a\"\nm = 5\npreset = \"convex\"\nalpha = 2.0\n");
        assert!(matches!(both, Err(CliError::Config { .. })));
        match spec("[[model]]\nname = \"a\"\n\nm = \"five\"\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(spec("[[model]]\nname = \"a\"\nm = 5\ncolour = 1\n").is_err());
    }

    #[test]
    fn plan_parsing() {
        let study = spec("[[model]]\nname = \"a\"\nm = 2\n").unwrap().spec;
        let text =
            "study = \"power\"\nn = 30\nreplications = 5\nseed = 9\npmf = [[0.2, 0.3, 0.5]]\n\
                    alternative = [[0.1, 0.3, 0.6]]\n[tolerances]\npower_min = 0.5\n";
        let plan = parse_plan(text, Path::new("plan.toml"), study.clone()).unwrap();
        assert_eq!(plan.study, StudyKind::Power);
        assert_eq!(plan.tolerances.power_min, 0.5);
        assert_eq!(plan.tolerances.coverage, [0.94, 0.96]);
        assert_eq!(plan.level, 0.95);

        let wrong_len =
            "study = \"size\"\nn = 30\nreplications = 5\nseed = 9\npmf = [[0.5, 0.5]]\n";
        let err = parse_plan(wrong_len, Path::new("plan.toml"), study.clone()).unwrap_err();
        assert!(matches!(
            err.core(),
            Some(adoption_index::Error::SpecMismatch(_))
        ));

        let no_alt =
            "study = \"power\"\nn = 30\nreplications = 5\nseed = 9\npmf = [[0.2, 0.3, 0.5]]\n";
        assert!(parse_plan(no_alt, Path::new("plan.toml"), study).is_err());
    }
}
