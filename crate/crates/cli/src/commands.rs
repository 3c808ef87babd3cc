//! Command implementations shared by the binary and the tests.

use std::path::{Path, PathBuf};

use adoption_index::{
    confidence_interval, estimate_moments, global_index, index_variance, one_sample_fixed_test,
    one_sample_test, run_study, surface_grid, two_sample_test, ShapePreset, Sidedness, StudySpec,
    TestOutcome,
};

use crate::config::{load_plan, load_spec, LoadedSpec};
use crate::data::load_data;
use crate::error::{CliError, Result};
use crate::report::{
    echo_spec, ComputeReport, Format, ModelEstimate, Report, SimulateReport, SurfaceReport,
    TestReport,
};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;
pub const COMPUTE_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Compute {
        data: PathBuf,
    },
    /// Exactly one of `row` and `reference` is set.
    TestOne {
        data: PathBuf,
        row: Option<String>,
        reference: Option<f64>,
        significance: f64,
        sidedness: Sidedness,
    },
    TestTwo {
        data_a: PathBuf,
        data_b: PathBuf,
        /// Spec for the second file when it differs from `--spec`.
        spec_b: Option<PathBuf>,
        significance: f64,
        sidedness: Sidedness,
    },
    Simulate {
        plan: PathBuf,
        seed: Option<u64>,
    },
    Surface {
        resolution: usize,
        preset: Option<ShapePreset>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: PathBuf,
    pub command: Command,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub fn execute(config: &RunConfig) -> Result<Report> {
    let loaded = load_spec(&config.spec)?;
    match &config.command {
        Command::Compute { data } => cmd_compute(&loaded, data),
        Command::TestOne {
            data,
            row,
            reference,
            significance,
            sidedness,
        } => match (row, reference) {
            (Some(row), None) => cmd_test_one(&loaded, data, row, *significance, *sidedness),
            (None, Some(reference)) => {
                cmd_test_reference(&loaded, data, *reference, *significance, *sidedness)
            }
            _ => Err(CliError::Usage(
                "test-one needs exactly one of --row and --reference".into(),
            )),
        },
        Command::TestTwo {
            data_a,
            data_b,
            spec_b,
            significance,
            sidedness,
        } => {
            let loaded_b = match spec_b {
                Some(path) => load_spec(path)?,
                None => loaded.clone(),
            };
            cmd_test_two(
                &loaded,
                data_a,
                &loaded_b,
                data_b,
                *significance,
                *sidedness,
            )
        }
        Command::Simulate { plan, seed } => cmd_simulate(&loaded.spec, plan, *seed),
        Command::Surface { resolution, preset } => cmd_surface(&loaded.spec, *resolution, *preset),
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

pub fn cmd_compute(loaded: &LoadedSpec, data: &Path) -> Result<Report> {
    let spec = &loaded.spec;
    let dataset = load_data(data, loaded)?;
    let moments = estimate_moments(&dataset)?;
    let index = global_index(&moments.scores, spec)?;
    let variance = index_variance(&moments, spec)?;
    let df = (dataset.n() - spec.k() - 1) as f64;
    let interval = confidence_interval(&index, &variance, COMPUTE_LEVEL, df)?;
    let models = spec
        .models()
        .iter()
        .enumerate()
        .map(|(j, model)| ModelEstimate {
            name: model.name().to_string(),
            score: moments.scores.scores[j],
            sub_index: index.sub_indices[j],
            derivative: variance.gradient[j],
            variance_contribution: variance.contributions[j],
        })
        .collect();
    Ok(Report::Compute(ComputeReport {
        spec: echo_spec(spec),
        data: display(data),
        n: dataset.n(),
        models,
        global_index: index.global,
        variance: variance.value,
        std_error: variance.std_error(),
        interval,
    }))
}

fn decision(outcome: &TestOutcome) -> String {
    if outcome.reject {
        format!("reject H0 at {}", outcome.significance)
    } else {
        format!("do not reject H0 at {}", outcome.significance)
    }
}

pub fn cmd_test_one(
    loaded: &LoadedSpec,
    data: &Path,
    row: &str,
    significance: f64,
    sidedness: Sidedness,
) -> Result<Report> {
    let dataset = load_data(data, loaded)?;
    let outcome = one_sample_test(&dataset, row, sidedness, significance)?;
    Ok(Report::TestOne(TestReport {
        spec: echo_spec(&loaded.spec),
        data: vec![display(data)],
        row: Some(row.to_string()),
        decision: decision(&outcome),
        outcome,
        notes: one_sample_notes(&loaded.spec, LEAVE_ONE_OUT_NOTE),
    }))
}

pub fn cmd_test_two(
    loaded_a: &LoadedSpec,
    data_a: &Path,
    loaded_b: &LoadedSpec,
    data_b: &Path,
    significance: f64,
    sidedness: Sidedness,
) -> Result<Report> {
    let a = load_data(data_a, loaded_a)?;
    let b = load_data(data_b, loaded_b)?;
    let outcome = two_sample_test(&a, &b, sidedness, significance)?;
    Ok(Report::TestTwo(TestReport {
        spec: echo_spec(&loaded_a.spec),
        data: vec![display(data_a), display(data_b)],
        row: None,
        decision: decision(&outcome),
        outcome,
        notes: Vec::new(),
    }))
}

const LEAVE_ONE_OUT_NOTE: &str =
    "df = (n - 1) - k - 1: n counts the excluded corporation, which is not part of the estimate";
const FIXED_REFERENCE_NOTE: &str =
    "df = n - k - 1 for a fixed reference value, by analogy with the leave-one-out test";

fn one_sample_notes(spec: &StudySpec, df_note: &str) -> Vec<String> {
    let mut notes = vec![df_note.to_string()];
    if !spec.is_linear() {
        notes.push(
            "the reference index applies each model's curve to the excluded row's stages".into(),
        );
    }
    notes
}

/// One-sample test of the industry index against a fixed value.
pub fn cmd_test_reference(
    loaded: &LoadedSpec,
    data: &Path,
    reference: f64,
    significance: f64,
    sidedness: Sidedness,
) -> Result<Report> {
    let dataset = load_data(data, loaded)?;
    let outcome = one_sample_fixed_test(&dataset, reference, sidedness, significance)?;
    Ok(Report::TestOne(TestReport {
        spec: echo_spec(&loaded.spec),
        data: vec![display(data)],
        row: None,
        decision: decision(&outcome),
        outcome,
        notes: vec![FIXED_REFERENCE_NOTE.to_string()],
    }))
}

/// `seed` overrides the plan's seed.
pub fn cmd_simulate(spec: &StudySpec, plan_path: &Path, seed: Option<u64>) -> Result<Report> {
    let mut plan = load_plan(plan_path, spec.clone())?;
    if let Some(seed) = seed {
        plan.seed = seed;
    }
    let result = run_study(&plan).map_err(|e| CliError::in_file(plan_path, e))?;
    Ok(Report::Simulate(SimulateReport {
        plan: display(plan_path),
        spec: echo_spec(spec),
        result,
    }))
}

/// `preset` replaces the shape of every model.
pub fn cmd_surface(
    spec: &StudySpec,
    resolution: usize,
    preset: Option<ShapePreset>,
) -> Result<Report> {
    let spec = match preset {
        Some(preset) => {
            let models = spec
                .models()
                .iter()
                .map(|m| preset.apply(m.clone()))
                .collect::<adoption_index::Result<Vec<_>>>()?;
            StudySpec::new(models)?
        }
        None => spec.clone(),
    };
    let points = surface_grid(&spec, resolution)?;
    Ok(Report::Surface(SurfaceReport {
        spec: echo_spec(&spec),
        preset,
        resolution,
        points,
    }))
}
