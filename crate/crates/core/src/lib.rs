//! Integrated technology adoption index.
//!
//! Survey rows record, for each of `k` adoption models, the stage a
//! corporation has reached. Stage means are normalized into sub-indices
//! (linearly or through a two-parameter inverse-logit curve) and averaged
//! into a global index in `[0, 1]`. The crate propagates sampling variance to
//! the index by the delta method, runs leave-one-out and two-industry t-tests,
//! and checks the asymptotic claims by Monte Carlo simulation.

pub mod domain;
pub mod error;
pub mod estimation;
pub mod index;
pub mod inference;
pub mod simulation;
pub mod student_t;

pub use domain::{
    shift_stages, validate_dataset, AdoptionDataset, ModelSpec, PmfSpec, RawRow, StudySpec,
};
pub use error::{Error, Result};
pub use estimation::{
    estimate_moments, estimate_pmf, estimate_scores, MomentEstimate, PmfEstimate, ScoreEstimate,
};
pub use index::{
    delta_derivative, delta_gradient, global_index, subindex, surface_grid, DeltaGradient,
    IndexValue, ShapePreset, SurfacePoint,
};
pub use inference::{
    confidence_interval, index_variance, one_sample_fixed_test, one_sample_test, student_t_pvalue,
    student_t_quantile, two_sample_test, welch_df, ConfidenceInterval, Sidedness, TestKind,
    TestOutcome, VarianceEstimate,
};
pub use simulation::{
    population_covariance, population_index_variance, run_study, sample_dataset, true_index,
    Metric, PopulationIndex, SimulationPlan, SimulationReport, StudyKind, Tolerances,
};
