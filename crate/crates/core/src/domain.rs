//! Study definitions and validated survey data.
//!
//! A study is an ordered list of adoption models. Each model has stages
//! `0..=m`, where stage 0 means no adoption at all, two shape parameters for
//! the nonlinear sub-index and a weight in the global index. Linear models
//! are simply the `alpha = beta = 1` configuration.

use std::collections::HashSet;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;
const PMF_SUM_TOLERANCE: f64 = 1e-12;
const PSD_TOLERANCE: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelSpec")]
pub struct ModelSpec {
    name: String,
    m: u32,
    alpha: f64,
    beta: f64,
    weight: f64,
}

impl ModelSpec {
    /// A linear model with unit weight; use [`StudySpec::equal_weights`] or
    /// [`ModelSpec::with_weight`] to place it in a study.
    pub fn new(name: impl Into<String>, m: u32) -> Result<Self> {
        Self::with_params(name, m, 1.0, 1.0, 1.0)
    }

    pub fn with_params(
        name: impl Into<String>,
        m: u32,
        alpha: f64,
        beta: f64,
        weight: f64,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidModel {
            model: name.clone(),
            reason,
        };
        if name.trim().is_empty() {
            return Err(invalid("name must not be empty".into()));
        }
        if m < 1 {
            return Err(invalid("m must be at least 1".into()));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && beta >= 1.0) {
            return Err(invalid(format!("beta must be at least 1, got {beta}")));
        }
        if !(weight.is_finite() && weight > 0.0 && weight <= 1.0) {
            return Err(invalid(format!("weight must lie in (0, 1], got {weight}")));
        }
        Ok(Self {
            name,
            m,
            alpha,
            beta,
            weight,
        })
    }

    pub fn with_shape(self, alpha: f64, beta: f64) -> Result<Self> {
        Self::with_params(self.name, self.m, alpha, beta, self.weight)
    }

    pub fn with_weight(self, weight: f64) -> Result<Self> {
        Self::with_params(self.name, self.m, self.alpha, self.beta, weight)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Highest stage index; the model has `m + 1` stages.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn is_linear(&self) -> bool {
        self.alpha == 1.0 && self.beta == 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStudySpec")]
pub struct StudySpec {
    models: Vec<ModelSpec>,
}

impl StudySpec {
    /// Validates weights (sum to one) and name uniqueness.
    pub fn new(models: Vec<ModelSpec>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::EmptySpec);
        }
        let mut seen = HashSet::new();
        for model in &models {
            if !seen.insert(model.name.as_str()) {
                return Err(Error::DuplicateModelName(model.name.clone()));
            }
        }
        let sum: f64 = models.iter().map(|m| m.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::WeightSum { sum });
        }
        Ok(Self { models })
    }

    /// Replaces every weight with `1/k`.
    pub fn equal_weights(models: Vec<ModelSpec>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::EmptySpec);
        }
        let w = 1.0 / models.len() as f64;
        let models = models
            .into_iter()
            .map(|m| m.with_weight(w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(models)
    }

    pub fn models(&self) -> &[ModelSpec] {
        &self.models
    }

    pub fn k(&self) -> usize {
        self.models.len()
    }

    pub fn model(&self, j: usize) -> Result<&ModelSpec> {
        self.models.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.models.len(),
        })
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.models.iter().map(|m| m.weight)
    }

    pub fn is_linear(&self) -> bool {
        self.models.iter().all(ModelSpec::is_linear)
    }
}

// Deserialization goes through the validating constructors.

#[derive(Deserialize)]
struct RawModelSpec {
    name: String,
    m: u32,
    alpha: f64,
    beta: f64,
    weight: f64,
}

impl TryFrom<RawModelSpec> for ModelSpec {
    type Error = Error;

    fn try_from(raw: RawModelSpec) -> Result<Self> {
        ModelSpec::with_params(raw.name, raw.m, raw.alpha, raw.beta, raw.weight)
    }
}

#[derive(Deserialize)]
struct RawStudySpec {
    models: Vec<ModelSpec>,
}

impl TryFrom<RawStudySpec> for StudySpec {
    type Error = Error;

    fn try_from(raw: RawStudySpec) -> Result<Self> {
        StudySpec::new(raw.models)
    }
}

#[derive(Deserialize)]
struct RawPmfSpec {
    pmfs: Vec<Vec<f64>>,
    latent_corr: Option<Vec<Vec<f64>>>,
}

impl TryFrom<RawPmfSpec> for PmfSpec {
    type Error = Error;

    fn try_from(raw: RawPmfSpec) -> Result<Self> {
        PmfSpec::new(raw.pmfs, raw.latent_corr)
    }
}

/// One unvalidated data row as read from an input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRow {
    pub id: String,
    pub values: Vec<i64>,
}

impl RawRow {
    pub fn new(id: impl Into<String>, values: Vec<i64>) -> Self {
        Self {
            id: id.into(),
            values,
        }
    }
}

/// An `n x k` matrix of observed stages, one row per corporation.
#[derive(Debug, Clone, PartialEq)]
pub struct AdoptionDataset {
    row_ids: Vec<String>,
    // row-major, n * k
    values: Vec<u32>,
    spec: StudySpec,
}

impl AdoptionDataset {
    /// Builds a dataset from rows already known to be in range and uniquely
    /// labelled. Used by the sampler.
    pub(crate) fn from_trusted(row_ids: Vec<String>, values: Vec<u32>, spec: StudySpec) -> Self {
        debug_assert_eq!(values.len(), row_ids.len() * spec.k());
        Self {
            row_ids,
            values,
            spec,
        }
    }

    pub fn spec(&self) -> &StudySpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.row_ids.len()
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let k = self.k();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.values.chunks_exact(self.k())
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = u32> + '_ {
        self.values.iter().skip(j).step_by(self.k()).copied()
    }

    pub fn position(&self, row_id: &str) -> Option<usize> {
        self.row_ids.iter().position(|id| id == row_id)
    }

    /// The dataset with row `i` removed, revalidated (so it fails with
    /// [`Error::TooFewRows`] if the remaining rows no longer exceed k).
    pub fn without_row(&self, i: usize) -> Result<Self> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n(),
            });
        }
        let n = self.n() - 1;
        if n <= self.k() {
            return Err(Error::TooFewRows { n, k: self.k() });
        }
        let k = self.k();
        let mut row_ids = self.row_ids.clone();
        row_ids.remove(i);
        let mut values = Vec::with_capacity(n * k);
        values.extend_from_slice(&self.values[..i * k]);
        values.extend_from_slice(&self.values[(i + 1) * k..]);
        Ok(Self {
            row_ids,
            values,
            spec: self.spec.clone(),
        })
    }
}

/// Checks every dataset invariant and builds the matrix.
pub fn validate_dataset(raw_rows: Vec<RawRow>, spec: &StudySpec) -> Result<AdoptionDataset> {
    let k = spec.k();
    let mut seen = HashSet::with_capacity(raw_rows.len());
    let mut row_ids = Vec::with_capacity(raw_rows.len());
    let mut values = Vec::with_capacity(raw_rows.len() * k);
    for (pos, raw) in raw_rows.into_iter().enumerate() {
        let row = pos + 1;
        if raw.values.len() != k {
            return Err(Error::RowArityMismatch {
                row,
                row_id: raw.id,
                expected: k,
                found: raw.values.len(),
            });
        }
        for (model, &value) in spec.models().iter().zip(&raw.values) {
            if value < 0 || value > i64::from(model.m()) {
                return Err(Error::OutOfRangeStage {
                    row,
                    row_id: raw.id.clone(),
                    model: model.name().to_string(),
                    value,
                    max: model.m(),
                });
            }
            values.push(value as u32);
        }
        if !seen.insert(raw.id.clone()) {
            return Err(Error::DuplicateRowId {
                row,
                row_id: raw.id,
            });
        }
        row_ids.push(raw.id);
    }
    let n = row_ids.len();
    if n <= k {
        return Err(Error::TooFewRows { n, k });
    }
    Ok(AdoptionDataset {
        row_ids,
        values,
        spec: spec.clone(),
    })
}

/// Adds a leading "no adoption" stage to flagged models by incrementing
/// their observed stages. The study's `m` for those models must already
/// count the added stage.
pub fn shift_stages(mut raw_rows: Vec<RawRow>, offset_flags: &[bool]) -> Vec<RawRow> {
    for row in &mut raw_rows {
        // rows of the wrong arity are left for validate_dataset to report
        if row.values.len() != offset_flags.len() {
            continue;
        }
        for (value, &flag) in row.values.iter_mut().zip(offset_flags) {
            if flag {
                *value = value.saturating_add(1);
            }
        }
    }
    raw_rows
}

/// Population distribution of stages for every model, optionally coupled
/// through a latent Gaussian correlation matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmfSpec")]
pub struct PmfSpec {
    pmfs: Vec<Vec<f64>>,
    latent_corr: Option<Vec<Vec<f64>>>,
}

impl PmfSpec {
    pub fn new(pmfs: Vec<Vec<f64>>, latent_corr: Option<Vec<Vec<f64>>>) -> Result<Self> {
        if pmfs.is_empty() {
            return Err(Error::InvalidPmf("no models".into()));
        }
        for (j, pmf) in pmfs.iter().enumerate() {
            if pmf.len() < 2 {
                return Err(Error::InvalidPmf(format!(
                    "model {j} needs at least two stages"
                )));
            }
            if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidPmf(format!(
                    "model {j} has a negative or non-finite probability"
                )));
            }
            let sum: f64 = pmf.iter().sum();
            if (sum - 1.0).abs() > PMF_SUM_TOLERANCE {
                return Err(Error::InvalidPmf(format!(
                    "model {j} probabilities sum to {sum}"
                )));
            }
        }
        if let Some(corr) = &latent_corr {
            check_correlation_matrix(corr, pmfs.len())?;
        }
        Ok(Self { pmfs, latent_corr })
    }

    pub fn independent(pmfs: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(pmfs, None)
    }

    pub fn pmfs(&self) -> &[Vec<f64>] {
        &self.pmfs
    }

    pub fn pmf(&self, j: usize) -> &[f64] {
        &self.pmfs[j]
    }

    pub fn k(&self) -> usize {
        self.pmfs.len()
    }

    pub fn latent_corr(&self) -> Option<&[Vec<f64>]> {
        self.latent_corr.as_deref()
    }

    /// Errors unless there is one pmf per model with exactly `m_j + 1` stages.
    pub fn check_conforms(&self, spec: &StudySpec) -> Result<()> {
        if self.k() != spec.k() {
            return Err(Error::SpecMismatch(format!(
                "pmf has {} models, study has {}",
                self.k(),
                spec.k()
            )));
        }
        for (pmf, model) in self.pmfs.iter().zip(spec.models()) {
            if pmf.len() != model.m() as usize + 1 {
                return Err(Error::SpecMismatch(format!(
                    "pmf for `{}` has {} stages, model has {}",
                    model.name(),
                    pmf.len(),
                    model.m() + 1
                )));
            }
        }
        Ok(())
    }
}

#[allow(clippy::needless_range_loop)]
fn check_correlation_matrix(corr: &[Vec<f64>], k: usize) -> Result<()> {
    if corr.len() != k || corr.iter().any(|row| row.len() != k) {
        return Err(Error::InvalidPmf(format!(
            "latent correlation matrix must be {k}x{k}"
        )));
    }
    for i in 0..k {
        if corr[i][i] != 1.0 {
            return Err(Error::InvalidPmf(
                "latent correlation matrix needs a unit diagonal".into(),
            ));
        }
        for j in 0..k {
            let v = corr[i][j];
            if !v.is_finite() || v.abs() > 1.0 || v != corr[j][i] {
                return Err(Error::InvalidPmf(
                    "latent correlation matrix must be symmetric with entries in [-1, 1]".into(),
                ));
            }
        }
    }
    let matrix = DMatrix::from_fn(k, k, |i, j| corr[i][j]);
    let min_eigenvalue = SymmetricEigen::new(matrix)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < PSD_TOLERANCE {
        return Err(Error::NotPositiveSemiDefinite { min_eigenvalue });
    }
    Ok(())
}
