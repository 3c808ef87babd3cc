//! Delta-method variance of the global index and the two t-tests built on it.
//!
//! With per-observation covariances `c_ab`, weights `w` and sub-index
//! derivatives `D` evaluated at the sample scores,
//!
//! ```text
//! V[I] = (1/n) * sum_a sum_b w_a w_b D_a D_b c_ab
//! ```
//!
//! For linear models `D_j = 1/m_j` and this is the exact variance of the
//! linear index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{AdoptionDataset, StudySpec};
use crate::error::{Error, Result};
use crate::estimation::{estimate_moments, MomentEstimate};
use crate::index::{delta_derivative, global_index, subindex, weighted_mean, IndexValue};
use crate::student_t;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    #[default]
    TwoSided,
    /// Alternative: the first quantity is larger.
    Greater,
    Less,
}

impl FromStr for Sidedness {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "two" | "two-sided" => Ok(Sidedness::TwoSided),
            "greater" => Ok(Sidedness::Greater),
            "less" => Ok(Sidedness::Less),
            other => Err(format!(
                "unknown sidedness `{other}` (expected two, greater or less)"
            )),
        }
    }
}

impl fmt::Display for Sidedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sidedness::TwoSided => "two-sided",
            Sidedness::Greater => "greater",
            Sidedness::Less => "less",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTerm {
    pub a: usize,
    pub b: usize,
    /// `2 w_a w_b D_a D_b c_ab / n`
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub value: f64,
    /// `w_j^2 D_j^2 sigma_j^2 / n` per model.
    pub contributions: Vec<f64>,
    pub cross_terms: Vec<CrossTerm>,
    pub gradient: Vec<f64>,
    pub n_used: usize,
}

impl VarianceEstimate {
    pub fn std_error(&self) -> f64 {
        self.value.sqrt()
    }
}

/// Asymptotic variance of the estimated global index.
pub fn index_variance(moments: &MomentEstimate, spec: &StudySpec) -> Result<VarianceEstimate> {
    let k = spec.k();
    if moments.k() != k {
        return Err(Error::SpecMismatch(format!(
            "moments for {} models, study has {k}",
            moments.k()
        )));
    }
    if let Some(j) = moments.degenerate.iter().position(|&d| d) {
        return Err(Error::DegenerateVariance {
            model: spec.models()[j].name().to_string(),
        });
    }
    let gradient = spec
        .models()
        .iter()
        .zip(&moments.scores.scores)
        .map(|(model, &s)| {
            if model.is_linear() {
                Ok(1.0 / f64::from(model.m()))
            } else {
                delta_derivative(s, model)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = spec.weights().collect();
    let n = moments.n() as f64;

    let contributions: Vec<f64> = (0..k)
        .map(|j| {
            let wd = weights[j] * gradient[j];
            wd * wd * moments.cov[j][j] / n
        })
        .collect();
    let mut cross_terms = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            cross_terms.push(CrossTerm {
                a,
                b,
                value: 2.0
                    * weights[a]
                    * weights[b]
                    * gradient[a]
                    * gradient[b]
                    * moments.cov[a][b]
                    / n,
            });
        }
    }
    let value =
        contributions.iter().sum::<f64>() + cross_terms.iter().map(|c| c.value).sum::<f64>();
    if value < 0.0 {
        return Err(Error::NegativeVariance(value));
    }
    Ok(VarianceEstimate {
        value,
        contributions,
        cross_terms,
        gradient,
        n_used: moments.n(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    /// One corporation against the rest of its industry.
    LeaveOneOut,
    /// The industry index against a fixed value.
    FixedReference,
    TwoSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub kind: TestKind,
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
    pub sidedness: Sidedness,
    pub significance: f64,
    pub reject: bool,
    /// Estimated indices: the (reduced) industry for one-sample tests, both
    /// industries for the two-sample test.
    pub indices: Vec<f64>,
    pub variances: Vec<f64>,
    pub sample_sizes: Vec<usize>,
    /// `I_0` for one-sample tests.
    pub reference: Option<f64>,
    pub excluded_row: Option<String>,
}

fn check_significance(significance: f64) -> Result<()> {
    if significance > 0.0 && significance < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSignificance(significance))
    }
}

/// Index of a single observation: the weighted sub-indices of its stages.
pub fn observation_index(stages: &[u32], spec: &StudySpec) -> Result<f64> {
    let subs = stages
        .iter()
        .zip(spec.models())
        .map(|(&x, model)| subindex(f64::from(x), model))
        .collect::<Result<Vec<_>>>()?;
    Ok(weighted_mean(&subs, spec))
}

/// Compares corporation `row_id` with its industry. The row is removed before
/// estimating, and the statistic has `(n - 1) - k - 1` degrees of freedom
/// where `n` counts the original rows.
pub fn one_sample_test(
    dataset: &AdoptionDataset,
    row_id: &str,
    sidedness: Sidedness,
    significance: f64,
) -> Result<TestOutcome> {
    check_significance(significance)?;
    let i = dataset
        .position(row_id)
        .ok_or_else(|| Error::RowNotFound(row_id.to_string()))?;
    let k = dataset.k() as i64;
    let df = (dataset.n() as i64 - 1) - k - 1;
    if df < 1 {
        return Err(Error::InsufficientDf { df });
    }
    let spec = dataset.spec();
    let reference = observation_index(dataset.row(i), spec)?;
    let reduced = dataset.without_row(i)?;
    let mut outcome =
        compare_with_reference(&reduced, reference, df as f64, sidedness, significance)?;
    outcome.kind = TestKind::LeaveOneOut;
    outcome.excluded_row = Some(row_id.to_string());
    Ok(outcome)
}

/// Tests the industry index against a fixed value using all rows, with
/// `n - k - 1` degrees of freedom by analogy with the leave-one-out test.
pub fn one_sample_fixed_test(
    dataset: &AdoptionDataset,
    reference: f64,
    sidedness: Sidedness,
    significance: f64,
) -> Result<TestOutcome> {
    check_significance(significance)?;
    if !(0.0..=1.0).contains(&reference) {
        return Err(Error::ScoreOutOfRange {
            score: reference,
            m: 1,
        });
    }
    let df = dataset.n() as i64 - dataset.k() as i64 - 1;
    if df < 1 {
        return Err(Error::InsufficientDf { df });
    }
    compare_with_reference(dataset, reference, df as f64, sidedness, significance)
}

fn compare_with_reference(
    dataset: &AdoptionDataset,
    reference: f64,
    df: f64,
    sidedness: Sidedness,
    significance: f64,
) -> Result<TestOutcome> {
    let spec = dataset.spec();
    let moments = estimate_moments(dataset)?;
    let index = global_index(&moments.scores, spec)?;
    let variance = index_variance(&moments, spec)?;
    let statistic = (index.global - reference) / variance.std_error();
    let p_value = student_t_pvalue(statistic, df, sidedness)?;
    Ok(TestOutcome {
        kind: TestKind::FixedReference,
        statistic,
        df,
        p_value,
        sidedness,
        significance,
        reject: p_value < significance,
        indices: vec![index.global],
        variances: vec![variance.value],
        sample_sizes: vec![dataset.n()],
        reference: Some(reference),
        excluded_row: None,
    })
}

/// Welch-type comparison of two industries measured with the same study.
pub fn two_sample_test(
    a: &AdoptionDataset,
    b: &AdoptionDataset,
    sidedness: Sidedness,
    significance: f64,
) -> Result<TestOutcome> {
    check_significance(significance)?;
    if a.spec() != b.spec() {
        return Err(Error::SpecMismatch(
            "the two datasets were collected under different studies".into(),
        ));
    }
    let spec = a.spec();
    let (ia, va) = index_and_variance(a, spec)?;
    let (ib, vb) = index_and_variance(b, spec)?;
    let df = welch_df(va, vb, a.n(), b.n(), spec.k())?;
    assert!(df > 0.0, "Welch df must be positive");
    let statistic = (ia - ib) / (va + vb).sqrt();
    let p_value = student_t_pvalue(statistic, df, sidedness)?;
    Ok(TestOutcome {
        kind: TestKind::TwoSample,
        statistic,
        df,
        p_value,
        sidedness,
        significance,
        reject: p_value < significance,
        indices: vec![ia, ib],
        variances: vec![va, vb],
        sample_sizes: vec![a.n(), b.n()],
        reference: None,
        excluded_row: None,
    })
}

pub(crate) fn index_and_variance(
    dataset: &AdoptionDataset,
    spec: &StudySpec,
) -> Result<(f64, f64)> {
    let moments = estimate_moments(dataset)?;
    let index = global_index(&moments.scores, spec)?;
    let variance = index_variance(&moments, spec)?;
    Ok((index.global, variance.value))
}

/// Welch-Satterthwaite degrees of freedom with `n - k` per-sample terms.
pub fn welch_df(va: f64, vb: f64, na: usize, nb: usize, k: usize) -> Result<f64> {
    for n in [na, nb] {
        if n <= k {
            return Err(Error::InsufficientSample { n, k });
        }
    }
    for v in [va, vb] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::NegativeVariance(v));
        }
    }
    if va == 0.0 && vb == 0.0 {
        return Err(Error::BothVariancesZero);
    }
    let total = va + vb;
    Ok(total * total / (va * va / (na - k) as f64 + vb * vb / (nb - k) as f64))
}

fn check_df(df: f64) -> Result<()> {
    if df > 0.0 && df.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDf(df))
    }
}

pub fn student_t_pvalue(t: f64, df: f64, sidedness: Sidedness) -> Result<f64> {
    check_df(df)?;
    if t.is_nan() {
        return Err(Error::InvalidDf(df));
    }
    let p = match sidedness {
        Sidedness::TwoSided => 2.0 * student_t::sf(t.abs(), df),
        Sidedness::Greater => student_t::sf(t, df),
        Sidedness::Less => student_t::cdf(t, df),
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Quantile of the standard Student t distribution, `p` in `(0, 1)`.
pub fn student_t_quantile(p: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidLevel(p));
    }
    Ok(student_t::quantile(p, df))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub df: f64,
    /// Set when either bound was pulled back into `[0, 1]`.
    pub clamped: bool,
}

impl ConfidenceInterval {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

pub fn confidence_interval(
    index: &IndexValue,
    variance: &VarianceEstimate,
    level: f64,
    df: f64,
) -> Result<ConfidenceInterval> {
    interval_around(index.global, variance.value, level, df)
}

pub(crate) fn interval_around(
    center: f64,
    variance: f64,
    level: f64,
    df: f64,
) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    let q = student_t_quantile((1.0 + level) / 2.0, df)?;
    let half = q * variance.sqrt();
    let (lower, upper) = (center - half, center + half);
    let clamped = lower < 0.0 || upper > 1.0;
    Ok(ConfidenceInterval {
        lower: lower.max(0.0),
        upper: upper.min(1.0),
        level,
        df,
        clamped,
    })
}
