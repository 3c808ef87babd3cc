//! Sub-indices, the global index and the delta-method gradient.
//!
//! The sub-index of a model with score `S`, top stage `m` and shape `(alpha,
//! beta)` is
//!
//! ```text
//! I = S^beta / (S^beta + alpha * (m - S)^beta)
//! ```
//!
//! which equals `S / m` for `alpha = beta = 1`. It is evaluated through the
//! ratio of the smaller to the larger of `S` and `m - S`, so no power ever
//! exceeds one and both endpoints come out exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{ModelSpec, StudySpec};
use crate::error::{Error, Result};
use crate::estimation::ScoreEstimate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexValue {
    pub sub_indices: Vec<f64>,
    pub global: f64,
    pub spec: StudySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaGradient {
    pub values: Vec<f64>,
}

pub fn subindex(score: f64, model: &ModelSpec) -> Result<f64> {
    let m = f64::from(model.m());
    if !(0.0..=m).contains(&score) {
        return Err(Error::ScoreOutOfRange {
            score,
            m: model.m(),
        });
    }
    if model.is_linear() {
        return Ok(score / m);
    }
    let (alpha, beta) = (model.alpha(), model.beta());
    let rest = m - score;
    let value = if score >= rest {
        // (m - S) / S <= 1
        let u = (rest / score).powf(beta);
        1.0 / (1.0 + alpha * u)
    } else {
        // S / (m - S) < 1
        let r = (score / rest).powf(beta);
        r / (r + alpha)
    };
    Ok(value)
}

/// Weighted average of the sub-indices.
pub fn global_index(scores: &ScoreEstimate, spec: &StudySpec) -> Result<IndexValue> {
    if scores.scores.len() != spec.k() {
        return Err(Error::SpecMismatch(format!(
            "{} scores for a study with {} models",
            scores.scores.len(),
            spec.k()
        )));
    }
    let sub_indices = scores
        .scores
        .iter()
        .zip(spec.models())
        .map(|(&s, model)| subindex(s, model))
        .collect::<Result<Vec<_>>>()?;
    let global = weighted_mean(&sub_indices, spec);
    Ok(IndexValue {
        sub_indices,
        global,
        spec: spec.clone(),
    })
}

/// `sum_j w_j x_j / sum_j w_j`; dividing by the realised weight sum keeps
/// all-zero and all-one inputs exact.
pub(crate) fn weighted_mean(values: &[f64], spec: &StudySpec) -> f64 {
    let (num, den) = values
        .iter()
        .zip(spec.weights())
        .fold((0.0, 0.0), |(num, den), (&x, w)| (num + w * x, den + w));
    (num / den).clamp(0.0, 1.0)
}

/// Derivative of the sub-index with respect to the score, defined on the open
/// interval `(0, m)`.
pub fn delta_derivative(score: f64, model: &ModelSpec) -> Result<f64> {
    let m = f64::from(model.m());
    if !(score > 0.0 && score < m) {
        return Err(Error::BoundaryScore {
            model: model.name().to_string(),
            score,
            m: model.m(),
        });
    }
    if model.is_linear() {
        return Ok(1.0 / m);
    }
    let (alpha, beta) = (model.alpha(), model.beta());
    let rest = m - score;
    // alpha beta m u^beta / ((1 + alpha u^beta)^2 (m - S) S) with u = (m - S)/S,
    // rewritten in terms of r = 1/u when u > 1.
    let ratio = if score >= rest {
        let u = (rest / score).powf(beta);
        u / ((1.0 + alpha * u) * (1.0 + alpha * u))
    } else {
        let r = (score / rest).powf(beta);
        r / ((r + alpha) * (r + alpha))
    };
    Ok(alpha * beta * m * ratio / (rest * score))
}

pub fn delta_gradient(scores: &[f64], spec: &StudySpec) -> Result<DeltaGradient> {
    if scores.len() != spec.k() {
        return Err(Error::SpecMismatch(format!(
            "{} scores for a study with {} models",
            scores.len(),
            spec.k()
        )));
    }
    let values = scores
        .iter()
        .zip(spec.models())
        .map(|(&s, model)| delta_derivative(s, model))
        .collect::<Result<Vec<_>>>()?;
    Ok(DeltaGradient { values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub s1: f64,
    pub s2: f64,
    pub index: f64,
}

/// Global index over an evenly spaced `resolution x resolution` grid of the
/// score square `[0, m1] x [0, m2]`, endpoints included. Row-major in `s1`.
pub fn surface_grid(spec: &StudySpec, resolution: usize) -> Result<Vec<SurfacePoint>> {
    if spec.k() != 2 {
        return Err(Error::UnsupportedArity { k: spec.k() });
    }
    if resolution < 2 {
        return Err(Error::InvalidResolution(resolution));
    }
    let axis = |model: &ModelSpec| -> Vec<f64> {
        let m = f64::from(model.m());
        let last = (resolution - 1) as f64;
        (0..resolution)
            .map(|i| {
                if i == resolution - 1 {
                    m
                } else {
                    m * i as f64 / last
                }
            })
            .collect()
    };
    let (a, b) = (&spec.models()[0], &spec.models()[1]);
    let (xs, ys) = (axis(a), axis(b));
    let mut grid = Vec::with_capacity(resolution * resolution);
    for &s1 in &xs {
        let i1 = subindex(s1, a)?;
        for &s2 in &ys {
            let i2 = subindex(s2, b)?;
            grid.push(SurfacePoint {
                s1,
                s2,
                index: weighted_mean(&[i1, i2], spec),
            });
        }
    }
    Ok(grid)
}

/// Named shape parameterizations for surface plots. These are illustrative
/// settings, not estimated values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapePreset {
    Linear,
    Concave,
    Convex,
    SShaped,
}

impl ShapePreset {
    pub const ALL: [ShapePreset; 4] = [
        ShapePreset::Linear,
        ShapePreset::Concave,
        ShapePreset::Convex,
        ShapePreset::SShaped,
    ];

    /// `(alpha, beta)`.
    pub fn shape(self) -> (f64, f64) {
        match self {
            ShapePreset::Linear => (1.0, 1.0),
            ShapePreset::Concave => (0.3, 1.0),
            ShapePreset::Convex => (3.0, 1.0),
            ShapePreset::SShaped => (1.0, 3.0),
        }
    }

    pub fn apply(self, model: ModelSpec) -> Result<ModelSpec> {
        let (alpha, beta) = self.shape();
        model.with_shape(alpha, beta)
    }
}

impl FromStr for ShapePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(ShapePreset::Linear),
            "concave" => Ok(ShapePreset::Concave),
            "convex" => Ok(ShapePreset::Convex),
            "s-shaped" | "sshaped" => Ok(ShapePreset::SShaped),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

impl fmt::Display for ShapePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapePreset::Linear => "linear",
            ShapePreset::Concave => "concave",
            ShapePreset::Convex => "convex",
            ShapePreset::SShaped => "s-shaped",
        })
    }
}
