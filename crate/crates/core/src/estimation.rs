//! Sample scores, stage frequencies and second moments.

use serde::{Deserialize, Serialize};

use crate::domain::AdoptionDataset;
use crate::error::{Error, Result};

/// Per-model mean stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreEstimate {
    pub scores: Vec<f64>,
    pub n: usize,
}

/// Stage counts and their maximum-likelihood probabilities for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfEstimate {
    pub counts: Vec<u64>,
    pub probs: Vec<f64>,
}

impl PmfEstimate {
    /// `sum_a a * r_a / n`, the frequency form of the score.
    pub fn score(&self) -> f64 {
        let n: u64 = self.counts.iter().sum();
        let total: u64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(a, r)| a as u64 * r)
            .sum();
        total as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub scores: ScoreEstimate,
    /// Per-observation sample covariances (denominator `n - 1`).
    pub cov: Vec<Vec<f64>>,
    /// `None` wherever either variance is zero.
    pub corr: Vec<Vec<Option<f64>>>,
    pub degenerate: Vec<bool>,
}

impl MomentEstimate {
    pub fn k(&self) -> usize {
        self.cov.len()
    }

    pub fn n(&self) -> usize {
        self.scores.n
    }

    pub fn variance(&self, j: usize) -> f64 {
        self.cov[j][j]
    }

    pub fn std_dev(&self, j: usize) -> f64 {
        self.cov[j][j].sqrt()
    }

    /// Replaces the correlation between models `a` and `b` with an externally
    /// supplied value, keeping the covariance matrix in sync.
    pub fn with_correlation(mut self, a: usize, b: usize, rho: f64) -> Result<Self> {
        let k = self.k();
        for idx in [a, b] {
            if idx >= k {
                return Err(Error::IndexOutOfRange { index: idx, len: k });
            }
        }
        if a == b || !rho.is_finite() || rho.abs() > 1.0 {
            return Err(Error::InvalidPmf(format!(
                "correlation override ({a}, {b}) = {rho} is not a valid off-diagonal correlation"
            )));
        }
        let cov = rho * self.std_dev(a) * self.std_dev(b);
        self.cov[a][b] = cov;
        self.cov[b][a] = cov;
        let defined = !self.degenerate[a] && !self.degenerate[b];
        let value = defined.then_some(rho);
        self.corr[a][b] = value;
        self.corr[b][a] = value;
        Ok(self)
    }
}

pub fn estimate_scores(dataset: &AdoptionDataset) -> ScoreEstimate {
    let n = dataset.n();
    let scores = (0..dataset.k())
        .map(|j| {
            let total: u64 = dataset.column(j).map(u64::from).sum();
            total as f64 / n as f64
        })
        .collect();
    ScoreEstimate { scores, n }
}

pub fn estimate_pmf(dataset: &AdoptionDataset, j: usize) -> Result<PmfEstimate> {
    let model = dataset.spec().model(j)?;
    let mut counts = vec![0u64; model.m() as usize + 1];
    for value in dataset.column(j) {
        counts[value as usize] += 1;
    }
    let n = dataset.n() as f64;
    let probs = counts.iter().map(|&r| r as f64 / n).collect();
    Ok(PmfEstimate { counts, probs })
}

#[allow(clippy::needless_range_loop)]
pub fn estimate_moments(dataset: &AdoptionDataset) -> Result<MomentEstimate> {
    let n = dataset.n();
    if n < 2 {
        return Err(Error::InsufficientRows { n });
    }
    let k = dataset.k();
    let scores = estimate_scores(dataset);
    let means = &scores.scores;

    let mut cov = vec![vec![0.0; k]; k];
    for row in dataset.rows() {
        for a in 0..k {
            let da = f64::from(row[a]) - means[a];
            for b in a..k {
                cov[a][b] += da * (f64::from(row[b]) - means[b]);
            }
        }
    }
    let denom = (n - 1) as f64;
    for a in 0..k {
        for b in a..k {
            cov[a][b] /= denom;
            cov[b][a] = cov[a][b];
        }
    }

    let degenerate: Vec<bool> = (0..k).map(|j| cov[j][j] == 0.0).collect();
    let corr = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    if degenerate[a] || degenerate[b] {
                        None
                    } else if a == b {
                        Some(1.0)
                    } else {
                        let r = cov[a][b] / (cov[a][a].sqrt() * cov[b][b].sqrt());
                        Some(r.clamp(-1.0, 1.0))
                    }
                })
                .collect()
        })
        .collect();

    Ok(MomentEstimate {
        scores,
        cov,
        corr,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{validate_dataset, ModelSpec, RawRow, StudySpec};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dataset(ms: &[u32], rows: &[&[i64]]) -> AdoptionDataset {
        let spec = StudySpec::equal_weights(
            ms.iter()
                .enumerate()
                .map(|(j, &m)| ModelSpec::new(format!("m{j}"), m).unwrap())
                .collect(),
        )
        .unwrap();
        let raw = rows
            .iter()
            .enumerate()
            .map(|(i, r)| RawRow::new(format!("r{i}"), r.to_vec()))
            .collect();
        validate_dataset(raw, &spec).unwrap()
    }

    #[test]
    fn scores_are_column_means() {
        let ds = dataset(&[5, 5], &[&[0, 5], &[5, 0], &[2, 3], &[3, 2]]);
        assert_eq!(estimate_scores(&ds).scores, vec![2.5, 2.5]);

        let zeros = dataset(&[5, 5], &[&[0, 0], &[0, 0], &[0, 0]]);
        assert_eq!(estimate_scores(&zeros).scores, vec![0.0, 0.0]);

        let single = dataset(&[5], &[&[1], &[2], &[3]]);
        assert_eq!(estimate_scores(&single).scores, vec![2.0]);
    }

    #[test]
    fn pmf_counts() {
        let ds = dataset(&[5], &[&[0], &[0], &[5], &[5]]);
        let pmf = estimate_pmf(&ds, 0).unwrap();
        assert_eq!(pmf.counts, vec![2, 0, 0, 0, 0, 2]);
        assert_eq!(pmf.probs, vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.5]);

        let constant = dataset(&[5], &[&[3], &[3], &[3]]);
        let pmf = estimate_pmf(&constant, 0).unwrap();
        assert_eq!(pmf.probs, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);

        assert!(matches!(
            estimate_pmf(&constant, 1),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn moments_of_two_point_column() {
        let ds = dataset(&[5], &[&[0], &[0], &[5], &[5]]);
        let mom = estimate_moments(&ds).unwrap();
        assert_relative_eq!(mom.variance(0), 25.0 / 3.0, max_relative = 1e-15);
        assert_eq!(mom.corr[0][0], Some(1.0));
    }

    #[test]
    fn identical_columns_are_perfectly_correlated() {
        let ds = dataset(&[5, 5], &[&[0, 0], &[1, 1], &[4, 4], &[2, 2]]);
        let mom = estimate_moments(&ds).unwrap();
        assert_relative_eq!(mom.corr[0][1].unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(mom.cov[0][1], mom.cov[1][0]);
    }

    #[test]
    fn constant_column_is_flagged() {
        let ds = dataset(&[5, 5], &[&[3, 0], &[3, 1], &[3, 4]]);
        let mom = estimate_moments(&ds).unwrap();
        assert_eq!(mom.variance(0), 0.0);
        assert_eq!(mom.degenerate, vec![true, false]);
        assert_eq!(mom.corr[0][1], None);
        assert_eq!(mom.corr[0][0], None);
        assert_eq!(mom.corr[1][1], Some(1.0));
    }

    #[test]
    fn correlation_override_updates_covariance() {
        let ds = dataset(&[5, 5], &[&[0, 1], &[1, 1], &[4, 2], &[2, 5]]);
        let mom = estimate_moments(&ds)
            .unwrap()
            .with_correlation(0, 1, 0.0)
            .unwrap();
        assert_eq!(mom.cov[0][1], 0.0);
        assert_eq!(mom.corr[1][0], Some(0.0));
        let mom = mom.with_correlation(1, 0, 1.0).unwrap();
        assert_relative_eq!(mom.cov[0][1], mom.std_dev(0) * mom.std_dev(1));
        assert!(mom.clone().with_correlation(0, 0, 0.5).is_err());
        assert!(mom.with_correlation(0, 1, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn frequency_form_matches_column_mean(cells in proptest::collection::vec(0i64..=7, 2..80)) {
            let rows: Vec<&[i64]> = cells.chunks(1).collect();
            let ds = dataset(&[7], &rows);
            let pmf = estimate_pmf(&ds, 0).unwrap();
            // same integer numerator, one division: bit-identical
            prop_assert_eq!(pmf.score().to_bits(), estimate_scores(&ds).scores[0].to_bits());
            prop_assert_eq!(pmf.counts.iter().sum::<u64>(), ds.n() as u64);
            prop_assert!((pmf.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn moment_invariants(cells in proptest::collection::vec(0i64..=4, 12..90)) {
            let rows: Vec<&[i64]> = cells.chunks_exact(3).collect();
            let ds = dataset(&[4, 4, 4], &rows);
            let mom = estimate_moments(&ds).unwrap();
            for a in 0..3 {
                prop_assert!(mom.cov[a][a] >= 0.0);
                prop_assert!(mom.scores.scores[a] >= 0.0 && mom.scores.scores[a] <= 4.0);
                for b in 0..3 {
                    prop_assert_eq!(mom.cov[a][b], mom.cov[b][a]);
                    if let Some(r) = mom.corr[a][b] {
                        prop_assert!(r.abs() <= 1.0 + 1e-12);
                    }
                }
            }
        }
    }
}
