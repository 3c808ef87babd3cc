//! Synthetic survey data and Monte Carlo checks of the asymptotic results.
//!
//! Random streams: every draw comes from ChaCha20 keyed by
//! `ChaCha20Rng::seed_from_u64(seed)`. Replication `r` uses stream `r`
//! (`set_stream(r)`), so a replication's data depend only on `(seed, r)` and
//! never on scheduling. [`sample_dataset`] uses stream 0. Replications run in
//! parallel and are reduced in replication order.
//!
//! Cross-model dependence uses a latent Gaussian copula: correlated standard
//! normals are pushed through `Phi` and then through each model's stage
//! quantile function. The resulting stage correlation is smaller than the
//! latent one; population covariances are computed from bivariate normal
//! orthant probabilities rather than assumed.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::domain::{AdoptionDataset, PmfSpec, StudySpec};
use crate::error::{Error, Result};
use crate::estimation::estimate_moments;
use crate::index::{delta_derivative, global_index, subindex, weighted_mean, IndexValue};
use crate::inference::{index_variance, interval_around, two_sample_test, Sidedness};

/// Exact population quantities of a [`PmfSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationIndex {
    pub scores: Vec<f64>,
    pub variances: Vec<f64>,
    pub index: IndexValue,
}

pub fn true_index(pmf: &PmfSpec, spec: &StudySpec) -> Result<PopulationIndex> {
    pmf.check_conforms(spec)?;
    let (scores, variances): (Vec<f64>, Vec<f64>) =
        pmf.pmfs().iter().map(|p| pmf_moments(p)).unzip();
    let sub_indices = scores
        .iter()
        .zip(spec.models())
        .map(|(&s, model)| subindex(s.clamp(0.0, f64::from(model.m())), model))
        .collect::<Result<Vec<_>>>()?;
    let global = weighted_mean(&sub_indices, spec);
    Ok(PopulationIndex {
        scores,
        variances,
        index: IndexValue {
            sub_indices,
            global,
            spec: spec.clone(),
        },
    })
}

/// Mean and variance of a stage distribution.
fn pmf_moments(pmf: &[f64]) -> (f64, f64) {
    let mean: f64 = pmf.iter().enumerate().map(|(a, p)| a as f64 * p).sum();
    let var: f64 = pmf
        .iter()
        .enumerate()
        .map(|(a, p)| {
            let d = a as f64 - mean;
            d * d * p
        })
        .sum();
    (mean, var)
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `P(Z1 > h, Z2 > k)` for standard normals with correlation `rho`, using
/// `Phi2(x, y; rho) = Phi(x) Phi(y) + (1/2pi) int_0^asin(rho) exp(-(x^2 + y^2
/// - 2xy sin t) / (2 cos^2 t)) dt` with `x = -h`, `y = -k`.
fn bivariate_upper_orthant(h: f64, k: f64, rho: f64) -> f64 {
    if h == f64::NEG_INFINITY {
        return 1.0 - std_normal_cdf(k);
    }
    if k == f64::NEG_INFINITY {
        return 1.0 - std_normal_cdf(h);
    }
    if h == f64::INFINITY || k == f64::INFINITY {
        return 0.0;
    }
    let (x, y) = (-h, -k);
    let independent = std_normal_cdf(x) * std_normal_cdf(y);
    if rho == 0.0 {
        return independent;
    }
    let upper = rho.clamp(-1.0, 1.0).asin();
    let integrand = |t: f64| {
        let (s, c) = t.sin_cos();
        if c <= 0.0 {
            return 0.0;
        }
        (-(x * x + y * y - 2.0 * x * y * s) / (2.0 * c * c)).exp()
    };
    // composite Simpson; the integrand is smooth on the open interval
    let intervals = 2000;
    let step = upper / intervals as f64;
    let mut total = integrand(0.0) + integrand(upper);
    for i in 1..intervals {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        total += weight * integrand(i as f64 * step);
    }
    independent + total * step / 3.0 / (2.0 * PI)
}

/// Population covariance matrix of the stages (per observation).
pub fn population_covariance(pmf: &PmfSpec) -> Vec<Vec<f64>> {
    let k = pmf.k();
    let moments: Vec<(f64, f64)> = pmf.pmfs().iter().map(|p| pmf_moments(p)).collect();
    let mut cov = vec![vec![0.0; k]; k];
    for j in 0..k {
        cov[j][j] = moments[j].1;
    }
    let Some(latent) = pmf.latent_corr() else {
        return cov;
    };
    let normal = Normal::standard();
    // X >= i  <=>  Z > Phi^-1(F(i - 1))
    let thresholds: Vec<Vec<f64>> = pmf
        .pmfs()
        .iter()
        .map(|p| {
            let mut cum = 0.0;
            p.iter()
                .take(p.len() - 1)
                .map(|q| {
                    cum += q;
                    if cum <= 0.0 {
                        f64::NEG_INFINITY
                    } else if cum >= 1.0 {
                        f64::INFINITY
                    } else {
                        normal.inverse_cdf(cum)
                    }
                })
                .collect()
        })
        .collect();
    for a in 0..k {
        for b in a + 1..k {
            let rho = latent[a][b];
            if rho == 0.0 {
                continue;
            }
            // E[Xa Xb] = sum_{i, j >= 1} P(Xa >= i, Xb >= j)
            let mut cross = 0.0;
            for &h in &thresholds[a] {
                for &g in &thresholds[b] {
                    cross += bivariate_upper_orthant(h, g, rho);
                }
            }
            let c = cross - moments[a].0 * moments[b].0;
            cov[a][b] = c;
            cov[b][a] = c;
        }
    }
    cov
}

/// Per-observation asymptotic variance of the estimated global index,
/// `w' D C D w`, with `D` at the population scores. Dividing by `n` gives the
/// variance of the index estimate.
pub fn population_index_variance(pmf: &PmfSpec, spec: &StudySpec) -> Result<f64> {
    let population = true_index(pmf, spec)?;
    for (model, &var) in spec.models().iter().zip(&population.variances) {
        if var == 0.0 {
            return Err(Error::DegenerateVariance {
                model: model.name().to_string(),
            });
        }
    }
    let gradient = gradient_at(&population.scores, spec)?;
    let cov = population_covariance(pmf);
    let weights: Vec<f64> = spec.weights().collect();
    let k = spec.k();
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            total += weights[a] * weights[b] * gradient[a] * gradient[b] * cov[a][b];
        }
    }
    Ok(total)
}

fn gradient_at(scores: &[f64], spec: &StudySpec) -> Result<Vec<f64>> {
    spec.models()
        .iter()
        .zip(scores)
        .map(|(model, &s)| {
            if model.is_linear() {
                Ok(1.0 / f64::from(model.m()))
            } else {
                delta_derivative(s, model)
            }
        })
        .collect()
}

/// Draws stage vectors from a [`PmfSpec`].
#[derive(Debug, Clone)]
struct Sampler {
    cumulative: Vec<Vec<f64>>,
    // Z = factor * G for iid standard normal G
    factor: Option<DMatrix<f64>>,
}

impl Sampler {
    fn new(pmf: &PmfSpec) -> Self {
        let cumulative = pmf
            .pmfs()
            .iter()
            .map(|p| {
                let mut cum = 0.0;
                let mut out: Vec<f64> = p
                    .iter()
                    .map(|q| {
                        cum += q;
                        cum
                    })
                    .collect();
                *out.last_mut().expect("pmf has stages") = 1.0;
                out
            })
            .collect();
        let factor = pmf.latent_corr().and_then(|corr| {
            let k = corr.len();
            if (0..k).all(|a| (0..k).all(|b| a == b || corr[a][b] == 0.0)) {
                return None;
            }
            let eig = SymmetricEigen::new(DMatrix::from_fn(k, k, |a, b| corr[a][b]));
            let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
            Some(&eig.eigenvectors * DMatrix::from_diagonal(&roots))
        });
        Self { cumulative, factor }
    }

    fn stage(cumulative: &[f64], u: f64) -> u32 {
        cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(cumulative.len() - 1) as u32
    }

    fn draw_into<R: Rng>(&self, rng: &mut R, out: &mut Vec<u32>) {
        let k = self.cumulative.len();
        match &self.factor {
            None => {
                for cum in &self.cumulative {
                    let u: f64 = rng.random();
                    out.push(Self::stage(cum, u));
                }
            }
            Some(factor) => {
                let g: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
                for (j, cum) in self.cumulative.iter().enumerate() {
                    let z: f64 = (0..k).map(|i| factor[(j, i)] * g[i]).sum();
                    out.push(Self::stage(cum, std_normal_cdf(z)));
                }
            }
        }
    }

    fn dataset<R: Rng>(
        &self,
        rng: &mut R,
        n: usize,
        spec: &StudySpec,
        row_ids: &[String],
    ) -> AdoptionDataset {
        let mut values = Vec::with_capacity(n * spec.k());
        for _ in 0..n {
            self.draw_into(rng, &mut values);
        }
        AdoptionDataset::from_trusted(row_ids.to_vec(), values, spec.clone())
    }
}

fn row_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("sim{i}")).collect()
}

pub fn replication_rng(seed: u64, replication: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// `n` iid rows from `pmf`, deterministic in `seed`.
pub fn sample_dataset(
    pmf: &PmfSpec,
    spec: &StudySpec,
    n: usize,
    seed: u64,
) -> Result<AdoptionDataset> {
    pmf.check_conforms(spec)?;
    if n <= spec.k() {
        return Err(Error::TooFewRows { n, k: spec.k() });
    }
    let sampler = Sampler::new(pmf);
    let mut rng = replication_rng(seed, 0);
    Ok(sampler.dataset(&mut rng, n, spec, &row_ids(n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    /// Moments of `sqrt(n) (I_hat - I)` standardized by the population
    /// asymptotic standard deviation.
    Normality,
    /// Share of confidence intervals containing the true index.
    Coverage,
    /// Two-sample rejection rate with both samples from the same pmf.
    Size,
    /// Two-sample rejection rate with the second sample from `alternative`.
    Power,
    /// Estimated against empirical and population variance of the index.
    VarianceRatio,
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normality" => Ok(StudyKind::Normality),
            "coverage" => Ok(StudyKind::Coverage),
            "size" => Ok(StudyKind::Size),
            "power" => Ok(StudyKind::Power),
            "variance-ratio" => Ok(StudyKind::VarianceRatio),
            other => Err(Error::InvalidPlan(format!("unknown study `{other}`"))),
        }
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StudyKind::Normality => "normality",
            StudyKind::Coverage => "coverage",
            StudyKind::Size => "size",
            StudyKind::Power => "power",
            StudyKind::VarianceRatio => "variance-ratio",
        })
    }
}

/// Pass bands for each study. The defaults are sized from the binomial or
/// sampling error at 10,000 replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub variance_ratio: [f64; 2],
    pub coverage: [f64; 2],
    pub size: [f64; 2],
    pub power_min: f64,
    /// Allowed distance of skewness and excess kurtosis from zero, in Monte
    /// Carlo standard errors.
    pub normality_se: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            variance_ratio: [0.95, 1.05],
            coverage: [0.94, 0.96],
            size: [0.04, 0.06],
            power_min: 0.95,
            normality_se: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub spec: StudySpec,
    pub pmf: PmfSpec,
    /// Second-industry distribution for power studies.
    pub alternative: Option<PmfSpec>,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub study: StudyKind,
    pub significance: f64,
    pub level: f64,
    pub tolerances: Tolerances,
}

impl SimulationPlan {
    pub fn new(
        spec: StudySpec,
        pmf: PmfSpec,
        study: StudyKind,
        n: usize,
        replications: usize,
        seed: u64,
    ) -> Self {
        Self {
            spec,
            pmf,
            alternative: None,
            n,
            replications,
            seed,
            study,
            significance: 0.05,
            level: 0.95,
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pmf.check_conforms(&self.spec)?;
        if self.n <= self.spec.k() {
            return Err(Error::InvalidPlan(format!(
                "n = {} must exceed k = {}",
                self.n,
                self.spec.k()
            )));
        }
        if self.replications < 1 {
            return Err(Error::InvalidPlan(
                "at least one replication is required".into(),
            ));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::InvalidSignificance(self.significance));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidLevel(self.level));
        }
        match (&self.alternative, self.study) {
            (Some(alt), _) => alt.check_conforms(&self.spec)?,
            (None, StudyKind::Power) => {
                return Err(Error::InvalidPlan(
                    "a power study needs an alternative pmf".into(),
                ))
            }
            (None, _) => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub mc_se: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: Option<bool>,
}

impl Metric {
    fn info(name: &str, value: f64, mc_se: Option<f64>) -> Self {
        Self {
            name: name.to_string(),
            value,
            mc_se,
            lower: None,
            upper: None,
            pass: None,
        }
    }

    fn banded(name: &str, value: f64, mc_se: Option<f64>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            mc_se,
            lower: Some(lower),
            upper: Some(upper),
            pass: Some(value >= lower && value <= upper),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub study: StudyKind,
    pub seed: u64,
    pub n: usize,
    pub replications: usize,
    pub true_index: f64,
    pub metrics: Vec<Metric>,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl SimulationReport {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

const IID_NOTE: &str =
    "rows are simulated iid within an industry; clustered or stratified sampling is not modelled";

pub fn run_study(plan: &SimulationPlan) -> Result<SimulationReport> {
    plan.validate()?;
    let spec = &plan.spec;
    let population = true_index(&plan.pmf, spec)?;
    // refuses degenerate or boundary populations before sampling
    let population_variance = population_index_variance(&plan.pmf, spec)?;
    if let Some(alt) = &plan.alternative {
        population_index_variance(alt, spec)?;
    }
    let metrics = match plan.study {
        StudyKind::Normality | StudyKind::Coverage | StudyKind::VarianceRatio => {
            let draws = single_sample_replications(plan)?;
            match plan.study {
                StudyKind::Normality => {
                    normality_metrics(plan, &draws, population.index.global, population_variance)
                }
                StudyKind::Coverage => coverage_metrics(plan, &draws, population.index.global)?,
                _ => variance_ratio_metrics(plan, &draws, population_variance),
            }
        }
        StudyKind::Size | StudyKind::Power => rejection_metrics(plan)?,
    };
    let passed = metrics.iter().all(|m| m.pass != Some(false));
    Ok(SimulationReport {
        study: plan.study,
        seed: plan.seed,
        n: plan.n,
        replications: plan.replications,
        true_index: population.index.global,
        metrics,
        passed,
        notes: vec![IID_NOTE.to_string()],
    })
}

struct Draw {
    index: f64,
    variance: f64,
    // same quadratic form with every term scaled by 1 / (m_a m_b)
    literal_variance: f64,
    // sample stage correlations, upper triangle in row order
    correlations: Vec<Option<f64>>,
}

/// Runs `f` for every replication in parallel and returns results in
/// replication order, or the error of the lowest failing replication.
fn replicate<T, F>(plan: &SimulationPlan, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha20Rng) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = (0..plan.replications as u64)
        .into_par_iter()
        .map(|r| f(&mut replication_rng(plan.seed, r)))
        .collect();
    results.into_iter().collect()
}

fn single_sample_replications(plan: &SimulationPlan) -> Result<Vec<Draw>> {
    let spec = &plan.spec;
    let sampler = Sampler::new(&plan.pmf);
    let ids = row_ids(plan.n);
    let ms: Vec<f64> = spec.models().iter().map(|m| f64::from(m.m())).collect();
    replicate(plan, |rng| {
        let dataset = sampler.dataset(rng, plan.n, spec, &ids);
        let moments = estimate_moments(&dataset)?;
        let index = global_index(&moments.scores, spec)?;
        let variance = index_variance(&moments, spec)?;
        let literal_variance = variance
            .contributions
            .iter()
            .zip(&ms)
            .map(|(c, m)| c / (m * m))
            .sum::<f64>()
            + variance
                .cross_terms
                .iter()
                .map(|c| c.value / (ms[c.a] * ms[c.b]))
                .sum::<f64>();
        let k = moments.k();
        let correlations = (0..k)
            .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
            .map(|(a, b)| moments.corr[a][b])
            .collect();
        Ok(Draw {
            index: index.global,
            variance: variance.value,
            literal_variance,
            correlations,
        })
    })
}

/// Mean and central moments 2..4 of a sample, accumulated in order.
fn central_moments(values: &[f64]) -> (f64, f64, f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (mean, m2 / r, m3 / r, m4 / r)
}

fn normality_metrics(
    plan: &SimulationPlan,
    draws: &[Draw],
    truth: f64,
    population_variance: f64,
) -> Vec<Metric> {
    let r = draws.len() as f64;
    let scale = (plan.n as f64 / population_variance).sqrt();
    let z: Vec<f64> = draws.iter().map(|d| (d.index - truth) * scale).collect();
    let (mean, m2, m3, m4) = central_moments(&z);
    let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
    let excess_kurtosis = if m2 > 0.0 { m4 / (m2 * m2) - 3.0 } else { 0.0 };
    let (skew_se, kurt_se) = ((6.0 / r).sqrt(), (24.0 / r).sqrt());
    let band = plan.tolerances.normality_se;
    vec![
        Metric::info("mean", mean, Some((m2 / r).sqrt())),
        Metric::info(
            "variance",
            m2 * r / (r - 1.0).max(1.0),
            Some(m2 * (2.0 / r).sqrt()),
        ),
        Metric::banded(
            "skewness",
            skewness,
            Some(skew_se),
            -band * skew_se,
            band * skew_se,
        ),
        Metric::banded(
            "excess_kurtosis",
            excess_kurtosis,
            Some(kurt_se),
            -band * kurt_se,
            band * kurt_se,
        ),
    ]
}

fn coverage_metrics(plan: &SimulationPlan, draws: &[Draw], truth: f64) -> Result<Vec<Metric>> {
    let df = (plan.n - plan.spec.k() - 1) as f64;
    let mut covered = 0usize;
    let mut clamped = 0usize;
    for d in draws {
        let ci = interval_around(d.index, d.variance, plan.level, df)?;
        covered += usize::from(ci.contains(truth));
        clamped += usize::from(ci.clamped);
    }
    let r = draws.len() as f64;
    let rate = covered as f64 / r;
    let [lo, hi] = plan.tolerances.coverage;
    Ok(vec![
        Metric::banded(
            "coverage",
            rate,
            Some((rate * (1.0 - rate) / r).sqrt()),
            lo,
            hi,
        ),
        Metric::info("clamped_share", clamped as f64 / r, None),
    ])
}

fn variance_ratio_metrics(
    plan: &SimulationPlan,
    draws: &[Draw],
    population_variance: f64,
) -> Vec<Metric> {
    let r = draws.len() as f64;
    let indices: Vec<f64> = draws.iter().map(|d| d.index).collect();
    let (_, m2, _, m4) = central_moments(&indices);
    let empirical = m2 * r / (r - 1.0).max(1.0);
    let variances: Vec<f64> = draws.iter().map(|d| d.variance).collect();
    let (mean_v, var_v, _, _) = central_moments(&variances);
    let mean_literal = draws.iter().map(|d| d.literal_variance).sum::<f64>() / r;
    let kurtosis = if m2 > 0.0 { m4 / (m2 * m2) } else { 3.0 };

    let empirical_ratio = mean_v / empirical;
    // delta-method error of a ratio of two independent-ish means
    let empirical_se =
        empirical_ratio * (var_v / (r * mean_v * mean_v) + (kurtosis - 1.0) / r).sqrt();
    let population_ratio = mean_v * plan.n as f64 / population_variance;
    let population_se = population_ratio * (var_v / (r * mean_v * mean_v)).sqrt();
    let [lo, hi] = plan.tolerances.variance_ratio;
    let mut metrics = vec![
        Metric::banded(
            "estimated_over_empirical",
            empirical_ratio,
            Some(empirical_se),
            lo,
            hi,
        ),
        Metric::banded(
            "estimated_over_population",
            population_ratio,
            Some(population_se),
            lo,
            hi,
        ),
        Metric::info("empirical_variance", empirical, None),
        Metric::info("mean_estimated_variance", mean_v, None),
        Metric::info(
            "empirical_over_literal_form",
            empirical / mean_literal,
            None,
        ),
    ];
    metrics.extend(correlation_metrics(plan, draws));
    metrics
}

/// Mean sample stage correlation per model pair next to the exact value the
/// copula induces.
fn correlation_metrics(plan: &SimulationPlan, draws: &[Draw]) -> Vec<Metric> {
    let models = plan.spec.models();
    let cov = population_covariance(&plan.pmf);
    let k = models.len();
    let pairs = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b)));
    let mut metrics = Vec::new();
    for (p, (a, b)) in pairs.enumerate() {
        let observed: Vec<f64> = draws.iter().filter_map(|d| d.correlations[p]).collect();
        let label = format!("{}_{}", models[a].name(), models[b].name());
        if !observed.is_empty() {
            let (mean, m2, _, _) = central_moments(&observed);
            metrics.push(Metric::info(
                &format!("stage_correlation_{label}"),
                mean,
                Some((m2 / observed.len() as f64).sqrt()),
            ));
        }
        metrics.push(Metric::info(
            &format!("population_stage_correlation_{label}"),
            cov[a][b] / (cov[a][a] * cov[b][b]).sqrt(),
            None,
        ));
    }
    metrics
}

fn rejection_metrics(plan: &SimulationPlan) -> Result<Vec<Metric>> {
    let spec = &plan.spec;
    let first = Sampler::new(&plan.pmf);
    let second = match (&plan.alternative, plan.study) {
        (Some(alt), StudyKind::Power) => Sampler::new(alt),
        _ => first.clone(),
    };
    let ids = row_ids(plan.n);
    let rejections = replicate(plan, |rng| {
        let a = first.dataset(rng, plan.n, spec, &ids);
        let b = second.dataset(rng, plan.n, spec, &ids);
        let outcome = two_sample_test(&a, &b, Sidedness::TwoSided, plan.significance)?;
        Ok(outcome.reject)
    })?;
    let r = rejections.len() as f64;
    let rate = rejections.iter().filter(|&&x| x).count() as f64 / r;
    let se = (rate * (1.0 - rate) / r).sqrt();
    Ok(vec![match plan.study {
        StudyKind::Power => Metric::banded(
            "rejection_rate",
            rate,
            Some(se),
            plan.tolerances.power_min,
            1.0,
        ),
        _ => {
            let [lo, hi] = plan.tolerances.size;
            Metric::banded("rejection_rate", rate, Some(se), lo, hi)
        }
    }])
}
