//! Command reports. Every report renders either as a plain-text table or as
//! pretty-printed JSON carrying the same fields; the JSON form parses back
//! into an identical [`Report`].

use std::fmt::Write as _;

use adoption_index::{
    ConfidenceInterval, ShapePreset, SimulationReport, StudySpec, SurfacePoint, TestKind,
    TestOutcome,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    pub name: String,
    pub m: u32,
    pub alpha: f64,
    pub beta: f64,
    pub weight: f64,
}

pub fn echo_spec(spec: &StudySpec) -> Vec<ModelEcho> {
    spec.models()
        .iter()
        .map(|m| ModelEcho {
            name: m.name().to_string(),
            m: m.m(),
            alpha: m.alpha(),
            beta: m.beta(),
            weight: m.weight(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEstimate {
    pub name: String,
    pub score: f64,
    pub sub_index: f64,
    pub derivative: f64,
    pub variance_contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeReport {
    pub spec: Vec<ModelEcho>,
    pub data: String,
    pub n: usize,
    pub models: Vec<ModelEstimate>,
    pub global_index: f64,
    pub variance: f64,
    pub std_error: f64,
    pub interval: ConfidenceInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub spec: Vec<ModelEcho>,
    pub data: Vec<String>,
    pub row: Option<String>,
    pub outcome: TestOutcome,
    pub decision: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub plan: String,
    pub spec: Vec<ModelEcho>,
    pub result: SimulationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub spec: Vec<ModelEcho>,
    pub preset: Option<ShapePreset>,
    pub resolution: usize,
    pub points: Vec<SurfacePoint>,
}

impl SurfaceReport {
    /// Index values at `(0, 0)`, `(m1, 0)`, `(0, m2)` and `(m1, m2)`.
    pub fn corners(&self) -> [f64; 4] {
        let r = self.resolution;
        let at = |i: usize, j: usize| self.points[i * r + j].index;
        [at(0, 0), at(r - 1, 0), at(0, r - 1), at(r - 1, r - 1)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Compute(ComputeReport),
    TestOne(TestReport),
    TestTwo(TestReport),
    Simulate(SimulateReport),
    Surface(SurfaceReport),
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Structured => {
            let mut out =
                serde_json::to_string_pretty(report).expect("reports hold only finite numbers");
            out.push('\n');
            out
        }
        Format::Table => render_table(report),
    }
}

pub fn parse_structured(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

fn spec_table(out: &mut String, spec: &[ModelEcho]) {
    let _ = writeln!(
        out,
        "{:<16} {:>4} {:>8} {:>8} {:>8}",
        "model", "m", "alpha", "beta", "weight"
    );
    for m in spec {
        let _ = writeln!(
            out,
            "{:<16} {:>4} {:>8} {:>8} {:>8.6}",
            m.name, m.m, m.alpha, m.beta, m.weight
        );
    }
}

fn render_table(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Compute(r) => {
            let _ = writeln!(out, "data: {} (n = {})", r.data, r.n);
            spec_table(&mut out, &r.spec);
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "{:<16} {:>12} {:>12} {:>12} {:>14}",
                "model", "score", "sub_index", "derivative", "contribution"
            );
            for m in &r.models {
                let _ = writeln!(
                    out,
                    "{:<16} {:>12.6} {:>12.6} {:>12.6} {:>14.6e}",
                    m.name, m.score, m.sub_index, m.derivative, m.variance_contribution
                );
            }
            let _ = writeln!(out);
            let _ = writeln!(out, "global_index  {}", r.global_index);
            let _ = writeln!(out, "variance      {}", r.variance);
            let _ = writeln!(out, "std_error     {}", r.std_error);
            let ci = &r.interval;
            let _ = writeln!(
                out,
                "interval      [{}, {}] level {} df {}{}",
                ci.lower,
                ci.upper,
                ci.level,
                ci.df,
                if ci.clamped {
                    " (clamped to [0, 1])"
                } else {
                    ""
                }
            );
        }
        Report::TestOne(r) | Report::TestTwo(r) => {
            let o = &r.outcome;
            let title = match o.kind {
                TestKind::LeaveOneOut => "one-sample test (row against the rest)",
                TestKind::FixedReference => "one-sample test (fixed reference)",
                TestKind::TwoSample => "two-sample test (unequal variances)",
            };
            let _ = writeln!(out, "{title}");
            let _ = writeln!(out, "data: {}", r.data.join(", "));
            if let Some(row) = &r.row {
                let _ = writeln!(out, "row: {row}");
            }
            spec_table(&mut out, &r.spec);
            let _ = writeln!(out);
            let _ = writeln!(out, "indices       {:?}", o.indices);
            let _ = writeln!(out, "variances     {:?}", o.variances);
            let _ = writeln!(out, "sample_sizes  {:?}", o.sample_sizes);
            if let Some(reference) = o.reference {
                let _ = writeln!(out, "reference     {reference}");
            }
            let _ = writeln!(out, "statistic     {}", o.statistic);
            let _ = writeln!(out, "df            {}", o.df);
            let _ = writeln!(out, "sidedness     {}", o.sidedness);
            let _ = writeln!(out, "p_value       {}", o.p_value);
            let _ = writeln!(out, "significance  {}", o.significance);
            let _ = writeln!(out, "decision      {}", r.decision);
            for note in &r.notes {
                let _ = writeln!(out, "note: {note}");
            }
        }
        Report::Simulate(r) => {
            let s = &r.result;
            let _ = writeln!(out, "simulation study: {}", s.study);
            let _ = writeln!(out, "plan: {}", r.plan);
            let _ = writeln!(
                out,
                "n = {}, replications = {}, seed = {}",
                s.n, s.replications, s.seed
            );
            spec_table(&mut out, &r.spec);
            let _ = writeln!(out, "true_index    {}", s.true_index);
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "{:<30} {:>12} {:>10} {:>10} {:>10} {:>6}",
                "metric", "value", "mc_se", "lower", "upper", "pass"
            );
            let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
            for m in &s.metrics {
                let pass = match m.pass {
                    Some(true) => "yes",
                    Some(false) => "NO",
                    None => "-",
                };
                let _ = writeln!(
                    out,
                    "{:<30} {:>12.6} {:>10} {:>10} {:>10} {:>6}",
                    m.name,
                    m.value,
                    opt(m.mc_se),
                    opt(m.lower),
                    opt(m.upper),
                    pass
                );
            }
            let _ = writeln!(out);
            let _ = writeln!(out, "verdict: {}", if s.passed { "pass" } else { "FAIL" });
            for note in &s.notes {
                let _ = writeln!(out, "note: {note}");
            }
        }
        Report::Surface(r) => {
            let _ = writeln!(out, "S_1,S_2,I");
            for p in &r.points {
                let _ = writeln!(out, "{},{},{}", p.s1, p.s2, p.index);
            }
        }
    }
    out
}
