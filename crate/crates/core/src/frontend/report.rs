use std::collections::BTreeMap;

use serde::Serialize;

use crate::holonomy::TrajectoryRecord;
use crate::linearize::{LinearizeReport, Stage, StageStatus, Witness};

use super::format::{format_alternating, format_poly};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Provenance {
    /// SHA-256 of every input text, keyed like `Report::inputs`.
    pub input_hashes: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub name: String,
    /// `passed`, `failed` or `skipped`.
    pub verdict: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<BTreeMap<String, f64>>,
}

impl StageRecord {
    pub fn new(name: &str, passed: bool) -> Self {
        StageRecord {
            name: name.into(),
            verdict: if passed { "passed" } else { "failed" }.into(),
            note: String::new(),
            witness: None,
            stats: None,
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn stat(mut self, key: &str, v: f64) -> Self {
        self.stats.get_or_insert_with(BTreeMap::new).insert(key.into(), v);
        self
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Form(w) => format_alternating(w),
        Witness::MultiVector(p) => format_alternating(p),
        Witness::Poly(p) => format_poly(p),
        Witness::Point(x) => format!("({})", x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")),
        Witness::Text(s) => s.clone(),
    }
}

impl From<&Stage> for StageRecord {
    fn from(s: &Stage) -> Self {
        StageRecord {
            name: s.name.into(),
            verdict: match s.status {
                StageStatus::Passed => "passed",
                StageStatus::Failed => "failed",
                StageStatus::Skipped => "skipped",
            }
            .into(),
            note: s.note.clone(),
            witness: s.witness.as_ref().map(witness_text),
            stats: (!s.stats.is_empty()).then(|| s.stats.clone()),
        }
    }
}

/// Machine-readable result of one command. Everything except `timings` and
/// `timestamp` is a function of the inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub provenance: Provenance,
    /// Overall outcome, e.g. `nambu`, `not_unimodular`, `linearized`.
    pub verdict: String,
    pub success: bool,
    pub stages: Vec<StageRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    /// Command-specific named results.
    pub results: BTreeMap<String, String>,
    pub timings: BTreeMap<String, f64>,
    pub timestamp: String,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            inputs: BTreeMap::new(),
            provenance: Provenance { tool_version: env!("CARGO_PKG_VERSION").into(), ..Provenance::default() },
            verdict: String::new(),
            success: false,
            stages: Vec::new(),
            max_residual: None,
            results: BTreeMap::new(),
            timings: BTreeMap::new(),
            timestamp: String::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.inputs.insert(key.into(), value.into());
        self
    }

    pub fn result(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.results.insert(key.into(), value.to_string());
        self
    }

    pub fn tolerance(&mut self, key: &str, v: f64) -> &mut Self {
        self.provenance.tolerances.insert(key.into(), v);
        self
    }

    pub fn stage(&mut self, s: StageRecord) -> &mut Self {
        self.stages.push(s);
        self
    }

    pub fn finish(&mut self, verdict: &str, success: bool) -> &mut Self {
        self.verdict = verdict.into();
        self.success = success;
        self
    }

    /// Copies stages, residual and verdict from a linearization run.
    pub fn absorb_linearize(&mut self, rep: &LinearizeReport) -> &mut Self {
        self.stages.extend(rep.stages.iter().map(StageRecord::from));
        self.max_residual = rep.max_residual;
        self.result("dim", rep.dim);
        self.result("radius", rep.radius);
        self.result("samples", rep.samples.len());
        self.result("message", rep.verdict.message());
        let verdict = serde_variant(&rep.verdict);
        self.finish(&verdict, rep.verdict.success())
    }
}

fn serde_variant(v: &crate::linearize::LinearizeVerdict) -> String {
    use crate::linearize::LinearizeVerdict::*;
    match v {
        Linearized => "linearized",
        HypothesesVerified => "hypotheses_verified",
        NotUnimodular => "not_unimodular",
        Degenerate => "degenerate",
        InvalidInput => "invalid_input",
        MoserFailed => "moser_failed",
        FactorMismatch => "factor_mismatch",
        ResidualExceeded => "residual_exceeded",
    }
    .into()
}

/// `t,x1,..,xn,f,theta`.
pub fn trajectory_csv_header(n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|i| format!("x{i}")));
    h.push("f".into());
    h.push("theta".into());
    h
}

pub fn trajectory_csv_rows(tr: &TrajectoryRecord<f64>) -> Vec<Vec<f64>> {
    (0..tr.len())
        .map(|i| {
            let mut row = vec![tr.times[i]];
            row.extend_from_slice(&tr.points[i]);
            row.push(tr.f_values[i]);
            row.push(tr.theta[i]);
            row
        })
        .collect()
}
