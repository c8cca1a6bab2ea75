use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::frontend::format_poly_named;
use crate::nambu::{is_unimodular, NambuCandidate, Signature};
use crate::{DiffForm, MultiVector, Poly};

use super::flow::{sample_points, FlowSample, Linearizer};
use super::{factor_of_potential, potential_from, verify_rt, MoserSpec, PotentialData, RtFinding};

#[derive(Clone, Debug, PartialEq)]
pub struct LinearizeOptions {
    pub samples: usize,
    /// ODE tolerance.
    pub tol: f64,
    pub radius: f64,
    pub seed: u64,
    pub pullback_tol: f64,
    /// Agreement required between the reduced and the full flow.
    pub oracle_tol: f64,
    /// Relative agreement required between the Jacobian and central differences.
    pub jacobian_tol: f64,
    /// Number of times the radius may be halved after a blow-up.
    pub max_shrink: usize,
}

impl Default for LinearizeOptions {
    fn default() -> Self {
        LinearizeOptions {
            samples: 27,
            tol: 1e-10,
            radius: 0.2,
            seed: 0,
            pullback_tol: 1e-7,
            oracle_tol: 1e-9,
            jacobian_tol: 1e-6,
            max_shrink: 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearizeVerdict {
    Linearized,
    /// Every hypothesis checked; no normal-form factor was supplied.
    HypothesesVerified,
    NotUnimodular,
    Degenerate,
    InvalidInput,
    /// The supplied `k` disagrees with the factor read off the potential.
    FactorMismatch,
    MoserFailed,
    ResidualExceeded,
}

impl LinearizeVerdict {
    pub fn success(&self) -> bool {
        matches!(self, LinearizeVerdict::Linearized | LinearizeVerdict::HypothesesVerified)
    }

    pub fn message(&self) -> &'static str {
        match self {
            LinearizeVerdict::Linearized => "linearized",
            LinearizeVerdict::HypothesesVerified => "hypotheses verified; no normal form supplied",
            LinearizeVerdict::NotUnimodular => "not unimodular w.r.t. supplied volume",
            LinearizeVerdict::Degenerate => "degenerate linear part: linearization does not apply",
            LinearizeVerdict::InvalidInput => "input outside the supported class",
            LinearizeVerdict::FactorMismatch => "supplied k does not match the input",
            LinearizeVerdict::MoserFailed => "Moser equation not solved",
            LinearizeVerdict::ResidualExceeded => "pullback residual above tolerance",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Passed,
    Failed,
    Skipped,
}

/// Symbolic evidence attached to a stage.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Form(DiffForm),
    MultiVector(MultiVector),
    Poly(Poly),
    Point(Vec<f64>),
    Text(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub name: &'static str,
    pub status: StageStatus,
    pub note: String,
    pub witness: Option<Witness>,
    pub stats: BTreeMap<String, f64>,
}

impl Stage {
    fn new(name: &'static str, status: StageStatus, note: impl Into<String>) -> Self {
        Stage { name, status, note: note.into(), witness: None, stats: BTreeMap::new() }
    }

    fn witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    fn stat(mut self, key: &str, v: f64) -> Self {
        self.stats.insert(key.into(), v);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearizeReport {
    pub dim: usize,
    pub verdict: LinearizeVerdict,
    pub stages: Vec<Stage>,
    pub potential: Option<PotentialData>,
    pub moser: Option<RtFinding>,
    pub samples: Vec<FlowSample<f64>>,
    /// Sampling radius actually used, after any shrinking.
    pub radius: f64,
    pub max_residual: Option<f64>,
}

impl LinearizeReport {
    fn finish(mut self, verdict: LinearizeVerdict) -> Self {
        self.verdict = verdict;
        self
    }
}

struct Sweep {
    samples: Vec<FlowSample<f64>>,
    oracle_gap: f64,
    jacobian_gap: f64,
}

fn sweep(lin: &Linearizer<f64>, points: &[Vec<f64>], opts: &LinearizeOptions) -> crate::Result<Sweep> {
    let fine = lin.with_tol(opts.tol.min(1e-13));
    let results: crate::Result<Vec<(FlowSample<f64>, f64, f64)>> = points
        .par_iter()
        .map(|x0| {
            let s = lin.flow_map(x0)?;
            let full = lin.full_flow(x0)?;
            let gap = s.image.iter().zip(&full).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            // Richardson-extrapolated central differences
            let (coarse, half) = (fine.jacobian_fd(x0, 2e-4)?, fine.jacobian_fd(x0, 1e-4)?);
            let fd: Vec<Vec<f64>> = coarse
                .iter()
                .zip(&half)
                .map(|(rc, rh)| rc.iter().zip(rh).map(|(c, h)| (4.0 * h - c) / 3.0).collect())
                .collect();
            let scale = s.jacobian.iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
            let jgap = s
                .jacobian
                .iter()
                .flatten()
                .zip(fd.iter().flatten())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs() / scale));
            Ok((s, gap, jgap))
        })
        .collect();
    let results = results?;
    Ok(Sweep {
        oracle_gap: results.iter().fold(0.0, |m, r| m.max(r.1)),
        jacobian_gap: results.iter().fold(0.0, |m, r| m.max(r.2)),
        samples: results.into_iter().map(|r| r.0).collect(),
    })
}

/// Runs the linearization pipeline on a coorder-1 structure with volume
/// density `h`. Without `k` the run stops after the hypotheses.
pub fn linearize_report(c: &NambuCandidate, h: &Poly, k: Option<&Poly>, opts: &LinearizeOptions) -> LinearizeReport {
    let n = c.dim();
    let mut rep = LinearizeReport {
        dim: n,
        verdict: LinearizeVerdict::InvalidInput,
        stages: Vec::new(),
        potential: None,
        moser: None,
        samples: Vec::new(),
        radius: opts.radius,
        max_residual: None,
    };

    if c.coorder() != 1 || n < 3 {
        rep.stages.push(Stage::new(
            "input",
            StageStatus::Failed,
            format!("need order n-1 with n >= 3, got order {} in dimension {n}", c.order()),
        ));
        return rep.finish(LinearizeVerdict::InvalidInput);
    }
    if !c.vanishes_at_origin() {
        rep.stages.push(Stage::new("input", StageStatus::Failed, "structure does not vanish at the origin"));
        return rep.finish(LinearizeVerdict::InvalidInput);
    }
    rep.stages.push(Stage::new("input", StageStatus::Passed, format!("order {} in dimension {n}", c.order())));

    match is_unimodular(c, h) {
        Ok(v) if v.unimodular => {
            rep.stages.push(Stage::new("unimodular", StageStatus::Passed, "d i_P mu = 0"));
        }
        Ok(v) => {
            rep.stages.push(
                Stage::new("unimodular", StageStatus::Failed, LinearizeVerdict::NotUnimodular.message())
                    .witness(Witness::Form(v.witness)),
            );
            return rep.finish(LinearizeVerdict::NotUnimodular);
        }
        Err(e) => {
            rep.stages.push(Stage::new("unimodular", StageStatus::Failed, e.to_string()));
            return rep.finish(LinearizeVerdict::InvalidInput);
        }
    }

    let potential = match potential_from(c, h) {
        Ok(p) => p,
        Err(e @ Error::SingularHessian { .. }) => {
            rep.stages.push(Stage::new("potential", StageStatus::Passed, "dg equals the dual form"));
            rep.stages.push(Stage::new(
                "morse",
                StageStatus::Failed,
                format!("{}: {e}", LinearizeVerdict::Degenerate.message()),
            ));
            return rep.finish(LinearizeVerdict::Degenerate);
        }
        Err(e) => {
            rep.stages.push(Stage::new("potential", StageStatus::Failed, e.to_string()));
            return rep.finish(LinearizeVerdict::InvalidInput);
        }
    };
    rep.stages.push(
        Stage::new("potential", StageStatus::Passed, "dg equals the dual form").witness(Witness::Poly(potential.g.clone())),
    );
    let sig = potential.signature;
    rep.stages.push(
        Stage::new("morse", StageStatus::Passed, format!("nondegenerate Hessian, signature {sig}"))
            .stat("pos", sig.pos as f64)
            .stat("neg", sig.neg as f64),
    );
    rep.potential = Some(potential);

    let Some(k) = k else {
        rep.stages.push(Stage::new("moser", StageStatus::Skipped, "no normal-form factor k supplied"));
        rep.stages.push(Stage::new("flow", StageStatus::Skipped, "no normal-form factor k supplied"));
        return rep.finish(LinearizeVerdict::HypothesesVerified);
    };

    let spec = match MoserSpec::new(n, sig, k.clone()) {
        Ok(s) => s,
        Err(e) => {
            rep.stages.push(Stage::new("normal_form", StageStatus::Failed, e.to_string()));
            return rep.finish(LinearizeVerdict::InvalidInput);
        }
    };
    let matches = spec.structure() == *c.multivector() && *h == Poly::one(n);
    let read_off = if *h == Poly::one(n) { rep.potential.as_ref().and_then(|p| factor_of_potential(&p.g)) } else { None };
    match read_off {
        Some(actual) if actual != *k => {
            rep.stages.push(
                Stage::new("normal_form", StageStatus::Failed, LinearizeVerdict::FactorMismatch.message())
                    .witness(Witness::Text(format!("k = {}", format_poly_named(&actual, &["u"])))),
            );
            return rep.finish(LinearizeVerdict::FactorMismatch);
        }
        _ => {}
    }
    rep.stages.push(Stage::new(
        "normal_form",
        StageStatus::Passed,
        if matches {
            "input equals k(f) P_l with the standard volume"
        } else if read_off.is_some() {
            "input is k(q) times its linear part; k matches the potential"
        } else {
            "k taken as the isochore Morse normal-form factor of the input"
        },
    ));

    let finding = match verify_rt(&spec) {
        Ok(f) => f,
        Err(e) => {
            rep.stages.push(Stage::new("moser", StageStatus::Failed, e.to_string()));
            return rep.finish(LinearizeVerdict::MoserFailed);
        }
    };
    let solved = finding.derived_solves();
    let flipped_note = if finding.flipped_solves() {
        "sign-flipped denominator also solves"
    } else {
        "sign-flipped denominator leaves a nonzero residual"
    };
    let mut stage = Stage::new(
        "moser",
        if solved { StageStatus::Passed } else { StageStatus::Failed },
        format!(
            "{}; {flipped_note}",
            if solved { "derived r_t solves the Moser equation" } else { "derived r_t fails" }
        ),
    )
    .stat("flipped_residual_terms", finding.flipped_residual.len() as f64);
    if !finding.flipped_solves() {
        stage = stage.witness(Witness::Poly(finding.flipped_residual.clone()));
    }
    rep.stages.push(stage);
    rep.moser = Some(finding.clone());
    if !solved {
        return rep.finish(LinearizeVerdict::MoserFailed);
    }

    let lin = match Linearizer::<f64>::new(&spec, &finding.derived, opts.tol) {
        Ok(l) => l,
        Err(e) => {
            rep.stages.push(Stage::new("flow", StageStatus::Failed, e.to_string()));
            return rep.finish(LinearizeVerdict::MoserFailed);
        }
    };
    let mut radius = opts.radius;
    let mut shrinks = 0;
    let result = loop {
        let points = sample_points(n, opts.samples, radius, opts.seed);
        match sweep(&lin, &points, opts) {
            Err(Error::BlowUp { .. }) if shrinks < opts.max_shrink => {
                radius /= 2.0;
                shrinks += 1;
            }
            other => break other,
        }
    };
    rep.radius = radius;
    let sw = match result {
        Ok(sw) => sw,
        Err(e) => {
            rep.stages.push(Stage::new("flow", StageStatus::Failed, e.to_string()).stat("radius", radius));
            return rep.finish(LinearizeVerdict::ResidualExceeded);
        }
    };
    let max_res = sw.samples.iter().fold(0.0_f64, |m, s| m.max(s.residual));
    let worst = sw.samples.iter().max_by(|a, b| a.residual.total_cmp(&b.residual)).map(|s| s.x0.clone());
    let ok = max_res <= opts.pullback_tol && sw.oracle_gap <= opts.oracle_tol && sw.jacobian_gap <= opts.jacobian_tol;
    let mut stage = Stage::new(
        "flow",
        if ok { StageStatus::Passed } else { StageStatus::Failed },
        format!("{} samples in [-{radius}, {radius}]^{n}", sw.samples.len()),
    )
    .stat("max_residual", max_res)
    .stat("max_full_flow_gap", sw.oracle_gap)
    .stat("max_jacobian_fd_gap", sw.jacobian_gap)
    .stat("radius", radius)
    .stat("shrinks", shrinks as f64);
    if let (false, Some(p)) = (ok, worst) {
        stage = stage.witness(Witness::Point(p));
    }
    rep.stages.push(stage);
    rep.samples = sw.samples;
    rep.max_residual = Some(max_res);
    rep.finish(if ok { LinearizeVerdict::Linearized } else { LinearizeVerdict::ResidualExceeded })
}

/// Normal-form structure `k(f) P_l` for a signature, as a candidate.
pub fn normal_form_candidate(n: usize, sig: Signature, k: &Poly) -> crate::Result<NambuCandidate> {
    NambuCandidate::new(MoserSpec::new(n, sig, k.clone())?.structure())
}
