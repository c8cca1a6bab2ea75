use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};

use nambu_core::frontend::{
    format_alternating, format_poly, format_poly_named, parse_multivector, parse_poly, parse_univariate,
    trajectory_csv_header, trajectory_csv_rows, Report, StageRecord,
};
use nambu_core::holonomy::{integrate_trajectory, linear_model_orbit, spiral_metrics, Bump, CounterexampleSpec};
use nambu_core::linearize::{linearize_report, normal_form_candidate, verify_rt, LinearizeOptions, MoserSpec};
use nambu_core::nambu::{
    classify_3d_algebra, classify_linear, coordinate_tuples, dual_form, find_unimodular_density,
    fundamental_identity_residual, is_nambu, is_unimodular, isotropy_constants, jacobi_residual, linear_part,
    nondeg_signature, IntegrabilityWitness, LinearClass, NambuCandidate, Signature,
};
use nambu_core::{Error, Poly, RationalFunc, VolumeDensity};

use crate::{Command, HolonomyArgs, LinearizeArgs, StructureArgs};

const OK: u8 = 0;
const FALSE: u8 = 2;

fn hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn read_input(input: &Option<PathBuf>, expr: &Option<String>) -> Result<Option<String>> {
    match (input, expr) {
        (Some(p), _) => Ok(Some(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)),
        (None, Some(e)) => Ok(Some(e.clone())),
        (None, None) => Ok(None),
    }
}

fn load_structure(rep: &mut Report, s: &StructureArgs) -> Result<NambuCandidate> {
    let text = read_input(&s.input, &s.expr)?.ok_or_else(|| anyhow!("one of --input or --expr is required"))?;
    structure_from_text(rep, s.dim, &text)
}

fn structure_from_text(rep: &mut Report, dim: usize, text: &str) -> Result<NambuCandidate> {
    rep.input("dim", dim.to_string());
    rep.input("structure", text.trim());
    rep.provenance.input_hashes.insert("structure".into(), hash(text.trim()));
    let p = parse_multivector(text, dim, None).context("parsing the structure")?;
    Ok(NambuCandidate::new(p)?)
}

fn load_volume(rep: &mut Report, dim: usize, text: &str) -> Result<Poly> {
    rep.input("volume", text.trim());
    rep.provenance.input_hashes.insert("volume".into(), hash(text.trim()));
    parse_poly(text, dim).context("parsing the volume density")
}

fn parse_signature(text: &str) -> Result<Signature> {
    text.parse::<Signature>().map_err(|e| anyhow!("invalid signature '{text}': {e}"))
}

fn load_k(rep: &mut Report, text: &str) -> Result<Poly> {
    rep.input("k", text.trim());
    rep.provenance.input_hashes.insert("k".into(), hash(text.trim()));
    parse_univariate(text).context("parsing k")
}

fn format_rf(r: &RationalFunc) -> String {
    let names: Vec<&str> = r.vars().iter().map(String::as_str).collect();
    format!("({}) / ({})", format_poly_named(r.num(), &names), format_poly_named(r.den(), &names))
}

fn format_xt(p: &Poly, n: usize) -> String {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain(["t".to_string()]).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    format_poly_named(p, &names)
}

fn witness_text(w: &IntegrabilityWitness) -> String {
    let xi: Vec<String> = w.xi.iter().map(|i| format!("e{}", i + 1)).collect();
    let blade: Vec<String> = w.component.0.iter().map(|i| format!("dx{}", i + 1)).collect();
    format!(
        "xi = {}; {:?} has component {} on {}",
        if xi.is_empty() { "1".into() } else { xi.join("^") },
        w.condition,
        format_poly(&w.component.1),
        if blade.is_empty() { "1".into() } else { blade.join("^") }
    )
}

fn emit(mut rep: Report, path: &Option<PathBuf>, started: Instant) -> Result<()> {
    rep.timings.insert("total_seconds".into(), started.elapsed().as_secs_f64());
    rep.timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    println!("verdict: {}", rep.verdict);
    for (k, v) in &rep.results {
        println!("{k}: {v}");
    }
    if let Some(r) = rep.max_residual {
        println!("max_residual: {r:e}");
    }
    if let Some(p) = path {
        write_json(p, &rep)?;
    }
    Ok(())
}

fn write_json(path: &Path, rep: &Report) -> Result<()> {
    let mut text = serde_json::to_string_pretty(rep)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run(cmd: Command) -> Result<u8> {
    let started = Instant::now();
    match cmd {
        Command::Check { s, volume } => check(&s, &volume, started),
        Command::Dual { s, volume } => dual(&s, &volume, started),
        Command::Unimodular { s, volume, max_degree } => unimodular(&s, volume.as_deref(), max_degree, started),
        Command::Classify { s } => classify(&s, started),
        Command::Linearize(a) => linearize(&a, started),
        Command::Holonomy(a) => holonomy(&a, started),
        Command::VerifyRt { dim, signature, k, report } => {
            verify(dim, signature.as_deref(), &k, &report, started)
        }
    }
}

fn check(s: &StructureArgs, volume: &str, started: Instant) -> Result<u8> {
    let mut rep = Report::new("check");
    let c = load_structure(&mut rep, s)?;
    let h = load_volume(&mut rep, s.dim, volume)?;
    let mu = VolumeDensity::new(s.dim, h)?;
    let (n, q) = (c.dim(), c.order());
    rep.result("order", q);

    let mut holds = match is_nambu(&c, &mu) {
        Ok(v) => {
            let mut st = StageRecord::new("duality", v.holds()).stat("order", q as f64);
            if let Some(w) = v.witness() {
                st = st.witness(witness_text(w));
            }
            rep.stage(st);
            v.holds()
        }
        Err(Error::UnsupportedDegree { .. }) => {
            let res = jacobi_residual(&c)?;
            let ok = res.is_zero();
            let mut st = StageRecord::new("jacobi", ok).note("order 2: [P, P] = 0");
            if !ok {
                st = st.witness(format_alternating(&res));
            }
            rep.stage(st);
            ok
        }
        Err(e) => return Err(e.into()),
    };

    let tuples = coordinate_tuples(n, q);
    let mut failures = 0usize;
    let mut first: Option<String> = None;
    for fs in &tuples {
        let res = fundamental_identity_residual(&c, fs)?;
        if !res.is_zero() {
            failures += 1;
            if first.is_none() {
                let names: Vec<String> = fs.iter().map(format_poly).collect();
                first = Some(format!("f = ({}): {}", names.join(", "), format_alternating(&res)));
            }
        }
    }
    let mut st = StageRecord::new("fundamental_identity", failures == 0)
        .stat("tuples", tuples.len() as f64)
        .stat("failures", failures as f64);
    if let Some(w) = first {
        st = st.witness(w);
    }
    rep.stage(st);
    holds = holds && failures == 0;
    rep.finish(if holds { "nambu" } else { "not_nambu" }, holds);
    emit(rep, &s.report, started)?;
    Ok(if holds { OK } else { FALSE })
}

fn dual(s: &StructureArgs, volume: &str, started: Instant) -> Result<u8> {
    let mut rep = Report::new("dual");
    let c = load_structure(&mut rep, s)?;
    let h = load_volume(&mut rep, s.dim, volume)?;
    let w = dual_form(&c, &VolumeDensity::new(s.dim, h)?)?;
    rep.result("dual_form", format_alternating(&w));
    rep.result("degree", w.degree());
    rep.stage(StageRecord::new("contraction", true));
    rep.finish("computed", true);
    emit(rep, &s.report, started)?;
    Ok(OK)
}

fn unimodular(s: &StructureArgs, volume: Option<&str>, max_degree: u32, started: Instant) -> Result<u8> {
    let mut rep = Report::new("unimodular");
    let c = load_structure(&mut rep, s)?;
    let ok = match volume {
        Some(v) => {
            let h = load_volume(&mut rep, s.dim, v)?;
            let u = is_unimodular(&c, &h)?;
            let mut st = StageRecord::new("closedness", u.unimodular);
            if !u.unimodular {
                st = st.witness(format_alternating(&u.witness));
            }
            rep.stage(st);
            u.unimodular
        }
        None => {
            rep.input("max_degree", max_degree.to_string());
            match find_unimodular_density(&c, max_degree)? {
                Some(h) => {
                    rep.result("density", format_poly(&h));
                    rep.stage(StageRecord::new("density_search", true).stat("max_degree", max_degree as f64));
                    true
                }
                None => {
                    let w = is_unimodular(&c, &Poly::one(s.dim))?.witness;
                    rep.stage(
                        StageRecord::new("density_search", false)
                            .note(format!("no polynomial density of degree <= {max_degree}"))
                            .witness(format_alternating(&w))
                            .stat("max_degree", max_degree as f64),
                    );
                    false
                }
            }
        }
    };
    rep.finish(if ok { "unimodular" } else { "not_unimodular" }, ok);
    emit(rep, &s.report, started)?;
    Ok(if ok { OK } else { FALSE })
}

fn classify(s: &StructureArgs, started: Instant) -> Result<u8> {
    let mut rep = Report::new("classify");
    let c = load_structure(&mut rep, s)?;
    let pl = linear_part(&c)?;
    rep.result("linear_part", format_alternating(&pl));
    let (n, q) = (c.dim(), c.order());
    let mut ok = true;
    if c.coorder() == 1 {
        match classify_linear(&pl)? {
            LinearClass::Type1 { rank, signature } => {
                rep.result("type", "type1");
                rep.result("rank", rank);
                rep.result("signature", signature);
                rep.stage(StageRecord::new("linear_type", true).note("closed dual form"));
                if rank == n {
                    let sd = nondeg_signature(&pl)?;
                    rep.result("normal_form", format_poly(&sd.quadratic));
                    rep.stage(StageRecord::new("signature", true).note("nondegenerate"));
                } else {
                    rep.stage(StageRecord::new("signature", false).note(format!("degenerate: rank {rank} < {n}")));
                }
            }
            LinearClass::Type2 => {
                rep.result("type", "type2");
                rep.stage(StageRecord::new("linear_type", true).note("integrable, not closed"));
            }
            LinearClass::NotNambu => {
                ok = false;
                rep.result("type", "not_nambu");
                rep.stage(StageRecord::new("linear_type", false).note("linear part is not Nambu"));
            }
        }
    } else {
        rep.result("type", "unclassified");
        rep.stage(StageRecord::new("linear_type", true).note("only coorder 1 is classified"));
    }
    if n == 3 && q == 2 && ok {
        let cs = isotropy_constants(&pl)?;
        match classify_3d_algebra(&cs) {
            Ok(class) => {
                rep.result("algebra", class.label);
                rep.result("killing_signature", class.killing_signature);
                rep.stage(StageRecord::new("isotropy_algebra", true));
            }
            Err(e) => {
                ok = false;
                rep.stage(StageRecord::new("isotropy_algebra", false).note(e.to_string()));
            }
        }
    }
    rep.finish(if ok { "classified" } else { "not_nambu" }, ok);
    emit(rep, &s.report, started)?;
    Ok(if ok { OK } else { FALSE })
}

fn linearize(a: &LinearizeArgs, started: Instant) -> Result<u8> {
    let mut rep = Report::new("linearize");
    let k = a.k.as_deref().map(|t| load_k(&mut rep, t)).transpose()?;
    let (c, h) = match read_input(&a.input, &a.expr)? {
        Some(text) => {
            let c = structure_from_text(&mut rep, a.dim, &text)?;
            (c, load_volume(&mut rep, a.dim, &a.volume)?)
        }
        None => {
            let sig = a.signature.as_deref().ok_or_else(|| anyhow!("--signature is required without --input"))?;
            let k = k.clone().ok_or_else(|| anyhow!("--k is required without --input"))?;
            let sig = parse_signature(sig)?;
            rep.input("dim", a.dim.to_string());
            rep.input("signature", sig.to_string());
            (normal_form_candidate(a.dim, sig, &k)?, Poly::one(a.dim))
        }
    };
    let opts = LinearizeOptions { samples: a.samples, tol: a.tol, radius: a.radius, seed: a.seed, ..Default::default() };
    rep.provenance.seed = Some(a.seed);
    rep.input("samples", a.samples.to_string());
    rep.tolerance("ode", opts.tol)
        .tolerance("pullback", opts.pullback_tol)
        .tolerance("full_flow", opts.oracle_tol)
        .tolerance("jacobian", opts.jacobian_tol);
    let lr = linearize_report(&c, &h, k.as_ref(), &opts);
    if let Some(m) = &lr.moser {
        rep.result("r_t", format_rf(&m.derived.r));
        rep.result("moser_residual_zero", m.derived_solves());
    }
    if let Some(p) = &lr.potential {
        rep.result("potential", format_poly(&p.g));
        rep.result("hessian_signature", p.signature);
    }
    rep.absorb_linearize(&lr);
    let code = match lr.verdict {
        v if v.success() => OK,
        nambu_core::linearize::LinearizeVerdict::InvalidInput => 1,
        _ => FALSE,
    };
    if code == 1 {
        eprintln!("error: {}", lr.verdict.message());
        if let Some(st) = lr.stages.last() {
            eprintln!("  {}: {}", st.name, st.note);
        }
    }
    emit(rep, &a.report, started)?;
    Ok(code)
}

fn holonomy(a: &HolonomyArgs, started: Instant) -> Result<u8> {
    let mut rep = Report::new("holonomy");
    let x0: Vec<f64> = a
        .start
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow!("invalid coordinate '{s}': {e}")))
        .collect::<Result<_>>()?;
    if !(a.time >= 0.0 && a.time.is_finite()) {
        bail!("--time must be a nonnegative number");
    }
    if !(a.tol > 0.0) {
        bail!("--tol must be positive");
    }
    rep.input("start", a.start.clone());
    rep.input("time", a.time.to_string());
    rep.input("reversed", a.reversed.to_string());
    rep.input("bump", "exp(-1/x)");
    rep.tolerance("ode", a.tol);
    let spec = CounterexampleSpec::new(x0.len(), Bump::default(), a.reversed)?;
    let tr = integrate_trajectory(&spec, &x0, a.time, a.tol)?;
    let m = spiral_metrics(&spec, &tr, a.tol.min(1e-13))?;
    rep.stage(
        StageRecord::new("trajectory", true)
            .stat("steps", tr.len() as f64)
            .stat("theta_rate", m.theta_rate)
            .stat("theta_excursion", m.theta_excursion)
            .stat("f_drop", m.f_drop)
            .stat("f_min", m.f_min)
            .stat("coordinate_drift", m.coordinate_drift),
    );
    rep.stage(StageRecord::new("comparison_ode", m.f_ode_residual <= 1e-8).stat("f_ode_residual", m.f_ode_residual));
    let lin = linear_model_orbit(&x0, a.time, a.tol)?;
    let spread = lin.f_values.iter().fold(0.0_f64, |acc, v| acc.max((v - lin.f_values[0]).abs()));
    rep.stage(StageRecord::new("linear_model", spread <= 1e-9).stat("f_variation", spread));
    let spiral = m.f_strictly_decreasing && m.f_min > 0.0 && m.theta_excursion > 4.0 * std::f64::consts::PI;
    rep.result("f_start", tr.f_values.first().copied().unwrap_or(f64::NAN));
    rep.result("f_end", tr.f_values.last().copied().unwrap_or(f64::NAN));
    rep.result("theta_rate", m.theta_rate);
    rep.result("f_monotone", m.f_monotone);
    rep.result("spiral", spiral);
    rep.max_residual = Some(m.f_ode_residual);
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(trajectory_csv_header(x0.len()))?;
        for row in trajectory_csv_rows(&tr) {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        rep.result("csv_rows", tr.len());
    }
    rep.finish(if spiral { "spiral" } else { "no_spiral" }, true);
    emit(rep, &a.report, started)?;
    Ok(OK)
}

fn verify(dim: usize, signature: Option<&str>, k: &str, report: &Option<PathBuf>, started: Instant) -> Result<u8> {
    let mut rep = Report::new("verify-rt");
    let kp = load_k(&mut rep, k)?;
    let sig = match signature {
        Some(s) => parse_signature(s)?,
        None => Signature::new(dim, 0),
    };
    rep.input("dim", dim.to_string());
    rep.input("signature", sig.to_string());
    let spec = MoserSpec::new(dim, sig, kp)?;
    let f = verify_rt(&spec)?;
    rep.result("r_t", format_rf(&f.derived.r));
    rep.result("sign_variant", format_rf(&f.flipped));
    rep.result("derived_solves", f.derived_solves());
    rep.result("sign_variant_solves", f.flipped_solves());
    let mut st = StageRecord::new("derived_coefficient", f.derived_solves());
    if !f.derived_solves() {
        st = st.witness(format_xt(&f.derived_residual, dim));
    }
    rep.stage(st);
    let mut st = StageRecord::new("sign_variant", f.flipped_solves())
        .note("denominator (n-2)(1+t(1-k)) - 2tfk' evaluated under the same residual");
    if !f.flipped_solves() {
        st = st.witness(format_xt(&f.flipped_residual, dim));
    }
    rep.stage(st);
    rep.finish(if f.derived_solves() { "residual_zero" } else { "residual_nonzero" }, f.derived_solves());
    emit(rep, report, started)?;
    Ok(if f.derived_solves() { OK } else { FALSE })
}
