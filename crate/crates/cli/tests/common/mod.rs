#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn data(name: &str) -> String {
    manifest_dir().join("tests/data").join(name).display().to_string()
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_nambu")).args(args).output().expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// A command line with its expected exit code; stdout is compared with
/// `tests/golden/<name>.txt` (regenerate with `UPDATE_GOLDEN=1`).
pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
    pub code: i32,
}

fn case(name: &'static str, code: i32, args: &[&str]) -> Case {
    Case { name, args: args.iter().map(|s| s.to_string()).collect(), code }
}

pub fn cases() -> Vec<Case> {
    let so3 = data("type1_so3.txt");
    let sl2 = data("sl2.txt");
    let n4 = data("type1_n4.txt");
    vec![
        case("check_type1", 0, &["check", "--dim", "3", "--input", &so3, "--volume", "1"]),
        case("check_order3", 0, &["check", "--dim", "4", "--input", &n4]),
        case("check_not_poisson", 2, &["check", "--dim", "3", "--expr", "e1^e2 + x1*e3^e1"]),
        case("check_not_integrable", 2, &["check", "--dim", "4", "--expr", "x1*e1^e2^e3 + e2^e3^e4 + x2*e1^e2^e4"]),
        case("check_bad_index", 1, &["check", "--dim", "3", "--expr", "x7*e1^e2"]),
        case("dual_type1", 0, &["dual", "--dim", "3", "--input", &so3]),
        case("dual_weighted", 0, &["dual", "--dim", "3", "--input", &so3, "--volume", "1 + x1^2"]),
        case("dual_missing_input", 1, &["dual", "--dim", "3"]),
        case("unimodular_so3", 0, &["unimodular", "--dim", "3", "--input", &so3, "--volume", "1"]),
        case("unimodular_search", 0, &["unimodular", "--dim", "3", "--expr", "(1 + x3)*x1*e2^e3 + x1^2*e1^e2"]),
        case("unimodular_fails", 2, &["unimodular", "--dim", "3", "--expr", "x1*e1^e2"]),
        case("unimodular_bad_volume", 1, &["unimodular", "--dim", "3", "--input", &so3, "--volume", "dx1"]),
        case("classify_so3", 0, &["classify", "--dim", "3", "--input", &so3]),
        case("classify_sl2", 0, &["classify", "--dim", "3", "--input", &sl2]),
        case("classify_not_nambu", 2, &["classify", "--dim", "4", "--expr", "x1*e2^e3^e4 + x2*e1^e3^e4 + x1*e1^e2^e4"]),
        case("classify_nonvanishing", 1, &["classify", "--dim", "3", "--expr", "e1^e2"]),
        case(
            "linearize_normal_form",
            0,
            &["linearize", "--dim", "3", "--signature", "3,0", "--k", "1+f", "--samples", "27", "--tol", "1e-10"],
        ),
        case("linearize_sl2", 0, &["linearize", "--dim", "3", "--input", &sl2, "--k", "1"]),
        case("linearize_hypotheses", 0, &["linearize", "--dim", "3", "--input", &so3]),
        case("linearize_not_unimodular", 2, &["linearize", "--dim", "3", "--expr", "x1*e1^e2", "--k", "1+u"]),
        case("linearize_degenerate", 2, &["linearize", "--dim", "3", "--expr", "x1*e2^e3 - x2*e1^e3", "--k", "1+u"]),
        case(
            "linearize_wrong_k",
            2,
            &["linearize", "--dim", "3", "--expr", "(1 + x1^2/2 + x2^2/2 + x3^2/2)*(x3*e1^e2 - x2*e1^e3 + x1*e2^e3)", "--k", "1+2*u"],
        ),
        case("linearize_missing_k", 1, &["linearize", "--dim", "3", "--signature", "3,0"]),
        case("linearize_bad_signature", 1, &["linearize", "--dim", "3", "--signature", "2,2", "--k", "1"]),
        case("holonomy_spiral", 0, &["holonomy", "--start", "1,0,0", "--time", "50"]),
        case("holonomy_inside_cone", 0, &["holonomy", "--start", "0.5,0,1", "--time", "6.283185307179586"]),
        case("holonomy_bad_start", 1, &["holonomy", "--start", "1,0"]),
        case("verify_rt_quadratic", 0, &["verify-rt", "--dim", "4", "--signature", "2,2", "--k", "1+u^2"]),
        case("verify_rt_linear", 0, &["verify-rt", "--dim", "3", "--k", "1-u/2"]),
        case("verify_rt_bad_k", 1, &["verify-rt", "--dim", "3", "--k", "2+u"]),
        case("usage_no_command", 1, &[]),
        case("usage_unknown_flag", 1, &["check", "--dim", "3", "--bogus"]),
    ]
}

/// Runs a case; returns a description of the first mismatch.
pub fn check_case(c: &Case) -> Result<(), String> {
    let args: Vec<&str> = c.args.iter().map(String::as_str).collect();
    let out = run(&args);
    if out.code != c.code {
        return Err(format!("{}: exit {} (expected {}); stderr: {}", c.name, out.code, c.code, out.stderr.trim()));
    }
    if c.code == 1 && !(out.stderr.contains("error") || out.stderr.contains("Usage")) {
        return Err(format!("{}: input error without a diagnostic", c.name));
    }
    let text = format!("exit: {}\n{}", out.code, out.stdout);
    let path = golden(c.name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if want != text {
        return Err(format!("{}: stdout differs from {}\n--- expected\n{want}--- got\n{text}", c.name, path.display()));
    }
    Ok(())
}

pub fn golden(name: &str) -> PathBuf {
    manifest_dir().join("tests/golden").join(format!("{name}.txt"))
}

/// Report JSON with the run-dependent fields removed.
pub fn stable_report(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("report written");
    let mut v: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    let obj = v.as_object_mut().expect("object");
    obj.remove("timestamp");
    obj.remove("timings");
    v
}
