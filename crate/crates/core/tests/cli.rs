use std::path::PathBuf;
use std::process::{Command, Output};

use noether_core::cli::{main_with_args, Format, Report};

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn noether(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noether"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(out: &Output) -> Report {
    Report::parse(&String::from_utf8_lossy(&out.stdout), Format::Text)
}

#[test]
fn current_text_report() {
    let wave = corpus("wave.problem");
    let out = noether(&["current", &wave, "L", "time", "--normal", "N"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let r = text(&out);
    assert_eq!(r.get("B[t]"), Some("1/2*d(u;t)^2 + 1/2*d(u;x)^2"));
    assert_eq!(r.get("B[x]"), Some("-d(u;t)*d(u;x)"));
    assert_eq!(r.get("certificate"), Some("PASS"));
    assert_eq!(r.get("triviality"), Some("nontrivial"));
}

#[test]
fn records_and_text_carry_the_same_report() {
    let osc = corpus("oscillator.problem");
    let t = text(&noether(&["current", &osc, "L", "time"]));
    let out = noether(&["--format", "records", "current", &osc, "L", "time"]);
    let r = Report::parse(&String::from_utf8_lossy(&out.stdout), Format::Records);
    assert_eq!(t, r);
}

#[test]
fn euler_lagrange_of_the_oscillator() {
    let out = noether(&["euler-lagrange", &corpus("oscillator.problem"), "L"]);
    assert_eq!(text(&out).get("E[u]"), Some("-d(u;t,t) - u"));
}

#[test]
fn identity_reports_zero() {
    let out = noether(&["identity", &corpus("maxwell.problem"), "L", "G"]);
    assert_eq!(out.status.code(), Some(0));
    let r = text(&out);
    assert_eq!(r.get("identity"), Some("0"));
    assert_eq!(r.get("verdict"), Some("PASS"));
}

#[test]
fn improper_parameter_is_parsed_in_the_problem_space() {
    let maxwell = corpus("maxwell.problem");
    let out = noether(&["improper", &maxwell, "L", "G", "M", "--p", "x"]);
    assert_eq!(out.status.code(), Some(0));
    let r = text(&out);
    assert_eq!(r.get("triviality"), Some("mixed-trivial"));
    assert_eq!(r.get("recheck"), Some("PASS"));
}

#[test]
fn magri_advection() {
    let out = noether(&["magri", &corpus("magri.problem"), "advection", "one", "A"]);
    assert_eq!(out.status.code(), Some(0));
    let r = text(&out);
    assert_eq!(r.get("P[t]"), Some("u"));
    assert_eq!(r.get("P[x]"), Some("-1/2*u^2"));
}

#[test]
fn discrete_momentum() {
    let out = noether(&["discrete", &corpus("discrete.problem"), "chain", "shift"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out).get("I"), Some("-u[0] + u[-1]"));
}

#[test]
fn seeds_change_points_not_verdicts() {
    let osc = corpus("oscillator.problem");
    let a = noether(&["--seed", "1", "batch", &osc]);
    let b = noether(&["--seed", "2", "batch", &osc]);
    let c = noether(&["--seed", "1", "batch", &osc]);
    assert_eq!(a.stdout, c.stdout);
    let strip = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with("seed:"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn failures_print_a_residual() {
    let out = noether(&["current", &corpus("wave.problem"), "L", "scaling"]);
    assert_eq!(out.status.code(), Some(4));
    let r = text(&out);
    assert_eq!(r.get("verdict"), Some("not-a-symmetry"));
    assert_eq!(r.get("residual"), Some("d(u;t)^2 - d(u;x)^2"));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn parse_errors_carry_a_position() {
    let out = noether(&["euler-lagrange", &corpus("parse_error.problem"), "L"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3:31"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        noether(&["--trials", "0", "batch", "x"]).status.code(),
        Some(2)
    );
    assert_eq!(noether(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(noether(&["--help"]).status.code(), Some(0));
}

#[test]
fn batch_exit_is_the_worst_check() {
    let out = noether(&["batch", &corpus("gauge_uv.problem")]);
    assert_eq!(out.status.code(), Some(0));
    let problem = "independent t\ndependent u\nlagrangian L = 1/2*d(u;t)^2 - 1/2*u^2\n\
                   symmetry s { Y[u] = 1 }\ncheck bad = current L s\ncheck good = euler-lagrange L\n";
    let path = std::env::temp_dir().join("noether-cli-worst.problem");
    std::fs::write(&path, problem).unwrap();
    let out = noether(&["batch", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let r = text(&out);
    let exits: Vec<&str> = r
        .entries()
        .iter()
        .filter(|(k, _)| k == "exit")
        .map(|(_, v)| v.as_str())
        .collect();
    assert_eq!(exits, ["4", "0"]);
}

#[test]
fn library_entry_point_matches_binary() {
    let osc = corpus("oscillator.problem");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with_args(["noether", "batch", osc.as_str()], &mut out, &mut err);
    let bin = noether(&["batch", &osc]);
    assert_eq!(Some(code), bin.status.code());
    assert_eq!(out, bin.stdout);
}
