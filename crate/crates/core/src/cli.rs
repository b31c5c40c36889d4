//! Batch front end over problem files.
//!
//! Exit codes: 0 ok, 2 parse or I/O error or unknown name, 3 math-domain
//! error, 4 non-symmetry (including failed identities and discrete
//! non-symmetries).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::discrete::{self, discrete_first_integral};
use crate::error::{Error, Result};
use crate::expr::{Expr, JetSpace, Scope, Tree};
use crate::jet::{divergence, total_derivative, Current};
use crate::noether::{
    classify_triviality, improper_law, magri_check, noether_current, noether_identity, NormalForm,
    Triviality, TrivialityVerdict,
};
use crate::problem::{ParseOptions, Problem};
use crate::variational::euler_lagrange;
use crate::verify::{certify_zero, Certificate, DEFAULT_TRIALS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Records,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub seed: u64,
    pub trials: usize,
    pub max_order: Option<u32>,
    pub format: Format,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: 0,
            trials: DEFAULT_TRIALS,
            max_order: None,
            format: Format::Text,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "noether",
    version,
    about = "Conservation laws, Noether identities and first integrals from problem files"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Seed for randomized certification.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random evaluation points per certificate.
    #[arg(long, global = true, default_value_t = DEFAULT_TRIALS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Derivative headroom; defaults to 2κ + σ + 2.
    #[arg(long, global = true)]
    max_order: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

impl Cli {
    fn settings(&self) -> Settings {
        Settings {
            seed: self.seed,
            trials: self.trials as usize,
            max_order: self.max_order,
            format: self.format,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Euler–Lagrange expressions of a Lagrangian.
    EulerLagrange { file: PathBuf, lagrangian: String },
    /// Conserved current of a divergence symmetry.
    Current {
        file: PathBuf,
        lagrangian: String,
        symmetry: String,
        /// Also classify the current against this normal form.
        #[arg(long)]
        normal: Option<String>,
    },
    /// Noether identity of a gauge family.
    Identity {
        file: PathBuf,
        lagrangian: String,
        gauge: String,
    },
    /// Triviality of a conservation law.
    Classify {
        file: PathBuf,
        current: String,
        normal: String,
    },
    /// First integral of a discrete Lagrangian.
    Discrete {
        file: PathBuf,
        problem: String,
        symmetry: String,
    },
    /// Adjoint-linearization test of a multiplier.
    Magri {
        file: PathBuf,
        equations: String,
        multiplier: String,
        normal: String,
    },
    /// Current induced by fixing the arbitrary function of a gauge family.
    Improper {
        file: PathBuf,
        lagrangian: String,
        gauge: String,
        normal: String,
        /// The arbitrary function, as an expression.
        #[arg(long = "p", allow_hyphen_values = true)]
        p: String,
    },
    /// Runs every `check` directive of a file, sorted by name.
    Batch { file: PathBuf },
}

impl Command {
    fn file(&self) -> &PathBuf {
        match self {
            Command::EulerLagrange { file, .. }
            | Command::Current { file, .. }
            | Command::Identity { file, .. }
            | Command::Classify { file, .. }
            | Command::Discrete { file, .. }
            | Command::Magri { file, .. }
            | Command::Improper { file, .. }
            | Command::Batch { file } => file,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::EulerLagrange { .. } => "euler-lagrange",
            Command::Current { .. } => "current",
            Command::Identity { .. } => "identity",
            Command::Classify { .. } => "classify",
            Command::Discrete { .. } => "discrete",
            Command::Magri { .. } => "magri",
            Command::Improper { .. } => "improper",
            Command::Batch { .. } => "batch",
        }
    }
}

/// Ordered key/value lines; rendered as `key: value` or `key=value`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        let sep = match format {
            Format::Text => ": ",
            Format::Records => "=",
        };
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}{sep}{v}");
        }
        out
    }

    /// Reads back a rendering in either format.
    pub fn parse(text: &str, format: Format) -> Report {
        let sep = match format {
            Format::Text => ": ",
            Format::Records => "=",
        };
        let mut report = Report::default();
        for line in text.lines().filter(|l| !l.is_empty()) {
            if let Some((k, v)) = line.split_once(sep) {
                report.push(k, v);
            }
        }
        report
    }

    fn expr(&mut self, key: impl Into<String>, scope: &dyn Scope, e: &Expr) {
        self.push(key, e.display(scope).to_string());
    }

    fn indexed(&mut self, label: &str, names: &[String], scope: &dyn Scope, values: &[Expr]) {
        for (name, e) in names.iter().zip(values) {
            self.expr(format!("{label}[{name}]"), scope, e);
        }
    }

    fn certificate(&mut self, key: &str, cert: &Certificate) {
        self.push(key, cert.verdict());
        self.push("trials", cert.trials.to_string());
        self.push("seed", cert.seed.to_string());
    }
}

/// A report plus its exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    /// Diagnostic for standard error.
    pub message: Option<String>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome {
            report,
            code: 0,
            message: None,
        }
    }
}

fn read(file: &PathBuf) -> Result<String> {
    std::fs::read_to_string(file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))
}

/// Parses the file named by the command and runs it.
pub fn run_command(command: &Command, settings: &Settings) -> Outcome {
    let file = command.file();
    let text = match read(file) {
        Ok(t) => t,
        Err(e) => return failure(command.name(), None, e),
    };
    let options = ParseOptions {
        max_order: settings.max_order,
    };
    match Problem::parse_with(&text, &options) {
        Ok(problem) => run_on(&problem, command, settings),
        Err(e) => {
            let mut out = failure(command.name(), None, e);
            if let Some(m) = &mut out.message {
                *m = format!("{}: {m}", file.display());
            }
            out
        }
    }
}

/// Runs `words` (a subcommand and its arguments, without the file) against
/// an already parsed problem.
pub fn run_words(problem: &Problem, words: &[String], settings: &Settings) -> Outcome {
    let mut argv: Vec<OsString> = vec!["noether".into()];
    if let Some((cmd, rest)) = words.split_first() {
        argv.push(cmd.into());
        argv.push("<problem>".into());
        argv.extend(rest.iter().map(OsString::from));
    }
    match Cli::try_parse_from(argv) {
        Ok(cli) => run_on(problem, &cli.command, settings),
        Err(e) => failure(
            words.first().map(String::as_str).unwrap_or(""),
            None,
            Error::Unknown {
                kind: "invocation",
                name: e.to_string().lines().next().unwrap_or("").to_string(),
            },
        ),
    }
}

fn run_on(problem: &Problem, command: &Command, settings: &Settings) -> Outcome {
    if let Command::Batch { .. } = command {
        return batch(problem, settings);
    }
    match dispatch(problem, command, settings) {
        Ok(outcome) => outcome,
        Err(e) => failure(command.name(), Some(problem), e),
    }
}

fn failure(command: &str, problem: Option<&Problem>, e: Error) -> Outcome {
    let mut report = Report::default();
    report.push("command", command);
    let residual = match &e {
        Error::NotASymmetry { residual } | Error::NotConserved { residual } => problem
            .and_then(|p| p.space().ok())
            .map(|s| s.show(residual)),
        Error::NotADiscreteSymmetry { residual } => problem
            .and_then(|p| p.stencil().ok())
            .map(|s| s.show(residual)),
        _ => None,
    };
    let verdict = match &e {
        Error::NotASymmetry { .. } => "not-a-symmetry",
        Error::NotADiscreteSymmetry { .. } => "not-a-discrete-symmetry",
        Error::NotConserved { .. } => "not-conserved",
        _ => "error",
    };
    report.push("verdict", verdict);
    if let Some(r) = residual {
        report.push("residual", r);
    }
    report.push("error", e.to_string());
    Outcome {
        report,
        code: e.exit_code(),
        message: Some(e.to_string()),
    }
}

fn batch(problem: &Problem, settings: &Settings) -> Outcome {
    let mut report = Report::default();
    report.push("command", "batch");
    report.push("checks", problem.checks.len().to_string());
    let mut code = 0;
    let mut messages = Vec::new();
    for (name, check) in &problem.checks {
        let outcome = if check.args.first().map(String::as_str) == Some("batch") {
            failure(
                "batch",
                None,
                Error::Unknown {
                    kind: "check command",
                    name: "batch".into(),
                },
            )
        } else {
            run_words(problem, &check.args, settings)
        };
        report.push("check", name.clone());
        report.entries.extend(outcome.report.entries);
        report.push("exit", outcome.code.to_string());
        code = code.max(outcome.code);
        if let Some(m) = outcome.message {
            messages.push(format!("{name}: {m}"));
        }
    }
    Outcome {
        report,
        code,
        message: (!messages.is_empty()).then(|| messages.join("\n")),
    }
}

fn header(command: &str, pairs: &[(&str, &str)]) -> Report {
    let mut report = Report::default();
    report.push("command", command);
    for (k, v) in pairs {
        report.push(*k, *v);
    }
    report
}

/// Independent certificate tree for `Div B - Σ ψ_i Q_i`.
fn current_claim(space: &JetSpace, b: &Current, psi: &[Expr], q: &[Expr]) -> Result<Tree> {
    let mut parts = Vec::new();
    for (axis, comp) in b.0.iter().enumerate() {
        parts.push(Tree::from(total_derivative(space, comp, axis)?));
    }
    for (p, q) in psi.iter().zip(q) {
        parts.push(Tree::product([Tree::from(p), Tree::from(q)]).neg());
    }
    Ok(Tree::sum(parts))
}

/// Pushes the verdict and its re-derivation; `false` when the re-check fails.
fn push_verdict(
    report: &mut Report,
    space: &JetSpace,
    v: &TrivialityVerdict,
    b: &Current,
    nf: &NormalForm,
) -> Result<bool> {
    let names = space.independents();
    report.push("triviality", v.kind.as_str());
    report.indexed("first", names, space, v.first_kind.components());
    // A nontrivial current keeps its on-shell residue where a trivial one
    // keeps its null-divergence part.
    let rest = if v.kind == Triviality::Nontrivial {
        "residue"
    } else {
        "second"
    };
    report.indexed(rest, names, space, v.second_kind.components());
    let recheck = v.recheck(space, b, nf)?;
    report.push("recheck", if recheck { "PASS" } else { "FAIL" });
    Ok(recheck)
}

fn dispatch(problem: &Problem, command: &Command, settings: &Settings) -> Result<Outcome> {
    let (trials, seed) = (settings.trials, settings.seed);
    match command {
        Command::EulerLagrange { lagrangian, .. } => {
            let space = problem.space()?;
            let psi = euler_lagrange(space, problem.lagrangian(lagrangian)?)?;
            let mut report = header("euler-lagrange", &[("lagrangian", lagrangian)]);
            report.indexed("E", space.dependents(), space, psi.components());
            Ok(Outcome::ok(report))
        }
        Command::Current {
            lagrangian,
            symmetry,
            normal,
            ..
        } => {
            let space = problem.space()?;
            let f = problem.lagrangian(lagrangian)?;
            let nc = noether_current(space, f, problem.symmetry(symmetry)?)?;
            let claim = current_claim(
                space,
                &nc.current,
                nc.euler_lagrange.components(),
                &nc.characteristic.characteristics,
            )?;
            let cert = certify_zero(space, &claim, trials, seed);
            let mut report = header(
                "current",
                &[("lagrangian", lagrangian), ("symmetry", symmetry)],
            );
            report.indexed(
                "Q",
                space.dependents(),
                space,
                &nc.characteristic.characteristics,
            );
            report.indexed("B", space.independents(), space, nc.current.components());
            report.certificate("certificate", &cert);
            let mut sound = cert.passed();
            if let Some(n) = normal {
                let nf = problem.normal(n)?;
                let v = classify_triviality(space, &nc.current, nf)?;
                report.push("normal", n.clone());
                sound &= push_verdict(&mut report, space, &v, &nc.current, nf)?;
            }
            Ok(Outcome {
                code: if sound { 0 } else { 3 },
                report,
                message: None,
            })
        }
        Command::Identity {
            lagrangian, gauge, ..
        } => {
            let space = problem.space()?;
            let id = noether_identity(
                space,
                problem.lagrangian(lagrangian)?,
                problem.gauge(gauge)?,
            )?;
            let cert = certify_zero(space, &Tree::from(&id.expr), trials, seed);
            let mut report = header("identity", &[("lagrangian", lagrangian), ("gauge", gauge)]);
            report.push(
                "parameter",
                space.dependents()[id.gauge.parameter()].clone(),
            );
            report.expr("identity", space, &id.expr);
            report.certificate("verdict", &cert);
            let passed = cert.passed();
            Ok(Outcome {
                report,
                code: if passed { 0 } else { 4 },
                message: (!passed)
                    .then(|| format!("gauge family '{gauge}' does not give a Noether identity")),
            })
        }
        Command::Classify {
            current, normal, ..
        } => {
            let space = problem.space()?;
            let b = problem.current(current)?;
            let nf = problem.normal(normal)?;
            let v = classify_triviality(space, b, nf)?;
            let mut report = header("classify", &[("current", current), ("normal", normal)]);
            let recheck = push_verdict(&mut report, space, &v, b, nf)?;
            Ok(Outcome {
                report,
                code: if recheck { 0 } else { 3 },
                message: None,
            })
        }
        Command::Discrete {
            problem: name,
            symmetry,
            ..
        } => {
            let dp = problem.discrete(name)?;
            let q = problem.dsymmetry(symmetry)?;
            let fi = discrete_first_integral(&dp.space, &dp.lagrangian, q)?;
            let shifted = discrete::shift(&dp.space, &fi.integral, 1)?;
            let mut parts = vec![Tree::from(&shifted), Tree::from(&fi.integral).neg()];
            for (e, q) in fi.euler_lagrange.iter().zip(q) {
                parts.push(Tree::product([Tree::from(e), Tree::from(q)]).neg());
            }
            let cert = certify_zero(&dp.space, &Tree::sum(parts), trials, seed);
            let mut report = header("discrete", &[("problem", name), ("symmetry", symmetry)]);
            let s = &dp.space;
            report.indexed("E", s.dependents(), s, &fi.euler_lagrange);
            report.expr("I", s, &fi.integral);
            report.certificate("certificate", &cert);
            Ok(Outcome {
                code: if cert.passed() { 0 } else { 3 },
                report,
                message: None,
            })
        }
        Command::Magri {
            equations,
            multiplier,
            normal,
            ..
        } => {
            let space = problem.space()?;
            let system = problem.equation_system(equations)?;
            let w = problem.multiplier(multiplier)?;
            let out = magri_check(space, system, w, problem.normal(normal)?)?;
            let mut report = header(
                "magri",
                &[
                    ("equations", equations),
                    ("multiplier", multiplier),
                    ("normal", normal),
                ],
            );
            report.indexed("adjoint", space.dependents(), space, &out.adjoint_residual);
            report.push("holds", out.holds.to_string());
            if !out.holds {
                return Ok(Outcome {
                    report,
                    code: 4,
                    message: Some(
                        "multiplier is not in the kernel of the adjoint linearization".into(),
                    ),
                });
            }
            let Some(p) = out.current else {
                report.push("current", "none");
                return Ok(Outcome {
                    report,
                    code: 3,
                    message: Some(
                        "characteristic form is not recognized as a total divergence".into(),
                    ),
                });
            };
            report.indexed("P", space.independents(), space, p.components());
            let mut parts = vec![Tree::from(divergence(space, &p)?)];
            for (f, w) in system.iter().zip(w) {
                parts.push(Tree::product([Tree::from(f), Tree::from(w)]).neg());
            }
            let cert = certify_zero(space, &Tree::sum(parts), trials, seed);
            report.certificate("certificate", &cert);
            Ok(Outcome {
                code: if cert.passed() { 0 } else { 3 },
                report,
                message: None,
            })
        }
        Command::Improper {
            lagrangian,
            gauge,
            normal,
            p,
            ..
        } => {
            let space = problem.space()?;
            let p_expr = space.parse(p)?;
            let nf = problem.normal(normal)?;
            let (nc, v) = improper_law(
                space,
                problem.lagrangian(lagrangian)?,
                problem.gauge(gauge)?,
                &p_expr,
                nf,
            )?;
            let claim = current_claim(
                space,
                &nc.current,
                nc.euler_lagrange.components(),
                &nc.characteristic.characteristics,
            )?;
            let cert = certify_zero(space, &claim, trials, seed);
            let mut report = header(
                "improper",
                &[
                    ("lagrangian", lagrangian),
                    ("gauge", gauge),
                    ("normal", normal),
                ],
            );
            report.expr("p", space, &p_expr);
            report.indexed(
                "Q",
                space.dependents(),
                space,
                &nc.characteristic.characteristics,
            );
            report.indexed("B", space.independents(), space, nc.current.components());
            report.certificate("certificate", &cert);
            let recheck = push_verdict(&mut report, space, &v, &nc.current, nf)?;
            Ok(Outcome {
                code: if cert.passed() && recheck { 0 } else { 3 },
                report,
                message: None,
            })
        }
        Command::Batch { .. } => unreachable!("handled by run_on"),
    }
}

/// Entry point shared by the binary and tests.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let settings = cli.settings();
    let outcome = run_command(&cli.command, &settings);
    let _ = out.write_all(outcome.report.render(settings.format).as_bytes());
    if let Some(m) = &outcome.message {
        let _ = writeln!(err, "error: {m}");
    }
    outcome.code
}
