//! Command-line front end: parse, prove, check the certificate, translate
//! it to a sequent proof and check that too, then report an SZS status.
//!
//! The status line is always the first line on stdout. Exit codes: 0 for
//! `Theorem`, 1 for `GaveUp` and `Timeout`, 2 for input errors and 3 when
//! one of the internal checkers rejects the prover's own output.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use clap::{Parser, ValueEnum};

use crate::certificate::{check_certificate, Certificate};
use crate::matrix::Mode;
use crate::oracle::{classically_valid, g4ip_valid};
use crate::search::{search, CancelToken, SearchLimits, SearchOptions, SearchOutcome, SearchReport};
use crate::sequent::{check_sequent, to_sequent, SequentProof};
use crate::syntax::{parse_problem, Formula};

pub const EXIT_THEOREM: i32 = 0;
pub const EXIT_GAVE_UP: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputKind {
    Cert,
    Sequent,
    Both,
    Status,
}

/// Connection-based prover for intuitionistic first-order logic.
#[derive(Debug, Clone, Parser)]
#[command(name = "matrixprove", version)]
pub struct RunConfig {
    /// TPTP FOF problem file; reads stdin when absent or `-`.
    pub input: Option<PathBuf>,
    /// Prove in classical logic instead of intuitionistic logic.
    #[arg(long)]
    pub classical: bool,
    /// Search time limit in seconds (0 disables the limit).
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    /// First bound on the active path length.
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    /// Maximum number of instances per copyable subformula.
    #[arg(long, default_value_t = 5)]
    pub copies: u32,
    /// Artifacts to print after the status line.
    #[arg(long, value_enum, default_value_t = OutputKind::Status)]
    pub output: OutputKind,
    /// Check this certificate instead of searching.
    #[arg(long, value_name = "CERTFILE")]
    pub check: Option<PathBuf>,
    /// Check this sequent proof (JSON) instead of searching.
    #[arg(long, value_name = "PROOFFILE")]
    pub check_proof: Option<PathBuf>,
    /// Print search events to stderr.
    #[arg(long)]
    pub trace: bool,
    /// Cross-check propositional verdicts against the decision procedures.
    #[arg(long)]
    pub oracle: bool,
    /// Run a classical search alongside; its failure ends the intuitionistic one.
    #[arg(long)]
    pub portfolio: bool,
    /// Write the certificate JSON to this file.
    #[arg(long, value_name = "FILE")]
    pub cert_out: Option<PathBuf>,
    /// Write the sequent proof to this file (JSON if it ends in `.json`).
    #[arg(long, value_name = "FILE")]
    pub proof_out: Option<PathBuf>,
}

impl RunConfig {
    pub fn mode(&self) -> Mode {
        if self.classical {
            Mode::Classical
        } else {
            Mode::Intuitionistic
        }
    }

    pub fn limits(&self) -> SearchLimits {
        let mut l = SearchLimits::new(self.mode()).with_copy_cap(self.copies);
        l.start_depth = self.depth.max(1);
        l.timeout = (self.timeout > 0).then(|| Duration::from_secs(self.timeout));
        l
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Theorem,
    GaveUp,
    Timeout,
    Error,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Theorem => "Theorem",
            Status::GaveUp => "GaveUp",
            Status::Timeout => "Timeout",
            Status::Error => "Error",
        }
    }
}

struct Report {
    status: Status,
    code: i32,
    notes: Vec<String>,
    cert: Option<Certificate>,
    proof: Option<SequentProof>,
    trace: Vec<String>,
}

impl Report {
    fn fail(status: Status, code: i32, note: String) -> Report {
        Report { status, code, notes: vec![note], cert: None, proof: None, trace: Vec::new() }
    }
}

fn read_input(path: Option<&Path>) -> io::Result<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn problem_name(path: Option<&Path>) -> String {
    match path {
        Some(p) if p != Path::new("-") => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        _ => "stdin".to_string(),
    }
}

/// Checks the certificate, builds the sequent proof and checks it.
/// `external` certificates that fail are input errors, not internal ones.
fn certify(f: &Formula, c: Certificate, mode: Mode, external: bool) -> Report {
    let code = if external { EXIT_INPUT } else { EXIT_INTERNAL };
    if let Err(e) = check_certificate(f, &c, mode) {
        return Report::fail(Status::Error, code, format!("certificate rejected: {e}"));
    }
    let proof = match to_sequent(f, &c, mode) {
        Ok(p) => p,
        Err(e) => return Report::fail(Status::Error, EXIT_INTERNAL, format!("sequent translation failed: {e}")),
    };
    if let Err(e) = check_sequent(&proof, mode) {
        return Report::fail(Status::Error, EXIT_INTERNAL, format!("sequent proof rejected: {e}"));
    }
    Report { status: Status::Theorem, code: EXIT_THEOREM, notes: Vec::new(), cert: Some(c), proof: Some(proof), trace: Vec::new() }
}

fn run_search(f: &Formula, cfg: &RunConfig) -> Result<SearchReport, String> {
    let limits = cfg.limits();
    if !cfg.portfolio || cfg.classical {
        return search(f, &limits, &SearchOptions { trace: cfg.trace, cancel: None }).map_err(|e| e.to_string());
    }
    let int_cancel = CancelToken::new();
    let cls_cancel = CancelToken::new();
    thread::scope(|s| {
        let classical = s.spawn(|| {
            let mut l = limits.clone();
            l.mode = Mode::Classical;
            let r = search(f, &l, &SearchOptions { trace: false, cancel: Some(cls_cancel.clone()) });
            if matches!(r, Ok(SearchReport { outcome: SearchOutcome::ExhaustedBounds, .. })) {
                int_cancel.cancel();
            }
            r
        });
        let r = search(f, &limits, &SearchOptions { trace: cfg.trace, cancel: Some(int_cancel.clone()) });
        cls_cancel.cancel();
        let classical = classical.join().expect("classical search thread panicked");
        match (r, classical) {
            (Ok(mut r), Ok(c)) => {
                if c.outcome == SearchOutcome::ExhaustedBounds && !matches!(r.outcome, SearchOutcome::Proved(_)) {
                    r.outcome = SearchOutcome::ExhaustedBounds;
                }
                Ok(r)
            }
            (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
        }
    })
}

fn pipeline(cfg: &RunConfig) -> Report {
    let text = match read_input(cfg.input.as_deref()) {
        Ok(t) => t,
        Err(e) => {
            let what = cfg.input.as_deref().map(|p| p.display().to_string()).unwrap_or_else(|| "stdin".into());
            return Report::fail(Status::Error, EXIT_INPUT, format!("cannot read {what}: {e}"));
        }
    };
    let f = match parse_problem(&text) {
        Ok(f) => f,
        Err(e) => return Report::fail(Status::Error, EXIT_INPUT, format!("parse error: {e}")),
    };
    let mode = cfg.mode();
    let mut report = if let Some(path) = &cfg.check_proof {
        check_proof_file(&f, path, mode)
    } else if let Some(path) = &cfg.check {
        let c = match fs::read_to_string(path) {
            Ok(t) => Certificate::from_json(&t),
            Err(e) => return Report::fail(Status::Error, EXIT_INPUT, format!("cannot read {}: {e}", path.display())),
        };
        match c {
            Ok(c) => certify(&f, c, mode, true),
            Err(e) => Report::fail(Status::Error, EXIT_INPUT, format!("certificate rejected: {e}")),
        }
    } else {
        let r = match run_search(&f, cfg) {
            Ok(r) => r,
            Err(e) => return Report::fail(Status::Error, EXIT_INTERNAL, e),
        };
        let trace = r.trace.iter().map(|e| e.to_string()).collect();
        let mut rep = match r.outcome {
            SearchOutcome::Proved(c) => certify(&f, c, mode, false),
            SearchOutcome::ExhaustedBounds => Report::fail(Status::GaveUp, EXIT_GAVE_UP, "search bounds exhausted".into()),
            SearchOutcome::Timeout => Report::fail(Status::Timeout, EXIT_GAVE_UP, "time limit reached".into()),
        };
        rep.trace = trace;
        rep.notes.push(format!(
            "inferences {}, copies {}, final bound {}",
            r.stats.inferences, r.stats.copies, r.stats.final_bound
        ));
        rep
    };
    if cfg.oracle {
        oracle_check(&f, mode, &mut report);
    }
    report
}

fn check_proof_file(f: &Formula, path: &Path, mode: Mode) -> Report {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Report::fail(Status::Error, EXIT_INPUT, format!("cannot read {}: {e}", path.display())),
    };
    let proof = match SequentProof::from_json(&text) {
        Ok(p) => p,
        Err(e) => return Report::fail(Status::Error, EXIT_INPUT, e.to_string()),
    };
    if proof.formula != *f {
        return Report::fail(Status::Error, EXIT_INPUT, "sequent proof is for a different formula".into());
    }
    match check_sequent(&proof, mode) {
        Ok(()) => Report { status: Status::Theorem, code: EXIT_THEOREM, notes: Vec::new(), cert: None, proof: Some(proof), trace: Vec::new() },
        Err(e) => Report::fail(Status::Error, EXIT_INPUT, format!("sequent proof rejected: {e}")),
    }
}

fn oracle_check(f: &Formula, mode: Mode, report: &mut Report) {
    let verdict = match mode {
        Mode::Intuitionistic => g4ip_valid(f),
        Mode::Classical => classically_valid(f),
    };
    match verdict {
        Some(valid) => {
            report.notes.push(format!("oracle: {}", if valid { "valid" } else { "not valid" }));
            if report.status == Status::Theorem && !valid {
                report.status = Status::Error;
                report.code = EXIT_INTERNAL;
                report.notes.push("oracle contradicts the proof".into());
                report.cert = None;
                report.proof = None;
            }
        }
        None => report.notes.push("oracle not applicable: not a small propositional formula".into()),
    }
}

/// Runs the prover on already parsed arguments and returns the exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let report = pipeline(cfg);
    let name = problem_name(cfg.input.as_deref());
    writeln!(out, "% SZS status {} for {name}", report.status.name())?;
    for n in &report.notes {
        writeln!(out, "% {n}")?;
    }
    if report.status == Status::Error {
        for n in &report.notes {
            writeln!(err, "matrixprove: {n}")?;
        }
    }
    for e in &report.trace {
        writeln!(err, "trace: {e}")?;
    }
    let want_cert = matches!(cfg.output, OutputKind::Cert | OutputKind::Both);
    let want_proof = matches!(cfg.output, OutputKind::Sequent | OutputKind::Both);
    if let Some(c) = &report.cert {
        let json = c.to_json();
        if let Some(p) = &cfg.cert_out {
            fs::write(p, format!("{json}\n"))?;
        }
        if want_cert {
            writeln!(out, "% SZS output start Certificate for {name}")?;
            writeln!(out, "{json}")?;
            writeln!(out, "% SZS output end Certificate for {name}")?;
        }
    }
    if let Some(p) = &report.proof {
        let text = p.render();
        if let Some(path) = &cfg.proof_out {
            if path.extension().is_some_and(|e| e == "json") {
                fs::write(path, format!("{}\n", p.to_json()))?;
            } else {
                fs::write(path, &text)?;
            }
        }
        if want_proof {
            writeln!(out, "% SZS output start Proof for {name}")?;
            write!(out, "{text}")?;
            writeln!(out, "% SZS output end Proof for {name}")?;
        }
    }
    Ok(report.code)
}

/// Entry point for the binary.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> i32 {
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_THEOREM };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    match run(&cfg, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(code) => code,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_INPUT,
        Err(e) => {
            eprintln!("matrixprove: {e}");
            EXIT_INPUT
        }
    }
}
