//! Acceptance criteria, one PASS/FAIL line each. Runs without the test
//! harness so that every line is printed; exits non-zero if any fails.

mod common;

use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use matrixprove::certificate::{check_certificate, resolve_certificate, Certificate};
use matrixprove::matrix::{Matrix, Mode};
use matrixprove::oracle::{classically_valid, g4ip_valid};
use matrixprove::search::{prove, search, SearchLimits, SearchOptions, SearchOutcome, TraceEvent};
use matrixprove::sequent::{check_sequent, to_sequent, SequentProof};
use matrixprove::syntax::{parse_formula, print_formula, Formula};

const CORPUS_SEED: u64 = 7;
const CORPUS_SIZE: usize = 500;
const DESK_TIMEOUT: Duration = Duration::from_secs(5);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Proves, checks the certificate, translates and checks the sequent proof.
fn end_to_end(f: &Formula, limits: &SearchLimits) -> Result<Option<(Certificate, SequentProof)>, String> {
    match prove(f, limits).map_err(|e| e.to_string())? {
        SearchOutcome::Proved(c) => {
            check_certificate(f, &c, limits.mode).map_err(|e| e.to_string())?;
            let p = to_sequent(f, &c, limits.mode).map_err(|e| e.to_string())?;
            check_sequent(&p, limits.mode).map_err(|e| e.to_string())?;
            Ok(Some((c, p)))
        }
        _ => Ok(None),
    }
}

fn benchmarks() -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;
    for name in ["quantifier_instantiation", "set_union"] {
        let f = common::problem(name);
        let t = Instant::now();
        let r = end_to_end(&f, &SearchLimits::new(Mode::Intuitionistic));
        let dt = t.elapsed().as_secs_f64();
        let ok = matches!(r, Ok(Some(_))) && dt < 10.0;
        pass &= ok;
        notes.push(format!("{name} {} in {dt:.2}s", if ok { "proved" } else { "FAILED" }));
    }
    verdict(pass, notes.join(", "))
}

fn micro_examples() -> Verdict {
    let mut problems = Vec::new();
    let id = parse_formula("p => p").unwrap();
    let t = Instant::now();
    let c1 = prove(&id, &SearchLimits::new(Mode::Intuitionistic)).unwrap();
    let c2 = prove(&id, &SearchLimits::new(Mode::Intuitionistic)).unwrap();
    let dt = t.elapsed().as_secs_f64() / 2.0;
    match &c1 {
        SearchOutcome::Proved(c) => {
            let one_to_one = c.sigma_j.len() == 1 && c.sigma_j.values().all(|img| img.len() == 1);
            if c.connections.len() != 1 || !one_to_one {
                problems.push("P=>P certificate shape".to_string());
            }
        }
        _ => problems.push("P=>P not proved".to_string()),
    }
    if c1 != c2 || dt >= 0.1 {
        problems.push(format!("P=>P nondeterministic or slow ({dt:.3}s)"));
    }
    let em = common::problem("excluded_middle");
    let mut worst = 0.0f64;
    for cap in 1..=5 {
        for depth in [1, 2, 4, 8] {
            let mut l = SearchLimits::new(Mode::Intuitionistic).with_copy_cap(cap);
            l.start_depth = depth;
            let t = Instant::now();
            let r = prove(&em, &l).unwrap();
            worst = worst.max(t.elapsed().as_secs_f64());
            if r != SearchOutcome::ExhaustedBounds {
                problems.push(format!("~P|P intuitionistic at cap {cap}, depth {depth}: {r:?}"));
            }
        }
    }
    let t = Instant::now();
    let r = end_to_end(&em, &SearchLimits::new(Mode::Classical));
    worst = worst.max(t.elapsed().as_secs_f64());
    if !matches!(r, Ok(Some(_))) {
        problems.push("~P|P classical not proved".into());
    }
    if worst >= 0.1 {
        problems.push(format!("~P|P took {worst:.3}s"));
    }
    if problems.is_empty() {
        verdict(true, format!("P=>P one connection, sigma_J z->a; ~P|P GaveUp at caps 1-5, Theorem classically; worst {worst:.4}s"))
    } else {
        verdict(false, problems.join("; "))
    }
}

struct CorpusRun {
    formula: Formula,
    int_valid: bool,
    cls_valid: bool,
    int: SearchOutcome,
    cls: SearchOutcome,
    int_time: f64,
}

fn run_corpus() -> Vec<CorpusRun> {
    common::propositional_corpus(CORPUS_SEED, CORPUS_SIZE)
        .into_iter()
        .map(|f| {
            let limits = |mode| SearchLimits::new(mode).with_timeout(Some(DESK_TIMEOUT));
            let t = Instant::now();
            let int = prove(&f, &limits(Mode::Intuitionistic)).unwrap();
            let int_time = t.elapsed().as_secs_f64();
            let cls = prove(&f, &limits(Mode::Classical)).unwrap();
            CorpusRun {
                int_valid: g4ip_valid(&f).unwrap(),
                cls_valid: classically_valid(&f).unwrap(),
                formula: f,
                int,
                cls,
                int_time,
            }
        })
        .collect()
}

fn proved(o: &SearchOutcome) -> bool {
    matches!(o, SearchOutcome::Proved(_))
}

fn soundness(runs: &[CorpusRun]) -> Verdict {
    let bad_int = runs.iter().filter(|r| proved(&r.int) && !r.int_valid).count();
    let bad_cls = runs.iter().filter(|r| proved(&r.cls) && !r.cls_valid).count();
    for r in runs.iter().filter(|r| (proved(&r.int) && !r.int_valid) || (proved(&r.cls) && !r.cls_valid)) {
        println!("  unsound: {}", r.formula);
    }
    verdict(
        bad_int == 0 && bad_cls == 0,
        format!("{} formulas; {bad_int} intuitionistic and {bad_cls} classical Theorems contradict the oracles", runs.len()),
    )
}

fn completeness(runs: &[CorpusRun]) -> Verdict {
    let valid: Vec<&CorpusRun> = runs.iter().filter(|r| r.int_valid).collect();
    let ok = valid.iter().filter(|r| proved(&r.int) && r.int_time <= DESK_TIMEOUT.as_secs_f64()).count();
    let mut wrong = 0;
    for r in valid.iter().filter(|r| !proved(&r.int)) {
        let label = match r.int {
            SearchOutcome::Timeout => "timeout",
            _ => {
                wrong += 1;
                "WRONG STATUS"
            }
        };
        println!("  {label} ({:.2}s): {}", r.int_time, r.formula);
    }
    let rate = 100.0 * ok as f64 / valid.len().max(1) as f64;
    verdict(
        rate >= 99.0 && wrong == 0,
        format!("{ok}/{} g4ip-valid formulas proved within 5s ({rate:.1}%), {wrong} non-timeout failures", valid.len()),
    )
}

/// Runs the binary on `problem` with extra arguments; returns the status line.
fn fresh_process(problem: &str, args: &[&str]) -> String {
    let mut child = Command::new(env!("CARGO_BIN_EXE_matrixprove"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .expect("spawn matrixprove");
    child.stdin.take().unwrap().write_all(problem.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or_default().to_string()
}

fn integrity(runs: &[CorpusRun]) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (mut total, mut rechecked) = (0usize, 0usize);
    let mut theorems: Vec<(Formula, Mode, Certificate)> = Vec::new();
    for r in runs {
        for (mode, o) in [(Mode::Intuitionistic, &r.int), (Mode::Classical, &r.cls)] {
            if let SearchOutcome::Proved(c) = o {
                theorems.push((r.formula.clone(), mode, c.clone()));
            }
        }
    }
    for name in ["identity", "two_instances", "quantifier_instantiation", "set_union", "excluded_middle"] {
        let f = common::problem(name);
        for mode in [Mode::Intuitionistic, Mode::Classical] {
            if let SearchOutcome::Proved(c) = prove(&f, &SearchLimits::new(mode)).unwrap() {
                theorems.push((f.clone(), mode, c));
            }
        }
    }
    for (i, (f, mode, c)) in theorems.iter().enumerate() {
        total += 1;
        let cert = dir.path().join(format!("c{i}.json"));
        let proof_path = dir.path().join(format!("p{i}.json"));
        let ok = (|| -> Option<()> {
            let p = to_sequent(f, c, *mode).ok()?;
            std::fs::write(&cert, c.to_json()).ok()?;
            std::fs::write(&proof_path, p.to_json()).ok()?;
            let text = format!("fof(goal, conjecture, {}).\n", print_formula(f));
            let mut args = vec![];
            if *mode == Mode::Classical {
                args.push("--classical");
            }
            let theorem = "% SZS status Theorem for stdin";
            let mut a = args.clone();
            a.extend(["--check", cert.to_str()?]);
            (fresh_process(&text, &a) == theorem).then_some(())?;
            let mut a = args.clone();
            a.extend(["--check-proof", proof_path.to_str()?]);
            (fresh_process(&text, &a) == theorem).then_some(())
        })()
        .is_some();
        if ok {
            rechecked += 1;
        } else {
            println!("  not re-checked: {mode} {f}");
        }
    }
    let (mut m_total, mut m_rejected, mut m_bad) = (0usize, 0usize, 0usize);
    for (f, mode) in common::mutation_corpus() {
        let SearchOutcome::Proved(c) = prove(&f, &SearchLimits::new(mode)).unwrap() else {
            m_bad += 1;
            continue;
        };
        for (what, m) in common::mutants(&f, &c, mode) {
            m_total += 1;
            if check_certificate(&f, &m, mode).is_err() {
                m_rejected += 1;
                continue;
            }
            // Accepted: the mutant must be independently valid.
            let evidence = resolve_certificate(&f, &m, mode).is_ok()
                && to_sequent(&f, &m, mode).is_ok_and(|p| check_sequent(&p, mode).is_ok())
                && (!f.is_propositional()
                    || match mode {
                        Mode::Intuitionistic => g4ip_valid(&f).unwrap(),
                        Mode::Classical => classically_valid(&f).unwrap(),
                    });
            if evidence {
                println!("  accepted valid mutant: {what}");
            } else {
                m_bad += 1;
                println!("  accepted mutant without evidence: {what}");
            }
        }
    }
    let pass = total > 0 && rechecked == total && m_total >= 200 && m_rejected * 100 >= 95 * m_total && m_bad == 0;
    verdict(
        pass,
        format!(
            "{rechecked}/{total} certificates and sequent proofs re-checked in fresh processes; {m_rejected}/{m_total} mutants rejected ({:.1}%), {m_bad} accepted without evidence",
            100.0 * m_rejected as f64 / m_total.max(1) as f64
        ),
    )
}

fn monotonicity(runs: &[CorpusRun]) -> Verdict {
    let mut checked = 0;
    let mut violations = Vec::new();
    for r in runs {
        checked += 1;
        if proved(&r.int) && !proved(&r.cls) {
            violations.push(r.formula.to_string());
        }
    }
    let mut extra: Vec<Formula> = common::FIRST_ORDER.iter().map(|(t, _, _)| parse_formula(t).unwrap()).collect();
    extra.extend(["identity", "two_instances", "quantifier_instantiation", "set_union", "excluded_middle"].map(common::problem));
    for f in extra {
        checked += 1;
        let int = prove(&f, &SearchLimits::new(Mode::Intuitionistic).with_timeout(Some(DESK_TIMEOUT))).unwrap();
        let cls = prove(&f, &SearchLimits::new(Mode::Classical).with_timeout(Some(DESK_TIMEOUT))).unwrap();
        if proved(&int) && !proved(&cls) {
            violations.push(f.to_string());
        }
    }
    for v in &violations {
        println!("  intuitionistic-only Theorem: {v}");
    }
    verdict(violations.is_empty(), format!("{checked} formulas, {} exceptions", violations.len()))
}

fn dynamic_multiplicity() -> Verdict {
    let f = common::problem("two_instances");
    let m = Matrix::build(&f, Mode::Intuitionistic);
    let run = |cap| {
        let l = SearchLimits::new(Mode::Intuitionistic).with_copy_cap(cap);
        search(&f, &l, &SearchOptions { trace: true, cancel: None }).unwrap()
    };
    let at2 = run(2);
    let at1 = run(1);
    let copies: Vec<(&String, &String)> = at2
        .trace
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Copy { group, instance } => Some((group, instance)),
            _ => None,
        })
        .collect();
    let whole = copies.iter().any(|(g, _)| match m.lookup(g) {
        Some(n) => n == m.root || m.node(n).label.size() >= f.size(),
        None => false,
    });
    let gamma_copied = copies.iter().any(|(g, _)| {
        m.lookup(g).is_some_and(|n| matches!(*m.node(m.node(n).children[0]).label, Formula::Forall(..)))
    });
    let pass = proved(&at2.outcome) && at1.outcome == SearchOutcome::ExhaustedBounds && gamma_copied && !whole;
    verdict(
        pass,
        format!(
            "cap 2: {}, cap 1: {}; {} copy events ({}), universal copied: {gamma_copied}, whole-formula copy: {whole}",
            if proved(&at2.outcome) { "Proved" } else { "not proved" },
            if at1.outcome == SearchOutcome::ExhaustedBounds { "ExhaustedBounds" } else { "not exhausted" },
            copies.len(),
            copies.iter().map(|(g, i)| format!("{g} -> {i}")).collect::<Vec<_>>().join(", "),
        ),
    )
}

fn main() {
    std::env::set_current_dir(Path::new(env!("CARGO_MANIFEST_DIR"))).unwrap();
    let t = Instant::now();
    let mut results = Vec::new();
    let mut report = |n: usize, name: &str, v: Verdict| {
        println!("criterion {n} ({name}): {} - {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push(v.pass);
    };
    report(1, "benchmarks", benchmarks());
    report(2, "micro-examples", micro_examples());
    let runs = run_corpus();
    report(3, "oracle soundness", soundness(&runs));
    report(4, "oracle completeness", completeness(&runs));
    report(5, "checker integrity", integrity(&runs));
    report(6, "mode monotonicity", monotonicity(&runs));
    report(7, "dynamic multiplicity", dynamic_multiplicity());
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed in {:.1}s", results.len(), t.elapsed().as_secs_f64());
    if passed != results.len() {
        std::process::exit(1);
    }
}
