mod common;


use matrixprove::certificate::{check_certificate, resolve_certificate, Certificate, CertificateError};
use matrixprove::matrix::Mode;
use matrixprove::oracle::{classically_valid, g4ip_valid};
use matrixprove::search::{prove, SearchLimits, SearchOutcome};
use matrixprove::syntax::{parse_formula, Formula};

use common::{mutants, mutation_corpus};

fn certify(f: &Formula, mode: Mode) -> Certificate {
    match prove(f, &SearchLimits::new(mode)).unwrap() {
        SearchOutcome::Proved(c) => c,
        other => panic!("{f}: {other:?}"),
    }
}

fn identity() -> (Formula, Certificate) {
    let f = parse_formula("p => p").unwrap();
    let c = certify(&f, Mode::Intuitionistic);
    (f, c)
}

#[test]
fn identity_certificate_is_accepted() {
    let (f, c) = identity();
    check_certificate(&f, &c, Mode::Intuitionistic).unwrap();
    assert_eq!(c.connections.len(), 1);
    assert_eq!(c.sigma_j.len(), 1);
    let (var, img) = c.sigma_j.iter().next().unwrap();
    assert_eq!(img.len(), 1);
    let [a, b] = &c.connections[0];
    assert!(var == a || var == b);
    assert!(img[0] == *a || img[0] == *b);
}

#[test]
fn empty_connection_set_leaves_the_path_uncovered() {
    let (f, mut c) = identity();
    c.connections.clear();
    match check_certificate(&f, &c, Mode::Intuitionistic) {
        Err(CertificateError::UncoveredPath(path)) => assert_eq!(path.len(), 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn deleting_prefix_substitution_breaks_complementarity() {
    let (f, mut c) = identity();
    c.sigma_j.clear();
    assert!(matches!(check_certificate(&f, &c, Mode::Intuitionistic), Err(CertificateError::NonComplementary(..))));
}

#[test]
fn json_round_trip() {
    let (_, c) = identity();
    let text = c.to_json();
    assert_eq!(Certificate::from_json(&text).unwrap(), c);
    assert_eq!(Certificate::from_json(&text).unwrap().to_json(), text);
}

#[test]
fn tampered_connection_parses_but_is_rejected() {
    let (f, c) = identity();
    let text = c.to_json().replace(&format!("\"{}\"", c.connections[0][0]), "\"p.9\"");
    let t = Certificate::from_json(&text).unwrap();
    assert!(matches!(check_certificate(&f, &t, Mode::Intuitionistic), Err(CertificateError::DanglingPosition(_))));
}

#[test]
fn certificate_is_bound_to_formula_and_mode() {
    let (_, c) = identity();
    let g = parse_formula("q => q").unwrap();
    assert_eq!(check_certificate(&g, &c, Mode::Intuitionistic), Err(CertificateError::DigestMismatch));
    let f = parse_formula("p => p").unwrap();
    assert!(matches!(check_certificate(&f, &c, Mode::Classical), Err(CertificateError::ModeMismatch { .. })));
    let mut text = c.to_json();
    text = text.replace("\"version\": 1", "\"version\": 2");
    assert_eq!(Certificate::from_json(&text), Err(CertificateError::Version(2)));
    assert!(matches!(Certificate::from_json("{}"), Err(CertificateError::Malformed(_))));
}

#[test]
fn single_field_mutations_are_rejected() {
    let (mut total, mut rejected) = (0usize, 0usize);
    for (f, mode) in mutation_corpus() {
        let c = certify(&f, mode);
        check_certificate(&f, &c, mode).unwrap();
        for (what, m) in mutants(&f, &c, mode) {
            total += 1;
            match check_certificate(&f, &m, mode) {
                Err(_) => rejected += 1,
                Ok(()) => {
                    // The checker accepted: confirm the evidence it relies on.
                    let r = resolve_certificate(&f, &m, mode).unwrap();
                    assert!(!r.connections.is_empty(), "{what}");
                    if f.is_propositional() {
                        let valid = match mode {
                            Mode::Intuitionistic => g4ip_valid(&f).unwrap(),
                            Mode::Classical => classically_valid(&f).unwrap(),
                        };
                        assert!(valid, "accepted mutant of an invalid formula: {what}");
                    }
                    println!("accepted mutant ({what}) of {f}");
                }
            }
        }
    }
    println!("{rejected}/{total} mutants rejected");
    assert!(total >= 200, "only {total} mutants");
    assert!(rejected * 100 >= total * 95, "{rejected}/{total}");
}
