#![allow(dead_code)]

use std::fs;

use matrixprove::certificate::{resolve_certificate, CTerm, Certificate};
use matrixprove::matrix::Mode;
use matrixprove::oracle::g4ip_valid;
use matrixprove::syntax::{parse_problem, Formula};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A bundled problem file, by stem.
pub fn problem(name: &str) -> Formula {
    let path = format!("{}/problems/{name}.p", env!("CARGO_MANIFEST_DIR"));
    parse_problem(&fs::read_to_string(&path).unwrap()).unwrap()
}

/// First-order formulas with their intuitionistic and classical validity.
pub const FIRST_ORDER: &[(&str, bool, bool)] = &[
    ("(! [X] : (p(X) | q)) => ((! [X] : p(X)) | q)", false, true),
    ("(~ (! [X] : p(X))) => (? [X] : ~ p(X))", false, true),
    ("~ ~ (! [X] : (p(X) | ~ p(X)))", false, true),
    ("(! [X] : ~ ~ p(X)) => ~ ~ (! [X] : p(X))", false, true),
    ("? [X] : (p(X) => (! [Y] : p(Y)))", false, true),
    ("(! [X] : ? [Y] : r(X, Y)) => (? [Y] : ! [X] : r(X, Y))", false, false),
    ("(! [X] : p(X)) => (? [X] : p(X))", true, true),
    ("((? [X] : p(X)) => q) <=> (! [X] : (p(X) => q))", true, true),
    ("! [X] : ~ ~ (p(X) | ~ p(X))", true, true),
    ("(? [X] : ~ p(X)) => ~ (! [X] : p(X))", true, true),
    ("(~ (? [X] : p(X))) <=> (! [X] : ~ p(X))", true, true),
    ("((! [X] : p(X)) | q) => (! [X] : (p(X) | q))", true, true),
    ("(? [X] : ! [Y] : r(X, Y)) => (! [Y] : ? [X] : r(X, Y))", true, true),
    ("(! [X] : (p(X) => q(f(X)))) => ((! [X] : p(X)) => (! [Y] : q(f(Y))))", true, true),
];

pub const MAX_ATOMS: usize = 8;
pub const MAX_CONNECTIVES: usize = 20;

pub fn connectives(f: &Formula) -> usize {
    f.size()
}

fn atom(rng: &mut StdRng, atoms: usize) -> Formula {
    Formula::prop(format!("p{}", rng.gen_range(0..atoms)))
}

/// Random formula with exactly `n` connectives.
pub fn random_formula(rng: &mut StdRng, n: usize, atoms: usize) -> Formula {
    if n == 0 {
        return atom(rng, atoms);
    }
    match rng.gen_range(0..9) {
        0 => Formula::neg(random_formula(rng, n - 1, atoms)),
        k => {
            let left = rng.gen_range(0..n);
            let a = random_formula(rng, left, atoms);
            let b = random_formula(rng, n - 1 - left, atoms);
            match k {
                1 | 2 => Formula::and(a, b),
                3 | 4 => Formula::or(a, b),
                5..=7 => Formula::imp(a, b),
                _ => Formula::iff(a, b),
            }
        }
    }
}

/// Instances of intuitionistically valid schemas with random subformulas.
fn schema_instance(rng: &mut StdRng, atoms: usize) -> Formula {
    use Formula as F;
    let budget = rng.gen_range(0..=4);
    let sub = |rng: &mut StdRng| {
        let n = rng.gen_range(0..=budget);
        random_formula(rng, n, atoms)
    };
    let (a, b, c) = (sub(rng), sub(rng), sub(rng));
    match rng.gen_range(0..14) {
        0 => F::imp(a.clone(), a),
        1 => F::imp(F::and(a.clone(), b), a),
        2 => F::imp(a.clone(), F::imp(b, a)),
        3 => F::imp(F::and(F::imp(a.clone(), b.clone()), F::imp(b, c.clone())), F::imp(a, c)),
        4 => F::neg(F::neg(F::or(a.clone(), F::neg(a)))),
        5 => F::imp(F::or(a.clone(), b.clone()), F::or(b, a)),
        6 => F::imp(a.clone(), F::neg(F::neg(a))),
        7 => F::iff(F::imp(F::or(a.clone(), b.clone()), c.clone()), F::and(F::imp(a, c.clone()), F::imp(b, c))),
        8 => F::imp(F::and(a.clone(), F::imp(a, b.clone())), b),
        9 => F::iff(F::neg(F::neg(F::neg(a.clone()))), F::neg(a)),
        10 => F::imp(F::or(F::and(a.clone(), b.clone()), F::and(a.clone(), c.clone())), F::and(a, F::or(b, c))),
        11 => F::imp(F::imp(a.clone(), F::imp(b.clone(), c.clone())), F::imp(F::and(a, b), c)),
        12 => F::imp(F::neg(F::or(a.clone(), b.clone())), F::and(F::neg(a), F::neg(b))),
        _ => F::imp(F::and(F::or(a.clone(), b.clone()), F::neg(a)), b),
    }
}

/// Deterministic corpus of `n` propositional formulas with at most
/// `MAX_ATOMS` letters and `MAX_CONNECTIVES` connectives: half uniform
/// random formulas, half instances of valid schemas.
pub fn propositional_corpus(seed: u64, n: usize) -> Vec<Formula> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let atoms = rng.gen_range(1..=MAX_ATOMS);
        let f = if out.len() % 2 == 0 {
            let k = rng.gen_range(1..=MAX_CONNECTIVES);
            random_formula(&mut rng, k, atoms)
        } else {
            schema_instance(&mut rng, atoms)
        };
        if connectives(&f) <= MAX_CONNECTIVES {
            out.push(f);
        }
    }
    out
}

/// Twenty theorems with their modes: the bundled problems and valid
/// propositional formulas from the corpus.
pub fn mutation_corpus() -> Vec<(Formula, Mode)> {
    let mut out = Vec::new();
    for name in ["identity", "two_instances", "quantifier_instantiation", "set_union"] {
        let f = problem(name);
        out.push((f.clone(), Mode::Intuitionistic));
        out.push((f, Mode::Classical));
    }
    out.push((problem("excluded_middle"), Mode::Classical));
    for f in propositional_corpus(11, 400) {
        if out.len() == 20 {
            break;
        }
        if f.size() >= 4 && g4ip_valid(&f).unwrap() {
            out.push((f, Mode::Intuitionistic));
        }
    }
    assert_eq!(out.len(), 20);
    out
}

fn replace_term(t: &CTerm) -> Vec<CTerm> {
    let fresh = CTerm::Fun { fun: "mutant".into(), args: vec![] };
    let mut out = vec![fresh.clone()];
    match t {
        CTerm::Fun { fun, args } if !args.is_empty() => {
            out.push(CTerm::Fun { fun: fun.clone(), args: vec![fresh; args.len()] });
        }
        CTerm::Fun { .. } | CTerm::Sk { .. } => {}
        CTerm::Var { .. } => {}
    }
    out
}

/// Single-field mutations: drop a connection, move one endpoint to another
/// atom, rebind a quantifier, shorten, extend or drop a prefix binding, and
/// decrement a multiplicity.
pub fn mutants(f: &Formula, c: &Certificate, mode: Mode) -> Vec<(String, Certificate)> {
    let r = resolve_certificate(f, c, mode).unwrap();
    let atoms: Vec<String> = r.matrix.nodes().filter(|(_, p)| p.is_atom()).map(|(_, p)| p.id.clone()).collect();
    let consts: Vec<String> = c.sigma_j.values().flatten().cloned().collect();
    let mut out = Vec::new();
    for i in 0..c.connections.len() {
        let mut m = c.clone();
        m.connections.remove(i);
        out.push((format!("drop connection {i}"), m));
        for side in 0..2 {
            for a in atoms.iter().filter(|a| **a != c.connections[i][side]).take(3) {
                let mut m = c.clone();
                m.connections[i][side] = a.clone();
                out.push((format!("move end {side} of {i} to {a}"), m));
            }
        }
    }
    for (k, t) in &c.sigma_q {
        for u in replace_term(t) {
            let mut m = c.clone();
            m.sigma_q.insert(k.clone(), u);
            out.push((format!("rebind {k}"), m));
        }
        let mut m = c.clone();
        m.sigma_q.remove(k);
        out.push((format!("unbind {k}"), m));
    }
    for (k, img) in &c.sigma_j {
        let mut m = c.clone();
        m.sigma_j.remove(k);
        out.push((format!("unbind prefix {k}"), m));
        if !img.is_empty() {
            let mut m = c.clone();
            m.sigma_j.get_mut(k).unwrap().pop();
            out.push((format!("shorten prefix {k}"), m));
        }
        for x in consts.iter().take(2) {
            let mut m = c.clone();
            m.sigma_j.get_mut(k).unwrap().push(x.clone());
            out.push((format!("extend prefix {k} by {x}"), m));
        }
    }
    let groups: Vec<(String, u32)> = r.matrix.multiplicity().into_iter().map(|(g, n)| (r.matrix.node(g).id.clone(), n)).collect();
    for (g, n) in groups {
        if n > 0 {
            let mut m = c.clone();
            m.multiplicity.insert(g.clone(), n - 1);
            out.push((format!("decrement {g}"), m));
        }
    }
    out
}
