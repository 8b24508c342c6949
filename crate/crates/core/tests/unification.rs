use std::collections::BTreeMap;

use matrixprove::certificate::resolve_certificate;
use matrixprove::matrix::{MTerm, Matrix, Mode, Polarity};
use matrixprove::search::{prove, SearchLimits, SearchOutcome};
use matrixprove::syntax::parse_formula;
use matrixprove::unification::{
    check_admissible, unify, unify_atoms, AdmissibilityError, PrefixSubstitution, TermSubstitution, UnifyError,
};
use proptest::prelude::*;

fn atoms(m: &Matrix, pol: Polarity) -> Vec<usize> {
    m.atoms().filter(|&a| m.node(a).polarity == pol).collect()
}

#[test]
fn variable_unifies_with_constant() {
    let f = parse_formula("(! [X] : p(X)) => p(c)").unwrap();
    let m = Matrix::build(&f, Mode::Classical);
    let (a, b) = (atoms(&m, Polarity::One)[0], atoms(&m, Polarity::Zero)[0]);
    let s = unify_atoms(&m, a, b, &TermSubstitution::new()).unwrap();
    assert_eq!(s.len(), 1);
    let (_, t) = s.iter().next().unwrap();
    assert_eq!(m.term_to_string(t), "c");
}

#[test]
fn occurs_check_fails() {
    let mut s = TermSubstitution::new();
    let x = MTerm::Var(0);
    let fx = MTerm::App(0, vec![MTerm::Var(0)]);
    assert_eq!(unify(&mut s, &x, &fx), Err(UnifyError::Occurs));
}

#[test]
fn same_polarity_is_not_connectable() {
    let f = parse_formula("p(a) | p(a)").unwrap();
    let m = Matrix::build(&f, Mode::Classical);
    let zs = atoms(&m, Polarity::Zero);
    assert_eq!(unify_atoms(&m, zs[0], zs[1], &TermSubstitution::new()), Err(UnifyError::NotConnectable));
}

#[test]
fn identity_certificate_substitution_is_admissible() {
    let f = parse_formula("p => p").unwrap();
    let SearchOutcome::Proved(c) = prove(&f, &SearchLimits::new(Mode::Intuitionistic)).unwrap() else { panic!() };
    let r = resolve_certificate(&f, &c, Mode::Intuitionistic).unwrap();
    assert_eq!(check_admissible(&r.matrix, &r.sigma_q, &r.sigma_j), Ok(()));
}

#[test]
fn empty_substitutions_are_admissible() {
    for text in ["p => p", "(! [X] : p(X)) => ? [Y] : p(Y)", "! [X] : ? [Y] : (p(X) => ~ q(Y))", "~ (p | ~ p)"] {
        let f = parse_formula(text).unwrap();
        for mode in [Mode::Intuitionistic, Mode::Classical] {
            let m = Matrix::build(&f, mode);
            assert_eq!(check_admissible(&m, &TermSubstitution::new(), &PrefixSubstitution::new()), Ok(()), "{text}");
        }
    }
}

#[test]
fn eigenvariable_dependency_cycle_is_rejected() {
    // ?[X]: ![Y]: q(X,Y): binding X to the eigenvariable term of Y, which
    // itself depends on X.
    let f = parse_formula("? [X] : ! [Y] : q(X, Y)").unwrap();
    for mode in [Mode::Intuitionistic, Mode::Classical] {
        let m = Matrix::build(&f, mode);
        let (_, delta) = m.nodes().find(|(_, p)| p.skolem.is_some()).unwrap();
        let sk = delta.skolem.clone().unwrap();
        assert!(matches!(&sk, MTerm::App(_, args) if args == &[MTerm::Var(0)]));
        let sigma = TermSubstitution::from_map(BTreeMap::from([(0, sk)]));
        assert!(matches!(check_admissible(&m, &sigma, &PrefixSubstitution::new()), Err(AdmissibilityError::CyclicTerms(_))));
    }
}

#[test]
fn eigenvariable_above_its_instance_is_admissible() {
    let f = parse_formula("! [Y] : ((! [X] : p(X)) => p(Y))").unwrap();
    for mode in [Mode::Intuitionistic, Mode::Classical] {
        let m = Matrix::build(&f, mode);
        let sk = m.nodes().find_map(|(_, p)| p.skolem.clone()).unwrap();
        let sigma = TermSubstitution::from_map(BTreeMap::from([(0, sk)]));
        assert_eq!(check_admissible(&m, &sigma, &PrefixSubstitution::new()), Ok(()));
    }
}

#[derive(Debug, Clone)]
enum T {
    V(u32),
    F(u32, Vec<T>),
}

fn arity(f: u32) -> usize {
    [0, 0, 1, 2][f as usize]
}

fn term() -> impl Strategy<Value = T> {
    let leaf = prop_oneof![(0u32..3).prop_map(T::V), (0u32..2).prop_map(|f| T::F(f, vec![]))];
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| T::F(2, vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| T::F(3, vec![a, b])),
        ]
    })
}

fn to_m(t: &T) -> MTerm {
    match t {
        T::V(v) => MTerm::Var(*v),
        T::F(f, args) => {
            assert_eq!(args.len(), arity(*f));
            MTerm::App(*f, args.iter().map(to_m).collect())
        }
    }
}

fn ground_terms() -> Vec<MTerm> {
    let mut out = vec![MTerm::App(0, vec![]), MTerm::App(1, vec![])];
    let base = out.clone();
    for a in &base {
        out.push(MTerm::App(2, vec![a.clone()]));
        for b in &base {
            out.push(MTerm::App(3, vec![a.clone(), b.clone()]));
        }
    }
    out
}

fn apply_ground(theta: &[MTerm; 3], t: &MTerm) -> MTerm {
    match t {
        MTerm::Var(v) => theta[*v as usize].clone(),
        MTerm::App(f, args) => MTerm::App(*f, args.iter().map(|a| apply_ground(theta, a)).collect()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Against brute force over small ground substitutions: the MGU exists
    /// iff some ground unifier does, and every ground unifier factors
    /// through it.
    #[test]
    fn mgu_is_most_general(s in term(), t in term()) {
        let (s, t) = (to_m(&s), to_m(&t));
        let mut sigma = TermSubstitution::new();
        let mgu = unify(&mut sigma, &s, &t).ok().map(|_| sigma.normalized());
        if let Some(m) = &mgu {
            prop_assert_eq!(m.apply(&s), m.apply(&t));
            prop_assert!(m.is_acyclic());
        }
        let g = ground_terms();
        for a in &g {
            for b in &g {
                for c in &g {
                    let theta = [a.clone(), b.clone(), c.clone()];
                    if apply_ground(&theta, &s) != apply_ground(&theta, &t) {
                        continue;
                    }
                    let m = mgu.as_ref();
                    prop_assert!(m.is_some(), "ground unifier exists but unification failed");
                    let m = m.unwrap();
                    for v in 0..3u32 {
                        let through = apply_ground(&theta, &m.apply(&MTerm::Var(v)));
                        prop_assert_eq!(&through, &theta[v as usize]);
                    }
                }
            }
        }
    }
}
