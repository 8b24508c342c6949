use std::collections::BTreeMap;

use matrixprove::matrix::PrefixChar::{self, Const as C, Var as V};
use matrixprove::unification::{solve_prefixes, unify_prefixes, Equation, PrefixLimits, PrefixSubstitution};
use proptest::prelude::*;

const VARS: usize = 3;
const CONSTS: usize = 2;

fn all_strings(max: usize) -> Vec<Vec<PrefixChar>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            for c in 0..CONSTS {
                let mut t: Vec<PrefixChar> = s.clone();
                t.push(C(100 + c));
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn brute_force(eqs: &[Equation], max: usize) -> bool {
    let strings = all_strings(max);
    let n = strings.len();
    let mut idx = [0usize; VARS];
    loop {
        let mut map = BTreeMap::new();
        for (v, &i) in idx.iter().enumerate() {
            map.insert(v, strings[i].clone());
        }
        if PrefixSubstitution::from_map(map).solves(eqs) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == VARS {
                return false;
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn char_strategy() -> impl Strategy<Value = PrefixChar> {
    prop_oneof![(0..VARS).prop_map(V), (0..CONSTS).prop_map(|c| C(100 + c))]
}

fn side() -> impl Strategy<Value = Vec<PrefixChar>> {
    prop::collection::vec(char_strategy(), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn solver_agrees_with_brute_force(eqs in prop::collection::vec((side(), side()), 1..3)) {
        let found = solve_prefixes(&eqs, &PrefixSubstitution::new(), PrefixLimits::default());
        if let Some(s) = &found {
            prop_assert!(s.solves(&eqs));
            prop_assert!(s.grounded(0..VARS).solves(&eqs));
        }
        // Small systems with a solution have one with short images.
        if brute_force(&eqs, 3) {
            prop_assert!(found.is_some(), "missed a solution of {:?}", eqs);
        }
        for s in unify_prefixes(&eqs, &PrefixSubstitution::new(), PrefixLimits::default()) {
            prop_assert!(s.solves(&eqs));
        }
    }
}

#[test]
fn both_solutions_of_a_symmetric_equation_are_enumerated() {
    let a = C(100);
    let eqs = vec![(vec![V(0), a], vec![a, V(1)])];
    let sols = unify_prefixes(&eqs, &PrefixSubstitution::new(), PrefixLimits::default());
    // Most general solutions may leave variables free; their least
    // instance maps those to the empty string.
    let images: Vec<(Vec<PrefixChar>, Vec<PrefixChar>)> = sols
        .iter()
        .map(|s| s.grounded(0..2))
        .map(|s| (s.apply(&[V(0)]), s.apply(&[V(1)])))
        .collect();
    assert!(images.contains(&(vec![], vec![])));
    assert!(images.contains(&(vec![a], vec![a])));
}

#[test]
fn constant_prefix_must_match() {
    let eqs = vec![(vec![C(100), V(0)], vec![C(101)])];
    assert!(solve_prefixes(&eqs, &PrefixSubstitution::new(), PrefixLimits::default()).is_none());
}
