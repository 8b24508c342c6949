use std::collections::HashMap;

use thiserror::Error;

use super::{ProofNode, Rule, SequentProof};
use crate::matrix::Mode;
use crate::syntax::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {node}: {reason}")]
pub struct SequentError {
    /// Premise indices from the root, dot separated (`root` for the root).
    pub node: String,
    pub reason: String,
}

fn has(set: &[Formula], f: &Formula) -> bool {
    set.iter().any(|g| g == f)
}

fn subset(premise: &[Formula], allowed: &[&[Formula]], extra: &[&Formula]) -> Option<Formula> {
    premise
        .iter()
        .find(|f| !allowed.iter().any(|s| has(s, f)) && !extra.contains(f))
        .cloned()
}

fn subst(body: &Formula, x: &str, t: Term) -> Formula {
    body.instantiate(&HashMap::from([(x.to_string(), t)]))
}

fn is_closed(t: &Term) -> bool {
    match t {
        Term::Var(_) => false,
        Term::App(_, args) => args.iter().all(is_closed),
    }
}

/// Accepts iff the root is `|- formula` and every node is an instance of a
/// rule of the calculus for `mode`.
pub fn check_sequent(p: &SequentProof, mode: Mode) -> Result<(), SequentError> {
    let root = &p.root;
    if !root.ante.is_empty() || root.succ.len() != 1 || root.succ[0] != p.formula {
        return Err(SequentError { node: "root".into(), reason: "end sequent is not |- formula".into() });
    }
    check_node(root, "root".to_string(), mode)
}

fn check_node(n: &ProofNode, at: String, mode: Mode) -> Result<(), SequentError> {
    let fail = |reason: String| Err(SequentError { node: at.clone(), reason });
    let (ante, succ) = (&n.ante[..], &n.succ[..]);
    let intuitionistic = mode == Mode::Intuitionistic;
    let name = n.rule.name();
    let expect = |k: usize| -> Result<(), SequentError> {
        if n.premises.len() == k {
            Ok(())
        } else {
            Err(SequentError { node: at.clone(), reason: format!("{name} needs {k} premises, found {}", n.premises.len()) })
        }
    };
    let check_premise = |i: usize, a_extra: &[&Formula], s_base: &[&[Formula]], s_extra: &[&Formula]| {
        let prem = &n.premises[i];
        if let Some(f) = subset(&prem.ante, &[ante], a_extra) {
            return Err(SequentError { node: at.clone(), reason: format!("{name}: premise {i} antecedent has stray {f}") });
        }
        if let Some(f) = subset(&prem.succ, s_base, s_extra) {
            return Err(SequentError { node: at.clone(), reason: format!("{name}: premise {i} succedent has stray {f}") });
        }
        Ok(())
    };
    let in_ante = |f: &Formula| -> Result<(), SequentError> {
        if has(ante, f) {
            Ok(())
        } else {
            Err(SequentError { node: at.clone(), reason: format!("{name}: principal {f} not in antecedent") })
        }
    };
    let in_succ = |f: &Formula| -> Result<(), SequentError> {
        if has(succ, f) {
            Ok(())
        } else {
            Err(SequentError { node: at.clone(), reason: format!("{name}: principal {f} not in succedent") })
        }
    };
    let kept: &[&[Formula]] = &[succ];
    let critical: &[&[Formula]] = if intuitionistic { &[] } else { &[succ] };
    let p = &n.principal;
    match (&n.rule, p) {
        (Rule::Axiom, Formula::Atom(..)) => {
            expect(0)?;
            in_ante(p)?;
            in_succ(p)?;
        }
        (Rule::AndL, Formula::And(a, b)) => {
            expect(1)?;
            in_ante(p)?;
            check_premise(0, &[a, b], kept, &[])?;
        }
        (Rule::AndR, Formula::And(a, b)) => {
            expect(2)?;
            in_succ(p)?;
            check_premise(0, &[], kept, &[a])?;
            check_premise(1, &[], kept, &[b])?;
        }
        (Rule::OrL, Formula::Or(a, b)) => {
            expect(2)?;
            in_ante(p)?;
            check_premise(0, &[a], kept, &[])?;
            check_premise(1, &[b], kept, &[])?;
        }
        (Rule::OrR, Formula::Or(a, b)) => {
            expect(1)?;
            in_succ(p)?;
            check_premise(0, &[], kept, &[a, b])?;
        }
        (Rule::ImpL, Formula::Imp(a, b)) => {
            expect(2)?;
            in_ante(p)?;
            check_premise(0, &[], kept, &[a])?;
            check_premise(1, &[b], kept, &[])?;
        }
        (Rule::ImpR, Formula::Imp(a, b)) => {
            expect(1)?;
            in_succ(p)?;
            check_premise(0, &[a], critical, &[b])?;
        }
        (Rule::NotL, Formula::Neg(a)) => {
            expect(1)?;
            in_ante(p)?;
            check_premise(0, &[], kept, &[a])?;
        }
        (Rule::NotR, Formula::Neg(a)) => {
            expect(1)?;
            in_succ(p)?;
            check_premise(0, &[a], critical, &[])?;
        }
        (Rule::IffL, Formula::Iff(a, b)) => {
            expect(1)?;
            in_ante(p)?;
            let (ab, ba) = (Formula::Imp(a.clone(), b.clone()), Formula::Imp(b.clone(), a.clone()));
            check_premise(0, &[&ab, &ba], kept, &[])?;
        }
        (Rule::IffR, Formula::Iff(a, b)) => {
            expect(2)?;
            in_succ(p)?;
            let (ab, ba) = (Formula::Imp(a.clone(), b.clone()), Formula::Imp(b.clone(), a.clone()));
            check_premise(0, &[], kept, &[&ab])?;
            check_premise(1, &[], kept, &[&ba])?;
        }
        (Rule::ForallL { term }, Formula::Forall(x, body)) => {
            expect(1)?;
            in_ante(p)?;
            if !is_closed(term) {
                return fail(format!("!L: instance {term} is not closed"));
            }
            let inst = subst(body, x, term.clone());
            check_premise(0, &[&inst], kept, &[])?;
        }
        (Rule::ExistsR { term }, Formula::Exists(x, body)) => {
            expect(1)?;
            in_succ(p)?;
            if !is_closed(term) {
                return fail(format!("?R: instance {term} is not closed"));
            }
            let inst = subst(body, x, term.clone());
            check_premise(0, &[], kept, &[&inst])?;
        }
        (Rule::ForallR { eigen }, Formula::Forall(x, body)) => {
            expect(1)?;
            in_succ(p)?;
            fresh(eigen, ante, succ).or_else(&fail)?;
            let inst = subst(body, x, Term::constant(eigen.clone()));
            check_premise(0, &[], critical, &[&inst])?;
        }
        (Rule::ExistsL { eigen }, Formula::Exists(x, body)) => {
            expect(1)?;
            in_ante(p)?;
            fresh(eigen, ante, succ).or_else(&fail)?;
            let inst = subst(body, x, Term::constant(eigen.clone()));
            check_premise(0, &[&inst], kept, &[])?;
        }
        (r, p) => return fail(format!("rule {} does not apply to {p}", r.name())),
    }
    for (i, prem) in n.premises.iter().enumerate() {
        check_node(prem, format!("{at}.{i}"), mode)?;
    }
    Ok(())
}

fn fresh(eigen: &str, ante: &[Formula], succ: &[Formula]) -> Result<(), String> {
    if ante.iter().chain(succ).any(|f| f.functors().contains(eigen)) {
        Err(format!("eigenvariable {eigen} occurs in the conclusion"))
    } else {
        Ok(())
    }
}
