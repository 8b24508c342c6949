use std::collections::BTreeSet;

use thiserror::Error;

use crate::matrix::{MTerm, Matrix, Mode, NodeId, PrefixChar};

use super::prefix::PrefixSubstitution;
use super::terms::TermSubstitution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdmissibilityError {
    #[error("term substitution is cyclic at variable {0}")]
    CyclicTerms(String),
    #[error("eigenvariable {skolem} is not available at the world of {var}")]
    Domain { var: String, skolem: String },
    #[error("reduction ordering has a cycle through {0}")]
    CyclicOrdering(String),
}

/// Pairs `(d, x)` such that the eigenvariable of position `d` occurs in the
/// fully resolved image of the quantifier variable introduced at `x`.
pub fn domain_pairs(m: &Matrix, sigma: &TermSubstitution) -> Vec<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for (v, t) in sigma.iter() {
        let x = m.var_info(v).node;
        sigma.apply(t).visit_syms(&mut |s| {
            if let Some(d) = m.symbol(s).skolem_of {
                out.insert((d, x));
            }
        });
    }
    out.into_iter().collect()
}

fn is_prefix(a: &[PrefixChar], b: &[PrefixChar]) -> bool {
    a.len() <= b.len() && a == &b[..a.len()]
}

/// Checks that the combined substitution is admissible: the term part is
/// acyclic, every eigenvariable used in the image of a variable exists at
/// that variable's world (intuitionistic mode), and the induced reduction
/// ordering is acyclic.
pub fn check_admissible(
    m: &Matrix,
    sigma_q: &TermSubstitution,
    sigma_j: &PrefixSubstitution,
) -> Result<(), AdmissibilityError> {
    if !sigma_q.is_acyclic() {
        let v = sigma_q
            .iter()
            .find(|(v, t)| sigma_q.apply(t).contains_var(*v))
            .map(|(v, _)| v)
            .or_else(|| sigma_q.iter().next().map(|(v, _)| v))
            .unwrap();
        return Err(AdmissibilityError::CyclicTerms(m.term_to_string(&MTerm::Var(v))));
    }
    let pairs = domain_pairs(m, sigma_q);
    if m.mode == Mode::Intuitionistic {
        for &(d, x) in &pairs {
            let pd = sigma_j.apply(m.prefix_of(d));
            let px = sigma_j.apply(m.prefix_of(x));
            if !is_prefix(&pd, &px) {
                return Err(AdmissibilityError::Domain {
                    var: m.node(x).id.clone(),
                    skolem: m.node(d).id.clone(),
                });
            }
        }
    }
    let n = m.len();
    let mut edges: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (i, p) in m.nodes() {
        edges[i].extend(p.children.iter().copied());
    }
    for &(d, x) in &pairs {
        edges[d].push(x);
    }
    if m.mode == Mode::Intuitionistic {
        for (v, img) in sigma_j.iter() {
            if v >= n {
                continue;
            }
            for c in img {
                if let PrefixChar::Const(c) = c {
                    if *c < n {
                        edges[*c].push(v);
                    }
                }
            }
        }
    }
    let mut indeg = vec![0usize; n];
    for es in &edges {
        for &e in es {
            indeg[e] += 1;
        }
    }
    let mut queue: Vec<NodeId> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut done = 0;
    while let Some(i) = queue.pop() {
        done += 1;
        for &e in &edges[i] {
            indeg[e] -= 1;
            if indeg[e] == 0 {
                queue.push(e);
            }
        }
    }
    if done < n {
        let bad = (0..n).find(|&i| indeg[i] > 0).unwrap();
        return Err(AdmissibilityError::CyclicOrdering(m.node(bad).id.clone()));
    }
    Ok(())
}
