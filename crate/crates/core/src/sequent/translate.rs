//! Certificate-guided sequent construction.
//!
//! A branch is a set of pending matrix positions: antecedent positions have
//! polarity 1, succedent positions polarity 0. Decomposing a position
//! replaces it by its children, and a branch closes by an axiom exactly
//! when it holds both atoms of a certificate connection. Quantifier
//! instances are read off the term substitution, eigenvariables are fresh
//! constants, one per eigenvariable position.
//!
//! Invertible rules go first. `=>L` and `~L` wait until every critical rule
//! whose constant occurs in the image of their prefix has been applied on
//! the branch. The critical rules (`=>R`, `~R`, `!R`), which discard the
//! rest of the succedent in intuitionistic mode, are chosen with
//! backtracking under a global step budget.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use super::{ProofNode, Rule, SequentProof};
use crate::certificate::{check_certificate, resolve_certificate, Certificate, CertificateError, Resolved};
use crate::matrix::{Connective, MTerm, Matrix, Mode, NodeId, Polarity, PrefixChar, SymId};
use crate::syntax::{Formula, Term};

/// Maximum number of branch expansions.
pub const STEP_BUDGET: u64 = 500_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("certificate rejected: {0}")]
    Certificate(#[from] CertificateError),
    #[error("no rule order closes the branch at {0}")]
    OrderingDeadlock(String),
}

/// Translates an accepted certificate into a sequent proof of `f`.
pub fn to_sequent(f: &Formula, c: &Certificate, mode: Mode) -> Result<SequentProof, TranslateError> {
    check_certificate(f, c, mode)?;
    let r = resolve_certificate(f, c, mode)?;
    let mut t = Translator::new(&r, f);
    let mut start = Branch::default();
    t.add(&mut start, r.matrix.root);
    match t.prove(&start) {
        Some(root) => Ok(SequentProof { mode, formula: f.clone(), root }),
        None => Err(TranslateError::OrderingDeadlock(t.deadlock.unwrap_or_else(|| "root".into()))),
    }
}

#[derive(Debug, Clone, Default)]
struct Branch {
    ante: Vec<NodeId>,
    succ: Vec<NodeId>,
    critical_done: BTreeSet<NodeId>,
    eigens: BTreeSet<String>,
}

impl Branch {
    fn without(&self, n: NodeId) -> Branch {
        let mut b = self.clone();
        b.ante.retain(|&x| x != n);
        b.succ.retain(|&x| x != n);
        b
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Invertible,
    /// Needs the eigenvariables of its instance.
    Instance,
    /// `=>L` or `~L`, ordered by the prefix substitution.
    Delayed,
    Critical,
}

struct Translator<'a> {
    r: &'a Resolved,
    m: &'a Matrix,
    conns: HashMap<(NodeId, NodeId), [String; 2]>,
    eigen_names: HashMap<(SymId, Vec<Term>), String>,
    taken: HashSet<String>,
    default_term: Term,
    formulas: HashMap<NodeId, Formula>,
    relevant: Vec<bool>,
    budget: u64,
    deadlock: Option<String>,
}

impl<'a> Translator<'a> {
    fn new(r: &'a Resolved, f: &Formula) -> Translator<'a> {
        let m = &r.matrix;
        let mut conns = HashMap::new();
        let mut relevant = vec![false; m.len()];
        for &(a, b) in &r.connections {
            let ids = [m.node(a).id.clone(), m.node(b).id.clone()];
            let key = if m.node(a).polarity == Polarity::One { (a, b) } else { (b, a) };
            conns.insert(key, ids);
            let mut n = Some(key.1);
            while let Some(i) = n {
                relevant[i] = true;
                n = m.node(i).parent;
            }
        }
        let taken: HashSet<String> = f.functors().into_iter().collect();
        let mut t = Translator {
            r,
            m,
            conns,
            eigen_names: HashMap::new(),
            taken,
            default_term: Term::constant("o"),
            formulas: HashMap::new(),
            relevant,
            budget: STEP_BUDGET,
            deadlock: None,
        };
        let name = t.fresh_name("o");
        t.default_term = Term::constant(name);
        t
    }

    fn fresh_name(&mut self, base: &str) -> String {
        let mut k = 0;
        loop {
            let name = if k == 0 && base == "o" { base.to_string() } else { format!("{base}{k}") };
            if self.taken.insert(name.clone()) {
                return name;
            }
            k += 1;
        }
    }

    fn term(&mut self, t: &MTerm) -> Term {
        let t = self.r.sigma_q.apply(t);
        self.conv(&t)
    }

    fn conv(&mut self, t: &MTerm) -> Term {
        match t {
            MTerm::Var(_) => self.default_term.clone(),
            MTerm::App(s, args) => {
                let args: Vec<Term> = args.iter().map(|a| self.conv(a)).collect();
                let info = self.m.symbol(*s);
                if info.skolem_of.is_some() {
                    let key = (*s, args);
                    if let Some(n) = self.eigen_names.get(&key) {
                        return Term::constant(n.clone());
                    }
                    let name = self.fresh_name("sk");
                    self.eigen_names.insert(key, name.clone());
                    Term::constant(name)
                } else {
                    Term::App(info.name.clone(), args)
                }
            }
        }
    }

    fn formula(&mut self, n: NodeId) -> Formula {
        if let Some(f) = self.formulas.get(&n) {
            return f.clone();
        }
        let pos = self.m.node(n);
        let map: HashMap<String, Term> =
            pos.bindings().to_vec().iter().map(|(x, t)| (x.clone(), self.term(t))).collect();
        let f = pos.label.instantiate(&map);
        self.formulas.insert(n, f.clone());
        f
    }

    fn add(&self, b: &mut Branch, n: NodeId) {
        let pos = self.m.node(n);
        if pos.is_group() {
            for &c in &pos.children {
                self.add(b, c);
            }
        } else if pos.polarity == Polarity::One {
            b.ante.push(n);
        } else {
            b.succ.push(n);
        }
    }

    fn kind(&self, n: NodeId) -> Option<Kind> {
        let pos = self.m.node(n);
        Some(match (pos.connective, pos.polarity) {
            (Connective::Atom, _) => return None,
            (Connective::Imp | Connective::Neg, Polarity::One) => Kind::Delayed,
            (Connective::Imp | Connective::Neg | Connective::Forall, Polarity::Zero) => Kind::Critical,
            (Connective::Forall, Polarity::One) | (Connective::Exists, Polarity::Zero) => Kind::Instance,
            _ => Kind::Invertible,
        })
    }

    /// Eigenvariable names the instance term of quantifier position `n` uses.
    fn instance_eigens(&mut self, n: NodeId) -> Vec<String> {
        let v = self.m.node(n).var.expect("instance positions carry a variable");
        let t = self.r.sigma_q.apply(&MTerm::Var(v));
        let mut out = Vec::new();
        self.collect_eigens(&t, &mut out);
        out
    }

    fn collect_eigens(&mut self, t: &MTerm, out: &mut Vec<String>) {
        if let MTerm::App(s, args) = t {
            if self.m.symbol(*s).skolem_of.is_some() {
                if let Term::App(name, _) = self.conv(t) {
                    out.push(name);
                }
            }
            for a in args {
                self.collect_eigens(a, out);
            }
        }
    }

    /// Whether every critical rule in the prefix image of `n` is done.
    fn prefix_ready(&self, b: &Branch, n: NodeId) -> bool {
        if self.m.mode == Mode::Classical {
            return true;
        }
        self.r.sigma_j.apply(self.m.prefix_of(n)).iter().all(|c| match c {
            PrefixChar::Const(k) => self.m.node(*k).is_atom() || b.critical_done.contains(k),
            PrefixChar::Var(_) => true,
        })
    }

    fn sequent(&mut self, b: &Branch) -> (Vec<Formula>, Vec<Formula>) {
        let mut ante: Vec<Formula> = Vec::new();
        for &n in &b.ante {
            let f = self.formula(n);
            if !ante.contains(&f) {
                ante.push(f);
            }
        }
        let mut succ: Vec<Formula> = Vec::new();
        for &n in &b.succ {
            let f = self.formula(n);
            if !succ.contains(&f) {
                succ.push(f);
            }
        }
        (ante, succ)
    }

    fn prove(&mut self, b: &Branch) -> Option<ProofNode> {
        if self.budget == 0 {
            return None;
        }
        self.budget -= 1;
        let (ante, succ) = self.sequent(b);
        for &a in &b.ante {
            for &s in &b.succ {
                if let Some(ids) = self.conns.get(&(a, s)) {
                    let ids = ids.clone();
                    let principal = self.formula(a);
                    return Some(ProofNode {
                        rule: Rule::Axiom,
                        ante,
                        succ,
                        principal,
                        premises: Vec::new(),
                        connection: Some(ids),
                    });
                }
            }
        }
        let pending: Vec<NodeId> = b.ante.iter().chain(&b.succ).copied().collect();
        for &n in &pending {
            match self.kind(n) {
                Some(Kind::Invertible) => return self.apply(b, n, ante, succ),
                Some(Kind::Instance)
                    if self.instance_eigens(n).iter().all(|e| b.eigens.contains(e)) => {
                        return self.apply(b, n, ante, succ);
                    }
                _ => {}
            }
        }
        for &n in &pending {
            if self.kind(n) == Some(Kind::Delayed) && self.prefix_ready(b, n) {
                return self.apply(b, n, ante, succ);
            }
        }
        let mut choices: Vec<NodeId> = b.succ.iter().copied().filter(|&n| self.kind(n) == Some(Kind::Critical)).collect();
        choices.sort_by_key(|&n| !self.relevant[n]);
        choices.extend(b.ante.iter().copied().filter(|&n| self.kind(n) == Some(Kind::Delayed)));
        for n in choices {
            if let Some(p) = self.apply(b, n, ante.clone(), succ.clone()) {
                return Some(p);
            }
            if self.budget == 0 {
                break;
            }
        }
        if self.deadlock.is_none() {
            let show: Vec<String> = pending.iter().map(|&n| self.m.node(n).id.clone()).collect();
            self.deadlock = Some(show.join(" "));
        }
        None
    }

    fn apply(&mut self, b: &Branch, n: NodeId, ante: Vec<Formula>, succ: Vec<Formula>) -> Option<ProofNode> {
        let pos = self.m.node(n);
        let kids = pos.children.clone();
        let principal = self.formula(n);
        let pol = pos.polarity;
        let base = b.without(n);
        let single = |t: &Self, extra: &[NodeId], b: Branch| {
            let mut b = b;
            for &k in extra {
                t.add(&mut b, k);
            }
            vec![b]
        };
        let (rule, branches) = match (pos.connective, pol) {
            (Connective::And, Polarity::One) => (Rule::AndL, single(self, &kids, base)),
            (Connective::Or, Polarity::Zero) => (Rule::OrR, single(self, &kids, base)),
            (Connective::Iff, Polarity::One) => (Rule::IffL, single(self, &kids, base)),
            (Connective::Or, Polarity::One) | (Connective::And, Polarity::Zero) | (Connective::Iff, Polarity::Zero) => {
                let rule = match pos.connective {
                    Connective::Or => Rule::OrL,
                    Connective::And => Rule::AndR,
                    _ => Rule::IffR,
                };
                let bs = kids.iter().map(|&k| single(self, &[k], base.clone()).remove(0)).collect();
                (rule, bs)
            }
            (Connective::Imp, Polarity::One) => {
                let bs = kids.iter().map(|&k| single(self, &[k], base.clone()).remove(0)).collect();
                (Rule::ImpL, bs)
            }
            (Connective::Neg, Polarity::One) => (Rule::NotL, single(self, &kids, base)),
            (Connective::Forall, Polarity::One) | (Connective::Exists, Polarity::Zero) => {
                let v = pos.var.expect("instance positions carry a variable");
                let term = self.term(&MTerm::Var(v));
                let rule = if pos.connective == Connective::Forall { Rule::ForallL { term } } else { Rule::ExistsR { term } };
                (rule, single(self, &kids, base))
            }
            (Connective::Exists, Polarity::One) | (Connective::Forall, Polarity::Zero) => {
                let sk = pos.skolem.clone().expect("eigenvariable positions carry a Skolem term");
                let Term::App(eigen, _) = self.term(&sk) else { unreachable!("Skolem terms translate to constants") };
                let mut bb = base;
                if pol == Polarity::Zero {
                    bb.critical_done.insert(n);
                    if self.m.mode == Mode::Intuitionistic {
                        bb.succ.clear();
                    }
                }
                bb.eigens.insert(eigen.clone());
                let rule = if pol == Polarity::One { Rule::ExistsL { eigen } } else { Rule::ForallR { eigen } };
                (rule, single(self, &kids, bb))
            }
            (Connective::Imp | Connective::Neg, Polarity::Zero) => {
                let mut bb = base;
                bb.critical_done.insert(n);
                if self.m.mode == Mode::Intuitionistic {
                    bb.succ.clear();
                }
                let rule = if pos.connective == Connective::Imp { Rule::ImpR } else { Rule::NotR };
                (rule, single(self, &kids, bb))
            }
            (Connective::Atom | Connective::Copies, _) => unreachable!("atoms and groups are not decomposed"),
        };
        let mut premises = Vec::with_capacity(branches.len());
        for bb in &branches {
            premises.push(self.prove(bb)?);
        }
        Some(ProofNode { rule, ante, succ, principal, premises, connection: None })
    }
}
