use std::collections::BTreeMap;

use thiserror::Error;

use crate::matrix::{MTerm, Matrix, NodeId, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("symbol clash")]
    Clash,
    #[error("occurs check")]
    Occurs,
    #[error("atoms are not connectable (predicate or polarity)")]
    NotConnectable,
}

/// Variable bindings that unification can read and extend.
pub trait Bindings {
    fn lookup(&self, v: VarId) -> Option<&MTerm>;
    fn bind(&mut self, v: VarId, t: MTerm);
}

fn walk<'a, B: Bindings + ?Sized>(b: &'a B, mut t: &'a MTerm) -> &'a MTerm {
    while let MTerm::Var(v) = t {
        match b.lookup(*v) {
            Some(u) => t = u,
            None => break,
        }
    }
    t
}

fn occurs<B: Bindings + ?Sized>(b: &B, v: VarId, t: &MTerm) -> bool {
    match walk(b, t) {
        MTerm::Var(w) => *w == v,
        MTerm::App(_, args) => args.iter().any(|a| occurs(b, v, a)),
    }
}

/// Syntactic unification with occurs check, extending `b` in place. On
/// error `b` may hold partial bindings; callers roll back.
pub fn unify<B: Bindings + ?Sized>(b: &mut B, s: &MTerm, t: &MTerm) -> Result<(), UnifyError> {
    let (s, t) = (walk(b, s).clone(), walk(b, t).clone());
    match (&s, &t) {
        (MTerm::Var(x), MTerm::Var(y)) if x == y => Ok(()),
        (MTerm::Var(x), _) => {
            if occurs(b, *x, &t) {
                return Err(UnifyError::Occurs);
            }
            b.bind(*x, t);
            Ok(())
        }
        (_, MTerm::Var(y)) => {
            if occurs(b, *y, &s) {
                return Err(UnifyError::Occurs);
            }
            b.bind(*y, s);
            Ok(())
        }
        (MTerm::App(f, xs), MTerm::App(g, ys)) => {
            if f != g || xs.len() != ys.len() {
                return Err(UnifyError::Clash);
            }
            xs.iter().zip(ys).try_for_each(|(x, y)| unify(b, x, y))
        }
    }
}

pub fn unify_lists<B: Bindings + ?Sized>(b: &mut B, xs: &[MTerm], ys: &[MTerm]) -> Result<(), UnifyError> {
    if xs.len() != ys.len() {
        return Err(UnifyError::Clash);
    }
    xs.iter().zip(ys).try_for_each(|(x, y)| unify(b, x, y))
}

/// Applies bindings exhaustively. Loops are cut at `Var` (callers check
/// acyclicity separately where it matters).
pub fn resolve<B: Bindings + ?Sized>(b: &B, t: &MTerm) -> MTerm {
    fn go<B: Bindings + ?Sized>(b: &B, t: &MTerm, seen: &mut Vec<VarId>) -> MTerm {
        match t {
            MTerm::Var(v) => {
                if seen.contains(v) {
                    return t.clone();
                }
                match b.lookup(*v) {
                    Some(u) => {
                        seen.push(*v);
                        let r = go(b, u, seen);
                        seen.pop();
                        r
                    }
                    None => t.clone(),
                }
            }
            MTerm::App(f, args) => MTerm::App(*f, args.iter().map(|a| go(b, a, seen)).collect()),
        }
    }
    go(b, t, &mut Vec::new())
}

/// The term substitution over quantifier variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermSubstitution {
    map: BTreeMap<VarId, MTerm>,
}

impl Bindings for TermSubstitution {
    fn lookup(&self, v: VarId) -> Option<&MTerm> {
        self.map.get(&v)
    }

    fn bind(&mut self, v: VarId, t: MTerm) {
        self.map.insert(v, t);
    }
}

impl TermSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_map(map: BTreeMap<VarId, MTerm>) -> Self {
        TermSubstitution { map }
    }

    pub fn get(&self, v: VarId) -> Option<&MTerm> {
        self.map.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &MTerm)> {
        self.map.iter().map(|(&v, t)| (v, t))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, t: &MTerm) -> MTerm {
        resolve(self, t)
    }

    /// True if no variable transitively maps to a term containing itself.
    pub fn is_acyclic(&self) -> bool {
        self.map.keys().all(|&v| {
            let mut stack = vec![v];
            let mut seen = std::collections::BTreeSet::new();
            while let Some(w) = stack.pop() {
                if let Some(t) = self.map.get(&w) {
                    let mut hit = false;
                    t.visit_vars(&mut |u| {
                        if u == v {
                            hit = true;
                        } else if seen.insert(u) {
                            stack.push(u);
                        }
                    });
                    if hit {
                        return false;
                    }
                }
            }
            true
        })
    }

    /// The same substitution with every image fully applied.
    pub fn normalized(&self) -> TermSubstitution {
        TermSubstitution { map: self.map.iter().map(|(&v, t)| (v, resolve(self, t))).collect() }
    }
}

/// Most general extension of `sigma` making the arguments of atoms `a` and
/// `b` equal. The atoms must share a predicate and differ in polarity.
pub fn unify_atoms(m: &Matrix, a: NodeId, b: NodeId, sigma: &TermSubstitution) -> Result<TermSubstitution, UnifyError> {
    let (pa, pb) = (m.node(a), m.node(b));
    let ((sa, xs), (sb, ys)) = match (&pa.atom, &pb.atom) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(UnifyError::NotConnectable),
    };
    if sa != sb || pa.polarity == pb.polarity {
        return Err(UnifyError::NotConnectable);
    }
    let mut out = sigma.clone();
    unify_lists(&mut out, xs, ys)?;
    Ok(out)
}

/// Trail-based bindings with O(1) mark and undo, used by the search.
#[derive(Debug, Clone, Default)]
pub struct Trail {
    slots: Vec<Option<MTerm>>,
    trail: Vec<VarId>,
}

impl Bindings for Trail {
    fn lookup(&self, v: VarId) -> Option<&MTerm> {
        self.slots.get(v as usize).and_then(Option::as_ref)
    }

    fn bind(&mut self, v: VarId, t: MTerm) {
        let i = v as usize;
        if self.slots.len() <= i {
            self.slots.resize(i + 1, None);
        }
        self.slots[i] = Some(t);
        self.trail.push(v);
    }
}

impl Trail {
    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.slots[v as usize] = None;
        }
    }

    pub fn to_substitution(&self) -> TermSubstitution {
        let map = self
            .slots
            .iter()
            .enumerate()
            .filter_map(|(v, t)| t.as_ref().map(|t| (v as VarId, resolve(self, t))))
            .collect();
        TermSubstitution { map }
    }
}
