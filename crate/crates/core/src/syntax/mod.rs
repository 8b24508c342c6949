//! Terms, formulas, the TPTP FOF reader and the canonical printer.

mod parser;
mod print;

use std::collections::{BTreeSet, HashMap, HashSet};

pub use parser::{parse_formula, parse_problem, parse_term, ParseError, ParseErrorKind};
pub use print::print_formula;

/// A first-order term. Constants are zero-arity applications.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn collect_functors(&self, out: &mut BTreeSet<String>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|a| a.collect_functors(out));
        }
    }

    /// Replaces free occurrences of variables according to `map`.
    pub fn substitute(&self, map: &HashMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(map)).collect()),
        }
    }

    fn rename(&self, map: &HashMap<String, String>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(map)).collect()),
        }
    }
}

/// A first-order formula. `Iff` is kept primitive; it is only unfolded
/// when the matrix is built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom(pred.into(), args)
    }

    pub fn prop(pred: impl Into<String>) -> Self {
        Formula::Atom(pred.into(), Vec::new())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(..))
    }

    /// True if the formula has no quantifiers and every atom is 0-ary.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Atom(_, args) => args.is_empty(),
            Formula::Neg(a) => a.is_propositional(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    /// Number of connectives and quantifiers.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) => 0,
            Formula::Neg(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_vars_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => {
                let mut vs = BTreeSet::new();
                args.iter().for_each(|a| a.collect_vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Neg(a) => a.free_vars_into(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.free_vars_into(bound, out);
                b.free_vars_into(bound, out);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                bound.push(v.clone());
                a.free_vars_into(bound, out);
                bound.pop();
            }
        }
    }

    /// Function and constant symbols occurring in the formula.
    pub fn functors(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |_, args| args.iter().for_each(|a| a.collect_functors(&mut out)));
        out
    }

    /// Predicate symbols occurring in the formula.
    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |p, _| {
            out.insert(p.to_string());
        });
        out
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut dyn FnMut(&'a str, &'a [Term])) {
        match self {
            Formula::Atom(p, args) => f(p, args),
            Formula::Neg(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    /// Substitutes closed terms for free variables. The caller guarantees
    /// that the replacement terms are closed, so no capture can occur.
    pub fn instantiate(&self, map: &HashMap<String, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.substitute(map)).collect()),
            Formula::Neg(a) => Formula::neg(a.instantiate(map)),
            Formula::And(a, b) => Formula::and(a.instantiate(map), b.instantiate(map)),
            Formula::Or(a, b) => Formula::or(a.instantiate(map), b.instantiate(map)),
            Formula::Imp(a, b) => Formula::imp(a.instantiate(map), b.instantiate(map)),
            Formula::Iff(a, b) => Formula::iff(a.instantiate(map), b.instantiate(map)),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let body = if map.contains_key(v) {
                    let mut inner = map.clone();
                    inner.remove(v);
                    a.instantiate(&inner)
                } else {
                    a.instantiate(map)
                };
                if matches!(self, Formula::Forall(..)) {
                    Formula::forall(v.clone(), body)
                } else {
                    Formula::exists(v.clone(), body)
                }
            }
        }
    }

    /// Renames bound variables so that every binder in the formula binds a
    /// distinct name that is also distinct from every free variable.
    /// Already-unique formulas are returned unchanged.
    pub fn alpha_normalize(&self) -> Formula {
        let mut used: HashSet<String> = self.free_vars().into_iter().collect();
        let mut scope = HashMap::new();
        self.alpha_rec(&mut used, &mut scope)
    }

    fn alpha_rec(&self, used: &mut HashSet<String>, scope: &mut HashMap<String, String>) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.rename(scope)).collect()),
            Formula::Neg(a) => Formula::neg(a.alpha_rec(used, scope)),
            Formula::And(a, b) => Formula::and(a.alpha_rec(used, scope), b.alpha_rec(used, scope)),
            Formula::Or(a, b) => Formula::or(a.alpha_rec(used, scope), b.alpha_rec(used, scope)),
            Formula::Imp(a, b) => Formula::imp(a.alpha_rec(used, scope), b.alpha_rec(used, scope)),
            Formula::Iff(a, b) => Formula::iff(a.alpha_rec(used, scope), b.alpha_rec(used, scope)),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let fresh = if used.contains(v) {
                    (1..).map(|i| format!("{v}_{i}")).find(|n| !used.contains(n)).unwrap()
                } else {
                    v.clone()
                };
                used.insert(fresh.clone());
                let saved = scope.insert(v.clone(), fresh.clone());
                let body = a.alpha_rec(used, scope);
                match saved {
                    Some(s) => scope.insert(v.clone(), s),
                    None => scope.remove(v),
                };
                if matches!(self, Formula::Forall(..)) {
                    Formula::forall(fresh, body)
                } else {
                    Formula::exists(fresh, body)
                }
            }
        }
    }
}

/// Alpha-equivalence: equal up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    fn term_eq(s: &Term, t: &Term, env: &[(String, String)]) -> bool {
        match (s, t) {
            (Term::Var(x), Term::Var(y)) => {
                let lx = env.iter().rposition(|(l, _)| l == x);
                let ry = env.iter().rposition(|(_, r)| r == y);
                match (lx, ry) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env))
            }
            _ => false,
        }
    }
    fn go(a: &Formula, b: &Formula, env: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env))
            }
            (Formula::Neg(x), Formula::Neg(y)) => go(x, y, env),
            (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::Imp(a1, a2), Formula::Imp(b1, b2))
            | (Formula::Iff(a1, a2), Formula::Iff(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
            (Formula::Forall(x, a1), Formula::Forall(y, b1)) | (Formula::Exists(x, a1), Formula::Exists(y, b1)) => {
                env.push((x.clone(), y.clone()));
                let r = go(a1, b1, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_normalization_makes_binders_unique() {
        let p = |v: &str| Formula::atom("p", vec![Term::var(v)]);
        let f = Formula::and(Formula::forall("X", p("X")), Formula::exists("X", p("X")));
        let g = f.alpha_normalize();
        assert_eq!(g, Formula::and(Formula::forall("X", p("X")), Formula::exists("X_1", p("X_1"))));
        assert_eq!(g.alpha_normalize(), g);
        assert!(alpha_eq(&f, &g));
    }

    #[test]
    fn alpha_eq_distinguishes_binding_structure() {
        let r = |a: &str, b: &str| Formula::atom("r", vec![Term::var(a), Term::var(b)]);
        let f = Formula::forall("X", Formula::forall("Y", r("X", "Y")));
        let g = Formula::forall("Y", Formula::forall("X", r("Y", "X")));
        let h = Formula::forall("X", Formula::forall("Y", r("Y", "X")));
        assert!(alpha_eq(&f, &g));
        assert!(!alpha_eq(&f, &h));
    }

    #[test]
    fn instantiate_respects_shadowing() {
        let f = Formula::and(
            Formula::atom("p", vec![Term::var("X")]),
            Formula::forall("X", Formula::atom("q", vec![Term::var("X")])),
        );
        let map = HashMap::from([("X".to_string(), Term::constant("a"))]);
        let g = f.instantiate(&map);
        assert_eq!(
            g,
            Formula::and(
                Formula::atom("p", vec![Term::constant("a")]),
                Formula::forall("X", Formula::atom("q", vec![Term::var("X")])),
            )
        );
    }
}
