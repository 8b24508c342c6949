//! Independent decision procedures for quantifier-free formulas, used to
//! cross-check the prover.
//!
//! Atoms are identified by their printed form, so ground first-order atoms
//! are treated as propositional letters.

mod g4ip;
mod kripke;

use std::collections::BTreeMap;

use crate::syntax::Formula;

pub use g4ip::g4ip_valid;
pub use kripke::{kripke_countermodel, KripkeModel};

/// Quantifier-free formula over numbered letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Prop {
    Bot,
    Var(u32),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Imp(Box<Prop>, Box<Prop>),
}

/// Converts a quantifier-free formula, numbering atoms in order of first
/// occurrence. `~A` becomes `A => false`, `A <=> B` becomes a conjunction
/// of implications.
pub(crate) fn to_prop(f: &Formula) -> Option<(Prop, Vec<String>)> {
    fn go(f: &Formula, atoms: &mut BTreeMap<String, u32>, names: &mut Vec<String>) -> Option<Prop> {
        use Prop::*;
        Some(match f {
            Formula::Atom(..) => {
                let key = f.to_string();
                let next = atoms.len() as u32;
                let id = *atoms.entry(key.clone()).or_insert_with(|| {
                    names.push(key);
                    next
                });
                Var(id)
            }
            Formula::Neg(a) => Imp(Box::new(go(a, atoms, names)?), Box::new(Bot)),
            Formula::And(a, b) => And(Box::new(go(a, atoms, names)?), Box::new(go(b, atoms, names)?)),
            Formula::Or(a, b) => Or(Box::new(go(a, atoms, names)?), Box::new(go(b, atoms, names)?)),
            Formula::Imp(a, b) => Imp(Box::new(go(a, atoms, names)?), Box::new(go(b, atoms, names)?)),
            Formula::Iff(a, b) => {
                let (a, b) = (go(a, atoms, names)?, go(b, atoms, names)?);
                And(
                    Box::new(Imp(Box::new(a.clone()), Box::new(b.clone()))),
                    Box::new(Imp(Box::new(b), Box::new(a))),
                )
            }
            Formula::Forall(..) | Formula::Exists(..) => return None,
        })
    }
    let mut atoms = BTreeMap::new();
    let mut names = Vec::new();
    let p = go(f, &mut atoms, &mut names)?;
    Some((p, names))
}

pub(crate) fn eval(p: &Prop, val: u32) -> bool {
    match p {
        Prop::Bot => false,
        Prop::Var(i) => val >> i & 1 == 1,
        Prop::And(a, b) => eval(a, val) && eval(b, val),
        Prop::Or(a, b) => eval(a, val) || eval(b, val),
        Prop::Imp(a, b) => !eval(a, val) || eval(b, val),
    }
}

/// Maximum number of letters accepted by [`classically_valid`].
pub const TRUTH_TABLE_ATOMS: usize = 20;

/// Classical validity by truth table. `None` if the formula has quantifiers
/// or more than [`TRUTH_TABLE_ATOMS`] letters.
pub fn classically_valid(f: &Formula) -> Option<bool> {
    let (p, names) = to_prop(f)?;
    if names.len() > TRUTH_TABLE_ATOMS {
        return None;
    }
    Some((0..1u32 << names.len()).all(|v| eval(&p, v)))
}

/// What the oracles say about a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub intuitionistic: bool,
    pub classical: bool,
}

/// Runs both decision procedures. `None` for formulas with quantifiers.
pub fn decide(f: &Formula) -> Option<Verdict> {
    Some(Verdict { intuitionistic: g4ip_valid(f)?, classical: classically_valid(f)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn truth_tables() {
        assert_eq!(classically_valid(&f("p | ~p")), Some(true));
        assert_eq!(classically_valid(&f("((p => q) => p) => p")), Some(true));
        assert_eq!(classically_valid(&f("p => q")), Some(false));
        assert_eq!(classically_valid(&f("! [X] : p(X)")), None);
    }

    #[test]
    fn g4ip_separates_intuitionistic_from_classical() {
        for s in ["p => p", "p => ~~p", "~~(p | ~p)", "((p | q) => r) <=> ((p => r) & (q => r))", "~~~p => ~p"] {
            assert_eq!(g4ip_valid(&f(s)), Some(true), "{s}");
        }
        for s in ["p | ~p", "~~p => p", "((p => q) => p) => p", "(p => q) | (q => p)", "p => q"] {
            assert_eq!(g4ip_valid(&f(s)), Some(false), "{s}");
        }
    }

    #[test]
    fn kripke_countermodels_refute_non_theorems() {
        for s in ["p | ~p", "~~p => p", "(p => q) | (q => p)", "~p | ~~p"] {
            let m = kripke_countermodel(&f(s), 4).unwrap_or_else(|| panic!("{s}"));
            assert!(!m.forces_root(&f(s)));
        }
        assert!(kripke_countermodel(&f("~~(p | ~p)"), 4).is_none());
    }
}
