//! Prefix (string) unification.
//!
//! Equations are between strings of prefix variables and prefix
//! constants. Solutions are enumerated depth-first with the usual
//! string-unification splitting rules: a leading variable facing a constant
//! is either empty or starts with that constant; two distinct leading
//! variables are either empty, equal, or one is a proper prefix of the
//! other. Variables may be mapped to the empty string.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;

use crate::matrix::{NodeId, PrefixChar};

/// Base index for auxiliary variables introduced by callers (for example
/// the trailing variable of a prefix-order constraint).
pub const AUX_BASE: NodeId = 1 << 40;
/// Base index for variables introduced while splitting.
const FRESH_BASE: NodeId = 1 << 48;

pub type Equation = (Vec<PrefixChar>, Vec<PrefixChar>);

/// String substitution over prefix variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixSubstitution {
    map: BTreeMap<NodeId, Vec<PrefixChar>>,
    fresh: NodeId,
}

impl PrefixSubstitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_map(map: BTreeMap<NodeId, Vec<PrefixChar>>) -> Self {
        PrefixSubstitution { map, fresh: 0 }
    }

    pub fn get(&self, v: NodeId) -> Option<&Vec<PrefixChar>> {
        self.map.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &Vec<PrefixChar>)> {
        self.map.iter().map(|(&v, s)| (v, s))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn bind(&mut self, v: NodeId, s: Vec<PrefixChar>) {
        self.map.insert(v, s);
    }

    /// Applies the substitution exhaustively.
    pub fn apply(&self, s: &[PrefixChar]) -> Vec<PrefixChar> {
        let mut out = Vec::with_capacity(s.len());
        self.apply_into(s, &mut out, 0);
        out
    }

    fn apply_into(&self, s: &[PrefixChar], out: &mut Vec<PrefixChar>, depth: usize) {
        for &c in s {
            match c {
                PrefixChar::Var(v) if depth < 256 => match self.map.get(&v) {
                    Some(img) => self.apply_into(img, out, depth + 1),
                    None => out.push(c),
                },
                _ => out.push(c),
            }
        }
    }

    /// Binds each of `vars` to its image with all variables erased, which
    /// amounts to mapping every unbound variable to the empty string. The
    /// result solves every system this substitution solves whose variables
    /// are among `vars`.
    pub fn grounded(&self, vars: impl IntoIterator<Item = NodeId>) -> PrefixSubstitution {
        let map = vars
            .into_iter()
            .map(|v| {
                let img = self.apply(&[PrefixChar::Var(v)]).into_iter().filter(|c| matches!(c, PrefixChar::Const(_))).collect();
                (v, img)
            })
            .collect();
        PrefixSubstitution { map, fresh: 0 }
    }

    pub fn solves(&self, eqs: &[Equation]) -> bool {
        eqs.iter().all(|(l, r)| self.apply(l) == self.apply(r))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PrefixLimits {
    /// Maximum number of alternative solutions consumed per equation.
    pub alternatives: usize,
    /// Maximum number of splitting steps per solver call.
    pub fuel: usize,
    /// Maximum nesting of splitting steps within one equation.
    pub depth: usize,
}

impl Default for PrefixLimits {
    fn default() -> Self {
        PrefixLimits { alternatives: 16, fuel: 20_000, depth: 48 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Enough,
    Stop,
}

struct Solver<'a> {
    eqs: &'a [Equation],
    limits: PrefixLimits,
    steps: usize,
    map: FxHashMap<NodeId, Vec<PrefixChar>>,
    trail: Vec<NodeId>,
    fresh: NodeId,
    emit: &'a mut dyn FnMut(&PrefixSubstitution) -> bool,
}

impl Solver<'_> {
    fn bind(&mut self, v: NodeId, img: Vec<PrefixChar>) {
        self.map.insert(v, img);
        self.trail.push(v);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.map.remove(&v);
        }
    }

    fn fresh_var(&mut self) -> PrefixChar {
        let v = FRESH_BASE + self.fresh;
        self.fresh += 1;
        PrefixChar::Var(v)
    }

    fn apply(&self, s: &[PrefixChar]) -> Vec<PrefixChar> {
        fn go(map: &FxHashMap<NodeId, Vec<PrefixChar>>, s: &[PrefixChar], out: &mut Vec<PrefixChar>, depth: usize) {
            for &c in s {
                match c {
                    PrefixChar::Var(v) if depth < 256 => match map.get(&v) {
                        Some(img) => go(map, img, out, depth + 1),
                        None => out.push(c),
                    },
                    _ => out.push(c),
                }
            }
        }
        let mut out = Vec::with_capacity(s.len());
        go(&self.map, s, &mut out, 0);
        out
    }

    fn solve_from(&mut self, i: usize) -> Flow {
        if i == self.eqs.len() {
            let sol = PrefixSubstitution { map: self.map.iter().map(|(&v, s)| (v, s.clone())).collect(), fresh: self.fresh };
            return if (self.emit)(&sol) { Flow::Stop } else { Flow::Continue };
        }
        let l = self.apply(&self.eqs[i].0);
        let r = self.apply(&self.eqs[i].1);
        let mut count = 0;
        match self.split(&l, &r, i, &mut count, 0) {
            Flow::Stop => Flow::Stop,
            _ => Flow::Continue,
        }
    }

    fn succeed(&mut self, i: usize, count: &mut usize) -> Flow {
        *count += 1;
        match self.solve_from(i + 1) {
            Flow::Stop => Flow::Stop,
            _ if *count >= self.limits.alternatives => Flow::Enough,
            _ => Flow::Continue,
        }
    }

    /// Tries binding `v` to `img`, then continues with the equation.
    #[allow(clippy::too_many_arguments)]
    fn branch(&mut self, v: NodeId, img: Vec<PrefixChar>, l: &[PrefixChar], r: &[PrefixChar], i: usize, count: &mut usize, depth: usize) -> Flow {
        let mark = self.trail.len();
        let (l2, r2) = (replace(l, v, &img), replace(r, v, &img));
        self.bind(v, img);
        let f = self.split(&l2, &r2, i, count, depth + 1);
        self.undo(mark);
        f
    }

    fn split(&mut self, l: &[PrefixChar], r: &[PrefixChar], i: usize, count: &mut usize, depth: usize) -> Flow {
        self.steps += 1;
        if self.steps > self.limits.fuel || depth > self.limits.depth {
            return Flow::Continue;
        }
        let common = l.iter().zip(r).take_while(|(a, b)| a == b).count();
        let (l, r) = (&l[common..], &r[common..]);
        let tail = l.iter().rev().zip(r.iter().rev()).take_while(|(a, b)| a == b).count();
        let (l, r) = (&l[..l.len() - tail], &r[..r.len() - tail]);
        if !feasible(l, r) || !feasible(r, l) {
            return Flow::Continue;
        }
        match (l.first().copied(), r.first().copied()) {
            (None, None) => self.succeed(i, count),
            (None, Some(_)) | (Some(_), None) => {
                let rest = if l.is_empty() { r } else { l };
                let mark = self.trail.len();
                for c in rest {
                    self.bind(c.node(), Vec::new());
                }
                let f = self.succeed(i, count);
                self.undo(mark);
                f
            }
            (Some(PrefixChar::Const(_)), Some(PrefixChar::Const(_))) => Flow::Continue,
            (Some(PrefixChar::Var(x)), Some(c @ PrefixChar::Const(_)))
            | (Some(c @ PrefixChar::Const(_)), Some(PrefixChar::Var(x))) => {
                let f = self.branch(x, Vec::new(), l, r, i, count, depth);
                if f != Flow::Continue {
                    return f;
                }
                let x2 = self.fresh_var();
                self.branch(x, vec![c, x2], l, r, i, count, depth)
            }
            (Some(PrefixChar::Var(x)), Some(PrefixChar::Var(y))) => {
                // Every solution has x a prefix of y or y a prefix of x.
                // When both occur once, the two splits shrink the equation
                // and their solutions cover the empty images. Otherwise the
                // empty images go first, so depth-first search does not
                // descend forever.
                let linear = [x, y].iter().all(|&v| l.iter().chain(r).filter(|c| **c == PrefixChar::Var(v)).count() == 1);
                for v in [x, y].into_iter().filter(|_| !linear) {
                    let f = self.branch(v, Vec::new(), l, r, i, count, depth);
                    if f != Flow::Continue {
                        return f;
                    }
                }
                let x2 = self.fresh_var();
                let f = self.branch(y, vec![PrefixChar::Var(x), x2], l, r, i, count, depth);
                if f != Flow::Continue {
                    return f;
                }
                let y2 = self.fresh_var();
                self.branch(x, vec![PrefixChar::Var(y), y2], l, r, i, count, depth)
            }
        }
    }
}

/// `s` with `v` replaced by `img`. Enough for strings that are already
/// fully applied when `img` contains only unbound variables.
fn replace(s: &[PrefixChar], v: NodeId, img: &[PrefixChar]) -> Vec<PrefixChar> {
    let mut out = Vec::with_capacity(s.len() + img.len());
    for &c in s {
        if c == PrefixChar::Var(v) {
            out.extend_from_slice(img);
        } else {
            out.push(c);
        }
    }
    out
}

/// Cheap necessary condition: if `a` has no variables, the constants of
/// `b` must appear in `a` in order, and the strings must end alike.
fn feasible(a: &[PrefixChar], b: &[PrefixChar]) -> bool {
    if let (Some(PrefixChar::Const(x)), Some(PrefixChar::Const(y))) = (a.last(), b.last()) {
        if x != y {
            return false;
        }
    }
    if a.iter().any(|c| matches!(c, PrefixChar::Var(_))) {
        return true;
    }
    let mut it = a.iter();
    b.iter().filter(|c| matches!(c, PrefixChar::Const(_))).all(|c| it.any(|d| d == c))
}

/// Calls `emit` with each solution extending `start` of all equations, in
/// a fixed order, until `emit` returns `true`. Returns `true` if stopped by
/// `emit`.
pub fn for_each_unifier(
    eqs: &[Equation],
    start: &PrefixSubstitution,
    limits: PrefixLimits,
    emit: &mut dyn FnMut(&PrefixSubstitution) -> bool,
) -> bool {
    let mut solver = Solver {
        eqs,
        limits,
        steps: 0,
        map: start.map.iter().map(|(&v, s)| (v, s.clone())).collect(),
        trail: Vec::new(),
        fresh: start.fresh,
        emit,
    };
    solver.solve_from(0) == Flow::Stop
}

/// The first solution found, if any.
pub fn solve_prefixes(eqs: &[Equation], start: &PrefixSubstitution, limits: PrefixLimits) -> Option<PrefixSubstitution> {
    let mut found = None;
    for_each_unifier(eqs, start, limits, &mut |s| {
        found = Some(s.clone());
        true
    });
    found
}

/// Enumerates distinct solutions (as restricted to the variables of the
/// equations and `start`), at most `limits.alternatives` of them.
pub fn unify_prefixes(eqs: &[Equation], start: &PrefixSubstitution, limits: PrefixLimits) -> Vec<PrefixSubstitution> {
    let vars: BTreeSet<NodeId> = eqs
        .iter()
        .flat_map(|(l, r)| l.iter().chain(r))
        .filter_map(|c| match c {
            PrefixChar::Var(v) => Some(*v),
            _ => None,
        })
        .chain(start.map.keys().copied())
        .collect();
    let mut out: Vec<PrefixSubstitution> = Vec::new();
    let mut seen = BTreeSet::new();
    for_each_unifier(eqs, start, PrefixLimits { alternatives: usize::MAX, ..limits }, &mut |s| {
        let key: Vec<(NodeId, Vec<PrefixChar>)> = vars.iter().map(|&v| (v, s.apply(&[PrefixChar::Var(v)]))).collect();
        if seen.insert(key) {
            out.push(s.clone());
        }
        out.len() >= limits.alternatives
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use PrefixChar::{Const as C, Var as V};

    fn lim() -> PrefixLimits {
        PrefixLimits::default()
    }

    #[test]
    fn variable_against_constant() {
        let eqs = vec![(vec![C(0), V(1)], vec![C(0), C(2)])];
        let s = solve_prefixes(&eqs, &PrefixSubstitution::new(), lim()).unwrap();
        assert_eq!(s.apply(&[V(1)]), vec![C(2)]);
    }

    #[test]
    fn rigid_clash_has_no_solution() {
        let eqs = vec![(vec![C(0), V(1)], vec![C(2)])];
        assert!(solve_prefixes(&eqs, &PrefixSubstitution::new(), lim()).is_none());
        assert!(unify_prefixes(&eqs, &PrefixSubstitution::new(), lim()).is_empty());
    }

    #[test]
    fn every_enumerated_solution_solves_the_system() {
        let eqs = vec![
            (vec![V(1), C(2), V(3)], vec![V(4), C(5)]),
            (vec![V(4)], vec![C(6), V(7)]),
        ];
        let sols = unify_prefixes(&eqs, &PrefixSubstitution::new(), lim());
        assert!(!sols.is_empty());
        for s in &sols {
            assert!(s.solves(&eqs));
            assert!(s.grounded([1, 3, 4, 7]).solves(&eqs));
        }
    }

    #[test]
    fn start_substitution_is_respected() {
        let eqs = vec![(vec![V(1)], vec![C(2)])];
        let mut start = PrefixSubstitution::new();
        start.bind(1, vec![C(3)]);
        assert!(solve_prefixes(&eqs, &start, lim()).is_none());
    }
}
