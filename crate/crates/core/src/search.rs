//! Connection-driven proof search on the non-clausal matrix.
//!
//! Goals are obligations `(P, c)`: close every path through position `c`
//! that extends the active path `P`. A beta position splits into one
//! obligation per child; any other inner position needs only one of its
//! children, which is a choice point. An atom is closed by a reduction
//! (connection to an atom of `P`) or an extension (connection to an atom
//! `L'` that can share a path with `P`), in which case the beta-side
//! siblings on the way down to `L'` become new obligations.
//!
//! Copy groups gain instances in place when every existing instance has
//! been used by a connection. In intuitionistic mode the prefixes of all
//! connections, together with the eigenvariable domain constraints, are
//! unified after every connection.
//!
//! The outer loop deepens the bound on the active path length, doubling it
//! from the configured start. A proof is returned only after the
//! certificate checker accepts it.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::certificate::{check_certificate, Certificate, CertificateError};
use crate::matrix::{Matrix, Mode, NodeId, Polarity, PrefixChar, PrincipalType, DEFAULT_COPY_CAP};
use crate::syntax::Formula;
use crate::unification::{
    check_admissible, domain_pairs, solve_prefixes, unify_lists, unify_prefixes, Equation, PrefixLimits,
    PrefixSubstitution, TermSubstitution, Trail, AUX_BASE,
};

#[derive(Debug, Clone)]
pub struct SearchLimits {
    pub mode: Mode,
    /// Largest active-path bound tried by iterative deepening.
    pub max_path_length: usize,
    /// First active-path bound.
    pub start_depth: usize,
    /// Maximum number of instances per copy group.
    pub copy_cap: u32,
    /// Maximum number of prefix unifiers tried per equation.
    pub prefix_alternatives: usize,
    pub timeout: Option<Duration>,
    /// Do not retry an atom once its connection's subgoals are solved.
    pub restricted_backtracking: bool,
}

impl SearchLimits {
    pub fn new(mode: Mode) -> SearchLimits {
        SearchLimits {
            mode,
            max_path_length: 64,
            start_depth: 1,
            copy_cap: DEFAULT_COPY_CAP,
            prefix_alternatives: 16,
            timeout: Some(Duration::from_secs(60)),
            restricted_backtracking: false,
        }
    }

    pub fn with_timeout(mut self, t: Option<Duration>) -> SearchLimits {
        self.timeout = t;
        self
    }

    pub fn with_copy_cap(mut self, cap: u32) -> SearchLimits {
        self.copy_cap = cap;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Proved(Certificate),
    ExhaustedBounds,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("formula has free variables: {0}")]
    OpenFormula(String),
    #[error("internal error: the checker rejected a found proof: {0}")]
    Unsound(CertificateError),
    #[error("invalid limits: {0}")]
    Limits(String),
}

/// Cooperative cancellation flag, shared between concurrent searches.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> CancelToken {
        CancelToken::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Deepen { bound: usize },
    Extension { from: String, to: String },
    Reduction { from: String, to: String },
    Copy { group: String, instance: String },
}

impl std::fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceEvent::Deepen { bound } => write!(f, "deepen {bound}"),
            TraceEvent::Extension { from, to } => write!(f, "extension {from} {to}"),
            TraceEvent::Reduction { from, to } => write!(f, "reduction {from} {to}"),
            TraceEvent::Copy { group, instance } => write!(f, "copy {group} {instance}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub inferences: u64,
    pub copies: u64,
    pub final_bound: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    pub trace: bool,
    pub cancel: Option<CancelToken>,
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub trace: Vec<TraceEvent>,
    pub stats: SearchStats,
}

const STACK_SIZE: usize = 1 << 30;

/// Searches for a proof of `f` within `limits`.
pub fn prove(f: &Formula, limits: &SearchLimits) -> Result<SearchOutcome, SearchError> {
    search(f, limits, &SearchOptions::default()).map(|r| r.outcome)
}

/// Like [`prove`], with tracing, cancellation and statistics.
pub fn search(f: &Formula, limits: &SearchLimits, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(SearchError::OpenFormula(v));
    }
    if limits.max_path_length == 0 || limits.start_depth == 0 || limits.copy_cap == 0 || limits.prefix_alternatives == 0
    {
        return Err(SearchError::Limits("bounds must be at least 1".into()));
    }
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .name("matrixprove-search".into())
            .stack_size(STACK_SIZE)
            .spawn_scoped(s, || run(f, limits, opts))
            .expect("spawning the search thread")
            .join()
            .expect("search thread panicked")
    })
}

fn run(f: &Formula, limits: &SearchLimits, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    let deadline = limits.timeout.map(|t| Instant::now() + t);
    let matrix = Matrix::build(f, limits.mode).with_copy_cap(limits.copy_cap);
    let mut p = Prover::new(matrix, limits, deadline, opts);
    let mut bound = limits.start_depth.min(limits.max_path_length);
    loop {
        p.reset(bound);
        p.event(|_| TraceEvent::Deepen { bound });
        let root = p.m.root;
        let outcome = match p.solve(cons(Goal::Obl { path: None, node: root }, None)) {
            Err(Stop) => Some(SearchOutcome::Timeout),
            Ok(true) => {
                let (sq, sj) = p.result.take().expect("a finished proof records its substitution");
                let cert = Certificate::from_parts(f, &p.m, &p.conns, &sq, &sj);
                check_certificate(f, &cert, limits.mode).map_err(SearchError::Unsound)?;
                Some(SearchOutcome::Proved(cert))
            }
            Ok(false) if !p.depth_hit || bound >= limits.max_path_length => Some(SearchOutcome::ExhaustedBounds),
            Ok(false) => None,
        };
        if let Some(outcome) = outcome {
            p.stats.final_bound = bound;
            return Ok(SearchReport { outcome, trace: p.trace.take().unwrap_or_default(), stats: p.stats });
        }
        bound = (bound * 2).min(limits.max_path_length);
    }
}

struct PathNode {
    atom: NodeId,
    len: usize,
    next: Path,
}

type Path = Option<Rc<PathNode>>;

fn path_len(p: &Path) -> usize {
    p.as_ref().map_or(0, |n| n.len)
}

fn push_path(p: &Path, atom: NodeId) -> Path {
    Some(Rc::new(PathNode { atom, len: path_len(p) + 1, next: p.clone() }))
}

fn path_iter(p: &Path) -> impl Iterator<Item = NodeId> + '_ {
    let mut cur = p.as_deref();
    std::iter::from_fn(move || {
        let n = cur?;
        cur = n.next.as_deref();
        Some(n.atom)
    })
}

enum Goal {
    Obl { path: Path, node: NodeId },
    Cut(u64),
}

struct GoalNode {
    goal: Goal,
    next: Goals,
}

type Goals = Option<Rc<GoalNode>>;

fn cons(goal: Goal, next: Goals) -> Goals {
    Some(Rc::new(GoalNode { goal, next }))
}

/// Search interrupted by timeout or cancellation.
struct Stop;

struct Undo {
    trail: usize,
    prefix: bool,
}

struct Prover<'a> {
    m: Matrix,
    limits: &'a SearchLimits,
    trail: Trail,
    conns: Vec<(NodeId, NodeId)>,
    used: Vec<u32>,
    prefix_stack: Vec<PrefixSubstitution>,
    aux: HashMap<(NodeId, NodeId), NodeId>,
    bound: usize,
    depth_hit: bool,
    deadline: Option<Instant>,
    cancel: Option<CancelToken>,
    trace: Option<Vec<TraceEvent>>,
    stats: SearchStats,
    next_goal: u64,
    live_copies: usize,
    cutting: Option<u64>,
    result: Option<(TermSubstitution, PrefixSubstitution)>,
}

impl<'a> Prover<'a> {
    fn new(m: Matrix, limits: &'a SearchLimits, deadline: Option<Instant>, opts: &SearchOptions) -> Prover<'a> {
        let n = m.len();
        Prover {
            m,
            limits,
            trail: Trail::default(),
            conns: Vec::new(),
            used: vec![0; n],
            prefix_stack: vec![PrefixSubstitution::new()],
            aux: HashMap::new(),
            bound: 1,
            depth_hit: false,
            deadline,
            cancel: opts.cancel.clone(),
            trace: opts.trace.then(Vec::new),
            stats: SearchStats::default(),
            next_goal: 0,
            live_copies: 0,
            cutting: None,
            result: None,
        }
    }

    fn reset(&mut self, bound: usize) {
        self.bound = bound;
        self.depth_hit = false;
        self.cutting = None;
        debug_assert!(self.conns.is_empty() && self.prefix_stack.len() == 1);
    }

    fn event(&mut self, make: impl FnOnce(&Matrix) -> TraceEvent) {
        if let Some(t) = &mut self.trace {
            t.push(make(&self.m));
        }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.stats.inferences += 1;
        if self.stats.inferences.is_multiple_of(1024) {
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                return Err(Stop);
            }
            if self.cancel.as_ref().is_some_and(CancelToken::is_cancelled) {
                return Err(Stop);
            }
        }
        Ok(())
    }

    fn intuitionistic(&self) -> bool {
        self.m.mode == Mode::Intuitionistic
    }

    /// True while a cut is unwinding past the current goal.
    fn cut_active(&mut self, gid: u64) -> bool {
        match self.cutting {
            Some(c) if c == gid => {
                self.cutting = None;
                true
            }
            Some(_) => true,
            None => false,
        }
    }

    fn solve(&mut self, goals: Goals) -> Result<bool, Stop> {
        self.tick()?;
        let Some(g) = goals else { return Ok(self.finish()) };
        match &g.goal {
            Goal::Cut(id) => {
                let id = *id;
                let ok = self.solve(g.next.clone())?;
                if !ok && self.cutting.is_none() {
                    self.cutting = Some(id);
                }
                Ok(ok)
            }
            Goal::Obl { path, node } => {
                let (path, n) = (path.clone(), *node);
                let pos = self.m.node(n);
                match pos.principal_type {
                    PrincipalType::Atom => self.solve_atom(path, n, g.next.clone()),
                    PrincipalType::Beta => {
                        let mut goals = g.next.clone();
                        for &c in pos.children.iter().rev() {
                            goals = cons(Goal::Obl { path: path.clone(), node: c }, goals);
                        }
                        self.solve(goals)
                    }
                    _ => {
                        let choices = self.alpha_choices(n);
                        let gid = self.next_goal;
                        self.next_goal += 1;
                        for c in choices {
                            if self.solve(cons(Goal::Obl { path: path.clone(), node: c }, g.next.clone()))? {
                                return Ok(true);
                            }
                            if self.cut_active(gid) {
                                return Ok(false);
                            }
                        }
                        Ok(false)
                    }
                }
            }
        }
    }

    /// Children of a non-beta position worth trying: for copy groups, the
    /// used instances and one unused one; otherwise succedent-side first.
    fn alpha_choices(&self, n: NodeId) -> Vec<NodeId> {
        let pos = self.m.node(n);
        if pos.is_group() {
            let mut out = Vec::new();
            let mut fresh = false;
            for &c in &pos.children {
                if self.used[c] > 0 {
                    out.push(c);
                } else if !fresh {
                    fresh = true;
                    out.push(c);
                }
            }
            return out;
        }
        let mut kids = pos.children.clone();
        kids.sort_by_key(|&c| self.m.node(c).polarity != Polarity::Zero);
        kids
    }

    fn same_literal(&self, a: NodeId, b: NodeId) -> bool {
        let (pa, pb) = (self.m.node(a), self.m.node(b));
        let ((sa, xs), (sb, ys)) = (pa.atom.as_ref().unwrap(), pb.atom.as_ref().unwrap());
        sa == sb
            && pa.polarity == pb.polarity
            && xs.iter().zip(ys).all(|(x, y)| crate::unification::resolve(&self.trail, x) == crate::unification::resolve(&self.trail, y))
    }

    fn solve_atom(&mut self, path: Path, lit: NodeId, rest: Goals) -> Result<bool, Stop> {
        let gid = self.next_goal;
        self.next_goal += 1;
        if !self.intuitionistic() && path_iter(&path).any(|s| self.same_literal(s, lit)) {
            return Ok(false);
        }
        let (pred, pol) = (self.m.node(lit).atom.as_ref().unwrap().0, self.m.node(lit).polarity);
        let on_path: Vec<NodeId> = path_iter(&path).collect();
        for s in on_path {
            let ps = self.m.node(s);
            if ps.atom.as_ref().unwrap().0 != pred || ps.polarity == pol {
                continue;
            }
            if let Some(undo) = self.connect(lit, s, false)? {
                let goals = if self.limits.restricted_backtracking { cons(Goal::Cut(gid), rest.clone()) } else { rest.clone() };
                if self.solve(goals)? {
                    return Ok(true);
                }
                self.disconnect(undo);
                if self.cut_active(gid) {
                    return Ok(false);
                }
            }
        }
        if path_len(&path) >= self.bound {
            self.depth_hit = true;
            return Ok(false);
        }
        let ext_path = push_path(&path, lit);
        let partners: Vec<NodeId> = self.m.atoms_with(pred, pol.flip()).to_vec();
        for &k in &partners {
            if !path_iter(&ext_path).all(|s| self.m.alpha_related(s, k)) {
                continue;
            }
            if self.extend(&ext_path, lit, k, gid, &rest)? {
                return Ok(true);
            }
            if self.cut_active(gid) {
                return Ok(false);
            }
        }
        if self.live_copies >= self.bound {
            self.depth_hit = true;
            return Ok(false);
        }
        for (g, k) in self.copy_options(&ext_path, &partners) {
            let mark = self.m.mark();
            let inst = match self.m.add_instance_in_place(g) {
                Ok(i) => i,
                Err(_) => continue,
            };
            self.used.resize(self.m.len(), 0);
            self.stats.copies += 1;
            self.event(|m| TraceEvent::Copy { group: m.node(g).id.clone(), instance: m.node(inst).id.clone() });
            let skel = self.m.node(k).skeleton;
            let k2 = self.find_skeleton(inst, skel).expect("a new instance mirrors the original");
            self.live_copies += 1;
            let ok = self.extend(&ext_path, lit, k2, gid, &rest)?;
            if ok {
                return Ok(true);
            }
            self.live_copies -= 1;
            self.m.rollback(mark);
            self.used.truncate(self.m.len());
            if self.cut_active(gid) {
                return Ok(false);
            }
        }
        Ok(false)
    }

    fn find_skeleton(&self, root: NodeId, skel: u32) -> Option<NodeId> {
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            let p = self.m.node(n);
            if p.skeleton == skel {
                return Some(n);
            }
            stack.extend(p.children.iter().copied());
        }
        None
    }

    /// Copy groups whose fresh instance would provide a usable partner,
    /// innermost first, deduplicated by group and partner skeleton.
    fn copy_options(&self, ext_path: &Path, partners: &[NodeId]) -> Vec<(NodeId, NodeId)> {
        let mut out: Vec<(NodeId, NodeId)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &k in partners {
            let mut n = k;
            while let Some(parent) = self.m.node(n).parent {
                n = parent;
                let g = self.m.node(n);
                if !g.is_group() || g.children.len() as u32 >= self.m.copy_cap() {
                    continue;
                }
                let idle = |c: NodeId| self.used[c] == 0 && !path_iter(ext_path).any(|s| self.m.is_ancestor(c, s));
                if g.children.iter().any(|&c| idle(c)) {
                    continue;
                }
                let ok = path_iter(ext_path).all(|s| self.m.is_ancestor(n, s) || self.m.alpha_related(s, k));
                if ok && seen.insert((n, self.m.node(k).skeleton)) {
                    out.push((n, k));
                }
            }
        }
        out
    }

    fn extend(&mut self, ext_path: &Path, lit: NodeId, k: NodeId, gid: u64, rest: &Goals) -> Result<bool, Stop> {
        let Some(undo) = self.connect(lit, k, true)? else { return Ok(false) };
        let mut top = self.m.root;
        for s in path_iter(ext_path) {
            let a = self.m.lca(s, k);
            if self.m.node(a).depth >= self.m.node(top).depth {
                top = a;
            }
        }
        let start = self.m.child_towards(top, k);
        let mut obligations = Vec::new();
        let mut n = k;
        while n != start {
            let parent = self.m.node(n).parent.unwrap();
            if self.m.node(parent).principal_type == PrincipalType::Beta {
                for &c in self.m.node(parent).children.iter().rev() {
                    if c != n {
                        obligations.push(c);
                    }
                }
            }
            n = parent;
        }
        let mut goals = if self.limits.restricted_backtracking { cons(Goal::Cut(gid), rest.clone()) } else { rest.clone() };
        for &c in &obligations {
            goals = cons(Goal::Obl { path: ext_path.clone(), node: c }, goals);
        }
        if self.solve(goals)? {
            return Ok(true);
        }
        self.disconnect(undo);
        Ok(false)
    }

    fn connect(&mut self, a: NodeId, b: NodeId, extension: bool) -> Result<Option<Undo>, Stop> {
        self.tick()?;
        let mark = self.trail.mark();
        let xs = &self.m.node(a).atom.as_ref().unwrap().1;
        let ys = &self.m.node(b).atom.as_ref().unwrap().1;
        if unify_lists(&mut self.trail, xs, ys).is_err() {
            self.trail.undo(mark);
            return Ok(None);
        }
        self.conns.push((a, b));
        let mut prefix = false;
        if self.intuitionistic() {
            match self.solve_current_prefixes() {
                Some(s) => {
                    self.prefix_stack.push(s);
                    prefix = true;
                }
                None => {
                    self.conns.pop();
                    self.trail.undo(mark);
                    return Ok(None);
                }
            }
        }
        for x in [a, b] {
            let mut n = Some(x);
            while let Some(i) = n {
                self.used[i] += 1;
                n = self.m.node(i).parent;
            }
        }
        self.event(|m| {
            let (from, to) = (m.node(a).id.clone(), m.node(b).id.clone());
            if extension {
                TraceEvent::Extension { from, to }
            } else {
                TraceEvent::Reduction { from, to }
            }
        });
        Ok(Some(Undo { trail: mark, prefix }))
    }

    fn disconnect(&mut self, undo: Undo) {
        let (a, b) = self.conns.pop().expect("disconnect after connect");
        for x in [a, b] {
            let mut n = Some(x);
            while let Some(i) = n {
                self.used[i] -= 1;
                n = self.m.node(i).parent;
            }
        }
        if undo.prefix {
            self.prefix_stack.pop();
        }
        self.trail.undo(undo.trail);
    }

    fn prefix_limits(&self) -> PrefixLimits {
        PrefixLimits { alternatives: self.limits.prefix_alternatives, ..PrefixLimits::default() }
    }

    /// Prefix equations of all connections plus the domain constraints
    /// `pre(d) W = pre(x)` for every eigenvariable `d` in the image of `x`.
    fn equations(&mut self, sigma_q: &TermSubstitution) -> Vec<Equation> {
        let mut eqs: Vec<Equation> =
            self.conns.iter().map(|&(a, b)| (self.m.prefix_of(a).clone(), self.m.prefix_of(b).clone())).collect();
        for (d, x) in domain_pairs(&self.m, sigma_q) {
            let next = AUX_BASE + self.aux.len();
            let w = *self.aux.entry((d, x)).or_insert(next);
            let mut l = self.m.prefix_of(d).clone();
            l.push(PrefixChar::Var(w));
            eqs.push((l, self.m.prefix_of(x).clone()));
        }
        eqs
    }

    fn solve_current_prefixes(&mut self) -> Option<PrefixSubstitution> {
        let sigma_q = self.trail.to_substitution();
        let eqs = self.equations(&sigma_q);
        let limits = self.prefix_limits();
        let last = self.prefix_stack.last().expect("the prefix stack is never empty");
        solve_prefixes(&eqs, last, limits).or_else(|| {
            if last.is_empty() {
                None
            } else {
                solve_prefixes(&eqs, &PrefixSubstitution::new(), limits)
            }
        })
    }

    /// Final admissibility check; records the substitutions on success.
    fn finish(&mut self) -> bool {
        let sigma_q = self.trail.to_substitution();
        if !self.intuitionistic() {
            let sj = PrefixSubstitution::new();
            if check_admissible(&self.m, &sigma_q, &sj).is_ok() {
                self.result = Some((sigma_q, sj));
                return true;
            }
            return false;
        }
        let eqs = self.equations(&sigma_q);
        let mut candidates = vec![self.prefix_stack.last().unwrap().clone()];
        let mut tried_all = false;
        loop {
            for s in &candidates {
                if !s.solves(&eqs) {
                    continue;
                }
                let sj = self.ground(s, &eqs);
                if check_admissible(&self.m, &sigma_q, &sj).is_ok() {
                    self.result = Some((sigma_q, sj));
                    return true;
                }
            }
            if tried_all {
                return false;
            }
            tried_all = true;
            candidates = unify_prefixes(&eqs, &PrefixSubstitution::new(), self.prefix_limits());
        }
    }

    /// Restricts `s` to the matrix's prefix variables occurring in `eqs`,
    /// mapping everything left unbound to the empty string.
    fn ground(&self, s: &PrefixSubstitution, eqs: &[Equation]) -> PrefixSubstitution {
        let vars: std::collections::BTreeSet<NodeId> = eqs
            .iter()
            .flat_map(|(l, r)| l.iter().chain(r))
            .filter_map(|c| match c {
                PrefixChar::Var(v) if *v < self.m.len() => Some(*v),
                _ => None,
            })
            .collect();
        s.grounded(vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn run(s: &str, mode: Mode) -> SearchOutcome {
        prove(&parse_formula(s).unwrap(), &SearchLimits::new(mode)).unwrap()
    }

    #[test]
    fn identity_has_one_connection() {
        let SearchOutcome::Proved(c) = run("p => p", Mode::Intuitionistic) else { panic!() };
        assert_eq!(c.connections.len(), 1);
        assert_eq!(c.sigma_j.len(), 1);
    }

    #[test]
    fn excluded_middle_depends_on_mode() {
        assert_eq!(run("~p | p", Mode::Intuitionistic), SearchOutcome::ExhaustedBounds);
        assert!(matches!(run("~p | p", Mode::Classical), SearchOutcome::Proved(_)));
    }
}
