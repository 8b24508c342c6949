//! Non-clausal matrix: the position tree of a formula.
//!
//! Every position carries a polarity (0 for the succedent side, 1 for the
//! antecedent side), a principal type and, in intuitionistic mode, a prefix
//! string locating it in the Kripke-world structure. Positions that may be
//! used more than once in a proof sit inside a *copy group*: a node whose
//! children are the instances of one subformula occurrence. Groups exist for
//! the repeatable quantifier occurrences (polarity-1 `!`, polarity-0 `?`)
//! and, in intuitionistic mode, for every polarity-1 atom, `~`, `=>` and `!`
//! occurrence, because those carry prefix variables that may need fresh
//! copies.
//!
//! Position ids are stable strings derived from the tree path: the root is
//! `p`, the i-th child of `x` is `x.i` and the k-th instance inside a copy
//! group `g` is `g.ck`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, Term};

pub type NodeId = usize;
pub type VarId = u32;
pub type SymId = u32;

/// Default number of instances a copy group may hold.
pub const DEFAULT_COPY_CAP: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Intuitionistic,
    Classical,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Intuitionistic => "intuitionistic",
            Mode::Classical => "classical",
        }
    }

    pub fn from_name(s: &str) -> Option<Mode> {
        match s {
            "intuitionistic" => Some(Mode::Intuitionistic),
            "classical" => Some(Mode::Classical),
            _ => None,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    /// Succedent side; the root has this polarity.
    Zero,
    /// Antecedent side.
    One,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Zero => Polarity::One,
            Polarity::One => Polarity::Zero,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Polarity::Zero => 0,
            Polarity::One => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrincipalType {
    Alpha,
    Beta,
    Gamma,
    Delta,
    Atom,
}

impl PrincipalType {
    pub fn name(self) -> &'static str {
        match self {
            PrincipalType::Alpha => "alpha",
            PrincipalType::Beta => "beta",
            PrincipalType::Gamma => "gamma",
            PrincipalType::Delta => "delta",
            PrincipalType::Atom => "atom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    Atom,
    Neg,
    And,
    Or,
    Imp,
    Iff,
    Forall,
    Exists,
    /// A copy group; its children are instances of the same occurrence.
    Copies,
}

impl Connective {
    pub fn name(self) -> &'static str {
        match self {
            Connective::Atom => "atom",
            Connective::Neg => "neg",
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Imp => "imp",
            Connective::Iff => "iff",
            Connective::Forall => "forall",
            Connective::Exists => "exists",
            Connective::Copies => "copies",
        }
    }
}

/// One character of a prefix string, named after the position emitting it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrefixChar {
    Var(NodeId),
    Const(NodeId),
}

impl PrefixChar {
    pub fn node(self) -> NodeId {
        match self {
            PrefixChar::Var(n) | PrefixChar::Const(n) => n,
        }
    }
}

pub type Prefix = Vec<PrefixChar>;

/// Terms inside the matrix: quantifier variables of repeatable positions
/// and applications of user or Skolem symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MTerm {
    Var(VarId),
    App(SymId, Vec<MTerm>),
}

impl MTerm {
    pub fn contains_var(&self, v: VarId) -> bool {
        match self {
            MTerm::Var(w) => *w == v,
            MTerm::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn visit_syms(&self, f: &mut impl FnMut(SymId)) {
        if let MTerm::App(s, args) = self {
            f(*s);
            args.iter().for_each(|a| a.visit_syms(f));
        }
    }

    pub fn visit_vars(&self, f: &mut impl FnMut(VarId)) {
        match self {
            MTerm::Var(v) => f(*v),
            MTerm::App(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SymbolInfo {
    pub name: String,
    pub arity: usize,
    /// For Skolem symbols, the eigenvariable position they encode.
    pub skolem_of: Option<NodeId>,
}

#[derive(Debug, Clone)]
pub struct VarInfo {
    /// The repeatable quantifier position that introduced the variable.
    pub node: NodeId,
    pub binder: String,
}

type Env = Vec<(String, MTerm)>;

#[derive(Debug, Clone)]
pub struct Position {
    pub id: String,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub polarity: Polarity,
    pub principal_type: PrincipalType,
    pub connective: Connective,
    /// Predicate and arguments, for atoms.
    pub atom: Option<(SymId, Vec<MTerm>)>,
    /// Quantifier variable, for repeatable quantifier positions.
    pub var: Option<VarId>,
    /// Skolem term encoding the eigenvariable, for eigenvariable positions.
    pub skolem: Option<MTerm>,
    pub own_char: Option<PrefixChar>,
    pub prefix: Prefix,
    /// One copy index per dominating copy group.
    pub instance: Vec<u32>,
    /// The subformula occurrence (with source binder names).
    pub label: Rc<Formula>,
    env: Rc<Env>,
    pub depth: u32,
    /// Id with copy indices erased; equal for corresponding positions of
    /// different instances.
    pub skeleton: u32,
}

impl Position {
    pub fn is_atom(&self) -> bool {
        self.connective == Connective::Atom
    }

    pub fn is_group(&self) -> bool {
        self.connective == Connective::Copies
    }

    /// Bound-variable environment of the label: binder name to matrix term.
    pub fn bindings(&self) -> &[(String, MTerm)] {
        &self.env
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("copy limit {cap} reached for position {group}")]
    CopyLimit { group: String, cap: u32 },
    #[error("position {0} is not a copy group")]
    NotGenerative(String),
    #[error("matrix has more than {bound} paths")]
    TooManyPaths { bound: u64 },
    #[error("unknown position {0}")]
    UnknownPosition(String),
}

/// Rollback point for in-place instance creation.
#[derive(Debug, Clone, Copy)]
pub struct Mark {
    nodes: usize,
    vars: usize,
    syms: usize,
    copies: usize,
}

#[derive(Debug, Clone)]
pub struct Matrix {
    pub mode: Mode,
    pub root: NodeId,
    nodes: Vec<Position>,
    symbols: Vec<SymbolInfo>,
    user_syms: HashMap<(String, usize), SymId>,
    vars: Vec<VarInfo>,
    atom_index: BTreeMap<(SymId, Polarity), Vec<NodeId>>,
    by_id: HashMap<String, NodeId>,
    skeletons: HashMap<String, u32>,
    copy_cap: u32,
    copy_log: Vec<NodeId>,
}

impl Matrix {
    /// Builds the matrix of `f` with one instance per copy group.
    pub fn build(f: &Formula, mode: Mode) -> Matrix {
        let mut m = Matrix {
            mode,
            root: 0,
            nodes: Vec::new(),
            symbols: Vec::new(),
            user_syms: HashMap::new(),
            vars: Vec::new(),
            atom_index: BTreeMap::new(),
            by_id: HashMap::new(),
            skeletons: HashMap::new(),
            copy_cap: DEFAULT_COPY_CAP,
            copy_log: Vec::new(),
        };
        m.root = m.build_formula(Rc::new(f.clone()), Polarity::Zero, None, Slot::Root, Rc::new(Vec::new()), Vec::new());
        m
    }

    pub fn with_copy_cap(mut self, cap: u32) -> Matrix {
        self.copy_cap = cap;
        self
    }

    pub fn copy_cap(&self) -> u32 {
        self.copy_cap
    }

    pub fn set_copy_cap(&mut self, cap: u32) {
        self.copy_cap = cap;
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, n: NodeId) -> &Position {
        &self.nodes[n]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Position)> {
        self.nodes.iter().enumerate()
    }

    pub fn lookup(&self, id: &str) -> Option<NodeId> {
        self.by_id.get(id).copied()
    }

    pub fn symbol(&self, s: SymId) -> &SymbolInfo {
        &self.symbols[s as usize]
    }

    pub fn user_symbol(&self, name: &str, arity: usize) -> Option<SymId> {
        self.user_syms.get(&(name.to_string(), arity)).copied()
    }

    pub fn var_info(&self, v: VarId) -> &VarInfo {
        &self.vars[v as usize]
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    /// All atoms with the given predicate and polarity, in creation order.
    pub fn atoms_with(&self, pred: SymId, pol: Polarity) -> &[NodeId] {
        self.atom_index.get(&(pred, pol)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn atoms(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().enumerate().filter(|(_, p)| p.is_atom()).map(|(i, _)| i)
    }

    pub fn prefix_of(&self, n: NodeId) -> &Prefix {
        &self.nodes[n].prefix
    }

    /// Instance counts of all copy groups.
    pub fn multiplicity(&self) -> BTreeMap<NodeId, u32> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_group())
            .map(|(i, p)| (i, p.children.len() as u32))
            .collect()
    }

    pub fn copy_groups(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().enumerate().filter(|(_, p)| p.is_group()).map(|(i, _)| i)
    }

    /// The copy group directly containing `n`, if `n` is an instance.
    pub fn group_of(&self, n: NodeId) -> Option<NodeId> {
        self.nodes[n].parent.filter(|&p| self.nodes[p].is_group())
    }

    pub fn is_ancestor(&self, anc: NodeId, mut n: NodeId) -> bool {
        let d = self.nodes[anc].depth;
        while self.nodes[n].depth > d {
            n = self.nodes[n].parent.expect("non-root has a parent");
        }
        n == anc
    }

    pub fn lca(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.nodes[a].depth > self.nodes[b].depth {
            a = self.nodes[a].parent.unwrap();
        }
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent.unwrap();
        }
        while a != b {
            a = self.nodes[a].parent.unwrap();
            b = self.nodes[b].parent.unwrap();
        }
        a
    }

    /// The child of `anc` on the way down to `n` (`anc` a proper ancestor).
    pub fn child_towards(&self, anc: NodeId, mut n: NodeId) -> NodeId {
        let d = self.nodes[anc].depth + 1;
        while self.nodes[n].depth > d {
            n = self.nodes[n].parent.unwrap();
        }
        n
    }

    /// Two distinct positions are alpha-related iff their lowest common
    /// ancestor puts both children on every path (i.e. is not beta).
    pub fn alpha_related(&self, a: NodeId, b: NodeId) -> bool {
        if a == b || self.is_ancestor(a, b) || self.is_ancestor(b, a) {
            return false;
        }
        self.nodes[self.lca(a, b)].principal_type != PrincipalType::Beta
    }

    pub fn mark(&self) -> Mark {
        Mark { nodes: self.nodes.len(), vars: self.vars.len(), syms: self.symbols.len(), copies: self.copy_log.len() }
    }

    /// Undoes every instance added since `mark`.
    pub fn rollback(&mut self, mark: Mark) {
        while self.copy_log.len() > mark.copies {
            let g = self.copy_log.pop().unwrap();
            self.nodes[g].children.pop();
        }
        for p in &self.nodes[mark.nodes..] {
            self.by_id.remove(&p.id);
            if let Some((s, _)) = &p.atom {
                let list = self.atom_index.get_mut(&(*s, p.polarity)).unwrap();
                while list.last().is_some_and(|&x| x >= mark.nodes) {
                    list.pop();
                }
            }
        }
        self.nodes.truncate(mark.nodes);
        self.vars.truncate(mark.vars);
        self.symbols.truncate(mark.syms);
    }

    /// Returns a new matrix with one more instance of copy group `g`.
    pub fn add_instance(&self, g: NodeId) -> Result<Matrix, MatrixError> {
        let mut m = self.clone();
        m.add_instance_in_place(g)?;
        Ok(m)
    }

    /// Adds a fresh instance of copy group `g` (fresh quantifier variables,
    /// Skolem symbols and prefix characters) and returns its root.
    pub fn add_instance_in_place(&mut self, g: NodeId) -> Result<NodeId, MatrixError> {
        let group = &self.nodes[g];
        if !group.is_group() {
            return Err(MatrixError::NotGenerative(group.id.clone()));
        }
        if group.children.len() as u32 >= self.copy_cap {
            return Err(MatrixError::CopyLimit { group: group.id.clone(), cap: self.copy_cap });
        }
        let k = group.children.len() as u32;
        let (label, pol, env) = (group.label.clone(), group.polarity, group.env.clone());
        let mut instance = group.instance.clone();
        instance.push(k);
        let n = self.build_position(label, pol, Some(g), Slot::Copy(k), env, instance);
        self.copy_log.push(g);
        Ok(n)
    }

    fn intern_user(&mut self, name: &str, arity: usize) -> SymId {
        if let Some(&s) = self.user_syms.get(&(name.to_string(), arity)) {
            return s;
        }
        let s = self.symbols.len() as SymId;
        self.symbols.push(SymbolInfo { name: name.to_string(), arity, skolem_of: None });
        self.user_syms.insert((name.to_string(), arity), s);
        s
    }

    fn convert_term(&mut self, t: &Term, env: &Env) -> MTerm {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| panic!("free variable {v} in matrix construction")),
            Term::App(f, args) => {
                let s = self.intern_user(f, args.len());
                MTerm::App(s, args.iter().map(|a| self.convert_term(a, env)).collect())
            }
        }
    }

    fn generative(&self, f: &Formula, pol: Polarity) -> bool {
        match (f, pol) {
            (Formula::Forall(..), Polarity::One) | (Formula::Exists(..), Polarity::Zero) => true,
            (Formula::Atom(..) | Formula::Neg(_) | Formula::Imp(..), Polarity::One) => self.mode == Mode::Intuitionistic,
            _ => false,
        }
    }

    fn build_formula(
        &mut self,
        f: Rc<Formula>,
        pol: Polarity,
        parent: Option<NodeId>,
        slot: Slot,
        env: Rc<Env>,
        instance: Vec<u32>,
    ) -> NodeId {
        if !self.generative(&f, pol) {
            return self.build_position(f, pol, parent, slot, env, instance);
        }
        let g = self.push_node(parent, slot, |id, prefix, depth| Position {
            id,
            parent,
            children: Vec::new(),
            polarity: pol,
            principal_type: PrincipalType::Alpha,
            connective: Connective::Copies,
            atom: None,
            var: None,
            skolem: None,
            own_char: None,
            prefix,
            instance: instance.clone(),
            label: f.clone(),
            env: env.clone(),
            depth,
            skeleton: 0,
        });
        let mut inst = instance;
        inst.push(0);
        self.build_position(f, pol, Some(g), Slot::Copy(0), env, inst);
        g
    }

    fn push_node(
        &mut self,
        parent: Option<NodeId>,
        slot: Slot,
        make: impl FnOnce(String, Prefix, u32) -> Position,
    ) -> NodeId {
        let n = self.nodes.len();
        let (id, prefix, depth) = match parent {
            None => ("p".to_string(), Vec::new(), 0),
            Some(p) => {
                let pp = &self.nodes[p];
                let id = match slot {
                    Slot::Child(i) => format!("{}.{}", pp.id, i),
                    Slot::Copy(k) => format!("{}.c{}", pp.id, k),
                    Slot::Root => unreachable!(),
                };
                (id, pp.prefix.clone(), pp.depth + 1)
            }
        };
        let skel_key = skeleton_key(&id);
        let next = self.skeletons.len() as u32;
        let skeleton = *self.skeletons.entry(skel_key).or_insert(next);
        let mut pos = make(id, prefix, depth);
        pos.skeleton = skeleton;
        self.by_id.insert(pos.id.clone(), n);
        self.nodes.push(pos);
        if let Some(p) = parent {
            self.nodes[p].children.push(n);
        }
        n
    }

    fn build_position(
        &mut self,
        f: Rc<Formula>,
        pol: Polarity,
        parent: Option<NodeId>,
        slot: Slot,
        env: Rc<Env>,
        instance: Vec<u32>,
    ) -> NodeId {
        use PrincipalType::*;
        let (connective, ptype) = match (&*f, pol) {
            (Formula::Atom(..), _) => (Connective::Atom, Atom),
            (Formula::Neg(_), _) => (Connective::Neg, Alpha),
            (Formula::And(..), Polarity::One) | (Formula::Or(..), Polarity::Zero) => {
                (if matches!(&*f, Formula::And(..)) { Connective::And } else { Connective::Or }, Alpha)
            }
            (Formula::And(..), Polarity::Zero) => (Connective::And, Beta),
            (Formula::Or(..), Polarity::One) => (Connective::Or, Beta),
            (Formula::Imp(..), Polarity::Zero) => (Connective::Imp, Alpha),
            (Formula::Imp(..), Polarity::One) => (Connective::Imp, Beta),
            (Formula::Iff(..), Polarity::One) => (Connective::Iff, Alpha),
            (Formula::Iff(..), Polarity::Zero) => (Connective::Iff, Beta),
            (Formula::Forall(..), Polarity::One) | (Formula::Exists(..), Polarity::Zero) => {
                (if matches!(&*f, Formula::Forall(..)) { Connective::Forall } else { Connective::Exists }, Gamma)
            }
            (Formula::Forall(..), Polarity::Zero) => (Connective::Forall, Delta),
            (Formula::Exists(..), Polarity::One) => (Connective::Exists, Delta),
        };
        let special = matches!(connective, Connective::Atom | Connective::Neg | Connective::Imp | Connective::Forall);
        let intuitionistic = self.mode == Mode::Intuitionistic;
        let n = self.nodes.len();
        let own_char = (intuitionistic && special).then_some(match pol {
            Polarity::One => PrefixChar::Var(n),
            Polarity::Zero => PrefixChar::Const(n),
        });
        let atom = match &*f {
            Formula::Atom(p, args) => {
                let s = self.intern_user(p, args.len());
                let args = args.iter().map(|a| self.convert_term(a, &env)).collect();
                Some((s, args))
            }
            _ => None,
        };
        let (var, skolem, child_env) = match &*f {
            Formula::Forall(v, _) | Formula::Exists(v, _) => {
                let mut e = (*env).clone();
                let (var, skolem, t) = if ptype == Gamma {
                    let id = self.vars.len() as VarId;
                    self.vars.push(VarInfo { node: n, binder: v.clone() });
                    (Some(id), None, MTerm::Var(id))
                } else {
                    let mut args = Vec::new();
                    for (_, t) in env.iter() {
                        if let MTerm::Var(x) = t {
                            args.push(MTerm::Var(*x));
                        }
                    }
                    let s = self.symbols.len() as SymId;
                    self.symbols.push(SymbolInfo { name: String::new(), arity: args.len(), skolem_of: Some(n) });
                    let t = MTerm::App(s, args);
                    (None, Some(t.clone()), t)
                };
                e.push((v.clone(), t));
                (var, skolem, Rc::new(e))
            }
            _ => (None, None, env.clone()),
        };
        let node = self.push_node(parent, slot, |id, mut prefix, depth| {
            prefix.extend(own_char);
            Position {
                id,
                parent,
                children: Vec::new(),
                polarity: pol,
                principal_type: ptype,
                connective,
                atom,
                var,
                skolem,
                own_char,
                prefix,
                instance: instance.clone(),
                label: f.clone(),
                env: env.clone(),
                depth,
                skeleton: 0,
            }
        });
        debug_assert_eq!(node, n);
        if let Some(s) = skolem_sym(&self.nodes[n]) {
            self.symbols[s as usize].name = format!("sk@{}", self.nodes[n].id);
        }
        if let Some((s, _)) = &self.nodes[n].atom {
            self.atom_index.entry((*s, pol)).or_default().push(n);
        }
        let kids: Vec<(Formula, Polarity)> = match &*f {
            Formula::Atom(..) => vec![],
            Formula::Neg(a) => vec![((**a).clone(), pol.flip())],
            Formula::And(a, b) | Formula::Or(a, b) => vec![((**a).clone(), pol), ((**b).clone(), pol)],
            Formula::Imp(a, b) => vec![((**a).clone(), pol.flip()), ((**b).clone(), pol)],
            Formula::Iff(a, b) => vec![
                (Formula::imp((**a).clone(), (**b).clone()), pol),
                (Formula::imp((**b).clone(), (**a).clone()), pol),
            ],
            Formula::Forall(_, a) | Formula::Exists(_, a) => vec![((**a).clone(), pol)],
        };
        for (i, (kf, kp)) in kids.into_iter().enumerate() {
            let inst = instance.clone();
            self.build_formula(Rc::new(kf), kp, Some(n), Slot::Child(i as u32), child_env.clone(), inst);
        }
        n
    }

    pub fn term_to_string(&self, t: &MTerm) -> String {
        match t {
            MTerm::Var(v) => {
                let vi = &self.vars[*v as usize];
                format!("{}@{}", vi.binder, self.nodes[vi.node].id)
            }
            MTerm::App(s, args) => {
                let name = &self.symbols[*s as usize].name;
                if args.is_empty() {
                    name.clone()
                } else {
                    let a: Vec<String> = args.iter().map(|a| self.term_to_string(a)).collect();
                    format!("{}({})", name, a.join(","))
                }
            }
        }
    }

    pub fn char_to_string(&self, c: PrefixChar) -> String {
        match c {
            PrefixChar::Var(n) => format!("V[{}]", self.nodes[n].id),
            PrefixChar::Const(n) => format!("a[{}]", self.nodes[n].id),
        }
    }

    pub fn prefix_to_string(&self, p: &[PrefixChar]) -> String {
        p.iter().map(|&c| self.char_to_string(c)).collect::<Vec<_>>().join(" ")
    }

    /// Plain-text dump of the position tree, one position per line:
    ///
    /// `<indent><id> <connective> pol=<0|1> type=<type> prefix=[<chars>] [detail]`
    ///
    /// where prefix characters print as `V[id]` (variable) or `a[id]`
    /// (constant), and the detail is `atom=...`, `var=...`, `sk=...` or
    /// `n=<instances>` for copy groups.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        self.dump_rec(self.root, 0, &mut out);
        out
    }

    fn dump_rec(&self, n: NodeId, indent: usize, out: &mut String) {
        let p = &self.nodes[n];
        let _ = write!(
            out,
            "{:indent$}{} {} pol={} type={} prefix=[{}]",
            "",
            p.id,
            p.connective.name(),
            p.polarity.bit(),
            p.principal_type.name(),
            self.prefix_to_string(&p.prefix),
            indent = indent
        );
        if let Some((s, args)) = &p.atom {
            let _ = write!(out, " atom={}", self.term_to_string(&MTerm::App(*s, args.clone())));
        }
        if let Some(v) = p.var {
            let _ = write!(out, " var={}", self.term_to_string(&MTerm::Var(v)));
        }
        if let Some(t) = &p.skolem {
            let _ = write!(out, " sk={}", self.term_to_string(t));
        }
        if p.is_group() {
            let _ = write!(out, " n={}", p.children.len());
        }
        out.push('\n');
        for &c in &p.children {
            self.dump_rec(c, indent + 2, out);
        }
    }

    /// Number of paths through `n`, saturating.
    pub fn count_paths(&self, n: NodeId) -> u64 {
        let p = &self.nodes[n];
        match p.principal_type {
            PrincipalType::Atom => 1,
            PrincipalType::Beta => p.children.iter().map(|&c| self.count_paths(c)).fold(0u64, u64::saturating_add),
            _ => p.children.iter().map(|&c| self.count_paths(c)).fold(1u64, u64::saturating_mul),
        }
    }

    /// Lazily enumerates all paths (sets of atom positions) of the matrix.
    pub fn enumerate_paths(&self, bound: u64) -> Result<Box<dyn Iterator<Item = Vec<NodeId>> + '_>, MatrixError> {
        if self.count_paths(self.root) > bound {
            return Err(MatrixError::TooManyPaths { bound });
        }
        Ok(self.paths_through(self.root))
    }

    fn paths_through(&self, n: NodeId) -> Box<dyn Iterator<Item = Vec<NodeId>> + '_> {
        let p = &self.nodes[n];
        match p.principal_type {
            PrincipalType::Atom => Box::new(std::iter::once(vec![n])),
            PrincipalType::Beta => Box::new(p.children.iter().flat_map(move |&c| self.paths_through(c))),
            _ => {
                let mut acc: Box<dyn Iterator<Item = Vec<NodeId>> + '_> = Box::new(std::iter::once(Vec::new()));
                for &c in &p.children {
                    acc = Box::new(acc.flat_map(move |prefix| {
                        self.paths_through(c).map(move |mut tail| {
                            let mut path = prefix.clone();
                            path.append(&mut tail);
                            path
                        })
                    }));
                }
                acc
            }
        }
    }
}

fn skolem_sym(p: &Position) -> Option<SymId> {
    match &p.skolem {
        Some(MTerm::App(s, _)) => Some(*s),
        _ => None,
    }
}

fn skeleton_key(id: &str) -> String {
    id.split('.')
        .map(|seg| if seg.starts_with('c') { "c" } else { seg })
        .collect::<Vec<_>>()
        .join(".")
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Root,
    Child(u32),
    Copy(u32),
}
