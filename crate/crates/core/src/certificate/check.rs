use std::collections::HashMap;

use super::{formula_digest, prefix_const, CTerm, Certificate, CertificateError, CERTIFICATE_VERSION};
use crate::matrix::{MTerm, Matrix, Mode, NodeId, PrefixChar, PrincipalType};
use crate::syntax::Formula;
use crate::unification::{check_admissible, PrefixSubstitution, TermSubstitution};

/// Maximum number of branch points the spanning check explores.
pub const PATH_BOUND: u64 = 1 << 20;

/// A certificate with its ids resolved against the rebuilt matrix.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub matrix: Matrix,
    pub connections: Vec<(NodeId, NodeId)>,
    pub sigma_q: TermSubstitution,
    pub sigma_j: PrefixSubstitution,
}

fn dangling(id: &str) -> CertificateError {
    CertificateError::DanglingPosition(id.to_string())
}

fn node(m: &Matrix, id: &str) -> Result<NodeId, CertificateError> {
    m.lookup(id).ok_or_else(|| dangling(id))
}

fn convert(m: &Matrix, t: &CTerm) -> Result<MTerm, CertificateError> {
    match t {
        CTerm::Var { var } => {
            let n = node(m, var)?;
            m.node(n).var.map(MTerm::Var).ok_or_else(|| dangling(var))
        }
        CTerm::Fun { fun, args } => {
            let s = m.user_symbol(fun, args.len()).ok_or_else(|| dangling(fun))?;
            Ok(MTerm::App(s, args.iter().map(|a| convert(m, a)).collect::<Result<_, _>>()?))
        }
        CTerm::Sk { sk, args } => {
            let n = node(m, sk)?;
            match &m.node(n).skolem {
                Some(MTerm::App(s, params)) if params.len() == args.len() => {
                    Ok(MTerm::App(*s, args.iter().map(|a| convert(m, a)).collect::<Result<_, _>>()?))
                }
                _ => Err(dangling(sk)),
            }
        }
    }
}

/// Rebuilds the matrix with the certificate's multiplicity and resolves
/// every id. Checks version, mode and digest but not validity.
pub fn resolve_certificate(f: &Formula, c: &Certificate, mode: Mode) -> Result<Resolved, CertificateError> {
    if c.version != CERTIFICATE_VERSION {
        return Err(CertificateError::Version(c.version));
    }
    if c.mode != mode {
        return Err(CertificateError::ModeMismatch { expected: mode, found: c.mode });
    }
    if c.formula_digest != formula_digest(f, mode) {
        return Err(CertificateError::DigestMismatch);
    }
    let mut m = Matrix::build(f, mode).with_copy_cap(u32::MAX);
    let mut groups: Vec<(&String, u32)> = c.multiplicity.iter().map(|(g, &n)| (g, n)).collect();
    groups.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
    for (id, n) in groups {
        let g = node(&m, id)?;
        if !m.node(g).is_group() {
            return Err(CertificateError::DanglingPosition(format!("{id} is not a copy group")));
        }
        if n == 0 || (m.node(g).children.len() as u32) > n {
            return Err(CertificateError::Malformed(format!("multiplicity {n} for {id}")));
        }
        while (m.node(g).children.len() as u32) < n {
            m.add_instance_in_place(g).map_err(|e| CertificateError::Malformed(e.to_string()))?;
        }
    }
    let mut sigma_q = TermSubstitution::new();
    let mut q = std::collections::BTreeMap::new();
    for (id, t) in &c.sigma_q {
        let n = node(&m, id)?;
        let v = m.node(n).var.ok_or_else(|| dangling(id))?;
        q.insert(v, convert(&m, t)?);
    }
    if !q.is_empty() {
        sigma_q = TermSubstitution::from_map(q);
    }
    let mut sigma_j = PrefixSubstitution::new();
    for (id, img) in &c.sigma_j {
        let n = node(&m, id)?;
        let v = match m.node(n).own_char {
            Some(PrefixChar::Var(v)) => v,
            _ => return Err(CertificateError::DanglingPosition(format!("{id} is not a prefix variable"))),
        };
        let img = img.iter().map(|c| prefix_const(&m, c)).collect::<Result<Vec<_>, _>>()?;
        sigma_j.bind(v, img);
    }
    let mut connections = Vec::with_capacity(c.connections.len());
    for [a, b] in &c.connections {
        let (x, y) = (node(&m, a)?, node(&m, b)?);
        if !m.node(x).is_atom() {
            return Err(dangling(a));
        }
        if !m.node(y).is_atom() {
            return Err(dangling(b));
        }
        connections.push((x, y));
    }
    Ok(Resolved { matrix: m, connections, sigma_q, sigma_j })
}

/// Whether a resolved connection is complementary under the substitutions.
pub(crate) fn complementary(r: &Resolved, a: NodeId, b: NodeId) -> bool {
    let m = &r.matrix;
    let (pa, pb) = (m.node(a), m.node(b));
    let (Some((sa, xs)), Some((sb, ys))) = (&pa.atom, &pb.atom) else { return false };
    if sa != sb || pa.polarity == pb.polarity || xs.len() != ys.len() {
        return false;
    }
    if !xs.iter().zip(ys).all(|(x, y)| r.sigma_q.apply(x) == r.sigma_q.apply(y)) {
        return false;
    }
    m.mode == Mode::Classical || r.sigma_j.apply(&pa.prefix) == r.sigma_j.apply(&pb.prefix)
}

/// Accepts iff every connection is complementary, the substitution is
/// admissible, and the connections span the matrix.
pub fn check_certificate(f: &Formula, c: &Certificate, mode: Mode) -> Result<(), CertificateError> {
    let r = resolve_certificate(f, c, mode)?;
    let m = &r.matrix;
    for &(a, b) in &r.connections {
        if !complementary(&r, a, b) {
            return Err(CertificateError::NonComplementary(m.node(a).id.clone(), m.node(b).id.clone()));
        }
    }
    check_admissible(m, &r.sigma_q, &r.sigma_j).map_err(|e| CertificateError::Circular(e.to_string()))?;
    let mut partners: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for &(a, b) in &r.connections {
        partners.entry(a).or_default().push(b);
        partners.entry(b).or_default().push(a);
    }
    let mut span = Spanning { m, partners, on_path: vec![false; m.len()], path: Vec::new(), budget: PATH_BOUND };
    match span.run(vec![m.root])? {
        None => Ok(()),
        Some(witness) => Err(CertificateError::UncoveredPath(witness.iter().map(|&n| m.node(n).id.clone()).collect())),
    }
}

struct Spanning<'a> {
    m: &'a Matrix,
    partners: HashMap<NodeId, Vec<NodeId>>,
    on_path: Vec<bool>,
    path: Vec<NodeId>,
    budget: u64,
}

impl Spanning<'_> {
    /// Explores every path through the pending nodes extending the current
    /// partial path; returns an uncovered one, if any.
    fn run(&mut self, mut pending: Vec<NodeId>) -> Result<Option<Vec<NodeId>>, CertificateError> {
        if self.budget == 0 {
            return Err(CertificateError::TooManyPaths(PATH_BOUND));
        }
        self.budget -= 1;
        let start = self.path.len();
        let result = loop {
            let Some(n) = pending.pop() else {
                break Ok(Some(self.path.clone()));
            };
            let p = self.m.node(n);
            match p.principal_type {
                PrincipalType::Atom => {
                    if self.partners.get(&n).is_some_and(|ps| ps.iter().any(|&q| self.on_path[q])) {
                        break Ok(None);
                    }
                    self.on_path[n] = true;
                    self.path.push(n);
                }
                PrincipalType::Beta => {
                    let mut found = None;
                    for &c in &p.children {
                        let mut next = pending.clone();
                        next.push(c);
                        if let Some(w) = self.run(next)? {
                            found = Some(w);
                            break;
                        }
                    }
                    break Ok(found);
                }
                _ => pending.extend(p.children.iter().rev().copied()),
            }
        };
        for &n in &self.path[start..] {
            self.on_path[n] = false;
        }
        self.path.truncate(start);
        result
    }
}
