//! Proof certificates: multiplicity, combined substitution and a spanning
//! set of connections, with a JSON encoding and an independent checker.
//!
//! # JSON format (version 1)
//!
//! ```text
//! {
//!   "version": 1,
//!   "mode": "intuitionistic" | "classical",
//!   "formula_digest": "<sha-256 hex of the printed formula, a newline and the mode>",
//!   "multiplicity": { "<copy group id>": <instances>, ... },
//!   "sigma_q": { "<quantifier position id>": <term>, ... },
//!   "sigma_j": { "<prefix variable position id>": ["<prefix constant position id>", ...], ... },
//!   "connections": [ ["<atom id>", "<atom id>"], ... ]
//! }
//! ```
//!
//! Terms are `{"var": "<quantifier position id>"}`,
//! `{"fun": "<name>", "args": [...]}` or
//! `{"sk": "<eigenvariable position id>", "args": [...]}`.
//! Copy groups missing from `multiplicity` have one instance. Position ids
//! are those of the matrix with that multiplicity.

mod check;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::matrix::{MTerm, Matrix, Mode, NodeId, PrefixChar};
use crate::syntax::{print_formula, Formula};
use crate::unification::{PrefixSubstitution, TermSubstitution};

pub use check::{check_certificate, resolve_certificate, Resolved, PATH_BOUND};

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CTerm {
    Var { var: String },
    Fun { fun: String, args: Vec<CTerm> },
    Sk { sk: String, args: Vec<CTerm> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub version: u32,
    pub mode: Mode,
    pub formula_digest: String,
    #[serde(default)]
    pub multiplicity: BTreeMap<String, u32>,
    #[serde(default)]
    pub sigma_q: BTreeMap<String, CTerm>,
    #[serde(default)]
    pub sigma_j: BTreeMap<String, Vec<String>>,
    pub connections: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("unsupported certificate version {0}")]
    Version(u32),
    #[error("certificate is for {found} mode, checking in {expected} mode")]
    ModeMismatch { expected: Mode, found: Mode },
    #[error("certificate digest does not match the formula")]
    DigestMismatch,
    #[error("dangling position: {0}")]
    DanglingPosition(String),
    #[error("connection {0} - {1} is not complementary")]
    NonComplementary(String, String),
    #[error("substitution is not admissible: {0}")]
    Circular(String),
    #[error("uncovered path: {}", .0.join(" "))]
    UncoveredPath(Vec<String>),
    #[error("matrix has more than {0} paths to check")]
    TooManyPaths(u64),
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

/// Digest binding a certificate to a formula and mode.
pub fn formula_digest(f: &Formula, mode: Mode) -> String {
    let mut h = Sha256::new();
    h.update(print_formula(f).as_bytes());
    h.update(b"\n");
    h.update(mode.name().as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn term_to_cterm(m: &Matrix, t: &MTerm) -> CTerm {
    match t {
        MTerm::Var(v) => CTerm::Var { var: m.node(m.var_info(*v).node).id.clone() },
        MTerm::App(s, args) => {
            let args = args.iter().map(|a| term_to_cterm(m, a)).collect();
            let info = m.symbol(*s);
            match info.skolem_of {
                Some(d) => CTerm::Sk { sk: m.node(d).id.clone(), args },
                None => CTerm::Fun { fun: info.name.clone(), args },
            }
        }
    }
}

impl Certificate {
    /// Encodes a proof found on matrix `m`. `sigma_j` should already be
    /// restricted to the matrix's prefix variables.
    pub fn from_parts(
        f: &Formula,
        m: &Matrix,
        connections: &[(NodeId, NodeId)],
        sigma_q: &TermSubstitution,
        sigma_j: &PrefixSubstitution,
    ) -> Certificate {
        let multiplicity =
            m.multiplicity().into_iter().filter(|&(_, n)| n != 1).map(|(g, n)| (m.node(g).id.clone(), n)).collect();
        let sigma_q = sigma_q
            .iter()
            .map(|(v, t)| (m.node(m.var_info(v).node).id.clone(), term_to_cterm(m, &sigma_q.apply(t))))
            .collect();
        let sigma_j = sigma_j
            .iter()
            .map(|(v, img)| (m.node(v).id.clone(), img.iter().map(|c| m.node(c.node()).id.clone()).collect()))
            .collect();
        let mut connections: Vec<[String; 2]> =
            connections.iter().map(|&(a, b)| [m.node(a).id.clone(), m.node(b).id.clone()]).collect();
        connections.sort();
        connections.dedup();
        Certificate {
            version: CERTIFICATE_VERSION,
            mode: m.mode,
            formula_digest: formula_digest(f, m.mode),
            multiplicity,
            sigma_q,
            sigma_j,
            connections,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Certificate, CertificateError> {
        let c: Certificate = serde_json::from_str(s).map_err(|e| CertificateError::Malformed(e.to_string()))?;
        if c.version != CERTIFICATE_VERSION {
            return Err(CertificateError::Version(c.version));
        }
        Ok(c)
    }
}

pub(crate) fn prefix_const(m: &Matrix, id: &str) -> Result<PrefixChar, CertificateError> {
    let n = m.lookup(id).ok_or_else(|| CertificateError::DanglingPosition(id.to_string()))?;
    match m.node(n).own_char {
        Some(c @ PrefixChar::Const(_)) => Ok(c),
        _ => Err(CertificateError::DanglingPosition(format!("{id} is not a prefix constant"))),
    }
}
