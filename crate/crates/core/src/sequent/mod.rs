//! Sequent proofs in a multi-succedent calculus, translated from
//! certificates and checked independently.
//!
//! Sequents are sets of formulas. A premise may omit formulas of its
//! conclusion, so weakening and contraction are implicit. In intuitionistic
//! mode the critical rules `=>R`, `~R` and `!R` keep only their side
//! formula in the succedent.

mod check;
mod translate;

use std::fmt::Write;

use serde_json::{json, Value};
use thiserror::Error;

use crate::matrix::Mode;
use crate::syntax::{parse_formula, parse_term, Formula, Term};

pub use check::{check_sequent, SequentError};
pub use translate::{to_sequent, TranslateError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Axiom,
    AndL,
    AndR,
    OrL,
    OrR,
    ImpL,
    ImpR,
    NotL,
    NotR,
    IffL,
    IffR,
    ForallL { term: Term },
    ForallR { eigen: String },
    ExistsL { eigen: String },
    ExistsR { term: Term },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed sequent proof: {0}")]
pub struct ProofFormatError(pub String);

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Axiom => "ax",
            Rule::AndL => "&L",
            Rule::AndR => "&R",
            Rule::OrL => "|L",
            Rule::OrR => "|R",
            Rule::ImpL => "=>L",
            Rule::ImpR => "=>R",
            Rule::NotL => "~L",
            Rule::NotR => "~R",
            Rule::IffL => "<=>L",
            Rule::IffR => "<=>R",
            Rule::ForallL { .. } => "!L",
            Rule::ForallR { .. } => "!R",
            Rule::ExistsL { .. } => "?L",
            Rule::ExistsR { .. } => "?R",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: Rule,
    pub ante: Vec<Formula>,
    pub succ: Vec<Formula>,
    /// The formula the rule decomposes (the shared atom for axioms).
    pub principal: Formula,
    pub premises: Vec<ProofNode>,
    /// For axioms, the certificate connection closing the branch.
    pub connection: Option<[String; 2]>,
}

impl ProofNode {
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofNode::size).sum::<usize>()
    }

    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a ProofNode)) {
        f(self);
        for p in &self.premises {
            p.visit(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentProof {
    pub mode: Mode,
    pub formula: Formula,
    pub root: ProofNode,
}

fn join(fs: &[Formula]) -> String {
    fs.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
}

fn rule_detail(r: &Rule) -> String {
    match r {
        Rule::ForallL { term } | Rule::ExistsR { term } => format!(" [{term}]"),
        Rule::ForallR { eigen } | Rule::ExistsL { eigen } => format!(" [{eigen}]"),
        _ => String::new(),
    }
}

impl SequentProof {
    /// Indented text rendering, one sequent per line, premises below their
    /// conclusion: `<rule>[ [term or eigenvariable]]  <ante> |- <succ>`.
    pub fn render(&self) -> String {
        fn go(n: &ProofNode, depth: usize, out: &mut String) {
            let _ = writeln!(
                out,
                "{:indent$}{}{}  {} |- {}",
                "",
                n.rule.name(),
                rule_detail(&n.rule),
                join(&n.ante),
                join(&n.succ),
                indent = 2 * depth
            );
            for p in &n.premises {
                go(p, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(&self.root, 0, &mut out);
        out
    }

    pub fn to_json(&self) -> String {
        fn node(n: &ProofNode) -> Value {
            let mut v = json!({
                "rule": n.rule.name(),
                "ante": n.ante.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "succ": n.succ.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "principal": n.principal.to_string(),
                "premises": n.premises.iter().map(node).collect::<Vec<_>>(),
            });
            match &n.rule {
                Rule::ForallL { term } | Rule::ExistsR { term } => v["term"] = json!(term.to_string()),
                Rule::ForallR { eigen } | Rule::ExistsL { eigen } => v["eigen"] = json!(eigen),
                _ => {}
            }
            if let Some(c) = &n.connection {
                v["connection"] = json!(c);
            }
            v
        }
        let v = json!({ "mode": self.mode, "formula": self.formula.to_string(), "proof": node(&self.root) });
        serde_json::to_string_pretty(&v).expect("serializing a JSON value cannot fail")
    }

    /// Reads the format written by [`SequentProof::to_json`].
    pub fn from_json(text: &str) -> Result<SequentProof, ProofFormatError> {
        let bad = |m: &str| ProofFormatError(m.to_string());
        fn formula(v: &Value) -> Result<Formula, ProofFormatError> {
            let s = v.as_str().ok_or_else(|| ProofFormatError("formula is not a string".into()))?;
            parse_formula(s).map_err(|e| ProofFormatError(format!("{s}: {e}")))
        }
        fn formulas(v: &Value) -> Result<Vec<Formula>, ProofFormatError> {
            v.as_array().ok_or_else(|| ProofFormatError("expected a formula list".into()))?.iter().map(formula).collect()
        }
        fn node(v: &Value) -> Result<ProofNode, ProofFormatError> {
            let field = |k: &str| v.get(k).and_then(Value::as_str).ok_or_else(|| ProofFormatError(format!("missing {k}")));
            let term = || -> Result<Term, ProofFormatError> {
                let s = field("term")?;
                parse_term(s).map_err(|e| ProofFormatError(format!("{s}: {e}")))
            };
            let eigen = || field("eigen").map(str::to_string);
            let rule = match field("rule")? {
                "ax" => Rule::Axiom,
                "&L" => Rule::AndL,
                "&R" => Rule::AndR,
                "|L" => Rule::OrL,
                "|R" => Rule::OrR,
                "=>L" => Rule::ImpL,
                "=>R" => Rule::ImpR,
                "~L" => Rule::NotL,
                "~R" => Rule::NotR,
                "<=>L" => Rule::IffL,
                "<=>R" => Rule::IffR,
                "!L" => Rule::ForallL { term: term()? },
                "!R" => Rule::ForallR { eigen: eigen()? },
                "?L" => Rule::ExistsL { eigen: eigen()? },
                "?R" => Rule::ExistsR { term: term()? },
                other => return Err(ProofFormatError(format!("unknown rule {other}"))),
            };
            let premises = match v.get("premises") {
                Some(Value::Array(ps)) => ps.iter().map(node).collect::<Result<_, _>>()?,
                None => Vec::new(),
                Some(_) => return Err(ProofFormatError("premises is not a list".into())),
            };
            let connection = match v.get("connection") {
                Some(c) => Some(serde_json::from_value(c.clone()).map_err(|e| ProofFormatError(e.to_string()))?),
                None => None,
            };
            Ok(ProofNode {
                rule,
                ante: formulas(v.get("ante").unwrap_or(&Value::Null))?,
                succ: formulas(v.get("succ").unwrap_or(&Value::Null))?,
                principal: formula(v.get("principal").unwrap_or(&Value::Null))?,
                premises,
                connection,
            })
        }
        let v: Value = serde_json::from_str(text).map_err(|e| ProofFormatError(e.to_string()))?;
        let mode = serde_json::from_value(v.get("mode").cloned().ok_or_else(|| bad("missing mode"))?)
            .map_err(|e| ProofFormatError(e.to_string()))?;
        let formula = formula(v.get("formula").ok_or_else(|| bad("missing formula"))?)?;
        let root = node(v.get("proof").ok_or_else(|| bad("missing proof"))?)?;
        Ok(SequentProof { mode, formula, root })
    }
}
