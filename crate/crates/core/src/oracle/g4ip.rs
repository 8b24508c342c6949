//! Contraction-free sequent calculus for intuitionistic propositional
//! logic. Terminating without loop checks; results are memoised per
//! sequent.

use std::collections::{BTreeSet, HashMap};

use super::{to_prop, Prop};
use crate::syntax::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Bot,
    Var(u32),
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
}

#[derive(Default)]
struct Prover {
    nodes: Vec<Node>,
    index: HashMap<Node, u32>,
    memo: HashMap<(Vec<u32>, u32), bool>,
}

impl Prover {
    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.nodes.len() as u32;
        self.nodes.push(n);
        self.index.insert(n, i);
        i
    }

    fn add(&mut self, p: &Prop) -> u32 {
        let n = match p {
            Prop::Bot => Node::Bot,
            Prop::Var(v) => Node::Var(*v),
            Prop::And(a, b) => Node::And(self.add(a), self.add(b)),
            Prop::Or(a, b) => Node::Or(self.add(a), self.add(b)),
            Prop::Imp(a, b) => Node::Imp(self.add(a), self.add(b)),
        };
        self.intern(n)
    }

    fn prove(&mut self, gamma: &BTreeSet<u32>, goal: u32) -> bool {
        let key = (gamma.iter().copied().collect::<Vec<_>>(), goal);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = self.prove_uncached(gamma, goal);
        self.memo.insert(key, r);
        r
    }

    fn without(gamma: &BTreeSet<u32>, f: u32, add: &[u32]) -> BTreeSet<u32> {
        let mut g = gamma.clone();
        g.remove(&f);
        g.extend(add.iter().copied());
        g
    }

    fn prove_uncached(&mut self, gamma: &BTreeSet<u32>, goal: u32) -> bool {
        let bot = self.intern(Node::Bot);
        if gamma.contains(&bot) || (gamma.contains(&goal) && matches!(self.nodes[goal as usize], Node::Var(_))) {
            return true;
        }
        for &f in gamma {
            match self.nodes[f as usize] {
                Node::And(a, b) => return self.prove(&Self::without(gamma, f, &[a, b]), goal),
                Node::Or(a, b) => {
                    return self.prove(&Self::without(gamma, f, &[a]), goal)
                        && self.prove(&Self::without(gamma, f, &[b]), goal)
                }
                Node::Imp(a, b) => match self.nodes[a as usize] {
                    Node::Var(_) if gamma.contains(&a) => return self.prove(&Self::without(gamma, f, &[b]), goal),
                    Node::Bot => return self.prove(&Self::without(gamma, f, &[]), goal),
                    Node::And(c, d) => {
                        let dc = self.intern(Node::Imp(d, b));
                        let cdc = self.intern(Node::Imp(c, dc));
                        return self.prove(&Self::without(gamma, f, &[cdc]), goal);
                    }
                    Node::Or(c, d) => {
                        let cb = self.intern(Node::Imp(c, b));
                        let db = self.intern(Node::Imp(d, b));
                        return self.prove(&Self::without(gamma, f, &[cb, db]), goal);
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        match self.nodes[goal as usize] {
            Node::And(a, b) => return self.prove(gamma, a) && self.prove(gamma, b),
            Node::Imp(a, b) => {
                let mut g = gamma.clone();
                g.insert(a);
                return self.prove(&g, b);
            }
            _ => {}
        }
        if let Node::Or(a, b) = self.nodes[goal as usize] {
            if self.prove(gamma, a) || self.prove(gamma, b) {
                return true;
            }
        }
        let nested: Vec<(u32, u32, u32, u32)> = gamma
            .iter()
            .filter_map(|&f| match self.nodes[f as usize] {
                Node::Imp(ab, d) => match self.nodes[ab as usize] {
                    Node::Imp(a, b) => Some((f, a, b, d)),
                    _ => None,
                },
                _ => None,
            })
            .collect();
        for (f, a, b, d) in nested {
            let bd = self.intern(Node::Imp(b, d));
            let ab = self.intern(Node::Imp(a, b));
            if self.prove(&Self::without(gamma, f, &[bd]), ab) && self.prove(&Self::without(gamma, f, &[d]), goal) {
                return true;
            }
        }
        false
    }
}

/// Intuitionistic propositional validity. `None` if the formula has
/// quantifiers.
pub fn g4ip_valid(f: &Formula) -> Option<bool> {
    let (p, _) = to_prop(f)?;
    let mut prover = Prover::default();
    let goal = prover.add(&p);
    Some(prover.prove(&BTreeSet::new(), goal))
}
