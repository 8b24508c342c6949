//! Exhaustive search for small finite Kripke countermodels.

use super::{to_prop, Prop};
use crate::syntax::Formula;

/// Maximum number of letters for which countermodels are searched.
pub const KRIPKE_ATOMS: usize = 4;

/// A finite rooted Kripke model. World 0 is the root; `up[w]` is the bit
/// set of worlds accessible from `w` (reflexive and transitive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    pub worlds: usize,
    pub up: Vec<u32>,
    /// Letter names in order and, for each, the set of worlds forcing it.
    pub letters: Vec<(String, u32)>,
}

fn force(p: &Prop, up: &[u32], val: &[u32]) -> u32 {
    match p {
        Prop::Bot => 0,
        Prop::Var(i) => val[*i as usize],
        Prop::And(a, b) => force(a, up, val) & force(b, up, val),
        Prop::Or(a, b) => force(a, up, val) | force(b, up, val),
        Prop::Imp(a, b) => {
            let (fa, fb) = (force(a, up, val), force(b, up, val));
            let mut out = 0;
            for (w, &u) in up.iter().enumerate() {
                if u & fa & !fb == 0 {
                    out |= 1 << w;
                }
            }
            out
        }
    }
}

impl KripkeModel {
    /// Whether the root forces `f`. Letters absent from the model are
    /// forced nowhere.
    pub fn forces_root(&self, f: &Formula) -> bool {
        let Some((p, names)) = to_prop(f) else { return false };
        let val: Vec<u32> = names
            .iter()
            .map(|n| self.letters.iter().find(|(m, _)| m == n).map_or(0, |(_, s)| *s))
            .collect();
        force(&p, &self.up, &val) & 1 == 1
    }
}

/// Rooted partial orders on `n` worlds, with worlds numbered along a
/// linear extension.
fn orders(n: usize) -> Vec<Vec<u32>> {
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|j| (1..j).map(move |i| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << pairs.len() {
        let mut up: Vec<u32> = (0..n).map(|w| 1 << w).collect();
        up[0] = (1 << n) - 1;
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                up[i] |= 1 << j;
            }
        }
        let transitive = (0..n).all(|w| (0..n).filter(|&v| up[w] >> v & 1 == 1).all(|v| up[v] & !up[w] == 0));
        if transitive {
            out.push(up);
        }
    }
    out
}

/// Searches models with at most `max_worlds` worlds (and at most
/// [`KRIPKE_ATOMS`] letters) whose root does not force `f`.
pub fn kripke_countermodel(f: &Formula, max_worlds: usize) -> Option<KripkeModel> {
    let (p, names) = to_prop(f)?;
    if names.len() > KRIPKE_ATOMS || max_worlds == 0 || max_worlds > 8 {
        return None;
    }
    for n in 1..=max_worlds {
        for up in orders(n) {
            let upsets: Vec<u32> = (0u32..1 << n).filter(|&s| (0..n).all(|w| s >> w & 1 == 0 || up[w] & !s == 0)).collect();
            let k = names.len();
            let mut idx = vec![0usize; k];
            loop {
                let val: Vec<u32> = idx.iter().map(|&i| upsets[i]).collect();
                if force(&p, &up, &val) & 1 == 0 {
                    let letters = names.iter().cloned().zip(val).collect();
                    return Some(KripkeModel { worlds: n, up, letters });
                }
                let mut j = 0;
                loop {
                    if j == k {
                        break;
                    }
                    idx[j] += 1;
                    if idx[j] < upsets.len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == k {
                    break;
                }
            }
        }
    }
    None
}
