//! ∂₁ on formal sums of nucleus states and a Hilbert basis for its kernel.

use std::collections::HashSet;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::FullRsg;
use crate::classes::ClassElement;
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::path::Path;

/// A formal sum of nucleus states, kept sorted, with its ∂₁ value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleMultiset {
    pub states: Vec<usize>,
    pub del1: ClassElement,
}

/// Minimal nonzero cycles; `max_degree` is the largest generator size.
#[derive(Clone, Debug)]
pub struct HilbertBasis {
    pub generators: Vec<CycleMultiset>,
    pub max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleJson {
    pub states: Vec<String>,
    pub del1: String,
}

const COMPLETION_LIMIT: usize = 200_000;

impl FullRsg {
    /// class(p(𝔠_v)) − class(𝔠_v) for one member.
    pub fn del1_state(&self, q: usize) -> Result<ClassElement> {
        let s = &self.nucleus.states[q];
        if !self.nucleus.members.contains(&q) {
            return Err(Error::NotInNucleus(s.name.clone()));
        }
        if !self.core.contains(s.dom) || !s.cod.is_some_and(|w| self.core.contains(w)) {
            return Err(Error::NotInNucleus(format!("state {} does not map between core nodes", s.name)));
        }
        let img = self.state_image(q);
        let dom = ClopenSet::cone(&self.graph, &Path::node(s.dom));
        Ok(self.classes.sub(&self.classes.class_of(&self.graph, img)?, &self.classes.class_of(&self.graph, &dom)?))
    }

    pub fn del1(&self, states: &[usize]) -> Result<ClassElement> {
        let mut acc = self.classes.zero();
        for &q in states {
            acc = self.classes.add(&acc, &self.del1_state(q)?);
        }
        Ok(acc)
    }

    pub fn multiset(&self, states: &[usize]) -> Result<CycleMultiset> {
        let mut states = states.to_vec();
        states.sort_unstable();
        let del1 = self.del1(&states)?;
        Ok(CycleMultiset { states, del1 })
    }

    pub fn is_cycle(&self, states: &[usize]) -> Result<bool> {
        Ok(self.classes.is_zero(&self.del1(states)?))
    }

    /// Minimal generators of the monoid of cycles. Each torsion coordinate
    /// ℤ/m becomes Σ xᵢ·dᵢ − m·s = 0 with a slack s ≥ 0, and the homogeneous
    /// system is solved by Contejean–Devie completion.
    pub fn ker_del1_generators(&self) -> Result<HilbertBasis> {
        let members: Vec<usize> = self.nucleus.members.clone();
        let values: Vec<ClassElement> = members.iter().map(|&q| self.del1_state(q)).collect::<Result<_>>()?;
        let diag = &self.classes.smith.diag;
        let n = members.len();
        let mut rows: Vec<Vec<i64>> = Vec::new();
        let mut moduli: Vec<i64> = Vec::new();
        let width = self.classes.generators.len();
        for j in 0..width {
            let d = diag.get(j).cloned().unwrap_or_else(Zero::zero);
            if d.is_one() {
                continue;
            }
            let row: Vec<i64> = values
                .iter()
                .map(|v| v.coords[j].to_i64().ok_or_else(|| Error::Budget("class coordinate too large".into())))
                .collect::<Result<_>>()?;
            if row.iter().all(|&x| x == 0) {
                continue;
            }
            rows.push(row);
            moduli.push(d.to_i64().ok_or_else(|| Error::Budget("torsion too large".into()))?);
        }
        let slack = moduli.iter().filter(|&&m| m != 0).count();
        let cols = n + slack;
        let mut a = vec![vec![0i64; cols]; rows.len()];
        let mut k = n;
        for (r, row) in rows.iter().enumerate() {
            a[r][..n].copy_from_slice(row);
            if moduli[r] != 0 {
                a[r][k] = -moduli[r];
                k += 1;
            }
        }
        let sols = hilbert_basis(&a, cols)?;
        let mut generators: Vec<CycleMultiset> = Vec::new();
        let mut seen = HashSet::new();
        for x in sols {
            let mut states = Vec::new();
            for (i, &c) in x[..n].iter().enumerate() {
                states.extend(std::iter::repeat(members[i]).take(c as usize));
            }
            if !states.is_empty() && seen.insert(states.clone()) {
                generators.push(self.multiset(&states)?);
            }
        }
        generators.sort_by(|a, b| a.states.len().cmp(&b.states.len()).then_with(|| a.states.cmp(&b.states)));
        let max_degree = generators.iter().map(|g| g.states.len()).max().unwrap_or(0);
        Ok(HilbertBasis { generators, max_degree })
    }

    pub fn cycle_to_json(&self, c: &CycleMultiset) -> CycleJson {
        CycleJson {
            states: c.states.iter().map(|&q| self.state_name(q).to_string()).collect(),
            del1: self.classes.show(&c.del1),
        }
    }
}

impl HilbertBasis {
    /// Writes a cycle as a sum of generators, by backtracking over the
    /// generator list. Returns generator indices.
    pub fn decompose(&self, states: &[usize]) -> Option<Vec<usize>> {
        let mut counts: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
        for &q in states {
            *counts.entry(q).or_default() += 1;
        }
        let gens: Vec<std::collections::BTreeMap<usize, usize>> = self
            .generators
            .iter()
            .map(|g| {
                let mut m = std::collections::BTreeMap::new();
                for &q in &g.states {
                    *m.entry(q).or_default() += 1;
                }
                m
            })
            .collect();
        let mut out = Vec::new();
        if split(&gens, &mut counts, 0, &mut out) {
            Some(out)
        } else {
            None
        }
    }
}

fn split(
    gens: &[std::collections::BTreeMap<usize, usize>],
    rest: &mut std::collections::BTreeMap<usize, usize>,
    from: usize,
    out: &mut Vec<usize>,
) -> bool {
    if rest.values().all(|&c| c == 0) {
        return true;
    }
    for (i, g) in gens.iter().enumerate().skip(from) {
        if g.iter().all(|(q, c)| rest.get(q).copied().unwrap_or(0) >= *c) {
            for (q, c) in g {
                *rest.get_mut(q).expect("present") -= c;
            }
            out.push(i);
            if split(gens, rest, i, out) {
                return true;
            }
            out.pop();
            for (q, c) in g {
                *rest.get_mut(q).expect("present") += c;
            }
        }
    }
    false
}

fn leq(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Minimal nonzero solutions in ℕ^cols of a·x = 0.
fn hilbert_basis(a: &[Vec<i64>], cols: usize) -> Result<Vec<Vec<i64>>> {
    let image = |x: &[i64]| -> Vec<i64> { a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect() };
    let unit = |j: usize| -> Vec<i64> {
        let mut e = vec![0; cols];
        e[j] = 1;
        e
    };
    let col_images: Vec<Vec<i64>> = (0..cols).map(|j| image(&unit(j))).collect();
    let mut basis: Vec<Vec<i64>> = Vec::new();
    let mut frontier: Vec<Vec<i64>> = (0..cols).map(unit).collect();
    let mut work = 0usize;
    while !frontier.is_empty() {
        let mut rest = Vec::new();
        for p in frontier {
            let ap = image(&p);
            if ap.iter().all(|&v| v == 0) {
                if !basis.iter().any(|b| leq(b, &p)) {
                    basis.push(p);
                }
            } else {
                rest.push((p, ap));
            }
        }
        let mut next: HashSet<Vec<i64>> = HashSet::new();
        for (p, ap) in rest {
            for (j, cj) in col_images.iter().enumerate() {
                let dot: i64 = ap.iter().zip(cj).map(|(x, y)| x * y).sum();
                if dot >= 0 {
                    continue;
                }
                let mut q = p.clone();
                q[j] += 1;
                if basis.iter().any(|b| leq(b, &q)) {
                    continue;
                }
                next.insert(q);
                work += 1;
                if work > COMPLETION_LIMIT {
                    return Err(Error::Budget(format!("Hilbert basis completion past {COMPLETION_LIMIT} candidates")));
                }
            }
        }
        let mut v: Vec<Vec<i64>> = next.into_iter().collect();
        v.sort();
        frontier = v;
    }
    basis.sort();
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::hilbert_basis;

    #[test]
    fn parity_system() {
        // x0 free, 1·x1 − 2s = 0: generators e0 and (0,2,1).
        let b = hilbert_basis(&[vec![0, 1, -2]], 3).unwrap();
        assert_eq!(b, vec![vec![0, 2, 1], vec![1, 0, 0]]);
    }

    #[test]
    fn signed_system() {
        let b = hilbert_basis(&[vec![1, -1, 2]], 3).unwrap();
        assert!(b.contains(&vec![1, 1, 0]));
        assert!(b.contains(&vec![0, 2, 1]));
        assert_eq!(b.len(), 2);
    }
}
