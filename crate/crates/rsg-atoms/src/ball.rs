//! Balls in the Cayley graph, enumerated layer by layer.

use std::collections::HashMap;

use crate::error::{AtomsError, Result};
use crate::oracle::{Elem, GroupOracle};

pub const NONE: u32 = u32::MAX;

/// The n-ball B_n. Elements are listed by layer, and shortlex within a
/// layer, so B_j is always a prefix of the list.
#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: usize,
    pub elems: Vec<Elem>,
    pub layer: Vec<u32>,
    /// `starts[j]` is the index of the first element of S_j; `starts[radius+1]`
    /// is the size of the ball.
    pub starts: Vec<usize>,
    /// `adj[i][s]` is the index of x_i·s, or NONE outside the ball.
    pub adj: Vec<Vec<u32>>,
    index: HashMap<Elem, usize>,
}

impl Ball {
    pub fn new(oracle: &GroupOracle, radius: usize, max_elems: usize) -> Result<Ball> {
        let ngen = oracle.gen_count();
        let mut elems = vec![oracle.identity()];
        let mut layer = vec![0u32];
        let mut starts = vec![0usize];
        let mut index = HashMap::new();
        index.insert(oracle.identity(), 0usize);
        for j in 0..radius {
            starts.push(elems.len());
            let mut next: Vec<Elem> = Vec::new();
            for i in starts[j]..starts[j + 1] {
                for s in 0..ngen as u8 {
                    let y = oracle.mul(&elems[i], &[s]);
                    if y.len() == j + 1 && !index.contains_key(&y) {
                        index.insert(y.clone(), usize::MAX);
                        next.push(y);
                    }
                }
            }
            if elems.len() + next.len() > max_elems {
                return Err(AtomsError::Budget(format!("ball of radius {radius} exceeds {max_elems} elements")));
            }
            next.sort();
            for y in next {
                index.insert(y.clone(), elems.len());
                elems.push(y);
                layer.push(j as u32 + 1);
            }
        }
        starts.push(elems.len());
        let adj = elems
            .iter()
            .map(|x| {
                (0..ngen as u8)
                    .map(|s| index.get(&oracle.mul(x, &[s])).map_or(NONE, |&i| i as u32))
                    .collect()
            })
            .collect();
        Ok(Ball { radius, elems, layer, starts, adj, index })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// |B_j| for j ≤ radius.
    pub fn size_of(&self, j: usize) -> usize {
        self.starts[j.min(self.radius) + 1]
    }

    pub fn sphere(&self, j: usize) -> std::ops::Range<usize> {
        self.starts[j]..self.starts[j + 1]
    }

    pub fn position(&self, x: &[u8]) -> Option<usize> {
        self.index.get(x).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layers_are_bfs_depth() {
        let o = GroupOracle::free_product(&["Z/2", "Z"]).unwrap();
        let b = Ball::new(&o, 5, 1 << 20).unwrap();
        for (i, x) in b.elems.iter().enumerate() {
            assert_eq!(x.len(), b.layer[i] as usize);
            for &j in &b.adj[i] {
                if j != NONE {
                    assert!(b.layer[j as usize].abs_diff(b.layer[i]) == 1);
                }
            }
        }
    }
}
