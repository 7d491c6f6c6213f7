//! The abelian group of classes presented by [v] = Σ [t(e)] over the edges
//! leaving v, computed through the Smith normal form.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::graph::{irreducible, DirectedGraph, NodeId};
use crate::snf::{smith_normal_form, Matrix, Smith};

#[derive(Clone, Debug)]
pub struct ClassesGroup {
    pub generators: Vec<NodeId>,
    pub relations: Matrix,
    pub smith: Smith,
    index: HashMap<NodeId, usize>,
    /// Node-count vectors for every node, expanding nodes outside the generators.
    node_vectors: Vec<Option<Vec<BigInt>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassElement {
    pub coords: Vec<BigInt>,
}

impl ClassesGroup {
    /// Classes group of an irreducible subgraph given by its node set.
    pub fn of_core(g: &DirectedGraph, nodes: &[NodeId]) -> Result<ClassesGroup> {
        let sub = g.induced(nodes)?;
        if !irreducible(&sub) {
            return Err(Error::NotIrreducible);
        }
        Self::of_closed_set(g, nodes)
    }

    /// Presentation on any successor-closed node set. Classes of clopen sets
    /// whose termini stay inside the set are invariant under refinement.
    pub fn of_closed_set(g: &DirectedGraph, nodes: &[NodeId]) -> Result<ClassesGroup> {
        let mut generators = nodes.to_vec();
        generators.sort_unstable();
        generators.dedup();
        let index: HashMap<NodeId, usize> = generators.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = generators.len();
        let mut relations = vec![vec![BigInt::zero(); n]; n];
        for (i, &v) in generators.iter().enumerate() {
            relations[i][i] += BigInt::one();
            for w in g.successors(v) {
                let j = *index.get(&w).ok_or_else(|| {
                    Error::InvalidGraph(format!("node set not closed: {} -> {}", g.node_name(v), g.node_name(w)))
                })?;
                relations[i][j] -= BigInt::one();
            }
        }
        let smith = smith_normal_form(&relations);
        let mut grp = ClassesGroup { generators, relations, smith, index, node_vectors: vec![None; g.node_count()] };
        grp.fill_node_vectors(g);
        Ok(grp)
    }

    fn fill_node_vectors(&mut self, g: &DirectedGraph) {
        let n = self.generators.len();
        // 0 = unvisited, 1 = in progress, 2 = done
        let mut state = vec![0u8; g.node_count()];
        fn visit(
            g: &DirectedGraph,
            v: NodeId,
            grp: &mut ClassesGroup,
            state: &mut [u8],
            n: usize,
        ) -> Option<Vec<BigInt>> {
            if let Some(&i) = grp.index.get(&v) {
                let mut x = vec![BigInt::zero(); n];
                x[i] = BigInt::one();
                return Some(x);
            }
            match state[v] {
                2 => return grp.node_vectors[v].clone(),
                1 => return None,
                _ => {}
            }
            state[v] = 1;
            let mut acc = vec![BigInt::zero(); n];
            let mut ok = !g.out_edges(v).is_empty();
            for w in g.successors(v).collect::<Vec<_>>() {
                match visit(g, w, grp, state, n) {
                    Some(x) => {
                        for (a, b) in acc.iter_mut().zip(x) {
                            *a += b;
                        }
                    }
                    None => ok = false,
                }
            }
            state[v] = 2;
            let res = if ok { Some(acc) } else { None };
            grp.node_vectors[v] = res.clone();
            res
        }
        for v in 0..g.node_count() {
            let x = visit(g, v, self, &mut state, n);
            self.node_vectors[v] = x;
        }
    }

    pub fn invariants(&self) -> &[BigInt] {
        &self.smith.diag
    }

    pub fn rank(&self) -> usize {
        self.smith.diag.iter().filter(|d| d.is_zero()).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.smith.diag.iter().all(|d| d.is_one())
    }

    pub fn zero(&self) -> ClassElement {
        ClassElement { coords: vec![BigInt::zero(); self.generators.len()] }
    }

    /// Reduces a generator-count vector into Smith coordinates.
    pub fn reduce(&self, x: &[BigInt]) -> ClassElement {
        let n = self.generators.len();
        let mut y = vec![BigInt::zero(); n];
        for (j, yj) in y.iter_mut().enumerate() {
            for (i, xi) in x.iter().enumerate() {
                if !xi.is_zero() {
                    *yj += xi * &self.smith.right[i][j];
                }
            }
            if j < self.smith.diag.len() && !self.smith.diag[j].is_zero() {
                *yj = yj.mod_floor(&self.smith.diag[j]);
            }
        }
        ClassElement { coords: y }
    }

    pub fn node_vector(&self, v: NodeId) -> Result<&[BigInt]> {
        self.node_vectors[v]
            .as_deref()
            .ok_or_else(|| Error::InvalidGraph(format!("node {v} does not flow into the generator set")))
    }

    pub fn node_class(&self, v: NodeId) -> Result<ClassElement> {
        Ok(self.reduce(self.node_vector(v)?))
    }

    /// Class of a nonempty clopen set, summing node classes over its minimal code.
    pub fn class_of(&self, g: &DirectedGraph, set: &ClopenSet) -> Result<ClassElement> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let n = self.generators.len();
        let mut x = vec![BigInt::zero(); n];
        for c in set.cones() {
            let termini: Vec<NodeId> = match c.terminus(g) {
                Some(t) => vec![t],
                None => (0..g.node_count()).collect(),
            };
            for t in termini {
                for (a, b) in x.iter_mut().zip(self.node_vector(t)?) {
                    *a += b;
                }
            }
        }
        Ok(self.reduce(&x))
    }

    /// Class of a multiset of nodes (termini of a code).
    pub fn class_of_nodes(&self, nodes: &[NodeId]) -> Result<ClassElement> {
        let n = self.generators.len();
        let mut x = vec![BigInt::zero(); n];
        for &t in nodes {
            for (a, b) in x.iter_mut().zip(self.node_vector(t)?) {
                *a += b;
            }
        }
        Ok(self.reduce(&x))
    }

    pub fn add(&self, a: &ClassElement, b: &ClassElement) -> ClassElement {
        let x: Vec<BigInt> = a.coords.iter().zip(&b.coords).map(|(p, q)| p + q).collect();
        self.normalize(x)
    }

    pub fn sub(&self, a: &ClassElement, b: &ClassElement) -> ClassElement {
        let x: Vec<BigInt> = a.coords.iter().zip(&b.coords).map(|(p, q)| p - q).collect();
        self.normalize(x)
    }

    pub fn scale(&self, a: &ClassElement, k: i64) -> ClassElement {
        let x: Vec<BigInt> = a.coords.iter().map(|p| p * BigInt::from(k)).collect();
        self.normalize(x)
    }

    fn normalize(&self, mut y: Vec<BigInt>) -> ClassElement {
        for (j, yj) in y.iter_mut().enumerate() {
            if j < self.smith.diag.len() && !self.smith.diag[j].is_zero() {
                *yj = yj.mod_floor(&self.smith.diag[j]);
            }
        }
        ClassElement { coords: y }
    }

    pub fn is_zero(&self, a: &ClassElement) -> bool {
        a.coords.iter().all(|c| c.is_zero())
    }

    pub fn describe(&self) -> String {
        self.to_string()
    }

    /// Human-readable element, listing only nontrivial coordinates.
    pub fn show(&self, a: &ClassElement) -> String {
        let parts: Vec<String> = a
            .coords
            .iter()
            .zip(&self.smith.diag)
            .filter(|(_, d)| !d.is_one())
            .map(|(c, _)| c.to_string())
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            format!("({})", parts.join(", "))
        }
    }
}

impl fmt::Display for ClassesGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .smith
            .diag
            .iter()
            .filter(|d| !d.is_one())
            .map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{d}") })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
