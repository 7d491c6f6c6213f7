//! Codes and clopen subsets of the edge shift, kept in a canonical form.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::path::{Path, PathJson};

/// How a clopen set meets a cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Full,
    Partial,
    Empty,
}

/// A finite union of cones in canonical form: no cone contains another, no
/// complete sibling family is left unmerged, sorted. Assumes no empty cones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClopenSet {
    cones: Vec<Path>,
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet { cones: Vec::new() }
    }

    pub fn whole() -> Self {
        ClopenSet { cones: vec![Path::null()] }
    }

    pub fn cone(g: &DirectedGraph, p: &Path) -> Self {
        Self::from_paths(g, std::slice::from_ref(p))
    }

    /// Union of the cones of `paths`, canonicalized.
    pub fn from_paths(g: &DirectedGraph, paths: &[Path]) -> Self {
        let mut v: Vec<Path> = paths.to_vec();
        v.sort();
        v.dedup();
        let mut kept: Vec<Path> = Vec::with_capacity(v.len());
        for p in v {
            if kept.last().is_some_and(|q| q.is_prefix_of(&p)) {
                continue;
            }
            kept.push(p);
        }
        loop {
            let mut by_parent: BTreeMap<Path, usize> = BTreeMap::new();
            for p in &kept {
                if let Some(par) = p.parent() {
                    *by_parent.entry(par).or_default() += 1;
                }
            }
            let full: Vec<Path> =
                by_parent.into_iter().filter(|(par, n)| *n == par.child_count(g)).map(|(par, _)| par).collect();
            if full.is_empty() {
                break;
            }
            kept.retain(|p| !p.parent().is_some_and(|par| full.binary_search(&par).is_ok()));
            kept.extend(full);
            kept.sort();
            let mut dedup: Vec<Path> = Vec::with_capacity(kept.len());
            for p in kept {
                if dedup.last().is_some_and(|q| q.is_prefix_of(&p)) {
                    continue;
                }
                dedup.push(p);
            }
            kept = dedup;
        }
        ClopenSet { cones: kept }
    }

    pub fn cones(&self) -> &[Path] {
        &self.cones
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.cones.len() == 1 && self.cones[0].is_null()
    }

    pub fn coverage(&self, p: &Path) -> Coverage {
        let mut partial = false;
        for c in &self.cones {
            if c.is_prefix_of(p) {
                return Coverage::Full;
            }
            if p.is_prefix_of(c) {
                partial = true;
            }
        }
        if partial {
            Coverage::Partial
        } else {
            Coverage::Empty
        }
    }

    pub fn contains_cone(&self, p: &Path) -> bool {
        self.coverage(p) == Coverage::Full
    }

    pub fn union(&self, g: &DirectedGraph, other: &ClopenSet) -> ClopenSet {
        let mut v = self.cones.clone();
        v.extend_from_slice(&other.cones);
        Self::from_paths(g, &v)
    }

    pub fn intersect(&self, g: &DirectedGraph, other: &ClopenSet) -> ClopenSet {
        let mut out = Vec::new();
        for c in &self.cones {
            split_against(g, other, c, true, &mut out);
        }
        Self::from_paths(g, &out)
    }

    pub fn difference(&self, g: &DirectedGraph, other: &ClopenSet) -> ClopenSet {
        let mut out = Vec::new();
        for c in &self.cones {
            split_against(g, other, c, false, &mut out);
        }
        Self::from_paths(g, &out)
    }

    pub fn is_subset(&self, g: &DirectedGraph, other: &ClopenSet) -> bool {
        self.difference(g, other).is_empty()
    }

    pub fn is_disjoint(&self, g: &DirectedGraph, other: &ClopenSet) -> bool {
        self.intersect(g, other).is_empty()
    }

    /// The set p·X for X ⊆ 𝔠_{t(p)} given by absolute paths starting at t(p).
    pub fn prefixed(&self, g: &DirectedGraph, p: &Path) -> Result<ClopenSet> {
        if p.is_null() {
            return Ok(self.clone());
        }
        let mut v = Vec::with_capacity(self.cones.len());
        for c in &self.cones {
            if c.is_null() {
                v.push(p.clone());
            } else {
                v.push(p.concat(g, c)?);
            }
        }
        Ok(Self::from_paths(g, &v))
    }

    /// (self ∩ 𝔠_p) with the prefix p removed, as a subset of 𝔠_{t(p)}.
    pub fn relative_to(&self, g: &DirectedGraph, p: &Path) -> ClopenSet {
        if p.is_null() {
            return self.clone();
        }
        let inter = self.intersect(g, &ClopenSet::cone(g, p));
        let mut v = Vec::new();
        for c in inter.cones() {
            if c.is_prefix_of(p) {
                v.push(Path::node(p.terminus(g).expect("non-null")));
            } else if let Some(s) = c.strip_prefix(g, p) {
                v.push(s);
            }
        }
        Self::from_paths(g, &v)
    }

    /// Expands cones until each has length at least `n` edges. The null path
    /// and node paths count as length zero.
    pub fn code_at_length(&self, g: &DirectedGraph, n: usize) -> Vec<Path> {
        let mut out = Vec::new();
        let mut stack: Vec<Path> = self.cones.iter().rev().cloned().collect();
        while let Some(p) = stack.pop() {
            if !p.is_null() && p.len() >= n {
                out.push(p);
            } else {
                let mut ch = p.children(g);
                ch.reverse();
                stack.extend(ch);
            }
        }
        out
    }

    pub fn to_json(&self, g: &DirectedGraph) -> Vec<PathJson> {
        self.cones.iter().map(|p| p.to_json(g)).collect()
    }

    pub fn from_json(g: &DirectedGraph, json: &[PathJson]) -> Result<ClopenSet> {
        let paths = json.iter().map(|p| Path::from_json(g, p)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_paths(g, &paths))
    }

    pub fn display(&self, g: &DirectedGraph) -> String {
        if self.cones.is_empty() {
            return "{}".into();
        }
        let parts: Vec<String> = self.cones.iter().map(|p| p.display(g).to_string()).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

fn split_against(g: &DirectedGraph, set: &ClopenSet, c: &Path, keep_inside: bool, out: &mut Vec<Path>) {
    match set.coverage(c) {
        Coverage::Full => {
            if keep_inside {
                out.push(c.clone());
            }
        }
        Coverage::Empty => {
            if !keep_inside {
                out.push(c.clone());
            }
        }
        Coverage::Partial => {
            for ch in c.children(g) {
                split_against(g, set, &ch, keep_inside, out);
            }
        }
    }
}

/// A finite set of paths with pairwise disjoint cones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Code {
    paths: Vec<Path>,
}

impl Code {
    pub fn new(paths: Vec<Path>) -> Result<Code> {
        for (i, a) in paths.iter().enumerate() {
            for b in &paths[i + 1..] {
                if a.comparable(b) {
                    return Err(Error::NotACode(format!("{a:?} and {b:?} have overlapping cones")));
                }
            }
        }
        Ok(Code { paths })
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn union(&self, g: &DirectedGraph) -> ClopenSet {
        ClopenSet::from_paths(g, &self.paths)
    }

    pub fn is_complete_for(&self, g: &DirectedGraph, ambient: &ClopenSet) -> bool {
        &self.union(g) == ambient
    }
}

/// The coarsest code refining both `a` and `b`, which must cover the same set.
pub fn common_refinement(g: &DirectedGraph, a: &Code, b: &Code) -> Result<Code> {
    if a.union(g) != b.union(g) {
        return Err(Error::AmbientMismatch("codes cover different clopen sets".into()));
    }
    let mut out = Vec::new();
    for p in &a.paths {
        for q in &b.paths {
            if p.is_prefix_of(q) {
                out.push(q.clone());
            } else if q.is_prefix_of(p) {
                out.push(p.clone());
            }
        }
    }
    out.sort();
    out.dedup();
    Code::new(out)
}
