//! Finite paths: the null path, node paths, and edge sequences.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, EdgeId, NodeId};

/// A finite path. `origin == None` is the null path ∅, which is a prefix of
/// every path. A node path has an origin and no edges. For edge sequences the
/// origin is the origin of the first edge, so the derived order is
/// lexicographic by origin and then by edge ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    origin: Option<NodeId>,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn null() -> Self {
        Path { origin: None, edges: Vec::new() }
    }

    pub fn node(v: NodeId) -> Self {
        Path { origin: Some(v), edges: Vec::new() }
    }

    pub fn edge(g: &DirectedGraph, e: EdgeId) -> Self {
        Path { origin: Some(g.src(e)), edges: vec![e] }
    }

    pub fn from_edges(g: &DirectedGraph, edges: &[EdgeId]) -> Result<Self> {
        if edges.is_empty() {
            return Ok(Path::null());
        }
        for w in edges.windows(2) {
            if g.dst(w[0]) != g.src(w[1]) {
                return Err(Error::InvalidPath(format!(
                    "edge {} does not follow {}",
                    g.edge_name(w[1]),
                    g.edge_name(w[0])
                )));
            }
        }
        Ok(Path { origin: Some(g.src(edges[0])), edges: edges.to_vec() })
    }

    /// Parses edge names separated by spaces or commas; without separators each
    /// character is one edge name. `∅` or the empty string is the null path.
    pub fn parse(g: &DirectedGraph, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(Path::null());
        }
        if let Some(name) = s.strip_prefix('@') {
            return Ok(Path::node(g.node_id(name)?));
        }
        let names: Vec<String> = if s.contains([' ', ',']) {
            s.split([' ', ',']).filter(|t| !t.is_empty()).map(str::to_string).collect()
        } else {
            s.chars().map(|c| c.to_string()).collect()
        };
        let edges = names.iter().map(|n| g.edge_id(n)).collect::<Result<Vec<_>>>()?;
        Path::from_edges(g, &edges)
    }

    pub fn is_null(&self) -> bool {
        self.origin.is_none()
    }

    pub fn is_node(&self) -> bool {
        self.origin.is_some() && self.edges.is_empty()
    }

    pub fn origin(&self) -> Option<NodeId> {
        self.origin
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn terminus(&self, g: &DirectedGraph) -> Option<NodeId> {
        match self.edges.last() {
            Some(&e) => Some(g.dst(e)),
            None => self.origin,
        }
    }

    pub fn push(&mut self, g: &DirectedGraph, e: EdgeId) -> Result<()> {
        match self.terminus(g) {
            Some(t) if t != g.src(e) => Err(Error::InvalidPath(format!(
                "edge {} does not start at {}",
                g.edge_name(e),
                g.node_name(t)
            ))),
            _ => {
                if self.origin.is_none() {
                    self.origin = Some(g.src(e));
                }
                self.edges.push(e);
                Ok(())
            }
        }
    }

    pub fn with_edge(&self, g: &DirectedGraph, e: EdgeId) -> Result<Path> {
        let mut p = self.clone();
        p.push(g, e)?;
        Ok(p)
    }

    /// Concatenation α·β. The null path is a two-sided unit, and a node path
    /// `v` is absorbed when it matches the terminus.
    pub fn concat(&self, g: &DirectedGraph, other: &Path) -> Result<Path> {
        if self.is_null() {
            return Ok(other.clone());
        }
        if other.is_null() {
            return Ok(self.clone());
        }
        let t = self.terminus(g);
        if t != other.origin {
            return Err(Error::InvalidPath(format!(
                "cannot append a path at {} to one ending at {}",
                other.origin.map_or("∅", |v| g.node_name(v)),
                t.map_or("∅", |v| g.node_name(v))
            )));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Path { origin: self.origin, edges })
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        match self.origin {
            None => true,
            Some(v) => other.origin == Some(v) && other.edges.starts_with(&self.edges),
        }
    }

    pub fn comparable(&self, other: &Path) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// The suffix γ with `prefix`·γ = self. An empty remainder is returned as
    /// the node path at the terminus of `prefix`.
    pub fn strip_prefix(&self, g: &DirectedGraph, prefix: &Path) -> Option<Path> {
        if !prefix.is_prefix_of(self) {
            return None;
        }
        if prefix.is_null() {
            return Some(self.clone());
        }
        let rest = &self.edges[prefix.edges.len()..];
        let origin = prefix.terminus(g);
        Some(Path { origin, edges: rest.to_vec() })
    }

    pub fn parent(&self) -> Option<Path> {
        match (self.origin, self.edges.len()) {
            (None, _) => None,
            (Some(_), 0) => Some(Path::null()),
            (Some(v), 1) => Some(Path::node(v)),
            (Some(v), n) => Some(Path { origin: Some(v), edges: self.edges[..n - 1].to_vec() }),
        }
    }

    /// Immediate subcones: node paths below ∅, single-edge extensions otherwise.
    pub fn children(&self, g: &DirectedGraph) -> Vec<Path> {
        match self.terminus(g) {
            None => (0..g.node_count()).map(Path::node).collect(),
            Some(t) => g
                .out_edges(t)
                .iter()
                .map(|&e| {
                    let mut edges = self.edges.clone();
                    edges.push(e);
                    Path { origin: self.origin, edges }
                })
                .collect(),
        }
    }

    pub fn child_count(&self, g: &DirectedGraph) -> usize {
        match self.terminus(g) {
            None => g.node_count(),
            Some(t) => g.out_edges(t).len(),
        }
    }

    /// Greatest common prefix.
    pub fn gcp(&self, other: &Path) -> Path {
        if self.origin.is_none() || self.origin != other.origin {
            return Path::null();
        }
        let n = self.edges.iter().zip(&other.edges).take_while(|(a, b)| a == b).count();
        Path { origin: self.origin, edges: self.edges[..n].to_vec() }
    }

    pub fn display<'a>(&'a self, g: &'a DirectedGraph) -> PathDisplay<'a> {
        PathDisplay { path: self, graph: g }
    }

    pub fn to_json(&self, g: &DirectedGraph) -> PathJson {
        match (self.origin, self.edges.is_empty()) {
            (None, _) => PathJson::Null { null: true },
            (Some(v), true) => PathJson::Node { node: g.node_name(v).to_string() },
            (Some(_), false) => PathJson::Edges(self.edges.iter().map(|&e| g.edge_name(e).to_string()).collect()),
        }
    }

    pub fn from_json(g: &DirectedGraph, json: &PathJson) -> Result<Path> {
        match json {
            PathJson::Null { .. } => Ok(Path::null()),
            PathJson::Node { node } => Ok(Path::node(g.node_id(node)?)),
            PathJson::Edges(names) => {
                let edges = names.iter().map(|n| g.edge_id(n)).collect::<Result<Vec<_>>>()?;
                Path::from_edges(g, &edges)
            }
        }
    }
}

/// Path JSON: an array of edge ids, `{"node":"v"}`, or `{"null":true}`.
/// The empty array also reads as the null path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathJson {
    Edges(Vec<String>),
    Node { node: String },
    Null { null: bool },
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    graph: &'a DirectedGraph,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.graph;
        match (self.path.origin, self.path.edges.is_empty()) {
            (None, _) => write!(f, "∅"),
            (Some(v), true) => write!(f, "@{}", g.node_name(v)),
            (Some(_), false) => {
                let single = (0..g.edge_count()).all(|e| g.edge_name(e).chars().count() == 1);
                let names: Vec<&str> = self.path.edges.iter().map(|&e| g.edge_name(e)).collect();
                if single {
                    write!(f, "{}", names.concat())
                } else {
                    write!(f, "{}", names.join(" "))
                }
            }
        }
    }
}
