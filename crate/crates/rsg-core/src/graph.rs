//! Finite directed graphs, strongly connected components and irreducible cores.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

/// A finite directed graph with loops and parallel edges. Out-edges of a node
/// are kept in declaration order, which fixes the lexicographic order on paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    node_names: Vec<String>,
    edge_names: Vec<String>,
    src: Vec<NodeId>,
    dst: Vec<NodeId>,
    out: Vec<Vec<EdgeId>>,
    out_pos: Vec<usize>,
    node_index: HashMap<String, NodeId>,
    edge_index: HashMap<String, EdgeId>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeJson {
    pub id: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphJson {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

impl DirectedGraph {
    pub fn new(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        let json = GraphJson {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(id, s, d)| EdgeJson { id: id.to_string(), src: s.to_string(), dst: d.to_string() })
                .collect(),
        };
        Self::from_json(&json)
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        if json.nodes.is_empty() {
            return Err(Error::InvalidGraph("no nodes".into()));
        }
        if json.edges.is_empty() {
            return Err(Error::InvalidGraph("no edges".into()));
        }
        let mut node_index = HashMap::new();
        for (i, n) in json.nodes.iter().enumerate() {
            if node_index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node {n}")));
            }
        }
        let mut edge_index = HashMap::new();
        let mut src = Vec::new();
        let mut dst = Vec::new();
        let mut out = vec![Vec::new(); json.nodes.len()];
        let mut out_pos = Vec::new();
        for (i, e) in json.edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge {}", e.id)));
            }
            let s = *node_index
                .get(&e.src)
                .ok_or_else(|| Error::InvalidGraph(format!("edge {} has unknown origin {}", e.id, e.src)))?;
            let d = *node_index
                .get(&e.dst)
                .ok_or_else(|| Error::InvalidGraph(format!("edge {} has unknown terminus {}", e.id, e.dst)))?;
            src.push(s);
            dst.push(d);
            out_pos.push(out[s].len());
            out[s].push(i);
        }
        Ok(DirectedGraph {
            node_names: json.nodes.clone(),
            edge_names: json.edges.iter().map(|e| e.id.clone()).collect(),
            src,
            dst,
            out,
            out_pos,
            node_index,
            edge_index,
        })
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            nodes: self.node_names.clone(),
            edges: (0..self.edge_count())
                .map(|e| EdgeJson {
                    id: self.edge_names[e].clone(),
                    src: self.node_names[self.src[e]].clone(),
                    dst: self.node_names[self.dst[e]].clone(),
                })
                .collect(),
        }
    }

    /// One node `v` with `n` loops named `0`, `1`, ...
    pub fn full_shift(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let edges: Vec<(&str, &str, &str)> = names.iter().map(|s| (s.as_str(), "v", "v")).collect();
        Self::new(&["v"], &edges).expect("full shift is well formed")
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn src(&self, e: EdgeId) -> NodeId {
        self.src[e]
    }

    pub fn dst(&self, e: EdgeId) -> NodeId {
        self.dst[e]
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out[v]
    }

    /// Position of `e` among the out-edges of its origin.
    pub fn out_position(&self, e: EdgeId) -> usize {
        self.out_pos[e]
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.node_names[v]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e]
    }

    pub fn node_id(&self, name: &str) -> Result<NodeId> {
        self.node_index.get(name).copied().ok_or_else(|| Error::InvalidGraph(format!("unknown node {name}")))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId> {
        self.edge_index.get(name).copied().ok_or_else(|| Error::InvalidGraph(format!("unknown edge {name}")))
    }

    pub fn successors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out[v].iter().map(move |&e| self.dst[e])
    }

    /// Nodes reachable from `start` (inclusive).
    pub fn reachable_from(&self, start: &[NodeId]) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<NodeId> = start.to_vec();
        for &s in start {
            seen[s] = true;
        }
        while let Some(v) = stack.pop() {
            for w in self.successors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// The induced subgraph on `nodes`, keeping only edges with both ends inside.
    pub fn induced(&self, nodes: &[NodeId]) -> Result<DirectedGraph> {
        let mut keep = vec![false; self.node_count()];
        for &v in nodes {
            keep[v] = true;
        }
        let json = GraphJson {
            nodes: nodes.iter().map(|&v| self.node_names[v].clone()).collect(),
            edges: (0..self.edge_count())
                .filter(|&e| keep[self.src[e]] && keep[self.dst[e]])
                .map(|e| EdgeJson {
                    id: self.edge_names[e].clone(),
                    src: self.node_names[self.src[e]].clone(),
                    dst: self.node_names[self.dst[e]].clone(),
                })
                .collect(),
        };
        DirectedGraph::from_json(&json)
    }

    pub fn to_dot(&self, core: Option<&Core>) -> String {
        let mut s = String::from("digraph G {\n");
        for v in 0..self.node_count() {
            let shape = match core {
                Some(c) if c.contains(v) => "doublecircle",
                _ => "circle",
            };
            let _ = writeln!(s, "  \"{}\" [shape={}];", self.node_names[v], shape);
        }
        for e in 0..self.edge_count() {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                self.node_names[self.src[e]], self.node_names[self.dst[e]], self.edge_names[e]
            );
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubshiftReport {
    pub no_isolated_points: bool,
    pub no_empty_cones: bool,
}

pub fn check_subshift(g: &DirectedGraph) -> SubshiftReport {
    let no_empty_cones = (0..g.node_count()).all(|v| !g.out_edges(v).is_empty());
    let branching: Vec<NodeId> = (0..g.node_count()).filter(|&v| g.out_edges(v).len() >= 2).collect();
    // v reaches a branching node iff v lies in the backward closure of the branching nodes.
    let mut reaches = vec![false; g.node_count()];
    let mut stack = branching.clone();
    for &b in &branching {
        reaches[b] = true;
    }
    let mut preds = vec![Vec::new(); g.node_count()];
    for e in 0..g.edge_count() {
        preds[g.dst(e)].push(g.src(e));
    }
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if !reaches[u] {
                reaches[u] = true;
                stack.push(u);
            }
        }
    }
    SubshiftReport { no_isolated_points: reaches.iter().all(|&b| b), no_empty_cones }
}

/// Strongly connected components via Tarjan, iteratively. Components come out
/// in reverse topological order (sinks first).
pub fn sccs(g: &DirectedGraph) -> Vec<Vec<NodeId>> {
    sccs_by(g.node_count(), |v| g.successors(v).collect())
}

/// Tarjan on an abstract graph with vertices `0..n`.
pub fn sccs_by(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0usize;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some((v, out, i)) = call.last_mut() {
            let v = *v;
            if *i < out.len() {
                let w = out[*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some((p, _, _)) = call.last() {
                    low[*p] = low[*p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

fn component_has_cycle(g: &DirectedGraph, comp: &[NodeId], member: &[bool]) -> bool {
    comp.len() > 1 || g.out_edges(comp[0]).iter().any(|&e| g.dst(e) == comp[0] && member[comp[0]])
}

/// Strongly connected and not a single directed cycle.
pub fn irreducible(g: &DirectedGraph) -> bool {
    let comps = sccs(g);
    if comps.len() != 1 {
        return false;
    }
    let all = vec![true; g.node_count()];
    component_has_cycle(g, &comps[0], &all) && (0..g.node_count()).any(|v| g.out_edges(v).len() >= 2)
}

/// The irreducible core Γ₀ together with the smallest N such that every path
/// of length N ends in Γ₀.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Core {
    pub nodes: Vec<NodeId>,
    pub depth: usize,
    member: Vec<bool>,
}

impl Core {
    pub fn contains(&self, v: NodeId) -> bool {
        self.member[v]
    }

    pub fn subgraph(&self, g: &DirectedGraph) -> Result<DirectedGraph> {
        g.induced(&self.nodes)
    }
}

/// A core is a successor-closed strongly connected set containing every cycle,
/// so it exists iff the condensation has exactly one cyclic component, that
/// component is terminal, and it is not a directed cycle.
pub fn irreducible_core(g: &DirectedGraph) -> Result<Option<Core>> {
    let report = check_subshift(g);
    if !report.no_empty_cones {
        return Err(Error::Subshift("some node has no outgoing edge".into()));
    }
    let comps = sccs(g);
    let mut cyclic = Vec::new();
    for comp in &comps {
        let mut member = vec![false; g.node_count()];
        for &v in comp {
            member[v] = true;
        }
        if component_has_cycle(g, comp, &member) {
            cyclic.push(comp.clone());
        }
    }
    if cyclic.len() != 1 {
        return Ok(None);
    }
    let comp = &cyclic[0];
    let mut member = vec![false; g.node_count()];
    for &v in comp {
        member[v] = true;
    }
    let terminal = comp.iter().all(|&v| g.successors(v).all(|w| member[w]));
    let is_cycle = comp.iter().all(|&v| g.out_edges(v).len() == 1);
    if !terminal || is_cycle {
        return Ok(None);
    }
    // Outside the core the graph is acyclic; depth is the longest path into the core.
    let mut height = vec![usize::MAX; g.node_count()];
    for &v in comp {
        height[v] = 0;
    }
    fn height_of(g: &DirectedGraph, v: NodeId, height: &mut [usize]) -> usize {
        if height[v] != usize::MAX {
            return height[v];
        }
        let mut h = 0;
        for w in g.successors(v).collect::<Vec<_>>() {
            h = h.max(1 + height_of(g, w, height));
        }
        height[v] = h;
        h
    }
    let mut depth = 0;
    for v in 0..g.node_count() {
        depth = depth.max(height_of(g, v, &mut height));
    }
    Ok(Some(Core { nodes: comp.clone(), depth, member }))
}

/// Smallest successor-closed node set containing `start`.
pub fn successor_closure(g: &DirectedGraph, start: &[NodeId]) -> Vec<NodeId> {
    let seen = g.reachable_from(start);
    (0..g.node_count()).filter(|&v| seen[v]).collect()
}
