//! Asynchronous finite-state transducers representing rational maps on
//! clopen subsets of the edge shift.
//!
//! A state `q` is a map 𝔠_{dom(q)} → Σ. Reading edge `e` it emits `out` and
//! moves to `next`. Outputs are written relative to the node `cod(q)` where
//! the state's image starts; states with `cod == None` emit absolute paths.
//! Machines are kept reduced, so the output of a run on α is exactly f̄(α).

mod compose;
mod invert;
mod nucleus;
mod reduce;

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, EdgeId, NodeId};
use crate::path::{Path, PathJson};

pub use compose::compose;
pub use invert::{image, invert};
pub use nucleus::{nucleus_of, verify_nucleus_of_injections, AxiomVerdict, NucleusCertificate, NucleusJson, NucleusSet};
pub use reduce::{reduce, state_classes};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub edge: EdgeId,
    pub out: Path,
    pub next: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub name: String,
    pub dom: NodeId,
    pub cod: Option<NodeId>,
    /// Indexed by the out-position of the edge at `dom`.
    pub trans: Vec<Transition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InitialEntry {
    pub cone: Path,
    pub out: Path,
    pub state: usize,
}

#[derive(Clone, Debug)]
pub struct RationalMap {
    pub domain: ClopenSet,
    pub initial: Vec<InitialEntry>,
    pub states: Arc<Vec<State>>,
}

/// What is left after reading a finite input.
#[derive(Clone, Debug)]
pub enum Residual {
    /// The input reached a single state.
    State(usize),
    /// The input is shorter than the initial code; the local action is a
    /// table over several entries.
    Table(RationalMap),
}

/// Output-empty normalization: relative outputs with no edges are stored as ∅.
pub(crate) fn norm_rel(p: Path, cod: Option<NodeId>) -> Path {
    if cod.is_some() && p.is_empty() {
        Path::null()
    } else {
        p
    }
}

/// An absolute prefix ending at `cod`: ∅ becomes the node path when the
/// state's image lies in a single node cone.
pub(crate) fn norm_abs(p: Path, cod: Option<NodeId>) -> Path {
    match (p.is_null(), cod) {
        (true, Some(w)) => Path::node(w),
        _ => p,
    }
}

/// Identity states, one per node of the graph, with ids equal to node ids.
pub fn identity_states(g: &DirectedGraph) -> Vec<State> {
    (0..g.node_count())
        .map(|v| State {
            name: if g.node_count() == 1 { "1".into() } else { format!("1_{}", g.node_name(v)) },
            dom: v,
            cod: Some(v),
            trans: g
                .out_edges(v)
                .iter()
                .map(|&e| Transition { edge: e, out: Path::edge(g, e), next: g.dst(e) })
                .collect(),
        })
        .collect()
}

impl RationalMap {
    pub fn new(
        g: &DirectedGraph,
        domain: ClopenSet,
        initial: Vec<InitialEntry>,
        states: Vec<State>,
    ) -> Result<RationalMap> {
        let m = RationalMap { domain, initial, states: Arc::new(states) };
        m.check(g)?;
        Ok(m)
    }

    /// The identity on a clopen set.
    pub fn identity(g: &DirectedGraph, domain: &ClopenSet) -> RationalMap {
        let states = identity_states(g);
        let initial = expand_null(g, domain.cones())
            .into_iter()
            .map(|c| {
                let t = c.terminus(g).expect("non-null cone");
                InitialEntry { cone: c.clone(), out: c, state: t }
            })
            .collect();
        RationalMap { domain: domain.clone(), initial, states: Arc::new(states) }
    }

    /// State `q` of `states` viewed as a map on 𝔠_{dom(q)}.
    pub fn from_state(g: &DirectedGraph, states: Arc<Vec<State>>, q: usize) -> RationalMap {
        let s = &states[q];
        let cone = Path::node(s.dom);
        RationalMap {
            domain: ClopenSet::cone(g, &cone),
            initial: vec![InitialEntry { cone, out: norm_abs(Path::null(), s.cod), state: q }],
            states,
        }
    }

    pub fn state(&self, q: usize) -> &State {
        &self.states[q]
    }

    /// Structural validity: transitions cover out-edges in order, outputs
    /// concatenate, and the initial table is a complete code of the domain.
    pub fn check(&self, g: &DirectedGraph) -> Result<()> {
        let n = self.states.len();
        for (qi, q) in self.states.iter().enumerate() {
            let edges = g.out_edges(q.dom);
            if q.trans.len() != edges.len() {
                return Err(Error::InvalidMachine(format!("state {} lacks transitions", q.name)));
            }
            for (t, &e) in q.trans.iter().zip(edges) {
                if t.edge != e || t.next >= n {
                    return Err(Error::InvalidMachine(format!("state {qi}: bad transition on {}", g.edge_name(e))));
                }
                let nx = &self.states[t.next];
                if nx.dom != g.dst(e) {
                    return Err(Error::InvalidMachine(format!(
                        "state {}: edge {} leads to state {} with wrong domain",
                        q.name,
                        g.edge_name(e),
                        nx.name
                    )));
                }
                let lead = if t.out.is_null() { q.cod } else { t.out.terminus(g) };
                let ok = match (q.cod, t.out.origin()) {
                    (Some(w), Some(o)) => w == o && lead == nx.cod,
                    (Some(_), None) => nx.cod == q.cod,
                    (None, _) => lead == nx.cod,
                };
                if !ok {
                    return Err(Error::InvalidMachine(format!(
                        "state {}: output on {} does not chain with state {}",
                        q.name,
                        g.edge_name(e),
                        nx.name
                    )));
                }
            }
        }
        let cones: Vec<Path> = self.initial.iter().map(|e| e.cone.clone()).collect();
        let code = crate::clopen::Code::new(cones)?;
        if code.union(g) != self.domain {
            return Err(Error::InvalidMachine("initial table does not cover the domain".into()));
        }
        for e in &self.initial {
            if e.state >= n {
                return Err(Error::InvalidMachine("initial entry refers to a missing state".into()));
            }
            let s = &self.states[e.state];
            if e.cone.terminus(g) != Some(s.dom) {
                return Err(Error::InvalidMachine(format!("initial cone does not end at the domain of {}", s.name)));
            }
            let ok = match s.cod {
                Some(w) => e.out.terminus(g) == Some(w),
                None => e.out.is_null(),
            };
            if !ok {
                return Err(Error::InvalidMachine(format!("initial output does not chain with state {}", s.name)));
            }
        }
        Ok(())
    }

    /// Runs `q` on a sequence of edges: concatenated output (starting at
    /// `cod(q)`, or absolute when that is `None`) and the final state.
    pub fn run(&self, g: &DirectedGraph, q: usize, edges: &[EdgeId]) -> Result<(Path, usize)> {
        let mut acc = Path::null();
        let mut cur = q;
        for &e in edges {
            let s = &self.states[cur];
            if g.src(e) != s.dom {
                return Err(Error::OutsideDomain(format!("edge {} not readable here", g.edge_name(e))));
            }
            let t = &s.trans[g.out_position(e)];
            acc = acc.concat(g, &t.out)?;
            cur = t.next;
        }
        Ok((acc, cur))
    }

    /// f̄(α) together with what remains of the machine after reading α.
    pub fn evaluate(&self, g: &DirectedGraph, input: &Path, fuel: usize) -> Result<(Path, Residual)> {
        if input.len() > fuel {
            return Err(Error::Fuel(fuel));
        }
        for e in &self.initial {
            if e.cone.is_prefix_of(input) {
                let rest = input.strip_prefix(g, &e.cone).expect("prefix");
                let (o, q) = self.run(g, e.state, rest.edges())?;
                let out = norm_abs(e.out.concat(g, &o)?, self.states[q].cod);
                return Ok((out, Residual::State(q)));
            }
        }
        let below: Vec<&InitialEntry> = self.initial.iter().filter(|e| input.is_prefix_of(&e.cone)).collect();
        if below.is_empty() {
            return Err(Error::OutsideDomain(format!("{}", input.display(g))));
        }
        let mut common = below[0].out.clone();
        for e in &below[1..] {
            common = common.gcp(&e.out);
        }
        let base = input.terminus(g);
        let cod = common.terminus(g);
        let mut initial = Vec::new();
        for e in &below {
            let cone = match &base {
                None => e.cone.clone(),
                Some(_) => e.cone.strip_prefix(g, input).expect("prefix"),
            };
            let out = e.out.strip_prefix(g, &common).expect("gcp is a prefix");
            let out = norm_abs(norm_rel(out, cod), self.states[e.state].cod);
            initial.push(InitialEntry { cone, out: if cod.is_some() { rebase(g, out, cod) } else { out }, state: e.state });
        }
        let domain = match base {
            None => self.domain.clone(),
            Some(t) => ClopenSet::cone(g, &Path::node(t)),
        };
        let table = RationalMap { domain, initial, states: self.states.clone() };
        Ok((common, Residual::Table(table)))
    }

    /// Local action at α: (f̄(α), f|_α) with f|_α as a map on 𝔠_{t(α)}.
    pub fn local_action(&self, g: &DirectedGraph, alpha: &Path) -> Result<(Path, RationalMap)> {
        let fuel = alpha.len() + 1;
        let (out, res) = self.evaluate(g, alpha, fuel)?;
        match res {
            Residual::State(q) => {
                let t = alpha.terminus(g).expect("a path inside the domain is not null here");
                let cone = Path::node(t);
                let map = RationalMap {
                    domain: ClopenSet::cone(g, &cone),
                    initial: vec![InitialEntry { cone, out: norm_abs(Path::null(), self.states[q].cod), state: q }],
                    states: self.states.clone(),
                };
                Ok((out, map))
            }
            Residual::Table(t) => Ok((out, t)),
        }
    }

    /// Image of a finite input, as a full path: f̄(α).
    pub fn apply(&self, g: &DirectedGraph, input: &Path) -> Result<Path> {
        Ok(self.evaluate(g, input, usize::MAX)?.0)
    }

    pub fn max_output_len(&self) -> usize {
        self.states.iter().flat_map(|s| s.trans.iter().map(|t| t.out.len())).max().unwrap_or(0)
    }

    pub fn to_json(&self, g: &DirectedGraph) -> TransducerJson {
        TransducerJson {
            domain: self.domain.to_json(g),
            initial: self
                .initial
                .iter()
                .map(|e| InitialJson {
                    cone: e.cone.to_json(g),
                    out: e.out.to_json(g),
                    state: self.states[e.state].name.clone(),
                })
                .collect(),
            states: self
                .states
                .iter()
                .map(|s| StateJson {
                    id: s.name.clone(),
                    node: g.node_name(s.dom).to_string(),
                    trans: s
                        .trans
                        .iter()
                        .map(|t| TransJson {
                            edge: g.edge_name(t.edge).to_string(),
                            out: t.out.to_json(g),
                            next: self.states[t.next].name.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(g: &DirectedGraph, json: &TransducerJson) -> Result<RationalMap> {
        let states = states_from_json(g, &json.states)?;
        let index: HashMap<&str, usize> = json.states.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
        let domain = ClopenSet::from_json(g, &json.domain)?;
        let mut initial = Vec::new();
        for e in &json.initial {
            let state = *index
                .get(e.state.as_str())
                .ok_or_else(|| Error::InvalidMachine(format!("unknown state {}", e.state)))?;
            let mut cone = Path::from_json(g, &e.cone)?;
            if cone.is_null() && g.node_count() == 1 {
                cone = Path::node(0);
            }
            let out = norm_abs(Path::from_json(g, &e.out)?, states[state].cod);
            initial.push(InitialEntry { cone, out, state });
        }
        RationalMap::new(g, domain, initial, states)
    }
}

/// Re-expresses a relative output whose origin was lost as a path from `cod`.
fn rebase(_g: &DirectedGraph, out: Path, _cod: Option<NodeId>) -> Path {
    out
}

/// Replaces the null path by the node paths so every cone has a terminus.
pub fn expand_null(g: &DirectedGraph, cones: &[Path]) -> Vec<Path> {
    let mut out = Vec::new();
    for c in cones {
        if c.is_null() {
            out.extend((0..g.node_count()).map(Path::node));
        } else {
            out.push(c.clone());
        }
    }
    out
}

/// Builds states from JSON and derives the codomain node of each state.
pub fn states_from_json(g: &DirectedGraph, json: &[StateJson]) -> Result<Vec<State>> {
    let index: HashMap<&str, usize> = json.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let mut states = Vec::with_capacity(json.len());
    for s in json {
        let dom = g.node_id(&s.node)?;
        let mut trans = Vec::new();
        for &e in g.out_edges(dom) {
            let t = s
                .trans
                .iter()
                .find(|t| t.edge == g.edge_name(e))
                .ok_or_else(|| Error::InvalidMachine(format!("state {} has no transition on {}", s.id, g.edge_name(e))))?;
            let next = *index
                .get(t.next.as_str())
                .ok_or_else(|| Error::InvalidMachine(format!("unknown state {}", t.next)))?;
            trans.push(Transition { edge: e, out: Path::from_json(g, &t.out)?, next });
        }
        if trans.len() != s.trans.len() {
            return Err(Error::InvalidMachine(format!("state {} has transitions on foreign edges", s.id)));
        }
        states.push(State { name: s.id.clone(), dom, cod: None, trans });
    }
    derive_codomains(g, &mut states);
    for s in states.iter_mut() {
        let cod = s.cod;
        for t in s.trans.iter_mut() {
            t.out = norm_rel(std::mem::take(&mut t.out), cod);
        }
    }
    Ok(states)
}

/// cod(q) is the common origin of everything q emits: the origin of a
/// nonempty transition output, or cod(next) when the output is empty.
pub(crate) fn derive_codomains(g: &DirectedGraph, states: &mut [State]) {
    #[derive(Clone, Copy, PartialEq)]
    enum C {
        Unknown,
        Node(NodeId),
        Mixed,
    }
    let n = states.len();
    let mut c = vec![C::Unknown; n];
    loop {
        let mut changed = false;
        for q in 0..n {
            let mut acc = C::Unknown;
            for t in &states[q].trans {
                let lead = match t.out.origin() {
                    Some(o) => C::Node(o),
                    None => c[t.next],
                };
                acc = match (acc, lead) {
                    (C::Unknown, x) => x,
                    (x, C::Unknown) => x,
                    (C::Node(a), C::Node(b)) if a == b => C::Node(a),
                    _ => C::Mixed,
                };
            }
            if acc != c[q] && !(acc == C::Unknown) {
                c[q] = acc;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let _ = g;
    for (s, x) in states.iter_mut().zip(c) {
        s.cod = match x {
            C::Node(v) => Some(v),
            _ => None,
        };
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransJson {
    pub edge: String,
    pub out: PathJson,
    pub next: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateJson {
    pub id: String,
    pub node: String,
    pub trans: Vec<TransJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialJson {
    pub cone: PathJson,
    pub out: PathJson,
    pub state: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransducerJson {
    pub domain: Vec<PathJson>,
    #[serde(default)]
    pub initial: Vec<InitialJson>,
    pub states: Vec<StateJson>,
}

/// Extensional equality of two maps with the same domain.
pub fn maps_equal(g: &DirectedGraph, a: &RationalMap, b: &RationalMap) -> Result<bool> {
    if a.domain != b.domain {
        return Ok(false);
    }
    let offset = a.states.len();
    let mut all: Vec<State> = a.states.as_ref().clone();
    all.extend(b.states.iter().map(|s| shift_state(s, offset)));
    let classes = state_classes(&all);
    let ca: Vec<Path> = a.initial.iter().map(|e| e.cone.clone()).collect();
    let cb: Vec<Path> = b.initial.iter().map(|e| e.cone.clone()).collect();
    let refined = crate::clopen::common_refinement(
        g,
        &crate::clopen::Code::new(ca)?,
        &crate::clopen::Code::new(cb)?,
    )?;
    for c in refined.paths() {
        let (pa, ra) = a.evaluate(g, c, usize::MAX)?;
        let (pb, rb) = b.evaluate(g, c, usize::MAX)?;
        let (Residual::State(qa), Residual::State(qb)) = (ra, rb) else {
            return Err(Error::InvalidMachine("refined cone shorter than an initial cone".into()));
        };
        if pa != pb || classes[qa] != classes[qb + offset] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Extensional equality of two states (possibly of different machines).
pub fn states_equal(a: &[State], qa: usize, b: &[State], qb: usize) -> bool {
    if a[qa].dom != b[qb].dom {
        return false;
    }
    let offset = a.len();
    let mut all: Vec<State> = a.to_vec();
    all.extend(b.iter().map(|s| shift_state(s, offset)));
    let classes = state_classes(&all);
    classes[qa] == classes[qb + offset]
}

pub(crate) fn shift_state(s: &State, offset: usize) -> State {
    State {
        name: s.name.clone(),
        dom: s.dom,
        cod: s.cod,
        trans: s.trans.iter().map(|t| Transition { edge: t.edge, out: t.out.clone(), next: t.next + offset }).collect(),
    }
}

/// Glues maps on disjoint pieces into one machine over the union of their
/// state tables. Each part is an initial table over its own states.
pub fn assemble(domain: ClopenSet, parts: &[(Vec<InitialEntry>, Arc<Vec<State>>)]) -> RationalMap {
    let mut states: Vec<State> = Vec::new();
    let mut initial = Vec::new();
    for (entries, table) in parts {
        let offset = states.len();
        states.extend(table.iter().map(|s| shift_state(s, offset)));
        initial.extend(entries.iter().map(|e| InitialEntry { cone: e.cone.clone(), out: e.out.clone(), state: e.state + offset }));
    }
    RationalMap { domain, initial, states: Arc::new(states) }
}
