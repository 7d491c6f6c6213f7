//! Full contracting rational similarity groups given by a certified nucleus:
//! elements as nucleus-decorated prefix exchanges, and their arithmetic.

mod cycles;
mod germ;
mod normalish;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classes::ClassesGroup;
use crate::clopen::{ClopenSet, Code};
use crate::error::{Error, Result};
use crate::graph::{irreducible_core, Core, DirectedGraph};
use crate::path::{Path, PathJson};
use crate::thompson::VElement;
use crate::transducer::{
    assemble, compose, identity_states, image, invert, maps_equal, nucleus_of, verify_nucleus_of_injections,
    InitialEntry, NucleusCertificate, NucleusSet, RationalMap, Residual,
};

pub use cycles::{CycleJson, CycleMultiset, HilbertBasis};
pub use germ::{agree_near, fixes, image_point, lambda_map, periodic_states};
pub use normalish::{
    GeneratorSet, ModelGenerator, NormalishForm, NormalishFormJson, NuclearGenerator, NuclearGeneratorJson,
};

const DEFAULT_BUDGET: usize = 4096;

/// The group of homeomorphisms of E all of whose local actions eventually
/// lie in a certified nucleus.
#[derive(Clone, Debug)]
pub struct FullRsg {
    pub graph: DirectedGraph,
    pub nucleus: NucleusSet,
    pub ambient: ClopenSet,
    pub core: Core,
    pub classes: ClassesGroup,
    pub certificate: NucleusCertificate,
    /// Member equal to the identity on each node (core nodes only).
    identity_member: Vec<Option<usize>>,
    /// The member equal to each state of the nucleus table.
    canon: Vec<Option<usize>>,
    /// image(p) for each state of the nucleus table that is a member.
    images: Vec<Option<ClopenSet>>,
    pub budget: usize,
}

/// One cone of a partition: g(dom·ω) = out·state(ω).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RsgEntry {
    pub dom: Path,
    pub out: Path,
    pub state: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RsgElement {
    pub entries: Vec<RsgEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsgEntryJson {
    pub dom: PathJson,
    pub out: PathJson,
    pub state: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsgElementJson {
    pub entries: Vec<RsgEntryJson>,
    #[serde(default)]
    pub nucleus: String,
}

impl FullRsg {
    /// Certifies the nucleus and precomputes classes and images. Refuses a
    /// nucleus that fails any axiom.
    pub fn new(graph: DirectedGraph, nucleus: NucleusSet, ambient: ClopenSet) -> Result<FullRsg> {
        let core = irreducible_core(&graph)?.ok_or(Error::NoCore)?;
        let certificate = verify_nucleus_of_injections(&graph, &nucleus, &core, DEFAULT_BUDGET)?;
        if !certificate.all_pass() {
            return Err(Error::NotInNucleus(format!("nucleus fails {}", certificate.failed().join(", "))));
        }
        let classes = ClassesGroup::of_core(&graph, &core.nodes)?;
        let identity_member = nucleus.member_index_of(&identity_states(&graph));
        let canon = nucleus.member_index_of(&nucleus.states);
        let mut images = vec![None; nucleus.states.len()];
        for &q in &nucleus.members {
            let m = RationalMap::from_state(&graph, nucleus.states.clone(), q);
            images[q] = Some(image(&graph, &m, 4 * nucleus.states.len() + 16)?);
        }
        Ok(FullRsg { graph, nucleus, ambient, core, classes, certificate, identity_member, canon, images, budget: DEFAULT_BUDGET })
    }

    pub fn g(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.nucleus.states[q].name
    }

    pub fn member_by_name(&self, name: &str) -> Result<usize> {
        self.nucleus
            .members
            .iter()
            .copied()
            .find(|&q| self.nucleus.states[q].name == name)
            .ok_or_else(|| Error::NotInNucleus(format!("no member named {name}")))
    }

    pub fn identity_at(&self, v: usize) -> Result<usize> {
        self.identity_member[v].ok_or_else(|| Error::NotInNucleus("identity state missing".into()))
    }

    pub fn is_identity_state(&self, q: usize) -> bool {
        self.identity_member[self.nucleus.states[q].dom] == Some(q)
    }

    pub fn state_image(&self, q: usize) -> &ClopenSet {
        self.images[q].as_ref().expect("member state")
    }

    /// Next state of member q on edge e, as a member.
    pub fn step(&self, q: usize, e: usize) -> usize {
        let s = &self.nucleus.states[q];
        let next = s.trans[self.graph.out_position(e)].next;
        self.canon[next].expect("nucleus closed under restriction")
    }

    pub fn state_map(&self, q: usize) -> RationalMap {
        RationalMap::from_state(&self.graph, self.nucleus.states.clone(), q)
    }

    /// The element as a transducer over the nucleus states.
    pub fn to_rational(&self, h: &RsgElement) -> RationalMap {
        let g = &self.graph;
        let initial = h
            .entries
            .iter()
            .map(|e| InitialEntry { cone: e.dom.clone(), out: e.out.clone(), state: e.state })
            .collect();
        let _ = g;
        RationalMap { domain: self.ambient.clone(), initial, states: self.nucleus.states.clone() }
    }

    /// Partition of E into cones on which h acts by nucleus states, refining
    /// at most `depth_limit` levels past h's own initial code. `None` when
    /// some cone still has a non-nucleus local action at that depth.
    pub fn membership(&self, h: &RationalMap, depth_limit: usize) -> Result<Option<RsgElement>> {
        let g = &self.graph;
        if h.domain != self.ambient {
            return Err(Error::AmbientMismatch("map is not defined on E".into()));
        }
        let h = crate::transducer::reduce(g, h)?;
        let member = self.nucleus.member_index_of(&h.states);
        let base = h.initial.iter().map(|e| e.cone.len()).max().unwrap_or(0);
        let mut entries = Vec::new();
        let mut stack: Vec<Path> = crate::transducer::expand_null(g, self.ambient.cones());
        stack.reverse();
        while let Some(c) = stack.pop() {
            let (out, res) = h.evaluate(g, &c, usize::MAX)?;
            if let Residual::State(q) = res {
                if let Some(m) = member[q] {
                    entries.push(RsgEntry { dom: c, out, state: m });
                    continue;
                }
            }
            if c.len() >= base + depth_limit {
                return Ok(None);
            }
            let mut ch = c.children(g);
            ch.reverse();
            stack.extend(ch);
        }
        let el = RsgElement::new(entries);
        self.check_bijective(&el)?;
        Ok(Some(el))
    }

    /// Images of the entries are disjoint and cover E.
    pub fn check_bijective(&self, h: &RsgElement) -> Result<()> {
        let g = &self.graph;
        let doms: Vec<Path> = h.entries.iter().map(|e| e.dom.clone()).collect();
        if Code::new(doms)?.union(g) != self.ambient {
            return Err(Error::NotACode("entries do not partition E".into()));
        }
        let mut acc = ClopenSet::empty();
        for e in &h.entries {
            let im = self.state_image(e.state).prefixed(g, &e.out)?;
            if !acc.is_disjoint(g, &im) {
                return Err(Error::NotInjective(format!("image of {} overlaps another entry", e.dom.display(g))));
            }
            acc = acc.union(g, &im);
        }
        if acc != self.ambient {
            return Err(Error::NotInjective("entries do not cover E".into()));
        }
        Ok(())
    }

    pub fn compose(&self, a: &RsgElement, b: &RsgElement) -> Result<RsgElement> {
        let g = &self.graph;
        let c = compose(g, &self.to_rational(a), &self.to_rational(b), self.budget)?;
        self.membership(&c, 64)?
            .ok_or_else(|| Error::NotInNucleus("composite left the nucleus; certificate violated".into()))
    }

    pub fn invert(&self, a: &RsgElement) -> Result<RsgElement> {
        let g = &self.graph;
        let inv = invert(g, &self.to_rational(a), self.budget)?;
        self.membership(&inv, 64)?
            .ok_or_else(|| Error::NotInNucleus("inverse left the nucleus; certificate violated".into()))
    }

    pub fn identity(&self) -> RsgElement {
        let g = &self.graph;
        let entries = crate::transducer::expand_null(g, self.ambient.cones())
            .into_iter()
            .map(|c| {
                let t = c.terminus(g).expect("non-null");
                RsgEntry { dom: c.clone(), out: c, state: self.identity_member[t].expect("identity on E") }
            })
            .collect();
        RsgElement::new(entries)
    }

    pub fn is_identity(&self, a: &RsgElement) -> Result<bool> {
        let id = RationalMap::identity(&self.graph, &self.ambient);
        maps_equal(&self.graph, &self.to_rational(a), &id)
    }

    pub fn equal(&self, a: &RsgElement, b: &RsgElement) -> Result<bool> {
        maps_equal(&self.graph, &self.to_rational(a), &self.to_rational(b))
    }

    pub fn from_v(&self, v: &VElement) -> Result<RsgElement> {
        self.membership(&v.as_rational(&self.graph), 8)?
            .ok_or_else(|| Error::NotInNucleus("identity states missing from the nucleus".into()))
    }

    /// The element as a prefix exchange, refining entries whose states are
    /// not identities until they reach identities. `None` if some entry
    /// never does.
    pub fn as_v(&self, a: &RsgElement) -> Option<VElement> {
        let g = &self.graph;
        let limit = self.nucleus.states.len() + 1;
        let mut pairs = Vec::new();
        let mut stack: Vec<(Path, Path, usize, usize)> =
            a.entries.iter().map(|e| (e.dom.clone(), e.out.clone(), e.state, 0)).collect();
        while let Some((dom, out, q, depth)) = stack.pop() {
            if self.is_identity_state(q) {
                pairs.push((dom, out));
                continue;
            }
            if depth >= limit {
                return None;
            }
            let s = &self.nucleus.states[q];
            for t in &s.trans {
                let out = out.concat(g, &t.out).ok()?;
                let next = self.canon[t.next]?;
                let out = crate::transducer::norm_abs(out, self.nucleus.states[next].cod);
                stack.push((dom.with_edge(g, t.edge).ok()?, out, next, depth + 1));
            }
        }
        VElement::new(g, pairs).ok()
    }

    /// f̄(x) for a finite path x.
    pub fn apply(&self, a: &RsgElement, x: &Path) -> Result<Path> {
        self.to_rational(a).apply(&self.graph, x)
    }

    /// The element from the classification argument: member q on 𝔠_α
    /// landing in 𝔠_β, its inverse on the image, identity elsewhere.
    pub fn proof_element(&self, q: usize, alpha: &Path, beta: &Path) -> Result<RsgElement> {
        let g = &self.graph;
        let st = &self.nucleus.states[q];
        if alpha.terminus(g) != Some(st.dom) || beta.terminus(g) != st.cod {
            return Err(Error::InvalidPath("cones do not match the state's nodes".into()));
        }
        let ca = ClopenSet::cone(g, alpha);
        let img = self.state_image(q).prefixed(g, beta)?;
        if !ca.is_disjoint(g, &ClopenSet::cone(g, beta)) || !ca.union(g, &img).is_subset(g, &self.ambient) {
            return Err(Error::InvalidPath("cones must be disjoint and inside E".into()));
        }
        let inv = invert(g, &self.state_map(q), self.budget)?;
        let inv_entries: Vec<InitialEntry> = inv
            .initial
            .iter()
            .map(|e| {
                Ok(InitialEntry { cone: beta.concat(g, &e.cone)?, out: alpha.concat(g, &e.out)?, state: e.state })
            })
            .collect::<Result<_>>()?;
        let rest = self.ambient.difference(g, &ca.union(g, &img));
        let ids = Arc::new(identity_states(g));
        let id_entries: Vec<InitialEntry> = crate::transducer::expand_null(g, rest.cones())
            .into_iter()
            .map(|c| {
                let t = c.terminus(g).expect("non-null");
                InitialEntry { cone: c.clone(), out: c, state: t }
            })
            .collect();
        let m = assemble(
            self.ambient.clone(),
            &[
                (vec![InitialEntry { cone: alpha.clone(), out: beta.clone(), state: q }], self.nucleus.states.clone()),
                (inv_entries, inv.states.clone()),
                (id_entries, ids),
            ],
        );
        m.check(g)?;
        self.membership(&m, 64)?.ok_or_else(|| Error::NotInNucleus("inverse state outside the nucleus".into()))
    }

    /// Local action of an element at a cone inside one of its entries.
    pub fn local_state(&self, a: &RsgElement, x: &Path) -> Option<(Path, usize)> {
        let g = &self.graph;
        let e = a.entries.iter().find(|e| e.dom.is_prefix_of(x))?;
        let rest = x.strip_prefix(g, &e.dom)?;
        let m = self.to_rational(a);
        let (o, q) = m.run(g, e.state, rest.edges()).ok()?;
        let out = crate::transducer::norm_abs(e.out.concat(g, &o).ok()?, self.nucleus.states[q].cod);
        Some((out, self.canon[q]?))
    }

    /// Every member reachable from q is an identity, so q is a prefix exchange.
    pub fn is_v_like(&self, q: usize) -> Result<bool> {
        let n = nucleus_of(&self.graph, &self.state_map(q))?;
        let ids = NucleusSet::all(identity_states(&self.graph));
        Ok(ids.includes(&n).is_none())
    }

    pub fn element_to_json(&self, a: &RsgElement, nucleus_ref: &str) -> RsgElementJson {
        let g = &self.graph;
        RsgElementJson {
            entries: a
                .entries
                .iter()
                .map(|e| RsgEntryJson {
                    dom: e.dom.to_json(g),
                    out: e.out.to_json(g),
                    state: self.state_name(e.state).to_string(),
                })
                .collect(),
            nucleus: nucleus_ref.to_string(),
        }
    }

    pub fn element_from_json(&self, j: &RsgElementJson) -> Result<RsgElement> {
        let g = &self.graph;
        let mut entries = Vec::new();
        for e in &j.entries {
            let state = self.member_by_name(&e.state)?;
            let out = crate::transducer::norm_abs(Path::from_json(g, &e.out)?, self.nucleus.states[state].cod);
            entries.push(RsgEntry { dom: Path::from_json(g, &e.dom)?, out, state });
        }
        let el = RsgElement::new(entries);
        self.check_bijective(&el)?;
        Ok(el)
    }
}

impl RsgElement {
    pub fn new(mut entries: Vec<RsgEntry>) -> RsgElement {
        entries.sort();
        RsgElement { entries }
    }
}
