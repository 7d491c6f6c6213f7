//! Nuclei: the states a rational map eventually settles into, and the
//! closure conditions for a set of states to be the nucleus of a group.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::reduce::reduce;
use super::{compose, identity_states, invert, shift_state, state_classes, states_from_json, RationalMap, State, StateJson, TransJson};
use crate::error::Result;
use crate::graph::{sccs_by, Core, DirectedGraph};

/// A finite set of states, given as members of a shared state table.
#[derive(Clone, Debug)]
pub struct NucleusSet {
    pub states: Arc<Vec<State>>,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub pass: bool,
    pub witness: Option<String>,
}

impl AxiomVerdict {
    fn ok() -> Self {
        AxiomVerdict { pass: true, witness: None }
    }

    fn fail(w: String) -> Self {
        AxiomVerdict { pass: false, witness: Some(w) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleusCertificate {
    pub map_nuc: AxiomVerdict,
    pub id_nuc: AxiomVerdict,
    pub loc_nuc: AxiomVerdict,
    pub recur_nuc: AxiomVerdict,
    pub inv_nuc: AxiomVerdict,
    pub prod_nuc: AxiomVerdict,
}

impl NucleusCertificate {
    pub fn all_pass(&self) -> bool {
        self.verdicts().iter().all(|(_, v)| v.pass)
    }

    pub fn verdicts(&self) -> [(&'static str, &AxiomVerdict); 6] {
        [
            ("MapNuc", &self.map_nuc),
            ("IdNuc", &self.id_nuc),
            ("LocNuc", &self.loc_nuc),
            ("RecurNuc", &self.recur_nuc),
            ("InvNuc", &self.inv_nuc),
            ("ProdNuc", &self.prod_nuc),
        ]
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.verdicts().iter().filter(|(_, v)| !v.pass).map(|(n, _)| *n).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleusJson {
    pub states: Vec<StateJson>,
    /// Members of the set; all states when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
}

impl NucleusSet {
    pub fn all(states: Vec<State>) -> NucleusSet {
        let members = (0..states.len()).collect();
        NucleusSet { states: Arc::new(states), members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_names(&self) -> Vec<String> {
        self.members.iter().map(|&q| self.states[q].name.clone()).collect()
    }

    /// For each state of `other`, whether it equals some member.
    pub fn contains_mask(&self, other: &[State]) -> Vec<bool> {
        let offset = self.states.len();
        let mut all: Vec<State> = self.states.as_ref().clone();
        all.extend(other.iter().map(|s| shift_state(s, offset)));
        let classes = state_classes(&all);
        let mine: HashSet<usize> = self.members.iter().map(|&q| classes[q]).collect();
        (0..other.len()).map(|i| mine.contains(&classes[offset + i])).collect()
    }

    /// For each state of `other`, a member of self it equals.
    pub fn member_index_of(&self, other: &[State]) -> Vec<Option<usize>> {
        let offset = self.states.len();
        let mut all: Vec<State> = self.states.as_ref().clone();
        all.extend(other.iter().map(|s| shift_state(s, offset)));
        let classes = state_classes(&all);
        let mut rep: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        for &q in &self.members {
            rep.entry(classes[q]).or_insert(q);
        }
        (0..other.len()).map(|i| rep.get(&classes[offset + i]).copied()).collect()
    }

    /// A member of `other` equal to no member of self, if there is one.
    pub fn includes(&self, other: &NucleusSet) -> Option<usize> {
        let mask = self.contains_mask(&other.states);
        other.members.iter().copied().find(|&q| !mask[q])
    }

    pub fn from_json(g: &DirectedGraph, json: &NucleusJson) -> Result<NucleusSet> {
        let states = states_from_json(g, &json.states)?;
        let members = match &json.members {
            None => (0..states.len()).collect(),
            Some(names) => names
                .iter()
                .map(|n| {
                    states.iter().position(|s| &s.name == n).ok_or_else(|| {
                        crate::error::Error::InvalidMachine(format!("unknown member {n}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(NucleusSet { states: Arc::new(states), members })
    }

    /// The member states alone, with transitions kept, as JSON.
    pub fn to_json(&self, g: &DirectedGraph) -> NucleusJson {
        NucleusJson {
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
            members: if self.members.len() == self.states.len() { None } else { Some(self.member_names()) },
        }
    }
}

/// States of the reduced machine lying on or after a cycle of the
/// reachable state graph.
pub fn nucleus_of(g: &DirectedGraph, f: &RationalMap) -> Result<NucleusSet> {
    let f = reduce(g, f)?;
    let n = f.states.len();
    let comps = sccs_by(n, |q| f.states[q].trans.iter().map(|t| t.next).collect());
    let mut member = vec![false; n];
    let mut stack = Vec::new();
    for c in comps {
        let cyclic = c.len() > 1 || f.states[c[0]].trans.iter().any(|t| t.next == c[0]);
        if cyclic {
            stack.extend(c);
        }
    }
    while let Some(q) = stack.pop() {
        if member[q] {
            continue;
        }
        member[q] = true;
        stack.extend(f.states[q].trans.iter().map(|t| t.next));
    }
    let members = (0..n).filter(|&q| member[q]).collect();
    Ok(NucleusSet { states: f.states.clone(), members })
}

/// Checks the six closure axioms for `set` to be the nucleus of a group of
/// rational maps. Each failing axiom carries a witness.
pub fn verify_nucleus_of_injections(
    g: &DirectedGraph,
    set: &NucleusSet,
    core: &Core,
    state_budget: usize,
) -> Result<NucleusCertificate> {
    let states = &set.states;
    let name = |q: usize| states[q].name.clone();

    let map_nuc = match set.members.iter().find(|&&q| {
        !core.contains(states[q].dom) || !states[q].cod.is_some_and(|w| core.contains(w))
    }) {
        None => AxiomVerdict::ok(),
        Some(&q) => AxiomVerdict::fail(format!("state {} is not a map between core cones", name(q))),
    };

    let ids = identity_states(g);
    let id_mask = set.contains_mask(&ids);
    let id_nuc = match core.nodes.iter().find(|&&v| !id_mask[v]) {
        None => AxiomVerdict::ok(),
        Some(&v) => AxiomVerdict::fail(format!("identity on node {} is missing", g.node_name(v))),
    };

    let own = set.contains_mask(states);
    let mut loc_nuc = AxiomVerdict::ok();
    'loc: for &q in &set.members {
        for t in &states[q].trans {
            if !own[t.next] {
                loc_nuc = AxiomVerdict::fail(format!(
                    "restriction of {} to edge {} is outside the set",
                    name(q),
                    g.edge_name(t.edge)
                ));
                break 'loc;
            }
        }
    }

    let maps: Vec<RationalMap> = set.members.iter().map(|&q| RationalMap::from_state(g, states.clone(), q)).collect();
    let mut recurrent = vec![false; states.len()];
    for m in &maps {
        let nuc = nucleus_of(g, m)?;
        let back = nuc.contains_mask(states);
        for &q in &set.members {
            if back[q] {
                recurrent[q] = true;
            }
        }
    }
    let recur_nuc = match set.members.iter().find(|&&q| !recurrent[q]) {
        None => AxiomVerdict::ok(),
        Some(&q) => AxiomVerdict::fail(format!("state {} is not in the nucleus of any member", name(q))),
    };

    let mut inv_nuc = AxiomVerdict::ok();
    for (i, m) in maps.iter().enumerate() {
        let q = set.members[i];
        let verdict = match invert(g, m, state_budget) {
            Err(e) => Some(format!("state {} has no rational inverse: {e}", name(q))),
            Ok(inv) => {
                let nuc = nucleus_of(g, &inv)?;
                set.includes(&nuc).map(|p| format!("inverse of {} has nucleus state {} outside the set", name(q), nuc.states[p].name))
            }
        };
        if let Some(w) = verdict {
            inv_nuc = AxiomVerdict::fail(w);
            break;
        }
    }

    let mut prod_nuc = AxiomVerdict::ok();
    'prod: for (i, mp) in maps.iter().enumerate() {
        for (j, mq) in maps.iter().enumerate() {
            let p = set.members[i];
            let q = set.members[j];
            if states[q].cod != Some(states[p].dom) {
                continue;
            }
            let c = compose(g, mp, mq, state_budget)?;
            let nuc = nucleus_of(g, &c)?;
            if let Some(r) = set.includes(&nuc) {
                prod_nuc = AxiomVerdict::fail(format!(
                    "nucleus of {}∘{} contains a state outside the set (state {})",
                    name(p),
                    name(q),
                    nuc.states[r].name
                ));
                break 'prod;
            }
        }
    }

    Ok(NucleusCertificate { map_nuc, id_nuc, loc_nuc, recur_nuc, inv_nuc, prod_nuc })
}
