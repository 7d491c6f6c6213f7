//! Reduction (pushing outputs forward as early as possible) and
//! minimization by Moore partition refinement.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::{norm_abs, norm_rel, InitialEntry, RationalMap, State, Transition};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::path::Path;

/// Equivalence classes of states: two states share a class iff they have the
/// same domain node and define the same map with identical outputs.
pub fn state_classes(states: &[State]) -> Vec<usize> {
    let mut class = vec![0usize; states.len()];
    {
        let mut ids: HashMap<(usize, Option<usize>, Vec<&Path>), usize> = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            let key = (s.dom, s.cod, s.trans.iter().map(|t| &t.out).collect());
            let n = ids.len();
            class[i] = *ids.entry(key).or_insert(n);
        }
    }
    let mut count = class.iter().copied().max().map_or(0, |m| m + 1);
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0usize; states.len()];
        for (i, s) in states.iter().enumerate() {
            let key = (class[i], s.trans.iter().map(|t| class[t.next]).collect());
            let n = ids.len();
            next[i] = *ids.entry(key).or_insert(n);
        }
        let c = ids.len();
        class = next;
        if c == count {
            return class;
        }
        count = c;
    }
}

/// Greatest common prefix of the image of state `q`, as an absolute path
/// (the node path `cod(q)` when nothing more is forced).
pub(crate) fn state_gcp(g: &DirectedGraph, states: &[State], q: usize, fuel: usize) -> Result<Path> {
    let mut acc = norm_abs(Path::null(), states[q].cod);
    let mut frontier: Vec<(usize, Path)> = vec![(q, Path::null())];
    let mut spent = 0usize;
    loop {
        // Expand entries that have not yet produced an edge.
        let mut ready: HashSet<(usize, Path)> = HashSet::new();
        let mut seen: HashSet<(usize, Path)> = HashSet::new();
        while let Some((r, p)) = frontier.pop() {
            if !p.is_empty() {
                ready.insert((r, p));
                continue;
            }
            if !seen.insert((r, p.clone())) {
                continue;
            }
            spent += 1;
            if spent > fuel {
                return Err(Error::Fuel(fuel));
            }
            for t in &states[r].trans {
                frontier.push((t.next, p.concat(g, &t.out)?));
            }
        }
        if ready.is_empty() {
            return Ok(acc);
        }
        let mut it = ready.iter();
        let (_, first) = it.next().expect("nonempty");
        let origin = first.origin();
        let e0 = first.edges()[0];
        let same_origin = ready.iter().all(|(_, p)| p.origin() == origin);
        if acc.is_null() {
            if !same_origin {
                return Ok(acc);
            }
            acc = Path::node(origin.expect("has edges"));
        }
        if !ready.iter().all(|(_, p)| p.edges()[0] == e0) {
            return Ok(acc);
        }
        acc.push(g, e0)?;
        frontier = ready
            .into_iter()
            .map(|(r, p)| {
                let rest = &p.edges()[1..];
                let rel = if rest.is_empty() {
                    Path::null()
                } else {
                    Path::from_edges(g, rest).expect("suffix of a path")
                };
                (r, rel)
            })
            .collect();
        spent += 1;
        if spent > fuel {
            return Err(Error::Fuel(fuel));
        }
    }
}

/// Reduced, minimal machine for the same map.
pub fn reduce(g: &DirectedGraph, f: &RationalMap) -> Result<RationalMap> {
    let fuel = 64 * (f.states.len() + 4) * (f.max_output_len() + 2) * (g.edge_count() + 1);
    let states = f.states.as_ref();
    let reach = reachable_states(f);
    let mut gcps: HashMap<usize, Path> = HashMap::new();
    for &q in &reach {
        gcps.insert(q, state_gcp(g, states, q, fuel)?);
    }
    let mut renum: HashMap<usize, usize> = HashMap::new();
    for (i, &q) in reach.iter().enumerate() {
        renum.insert(q, i);
    }
    let mut new_states = Vec::with_capacity(reach.len());
    for &q in &reach {
        let s = &states[q];
        let gq = &gcps[&q];
        let cod = gq.terminus(g);
        let mut trans = Vec::with_capacity(s.trans.len());
        for t in &s.trans {
            let full = t.out.concat(g, &gcps[&t.next])?;
            let rest = full
                .strip_prefix(g, gq)
                .ok_or_else(|| Error::InvalidMachine("state prefix is not a prefix of an output".into()))?;
            trans.push(Transition { edge: t.edge, out: norm_rel(rest, cod), next: renum[&t.next] });
        }
        new_states.push(State { name: s.name.clone(), dom: s.dom, cod, trans });
    }
    let mut initial = Vec::with_capacity(f.initial.len());
    for e in &f.initial {
        let out = e.out.concat(g, &gcps[&e.state])?;
        let cod = new_states[renum[&e.state]].cod;
        initial.push(InitialEntry { cone: e.cone.clone(), out: norm_abs(out, cod), state: renum[&e.state] });
    }
    Ok(minimize(RationalMap { domain: f.domain.clone(), initial, states: Arc::new(new_states) }))
}

fn reachable_states(f: &RationalMap) -> Vec<usize> {
    let mut seen = vec![false; f.states.len()];
    let mut order = Vec::new();
    let mut stack: Vec<usize> = f.initial.iter().map(|e| e.state).collect();
    while let Some(q) = stack.pop() {
        if seen[q] {
            continue;
        }
        seen[q] = true;
        order.push(q);
        for t in f.states[q].trans.iter().rev() {
            stack.push(t.next);
        }
    }
    order.sort_unstable();
    order
}

/// Merges equivalent states and drops unreachable ones. State names are
/// kept from the first representative; generated names are renumbered.
pub(crate) fn minimize(f: RationalMap) -> RationalMap {
    let classes = state_classes(&f.states);
    let mut rep: HashMap<usize, usize> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    // Breadth-first from the initial table so numbering is canonical.
    let mut queue: std::collections::VecDeque<usize> = f.initial.iter().map(|e| e.state).collect();
    while let Some(q) = queue.pop_front() {
        let c = classes[q];
        if rep.contains_key(&c) {
            continue;
        }
        rep.insert(c, order.len());
        order.push(q);
        for t in &f.states[q].trans {
            queue.push_back(t.next);
        }
    }
    let states: Vec<State> = order
        .iter()
        .map(|&q| {
            let s = &f.states[q];
            State {
                name: s.name.clone(),
                dom: s.dom,
                cod: s.cod,
                trans: s
                    .trans
                    .iter()
                    .map(|t| Transition { edge: t.edge, out: t.out.clone(), next: rep[&classes[t.next]] })
                    .collect(),
            }
        })
        .collect();
    let mut names = HashSet::new();
    let unique = states.iter().all(|s| names.insert(s.name.clone()));
    let states = if unique {
        states
    } else {
        states.into_iter().enumerate().map(|(i, mut s)| {
            s.name = format!("q{i}");
            s
        }).collect()
    };
    let initial = f
        .initial
        .iter()
        .map(|e| InitialEntry { cone: e.cone.clone(), out: e.out.clone(), state: rep[&classes[e.state]] })
        .collect();
    RationalMap { domain: f.domain, initial, states: Arc::new(states) }
}
