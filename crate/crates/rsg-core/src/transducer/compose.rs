//! Composition f∘g by a product construction.

use std::collections::HashMap;
use std::sync::Arc;

use super::reduce::reduce;
use super::{norm_abs, InitialEntry, RationalMap, State, Transition};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum FPos {
    At(usize),
    /// g has emitted this absolute path, still shorter than f's initial code.
    Pending(Path),
}

enum Resolved {
    Done(Path, usize),
    Pending,
}

fn resolve(g: &DirectedGraph, f: &RationalMap, p: &Path) -> Result<Resolved> {
    for e in &f.initial {
        if e.cone.is_prefix_of(p) {
            let rest = p.strip_prefix(g, &e.cone).expect("prefix");
            let (o, q) = f.run(g, e.state, rest.edges())?;
            return Ok(Resolved::Done(norm_abs(e.out.concat(g, &o)?, f.states[q].cod), q));
        }
    }
    if f.initial.iter().any(|e| p.is_prefix_of(&e.cone)) {
        return Ok(Resolved::Pending);
    }
    Err(Error::OutsideDomain(format!("image point {} is outside the domain of the outer map", p.display(g))))
}

/// The map x ↦ f(g(x)). Requires image(g) ⊆ domain(f).
pub fn compose(g: &DirectedGraph, f: &RationalMap, inner: &RationalMap, state_budget: usize) -> Result<RationalMap> {
    let mut index: HashMap<(usize, FPos), usize> = HashMap::new();
    let mut keys: Vec<(usize, FPos)> = Vec::new();
    let mut intern = |k: (usize, FPos), keys: &mut Vec<(usize, FPos)>| -> Result<usize> {
        if let Some(&i) = index.get(&k) {
            return Ok(i);
        }
        if keys.len() >= state_budget {
            return Err(Error::Budget(format!("more than {state_budget} states")));
        }
        let i = keys.len();
        index.insert(k.clone(), i);
        keys.push(k);
        Ok(i)
    };
    let mut initial = Vec::with_capacity(inner.initial.len());
    for e in &inner.initial {
        let (out, pos) = match resolve(g, f, &e.out)? {
            Resolved::Done(w, t) => (w, FPos::At(t)),
            Resolved::Pending => (Path::null(), FPos::Pending(e.out.clone())),
        };
        let id = intern((e.state, pos), &mut keys)?;
        initial.push(InitialEntry { cone: e.cone.clone(), out, state: id });
    }
    let mut states: Vec<State> = Vec::new();
    let mut done = 0;
    while done < keys.len() {
        let (s, pos) = keys[done].clone();
        let gs = &inner.states[s];
        let cod = match &pos {
            FPos::At(t) => f.states[*t].cod,
            FPos::Pending(_) => None,
        };
        let mut trans = Vec::with_capacity(gs.trans.len());
        for t in &gs.trans {
            let (out, npos) = match &pos {
                FPos::At(ft) => {
                    let (w, nt) = f.run(g, *ft, t.out.edges())?;
                    (w, FPos::At(nt))
                }
                FPos::Pending(p) => {
                    let p2 = p.concat(g, &t.out)?;
                    match resolve(g, f, &p2)? {
                        Resolved::Done(w, nt) => (w, FPos::At(nt)),
                        Resolved::Pending => (Path::null(), FPos::Pending(p2)),
                    }
                }
            };
            let next = intern((t.next, npos), &mut keys)?;
            trans.push(Transition { edge: t.edge, out, next });
        }
        states.push(State { name: format!("q{done}"), dom: gs.dom, cod, trans });
        done += 1;
    }
    let m = RationalMap { domain: inner.domain.clone(), initial, states: Arc::new(states) };
    reduce(g, &m)
}
