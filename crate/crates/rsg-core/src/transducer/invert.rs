//! Images of rational maps and inverses of injective ones.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::reduce::reduce;
use super::{compose, maps_equal, norm_abs, norm_rel, InitialEntry, RationalMap, State, Transition};
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::path::Path;

/// Image of a rational map as a clopen set. Fails with `Fuel` when the
/// descending iteration does not settle, which happens when the image is
/// not clopen.
pub fn image(g: &DirectedGraph, f: &RationalMap, fuel: usize) -> Result<ClopenSet> {
    let states = f.states.as_ref();
    let mut cur: Vec<ClopenSet> = states
        .iter()
        .map(|s| match s.cod {
            Some(w) => ClopenSet::cone(g, &Path::node(w)),
            None => ClopenSet::whole(),
        })
        .collect();
    let mut rounds = 0;
    loop {
        let mut next = Vec::with_capacity(states.len());
        for s in states {
            let mut acc = ClopenSet::empty();
            for t in &s.trans {
                let abs = norm_abs(Path::null(), s.cod).concat(g, &t.out)?;
                acc = acc.union(g, &cur[t.next].prefixed(g, &abs)?);
            }
            next.push(acc);
        }
        if next == cur {
            break;
        }
        cur = next;
        rounds += 1;
        if rounds > fuel {
            return Err(Error::Fuel(fuel));
        }
    }
    let mut acc = ClopenSet::empty();
    for e in &f.initial {
        acc = acc.union(g, &cur[e.state].prefixed(g, &e.out)?);
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Config {
    input: Path,
    state: usize,
    pending: Path,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    dom: NodeId,
    cod: Option<NodeId>,
    configs: BTreeSet<Config>,
}

/// Expands configurations until every one has pending output.
fn saturate(g: &DirectedGraph, states: &[State], configs: Vec<Config>, fuel: usize) -> Result<BTreeSet<Config>> {
    let mut out = BTreeSet::new();
    let mut stack = configs;
    let mut spent = 0usize;
    while let Some(c) = stack.pop() {
        if !c.pending.is_empty() {
            out.insert(c);
            continue;
        }
        spent += 1;
        if spent > fuel {
            return Err(Error::Fuel(fuel));
        }
        for t in &states[c.state].trans {
            stack.push(Config {
                input: c.input.with_edge(g, t.edge)?,
                state: t.next,
                pending: c.pending.concat(g, &t.out)?,
            });
        }
    }
    Ok(out)
}

fn consume(g: &DirectedGraph, configs: &BTreeSet<Config>, x: usize) -> Vec<Config> {
    configs
        .iter()
        .filter(|c| c.pending.edges()[0] == x)
        .map(|c| {
            let rest = &c.pending.edges()[1..];
            let pending = if rest.is_empty() { Path::null() } else { Path::from_edges(g, rest).expect("suffix") };
            Config { input: c.input.clone(), state: c.state, pending }
        })
        .collect()
}

fn check_injective(g: &DirectedGraph, configs: &BTreeSet<Config>) -> Result<()> {
    let mut seen: HashMap<(usize, &Path), &Path> = HashMap::new();
    for c in configs {
        if let Some(other) = seen.insert((c.state, &c.pending), &c.input) {
            return Err(Error::NotInjective(format!(
                "inputs {} and {} have the same future",
                other.display(g),
                c.input.display(g)
            )));
        }
    }
    Ok(())
}

/// Emits the common prefix of all inputs and strips it.
fn emit(g: &DirectedGraph, configs: BTreeSet<Config>, cod: Option<NodeId>) -> (Path, Option<NodeId>, BTreeSet<Config>) {
    let mut it = configs.iter();
    let mut c = it.next().map(|c| c.input.clone()).unwrap_or_default();
    for x in it {
        c = c.gcp(&x.input);
    }
    let new_cod = c.terminus(g).or(cod);
    let stripped = configs
        .into_iter()
        .map(|x| {
            let rest = x.input.strip_prefix(g, &c).expect("gcp is a prefix");
            let input = if rest.is_empty() && !c.is_null() { Path::null() } else { rest };
            Config { input, state: x.state, pending: x.pending }
        })
        .collect();
    (norm_rel(c, cod), new_cod, stripped)
}

/// Inverse of an injective rational map, defined on its image.
pub fn invert(g: &DirectedGraph, f: &RationalMap, state_budget: usize) -> Result<RationalMap> {
    let f = reduce(g, f)?;
    let states = f.states.as_ref();
    let fuel = 64 * (states.len() + 4) * (f.max_output_len() + 2) * (g.edge_count() + 1);
    let img = image(g, &f, 4 * states.len() + 16)?;
    let start: Vec<Config> = f
        .initial
        .iter()
        .map(|e| Config { input: e.cone.clone(), state: e.state, pending: e.out.clone() })
        .collect();
    let start = saturate(g, states, start, fuel)?;
    check_injective(g, &start)?;

    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut intern = |k: Key, keys: &mut Vec<Key>| -> Result<usize> {
        if let Some(&i) = index.get(&k) {
            return Ok(i);
        }
        if keys.len() >= state_budget {
            return Err(Error::Budget(format!("more than {state_budget} states")));
        }
        index.insert(k.clone(), keys.len());
        keys.push(k);
        Ok(keys.len() - 1)
    };

    let mut initial = Vec::new();
    for beta in img.code_at_length(g, 1) {
        let mut cfg = start.clone();
        for &x in beta.edges() {
            cfg = saturate(g, states, consume(g, &cfg, x), fuel)?;
            check_injective(g, &cfg)?;
        }
        if cfg.is_empty() {
            return Err(Error::InvalidMachine(format!("no preimage for {}", beta.display(g))));
        }
        let (out, cod, cfg) = emit(g, cfg, None);
        let dom = beta.terminus(g).expect("non-null");
        let id = intern(Key { dom, cod, configs: cfg }, &mut keys)?;
        initial.push(InitialEntry { cone: beta, out: norm_abs(out, cod), state: id });
    }

    let mut new_states = Vec::new();
    let mut done = 0;
    while done < keys.len() {
        let k = keys[done].clone();
        let mut trans = Vec::new();
        for &x in g.out_edges(k.dom) {
            let cfg = saturate(g, states, consume(g, &k.configs, x), fuel)?;
            check_injective(g, &cfg)?;
            if cfg.is_empty() {
                return Err(Error::InvalidMachine("image is not clopen or the machine is inconsistent".into()));
            }
            let (out, cod, cfg) = emit(g, cfg, k.cod);
            let next = intern(Key { dom: g.dst(x), cod, configs: cfg }, &mut keys)?;
            trans.push(Transition { edge: x, out, next });
        }
        new_states.push(State { name: format!("q{done}"), dom: k.dom, cod: k.cod, trans });
        done += 1;
    }
    let inv = RationalMap { domain: img, initial, states: Arc::new(new_states) };
    let inv = reduce(g, &inv)?;
    let back = compose(g, &inv, &f, state_budget.saturating_mul(4).max(64))?;
    if !maps_equal(g, &back, &RationalMap::identity(g, &f.domain))? {
        return Err(Error::NotInjective("inverse candidate does not undo the map".into()));
    }
    Ok(inv)
}
