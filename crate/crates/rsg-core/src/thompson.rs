//! Prefix-exchange maps (elements of V_{Γ,E}), constructive cone mapping,
//! pushing a clopen set into the core, and transitivity witnesses.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::classes::ClassesGroup;
use crate::clopen::{ClopenSet, Code};
use crate::error::{Error, Result};
use crate::graph::{successor_closure, Core, DirectedGraph, NodeId};
use crate::path::{Path, PathJson};
use crate::transducer::{expand_null, identity_states, InitialEntry, RationalMap};

/// A prefix exchange α_i·ω ↦ β_i·ω, stored as pairs sorted by α. Domain and
/// range are usually the same clopen set; maps between different sets are
/// allowed for pushing into the core.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VElement {
    pairs: Vec<(Path, Path)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VElementJson {
    pub domain: Vec<PathJson>,
    pub range: Vec<PathJson>,
    pub perm: Vec<usize>,
}

impl VElement {
    pub fn new(g: &DirectedGraph, pairs: Vec<(Path, Path)>) -> Result<VElement> {
        let mut flat = Vec::new();
        for (a, b) in pairs {
            if a.is_null() || b.is_null() {
                if g.node_count() != 1 {
                    return Err(Error::InvalidPath("the null path has no terminus".into()));
                }
                let a = if a.is_null() { Path::node(0) } else { a };
                let b = if b.is_null() { Path::node(0) } else { b };
                flat.push((a, b));
            } else {
                flat.push((a, b));
            }
        }
        for (a, b) in &flat {
            if a.terminus(g) != b.terminus(g) {
                return Err(Error::InvalidPath(format!(
                    "{} and {} end at different nodes",
                    a.display(g),
                    b.display(g)
                )));
            }
        }
        Code::new(flat.iter().map(|p| p.0.clone()).collect())?;
        Code::new(flat.iter().map(|p| p.1.clone()).collect())?;
        Ok(VElement { pairs: flat }.reduced(g))
    }

    /// The identity on a clopen set.
    pub fn identity(g: &DirectedGraph, set: &ClopenSet) -> VElement {
        let pairs = expand_null(g, set.cones()).into_iter().map(|c| (c.clone(), c)).collect();
        VElement { pairs }.reduced(g)
    }

    pub fn pairs(&self) -> &[(Path, Path)] {
        &self.pairs
    }

    pub fn domain(&self, g: &DirectedGraph) -> ClopenSet {
        ClopenSet::from_paths(g, &self.pairs.iter().map(|p| p.0.clone()).collect::<Vec<_>>())
    }

    pub fn range(&self, g: &DirectedGraph) -> ClopenSet {
        ClopenSet::from_paths(g, &self.pairs.iter().map(|p| p.1.clone()).collect::<Vec<_>>())
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a == b)
    }

    /// Image of a finite path lying inside one domain cone.
    pub fn apply(&self, g: &DirectedGraph, x: &Path) -> Option<Path> {
        self.pairs.iter().find(|(a, _)| a.is_prefix_of(x)).map(|(a, b)| {
            let rest = x.strip_prefix(g, a).expect("prefix");
            b.concat(g, &rest).expect("termini agree")
        })
    }

    /// Merges sibling families that move as a whole, to a fixpoint.
    fn reduced(mut self, g: &DirectedGraph) -> VElement {
        loop {
            self.pairs.sort();
            let mut groups: BTreeMap<Path, Vec<usize>> = BTreeMap::new();
            for (i, (a, b)) in self.pairs.iter().enumerate() {
                if a.is_empty() || b.is_empty() {
                    continue;
                }
                if a.edges().last() != b.edges().last() {
                    continue;
                }
                groups.entry(a.parent().expect("has edges")).or_default().push(i);
            }
            let mut merged: Vec<(Path, Path)> = Vec::new();
            let mut drop = vec![false; self.pairs.len()];
            for (par, idx) in groups {
                if idx.len() != par.child_count(g) {
                    continue;
                }
                let rp = self.pairs[idx[0]].1.parent().expect("has edges");
                if idx.iter().all(|&i| self.pairs[i].1.parent().as_ref() == Some(&rp)) {
                    for &i in &idx {
                        drop[i] = true;
                    }
                    merged.push((par, rp));
                }
            }
            if merged.is_empty() {
                return self;
            }
            let mut keep: Vec<(Path, Path)> =
                self.pairs.into_iter().zip(drop).filter(|(_, d)| !d).map(|(p, _)| p).collect();
            keep.extend(merged);
            self.pairs = keep;
        }
    }

    /// self ∘ other.
    pub fn compose(&self, g: &DirectedGraph, other: &VElement) -> Result<VElement> {
        let mut out = Vec::new();
        for (a, b) in &other.pairs {
            self.split_into(g, a.clone(), b.clone(), &mut out, 0)?;
        }
        Ok(VElement { pairs: out }.reduced(g))
    }

    fn split_into(&self, g: &DirectedGraph, a: Path, b: Path, out: &mut Vec<(Path, Path)>, depth: usize) -> Result<()> {
        if let Some((d, r)) = self.pairs.iter().find(|(d, _)| d.is_prefix_of(&b)) {
            let rest = b.strip_prefix(g, d).expect("prefix");
            out.push((a, r.concat(g, &rest)?));
            return Ok(());
        }
        if depth > 4096 || !self.pairs.iter().any(|(d, _)| b.is_prefix_of(d)) {
            return Err(Error::AmbientMismatch(format!("{} is outside the domain", b.display(g))));
        }
        let t = b.terminus(g).expect("non-null");
        for &e in g.out_edges(t) {
            self.split_into(g, a.with_edge(g, e)?, b.with_edge(g, e)?, out, depth + 1)?;
        }
        Ok(())
    }

    pub fn invert(&self, g: &DirectedGraph) -> VElement {
        VElement { pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect() }.reduced(g)
    }

    /// Equality of reduced forms.
    pub fn equal(&self, other: &VElement) -> bool {
        self.pairs == other.pairs
    }

    /// The same map as a transducer whose states are all identities.
    pub fn as_rational(&self, g: &DirectedGraph) -> RationalMap {
        let states = identity_states(g);
        let initial = self
            .pairs
            .iter()
            .map(|(a, b)| InitialEntry { cone: a.clone(), out: b.clone(), state: a.terminus(g).expect("non-null") })
            .collect();
        RationalMap { domain: self.domain(g), initial, states: std::sync::Arc::new(states) }
    }

    pub fn to_json(&self, g: &DirectedGraph) -> VElementJson {
        let mut range: Vec<&Path> = self.pairs.iter().map(|p| &p.1).collect();
        range.sort();
        let perm = self.pairs.iter().map(|p| range.iter().position(|r| **r == p.1).expect("present")).collect();
        VElementJson {
            domain: self.pairs.iter().map(|p| p.0.to_json(g)).collect(),
            range: range.iter().map(|r| r.to_json(g)).collect(),
            perm,
        }
    }

    pub fn from_json(g: &DirectedGraph, j: &VElementJson) -> Result<VElement> {
        if j.domain.len() != j.range.len() || j.perm.len() != j.domain.len() {
            return Err(Error::NotACode("domain, range and perm lengths differ".into()));
        }
        let dom = j.domain.iter().map(|p| Path::from_json(g, p)).collect::<Result<Vec<_>>>()?;
        let ran = j.range.iter().map(|p| Path::from_json(g, p)).collect::<Result<Vec<_>>>()?;
        let mut pairs = Vec::new();
        for (i, a) in dom.into_iter().enumerate() {
            let k = j.perm[i];
            let b = ran.get(k).ok_or_else(|| Error::NotACode(format!("perm entry {k} out of range")))?;
            pairs.push((a, b.clone()));
        }
        VElement::new(g, pairs)
    }
}

/// Pairs a code of X with a code of Y so that paired cones end at the same
/// node, refining both sides. Fails fast when the classes of X and Y differ
/// in the classes group of the nodes they can reach.
pub fn map_clopen_v(g: &DirectedGraph, x: &ClopenSet, y: &ClopenSet, depth_limit: usize) -> Result<Vec<(Path, Path)>> {
    let xs = expand_null(g, x.cones());
    let ys = expand_null(g, y.cones());
    match_codes(g, xs, ys, depth_limit)
}

/// Pairs two lists of disjoint paths covering sets of equal class.
pub fn match_code_lists(g: &DirectedGraph, xs: Vec<Path>, ys: Vec<Path>, depth_limit: usize) -> Result<Vec<(Path, Path)>> {
    match_codes(g, xs, ys, depth_limit)
}

fn termini(g: &DirectedGraph, ps: &[Path]) -> Vec<NodeId> {
    let mut v: Vec<NodeId> = ps.iter().map(|p| p.terminus(g).expect("non-null")).collect();
    v.sort_unstable();
    v
}

/// Cancels common nodes, keeping both sides nonempty unless they are equal.
fn cancel(a: &[NodeId], b: &[NodeId]) -> (Vec<NodeId>, Vec<NodeId>) {
    if a == b {
        return (Vec::new(), Vec::new());
    }
    let (mut ra, mut rb) = (Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    let mut common = Vec::new();
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            common.push(a[i]);
            i += 1;
            j += 1;
        } else if a[i] < b[j] {
            ra.push(a[i]);
            i += 1;
        } else {
            rb.push(b[j]);
            j += 1;
        }
    }
    ra.extend_from_slice(&a[i..]);
    rb.extend_from_slice(&b[j..]);
    if (ra.is_empty() || rb.is_empty()) && !common.is_empty() {
        // Keep one common node on both sides so neither becomes empty alone.
        let c = common[0];
        ra.push(c);
        rb.push(c);
        ra.sort_unstable();
        rb.sort_unstable();
    }
    (ra, rb)
}

fn expand_node(g: &DirectedGraph, ms: &[NodeId], k: usize) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = ms[..k].iter().chain(&ms[k + 1..]).copied().collect();
    out.extend(g.successors(ms[k]));
    out.sort_unstable();
    out
}

const MAX_SIDE: usize = 48;

pub(crate) fn match_codes(
    g: &DirectedGraph,
    xs: Vec<Path>,
    ys: Vec<Path>,
    depth_limit: usize,
) -> Result<Vec<(Path, Path)>> {
    if xs.is_empty() && ys.is_empty() {
        return Ok(Vec::new());
    }
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::ClassObstruction("one side is empty and the other is not".into()));
    }
    let ta = termini(g, &xs);
    let tb = termini(g, &ys);
    let mut start_nodes = ta.clone();
    start_nodes.extend(&tb);
    let closed = successor_closure(g, &start_nodes);
    let grp = ClassesGroup::of_closed_set(g, &closed)?;
    let (ca, cb) = (grp.class_of_nodes(&ta)?, grp.class_of_nodes(&tb)?);
    if ca != cb {
        return Err(Error::ClassObstruction(format!(
            "classes {} and {} differ in {}",
            grp.show(&ca),
            grp.show(&cb),
            grp
        )));
    }
    // Breadth-first search over cancelled terminus multisets; moves are
    // (side, node expanded).
    type St = (Vec<NodeId>, Vec<NodeId>);
    let start: St = cancel(&ta, &tb);
    let mut parent: HashMap<St, Option<(St, bool, NodeId)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue: VecDeque<(St, usize)> = VecDeque::from([(start, 0)]);
    let mut goal = None;
    while let Some((st, d)) = queue.pop_front() {
        if st.0.is_empty() && st.1.is_empty() {
            goal = Some(st);
            break;
        }
        if d >= depth_limit {
            continue;
        }
        for side in [false, true] {
            let ms = if side { &st.1 } else { &st.0 };
            if ms.len() >= MAX_SIDE {
                continue;
            }
            let mut last = None;
            for k in 0..ms.len() {
                if last == Some(ms[k]) {
                    continue;
                }
                last = Some(ms[k]);
                let e = expand_node(g, ms, k);
                let (a, b) = if side { (st.0.clone(), e) } else { (e, st.1.clone()) };
                let nst = cancel(&a, &b);
                if !parent.contains_key(&nst) {
                    parent.insert(nst.clone(), Some((st.clone(), side, ms[k])));
                    queue.push_back((nst, d + 1));
                }
            }
        }
    }
    let Some(goal) = goal else {
        return Err(Error::DepthExhausted(depth_limit));
    };
    let mut moves = Vec::new();
    let mut cur = goal;
    while let Some(Some((prev, side, v))) = parent.get(&cur).cloned() {
        moves.push((side, v));
        cur = prev;
    }
    moves.reverse();
    let mut xs = xs;
    let mut ys = ys;
    for (side, v) in moves {
        let list = if side { &mut ys } else { &mut xs };
        let (pos, _) = list
            .iter()
            .enumerate()
            .filter(|(_, p)| p.terminus(g) == Some(v))
            .min_by(|a, b| a.1.cmp(b.1))
            .expect("replayed expansion has a matching path");
        let p = list.remove(pos);
        list.extend(p.children(g));
    }
    let key = |p: &Path| (p.terminus(g), p.clone());
    xs.sort_by_key(key);
    ys.sort_by_key(key);
    Ok(xs.into_iter().zip(ys).collect())
}

/// A V element on E sending each 𝔠_{α_i} to 𝔠_{β_i} by the canonical
/// similarity.
pub fn map_cones_v(g: &DirectedGraph, e: &ClopenSet, pairs: &[(Path, Path)], depth_limit: usize) -> Result<VElement> {
    let alphas: Vec<Path> = pairs.iter().map(|p| p.0.clone()).collect();
    let betas: Vec<Path> = pairs.iter().map(|p| p.1.clone()).collect();
    for (a, b) in pairs {
        if a.terminus(g) != b.terminus(g) || a.is_null() {
            return Err(Error::InvalidPath(format!("{} and {} end at different nodes", a.display(g), b.display(g))));
        }
    }
    Code::new(alphas.clone())?;
    Code::new(betas.clone())?;
    let ua = ClopenSet::from_paths(g, &alphas);
    let ub = ClopenSet::from_paths(g, &betas);
    if !ua.is_subset(g, e) || !ub.is_subset(g, e) {
        return Err(Error::AmbientMismatch("requested cones are not inside E".into()));
    }
    let rest = map_clopen_v(g, &e.difference(g, &ua), &e.difference(g, &ub), depth_limit)?;
    let mut all = pairs.to_vec();
    all.extend(rest);
    VElement::new(g, all)
}

/// Pushes E into the core: a prefix exchange from E onto a clopen set
/// of paths inside the core.
pub fn push_into_core(g: &DirectedGraph, core: &Core, e: &ClopenSet) -> Result<(ClopenSet, VElement)> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    let code = e.code_at_length(g, core.depth);
    let already = code.iter().all(|p| {
        p.origin().is_some_and(|o| core.contains(o)) && p.terminus(g).is_some_and(|t| core.contains(t))
    });
    if already && core.depth == 0 {
        return Ok((e.clone(), VElement::identity(g, e)));
    }
    let mut pool: Vec<Path> = core.nodes.iter().map(|&v| Path::node(v)).collect();
    let mut pairs = Vec::new();
    let budget = 64 * (code.len() + 4) * g.node_count().max(1);
    let mut spent = 0;
    let total = code.len();
    for (i, c) in code.into_iter().enumerate() {
        let t = c.terminus(g).expect("non-null");
        if !core.contains(t) {
            return Err(Error::NoCore);
        }
        let more = i + 1 < total;
        loop {
            let found = pool.iter().position(|p| p.terminus(g) == Some(t));
            if let Some(k) = found.filter(|_| pool.len() > 1 || !more) {
                let target = pool.remove(k);
                pairs.push((c, target));
                break;
            }
            spent += 1;
            if spent > budget || pool.is_empty() {
                return Err(Error::DepthExhausted(spent));
            }
            let (k, _) = pool.iter().enumerate().min_by_key(|(_, p)| (p.len(), (*p).clone())).expect("nonempty");
            let p = pool.remove(k);
            pool.extend(p.children(g));
        }
    }
    let h = VElement::new(g, pairs)?;
    Ok((h.range(g), h))
}

/// An eventually periodic point σ·τ^∞.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    pub prefix: Path,
    pub period: Path,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPointJson {
    pub prefix: PathJson,
    pub period: PathJson,
}

impl RationalPoint {
    pub fn new(g: &DirectedGraph, prefix: Path, period: Path) -> Result<RationalPoint> {
        if period.is_empty() || period.terminus(g) != period.origin() {
            return Err(Error::InvalidPoint("period must be a nonempty cycle".into()));
        }
        if !prefix.is_null() && prefix.terminus(g) != period.origin() {
            return Err(Error::InvalidPoint("prefix must end where the period starts".into()));
        }
        Ok(RationalPoint { prefix, period })
    }

    /// First `n` edges of the point.
    pub fn prefix_of_len(&self, g: &DirectedGraph, n: usize) -> Path {
        let mut p = self.prefix.clone();
        let per = self.period.edges();
        let mut i = 0;
        while p.len() < n {
            p.push(g, per[i % per.len()]).expect("cycle");
            i += 1;
        }
        if p.len() > n {
            let edges = p.edges()[..n].to_vec();
            return if n == 0 { Path::null() } else { Path::from_edges(g, &edges).expect("prefix") };
        }
        p
    }

    /// Shortest prefix and primitive period describing the same point.
    pub fn normalized(&self, g: &DirectedGraph) -> RationalPoint {
        let per = self.period.edges();
        let n = per.len();
        let root = (1..=n).find(|&d| n % d == 0 && (0..n).all(|i| per[i] == per[i % d])).unwrap_or(n);
        let mut tau: Vec<usize> = per[..root].to_vec();
        let mut sigma: Vec<usize> = self.prefix.edges().to_vec();
        while let (Some(&a), Some(&b)) = (sigma.last(), tau.last()) {
            if a != b {
                break;
            }
            sigma.pop();
            tau.rotate_right(1);
        }
        let prefix = if sigma.is_empty() { Path::null() } else { Path::from_edges(g, &sigma).expect("prefix") };
        RationalPoint { prefix, period: Path::from_edges(g, &tau).expect("cycle") }
    }

    pub fn to_json(&self, g: &DirectedGraph) -> RationalPointJson {
        RationalPointJson { prefix: self.prefix.to_json(g), period: self.period.to_json(g) }
    }

    pub fn from_json(g: &DirectedGraph, j: &RationalPointJson) -> Result<RationalPoint> {
        RationalPoint::new(g, Path::from_json(g, &j.prefix)?, Path::from_json(g, &j.period)?)
    }
}

/// Writes x as a·τ₀^∞ for the common cycle τ₀.
fn align(g: &DirectedGraph, x: &RationalPoint, tau0: &[usize]) -> Result<Path> {
    let n = x.normalized(g);
    let per = n.period.edges();
    if per.len() != tau0.len() {
        return Err(Error::InvalidPoint("points lie in different orbits".into()));
    }
    for r in 0..per.len() {
        let rotated: Vec<usize> = per[r..].iter().chain(&per[..r]).copied().collect();
        if rotated == tau0 {
            let mut a = n.prefix.clone();
            for &e in &per[..r] {
                a.push(g, e)?;
            }
            return Ok(a);
        }
    }
    Err(Error::InvalidPoint("points lie in different orbits".into()))
}

/// A V element mapping each s_i to t_i, built from swaps of small cones.
pub fn witness_tuple_map(
    g: &DirectedGraph,
    e: &ClopenSet,
    s: &[RationalPoint],
    t: &[RationalPoint],
    depth_limit: usize,
) -> Result<VElement> {
    if s.len() != t.len() {
        return Err(Error::InvalidPoint("tuples have different lengths".into()));
    }
    let norm = |v: &[RationalPoint]| v.iter().map(|p| p.normalized(g)).collect::<Vec<_>>();
    let (s, t) = (norm(s), norm(t));
    for v in [&s, &t] {
        for i in 0..v.len() {
            if v[i + 1..].contains(&v[i]) {
                return Err(Error::InvalidPoint("points in a tuple must be distinct".into()));
            }
        }
    }
    if s.is_empty() || s == t {
        return Ok(VElement::identity(g, e));
    }
    let tau0: Vec<usize> = s[0].period.edges().to_vec();
    let mut universe: Vec<RationalPoint> = s.clone();
    for p in &t {
        if !universe.contains(p) {
            universe.push(p.clone());
        }
    }
    let heads = universe.iter().map(|p| align(g, p, &tau0)).collect::<Result<Vec<_>>>()?;
    let tau_path = Path::from_edges(g, &tau0)?;
    // Deepen by τ₀ until the cones are disjoint and inside E.
    let mut cones = heads.clone();
    let mut k = 0;
    loop {
        let disjoint = (0..cones.len()).all(|i| (i + 1..cones.len()).all(|j| !cones[i].comparable(&cones[j])));
        let inside = cones.iter().all(|c| !c.is_null() && e.contains_cone(c));
        if disjoint && inside {
            break;
        }
        k += 1;
        if k > depth_limit {
            return Err(Error::DepthExhausted(depth_limit));
        }
        cones = cones.iter().map(|c| c.concat(g, &tau_path)).collect::<Result<Vec<_>>>()?;
    }
    let idx = |p: &RationalPoint| universe.iter().position(|q| q == p).expect("member");
    // Permutation of the universe with s_i ↦ t_i, extended in order.
    let n = universe.len();
    let mut perm = vec![usize::MAX; n];
    for (a, b) in s.iter().zip(&t) {
        perm[idx(a)] = idx(b);
    }
    let free_dom: Vec<usize> = (0..n).filter(|&i| perm[i] == usize::MAX).collect();
    let used: Vec<bool> = (0..n).map(|j| perm.contains(&j)).collect();
    let free_rng: Vec<usize> = (0..n).filter(|&j| !used[j]).collect();
    for (a, b) in free_dom.into_iter().zip(free_rng) {
        perm[a] = b;
    }
    let swap = |i: usize, j: usize| -> Result<VElement> {
        let (a, b) = (&cones[i], &cones[j]);
        let both = ClopenSet::from_paths(g, &[a.clone(), b.clone()]);
        let mut pairs = vec![(a.clone(), b.clone()), (b.clone(), a.clone())];
        pairs.extend(expand_null(g, e.difference(g, &both).cones()).into_iter().map(|c| (c.clone(), c)));
        VElement::new(g, pairs)
    };
    let mut result = VElement::identity(g, e);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = perm[start];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = perm[cur];
        }
        // x1 → x2 → … → xk as (x1 xk)∘…∘(x1 x2).
        for &x in &cycle[1..] {
            result = swap(cycle[0], x)?.compose(g, &result)?;
        }
    }
    Ok(result)
}
