//! Mapping triples, signatures and nucleus extraction for the boundary
//! action, with an end-to-end certificate.
//!
//! Deep levels are handled symbolically for groups whose Cayley graph is a
//! tree: there every atom at level n is a cone C(w) with |w| = n, so atoms,
//! their nearest sets and their distance functions are read off w.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use rsg_core::graph::GraphJson;
use rsg_core::transducer::{identity_states, state_classes, NucleusCertificate, NucleusJson, State, Transition};
use rsg_core::{check_subshift, irreducible_core, verify_nucleus_of_injections, DirectedGraph, EdgeId, NodeId, NucleusSet, Path};
use serde::Serialize;

use crate::ball::Ball;
use crate::error::{AtomsError, Result};
use crate::oracle::{ConeType, Elem, GroupOracle, OracleSpec};
use crate::types::{address_system, type_graph, AddressSystem};

/// ‖f‖_S: half the spread of f over S.
pub fn norm_s(values: &[i64]) -> Result<f64> {
    let (Some(lo), Some(hi)) = (values.iter().min(), values.iter().max()) else {
        return Err(AtomsError::Precondition("empty point set".into()));
    };
    Ok((hi - lo) as f64 / 2.0)
}

/// Level past which every atom is the domain of a mapping triple for g.
pub fn triple_threshold(g_len: usize, delta: f64) -> f64 {
    2.0 * g_len as f64 + 39.0 * delta + 13.0
}

pub fn triple_radius(delta: f64) -> f64 {
    18.0 * delta + 6.0
}

pub fn signature_diameter_bound(delta: f64) -> f64 {
    30.0 * delta + 10.0
}

/// Addresses and atoms of a tree-like Cayley graph at arbitrary depth.
#[derive(Clone, Debug)]
pub struct ConeModel {
    pub oracle: GroupOracle,
    pub graph: DirectedGraph,
    pub root: NodeId,
    pub delta: f64,
    node_cone_type: Vec<ConeType>,
    edge_letter: Vec<u8>,
    edge_by: HashMap<(NodeId, u8), EdgeId>,
    /// Words of length at most max(18δ+6, 4δ+2), by length then shortlex.
    small: Ball,
}

impl ConeModel {
    pub fn new(addr: &AddressSystem) -> Result<ConeModel> {
        let t = addr.tree();
        let o = t.oracle.clone();
        if !o.is_tree() {
            return Err(AtomsError::Unsupported(format!(
                "deep levels are modelled only for tree-like Cayley graphs, not {}",
                o.kind_name()
            )));
        }
        let delta = o.delta().unwrap_or(0.0);
        let tg = &addr.types;
        let graph = tg.graph.clone();
        let mut roots: Vec<Elem> = Vec::new();
        let mut node_cone_type = Vec::new();
        for &r in &tg.reps {
            let w = if t.atoms[r].level == 0 {
                Vec::new()
            } else {
                t.cone_root(r).cloned().ok_or_else(|| AtomsError::Inconsistent("representative is not a cone".into()))?
            };
            node_cone_type.push(o.cone_type(&w, 0));
            roots.push(w);
        }
        let mut edge_letter = Vec::new();
        let mut edge_by = HashMap::new();
        for e in 0..graph.edge_count() {
            let (src, dst) = (graph.src(e), graph.dst(e));
            let h = &tg.edge_witness[e].1;
            let step = o.mul(&o.inv(&roots[src]), &o.mul(h, &roots[dst]));
            if step.len() != 1 {
                return Err(AtomsError::Inconsistent(format!("edge {} is not a single letter", graph.edge_name(e))));
            }
            if edge_by.insert((src, step[0]), e).is_some() {
                return Err(AtomsError::Inconsistent("two edges share a letter".into()));
            }
            if o.cone_type(&o.mul(&roots[src], &step), 0) != node_cone_type[dst] {
                return Err(AtomsError::Inconsistent(format!("edge {} changes cone type", graph.edge_name(e))));
            }
            edge_letter.push(step[0]);
        }
        let r = triple_radius(delta).max(4.0 * delta + 2.0).floor() as usize;
        let small = Ball::new(&o, r, 4_000_000)?;
        Ok(ConeModel { oracle: o, graph, root: tg.root, delta, node_cone_type, edge_letter, edge_by, small })
    }

    pub fn type_of(&self, w: &[u8]) -> Result<NodeId> {
        let ct = self.oracle.cone_type(w, 0);
        self.node_cone_type
            .iter()
            .position(|c| *c == ct)
            .ok_or_else(|| AtomsError::Inconsistent(format!("no type for {}", self.oracle.show(w))))
    }

    /// Address of the atom C(w).
    pub fn address(&self, w: &[u8]) -> Result<Vec<EdgeId>> {
        let mut t = self.root;
        let mut out = Vec::with_capacity(w.len());
        for &l in w {
            let e = *self
                .edge_by
                .get(&(t, l))
                .ok_or_else(|| AtomsError::InvalidWord(format!("{} is not a geodesic word", self.oracle.show(w))))?;
            out.push(e);
            t = self.graph.dst(e);
        }
        Ok(out)
    }

    /// The cone root of the atom with address α.
    pub fn word(&self, alpha: &[EdgeId]) -> Elem {
        alpha.iter().map(|&e| self.edge_letter[e]).collect()
    }

    pub fn terminus(&self, alpha: &[EdgeId]) -> NodeId {
        alpha.last().map_or(self.root, |&e| self.graph.dst(e))
    }

    pub fn show(&self, alpha: &[EdgeId]) -> String {
        if alpha.is_empty() {
            return self.graph.node_name(self.root).to_string();
        }
        alpha.iter().map(|&e| self.graph.edge_name(e)).collect::<Vec<_>>().join(".")
    }

    fn parent(w: &[u8]) -> &[u8] {
        &w[..w.len().saturating_sub(1)]
    }

    /// x lies on a's side of the edge {a, b}.
    fn in_half(&self, x: &[u8], a: &[u8], b: &[u8]) -> bool {
        self.oracle.dist(x, a) < self.oracle.dist(x, b)
    }

    /// The half-tree on a's side of {a, b} lies inside C(v).
    fn half_in_cone(&self, a: &[u8], b: &[u8], v: &[u8]) -> bool {
        if v.is_empty() {
            return true;
        }
        let p = Self::parent(v);
        self.in_half(a, v, p) && !self.in_half(p, a, b)
    }

    /// Root of the smallest atom containing g·C(w).
    pub fn image_root(&self, g: &[u8], w: &[u8]) -> Elem {
        if w.is_empty() {
            return Vec::new();
        }
        let o = &self.oracle;
        let a = o.mul(g, w);
        let b = o.mul(g, Self::parent(w));
        if b.len() + 1 == a.len() {
            a
        } else {
            Vec::new()
        }
    }

    /// N̂(C(w)) = S_n ∩ B_{4δ+2}(w).
    pub fn nhat(&self, w: &[u8]) -> Vec<Elem> {
        let o = &self.oracle;
        let r = (4.0 * self.delta + 2.0).floor() as usize;
        let n = w.len();
        let mut out = Vec::new();
        for i in 0..=(r / 2).min(n) {
            let u = &w[..n - i];
            for x in self.small.sphere(i) {
                let s = o.mul(u, &self.small.elems[x]);
                if s.len() == n && o.dist(&s, w) <= r {
                    out.push(s);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MappingTriple {
    pub g: Elem,
    pub alpha: Vec<EdgeId>,
    pub beta: Vec<EdgeId>,
    /// Cone roots: A_α = C(w), A_β = C(v).
    pub w: Elem,
    pub v: Elem,
    /// d(v, g·w): distance from N(A_β) to g·N(A_α).
    pub distance: usize,
    pub threshold: f64,
    pub radius: f64,
}

/// Finds A_β ⊇ g·A_α with N(A_β) in the (18δ+6)-ball around g·N(A_α),
/// taking the deepest such cone.
pub fn mapping_triple(m: &ConeModel, g: &[u8], w: &[u8]) -> Result<MappingTriple> {
    let o = &m.oracle;
    let g = o.normal_form(g);
    let threshold = triple_threshold(g.len(), m.delta);
    if (w.len() as f64) <= threshold {
        return Err(AtomsError::Precondition(format!("level {} is not above {threshold}", w.len())));
    }
    let radius = triple_radius(m.delta);
    let a = o.mul(&g, w);
    let b = o.mul(&g, ConeModel::parent(w));
    let mut best: Option<Elem> = None;
    for x in &m.small.elems {
        let v = o.mul(&a, x);
        if o.dist(&v, &a) as f64 > radius || !m.half_in_cone(&a, &b, &v) {
            continue;
        }
        let better = match &best {
            None => true,
            Some(cur) => v.len() > cur.len() || (v.len() == cur.len() && v < *cur),
        };
        if better {
            best = Some(v);
        }
    }
    let v = best.ok_or_else(|| AtomsError::Inconsistent("no atom contains the image".into()))?;
    Ok(MappingTriple {
        alpha: m.address(w)?,
        beta: m.address(&v)?,
        distance: o.dist(&v, &a),
        g,
        w: w.to_vec(),
        v,
        threshold,
        radius,
    })
}

/// One point of a signature: position, distance value, cone type.
pub type SigPoint = (Elem, i64, ConeType);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigKey(pub Vec<SigPoint>, pub Vec<SigPoint>);

#[derive(Clone, Debug)]
pub struct Signature {
    /// g·N̂(A_α) with g·d̄_{A_α} and the cone type of g⁻¹p.
    pub p1: Vec<SigPoint>,
    /// N̂(A_β) with d̄_{A_β} and the cone type of q.
    pub p2: Vec<SigPoint>,
    pub diameter: usize,
}

fn normalize(points: &mut [SigPoint]) {
    if let Some(lo) = points.iter().map(|p| p.1).min() {
        for p in points.iter_mut() {
            p.1 -= lo;
        }
    }
    points.sort();
}

pub fn signature(m: &ConeModel, t: &MappingTriple) -> Signature {
    let o = &m.oracle;
    let mut p1: Vec<SigPoint> = m
        .nhat(&t.w)
        .into_iter()
        .map(|x| (o.mul(&t.g, &x), o.dist(&x, &t.w) as i64, o.cone_type(&x, 0)))
        .collect();
    let mut p2: Vec<SigPoint> =
        m.nhat(&t.v).into_iter().map(|q| (q.clone(), o.dist(&q, &t.v) as i64, o.cone_type(&q, 0))).collect();
    normalize(&mut p1);
    normalize(&mut p2);
    let all: Vec<&Elem> = p1.iter().map(|p| &p.0).chain(p2.iter().map(|p| &p.0)).collect();
    let mut diameter = 0;
    for x in &all {
        for y in &all {
            diameter = diameter.max(o.dist(x, y));
        }
    }
    Signature { p1, p2, diameter }
}

fn translate(o: &GroupOracle, l: &[u8], pts: &[SigPoint]) -> Vec<SigPoint> {
    let mut v: Vec<SigPoint> = pts.iter().map(|(x, f, c)| (o.mul(l, x), *f, c.clone())).collect();
    v.sort();
    v
}

impl Signature {
    /// Least translate of the signature over translations taking a point of
    /// g·N̂(A_α) to the identity.
    pub fn key(&self, o: &GroupOracle) -> SigKey {
        self.p1
            .iter()
            .map(|(p, _, _)| {
                let l = o.inv(p);
                SigKey(translate(o, &l, &self.p1), translate(o, &l, &self.p2))
            })
            .min()
            .expect("nonempty signature")
    }
}

/// An ℓ making the two signatures equivalent, searched over the elements
/// aligning g·N̂(A_α) with h·N̂(A_ζ).
pub fn signature_equivalent(m: &ConeModel, t1: &MappingTriple, t2: &MappingTriple) -> Option<Elem> {
    let o = &m.oracle;
    let (s1, s2) = (signature(m, t1), signature(m, t2));
    if s1.p1.len() != s2.p1.len() || s1.p2.len() != s2.p2.len() {
        return None;
    }
    let mut p0 = s1.p1.iter().map(|p| p.0.clone()).collect::<Vec<_>>();
    p0.sort();
    let p0i = o.inv(&p0[0]);
    let mut cands: Vec<Elem> = s2.p1.iter().map(|(q, _, _)| o.mul(q, &p0i)).collect();
    cands.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    cands.into_iter().find(|l| translate(o, l, &s1.p1) == s2.p1 && translate(o, l, &s1.p2) == s2.p2)
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalAction {
    /// ḡ(α).
    pub image: Vec<EdgeId>,
    /// Each descendant path γ of t(α) up to the depth, with ḡ(αγ) relative
    /// to ḡ(α).
    pub descendants: Vec<(Vec<EdgeId>, Vec<EdgeId>)>,
}

pub fn boundary_local_action(m: &ConeModel, g: &[u8], alpha: &[EdgeId], k: usize) -> Result<LocalAction> {
    let o = &m.oracle;
    let g = o.normal_form(g);
    let w = m.word(alpha);
    let image = m.address(&m.image_root(&g, &w))?;
    let mut descendants = Vec::new();
    let mut frontier: Vec<Vec<EdgeId>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for gamma in frontier {
            let t = m.terminus(&[alpha, &gamma[..]].concat());
            for &e in m.graph.out_edges(t) {
                let mut c = gamma.clone();
                c.push(e);
                let full = [alpha, &c[..]].concat();
                let img = m.address(&m.image_root(&g, &m.word(&full)))?;
                let rel = img
                    .strip_prefix(image.as_slice())
                    .ok_or_else(|| AtomsError::Inconsistent("descendant image leaves the image cone".into()))?
                    .to_vec();
                descendants.push((c.clone(), rel));
                next.push(c);
            }
        }
        frontier = next;
    }
    Ok(LocalAction { image, descendants })
}

/// Geodesic words of length len.
fn geodesics(o: &GroupOracle, len: usize) -> Vec<Elem> {
    let mut cur = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &cur {
            for s in 0..o.gen_count() as u8 {
                let y = o.mul(w, &[s]);
                if y.len() == w.len() + 1 {
                    next.push(y);
                }
            }
        }
        next.sort();
        next.dedup();
        cur = next;
    }
    cur
}

/// The least geodesic word p·x·q with |x| = fill, if any.
fn least_filler(o: &GroupOracle, p: &[u8], fill: usize, q: &[u8]) -> Option<Elem> {
    let ok = |w: &[u8], s: u8| o.mul(w, &[s]).len() == w.len() + 1;
    // feasible[r][s]: after letter s, r more letters can be placed and q appended.
    let n = o.gen_count();
    let tail_ok = |s: u8| {
        let mut w = vec![s];
        q.iter().all(|&c| {
            let good = ok(&w, c);
            w.push(c);
            good
        })
    };
    let mut feasible = vec![vec![false; n]; fill + 1];
    for s in 0..n as u8 {
        feasible[0][s as usize] = tail_ok(s);
    }
    for r in 1..=fill {
        for s in 0..n as u8 {
            feasible[r][s as usize] = (0..n as u8).any(|c| ok(&[s], c) && feasible[r - 1][c as usize]);
        }
    }
    let mut w = p.to_vec();
    for r in (0..fill).rev() {
        let c = (0..n as u8).find(|&c| (w.is_empty() || ok(&w, c)) && feasible[r][c as usize])?;
        w.push(c);
    }
    if fill == 0 && !q.is_empty() && !p.is_empty() && !tail_ok(*p.last().expect("nonempty")) {
        return None;
    }
    w.extend_from_slice(q);
    (o.normal_form(&w).len() == w.len()).then_some(w)
}

/// Words of length n covering every prefix of length pre and suffix of
/// length suf, joined by the least filler.
pub fn representative_words(o: &GroupOracle, n: usize, pre: usize, suf: usize) -> Vec<Elem> {
    let mut out = Vec::new();
    if pre + suf > n {
        return geodesics(o, n);
    }
    let suffixes = geodesics(o, suf);
    for p in geodesics(o, pre) {
        for q in &suffixes {
            if let Some(w) = least_filler(o, &p, n - pre - suf, q) {
                out.push(w);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug)]
pub struct ExtractedNucleus {
    pub graph: DirectedGraph,
    pub set: NucleusSet,
    /// States before minimization.
    pub raw_states: usize,
    /// Distinct states after each breadth-first round.
    pub growth: Vec<usize>,
    pub start_level: usize,
}

impl ExtractedNucleus {
    pub fn to_json(&self) -> NucleusJson {
        self.set.to_json(&self.graph)
    }

    /// Whether every member is the identity on its node.
    pub fn identities_only(&self) -> bool {
        let ids = NucleusSet::all(identity_states(&self.graph));
        let mask = ids.contains_mask(&self.set.states);
        self.set.members.iter().all(|&q| mask[q])
    }

    pub fn to_dot(&self) -> String {
        let g = &self.graph;
        let st = &self.set.states;
        let mut s = String::from("digraph nucleus {\n");
        for &q in &self.set.members {
            let _ = writeln!(s, "  q{q} [label=\"{}\"];", st[q].name);
            for t in &st[q].trans {
                let _ = writeln!(s, "  q{q} -> q{} [label=\"{}|{}\"];", t.next, g.edge_name(t.edge), t.out.display(g));
            }
        }
        s.push_str("}\n");
        s
    }
}

type StateKey = (NodeId, NodeId, SigKey);

struct Raw {
    dom: NodeId,
    cod: NodeId,
    trans: Vec<(EdgeId, Vec<EdgeId>, usize)>,
}

/// Deep local actions of the generators, closed under restriction to
/// children and identified by signature; minimized into a nucleus over the
/// type graph.
pub fn nucleus_extract(m: &ConeModel, generators: &[Elem], budget: usize) -> Result<ExtractedNucleus> {
    let o = &m.oracle;
    let gmax = generators.iter().map(|g| g.len()).max().unwrap_or(0);
    let start_level = triple_threshold(gmax, m.delta).floor() as usize + 1;
    let mut keys: HashMap<StateKey, usize> = HashMap::new();
    let mut raw: Vec<Option<Raw>> = Vec::new();
    let mut queue: VecDeque<(Elem, Elem, usize)> = VecDeque::new();
    let key_of = |g: &[u8], w: &[u8]| -> Result<StateKey> {
        let t = mapping_triple(m, g, w)?;
        let sig = signature(m, &t);
        if sig.diameter as f64 > signature_diameter_bound(m.delta) {
            return Err(AtomsError::Inconsistent(format!("signature diameter {} above bound", sig.diameter)));
        }
        Ok((m.type_of(&t.w)?, m.type_of(&t.v)?, sig.key(o)))
    };
    let mut intern = |k: StateKey, g: &[u8], w: &[u8], raw: &mut Vec<Option<Raw>>, queue: &mut VecDeque<(Elem, Elem, usize)>| -> Result<usize> {
        if let Some(&i) = keys.get(&k) {
            return Ok(i);
        }
        if raw.len() >= budget {
            return Err(AtomsError::Budget(format!("more than {budget} nucleus states")));
        }
        let i = raw.len();
        keys.insert(k, i);
        raw.push(None);
        queue.push_back((g.to_vec(), w.to_vec(), i));
        Ok(i)
    };
    let reps = representative_words(o, start_level, 2.min(start_level), 2.min(start_level.saturating_sub(2)));
    for g in generators {
        let g = o.normal_form(g);
        for w in &reps {
            let k = key_of(&g, w)?;
            intern(k, &g, w, &mut raw, &mut queue)?;
        }
    }
    let mut growth = vec![raw.len()];
    let mut round_end = raw.len();
    let mut expanded = 0usize;
    while let Some((g, w, i)) = queue.pop_front() {
        let v = m.image_root(&g, &w);
        let (alpha_t, beta) = (m.type_of(&w)?, m.address(&v)?);
        let mut trans = Vec::new();
        for &e in m.graph.out_edges(alpha_t) {
            let mut wc = w.clone();
            wc.push(m.edge_letter[e]);
            let vc = m.address(&m.image_root(&g, &wc))?;
            let out = vc
                .strip_prefix(beta.as_slice())
                .ok_or_else(|| AtomsError::Inconsistent("child image leaves the image cone".into()))?
                .to_vec();
            let k = key_of(&g, &wc)?;
            let next = intern(k, &g, &wc, &mut raw, &mut queue)?;
            trans.push((e, out, next));
        }
        let rec = Raw { dom: alpha_t, cod: m.terminus(&beta), trans };
        match &raw[i] {
            None => raw[i] = Some(rec),
            Some(old) if old.trans == rec.trans && old.dom == rec.dom && old.cod == rec.cod => {}
            Some(_) => return Err(AtomsError::Inconsistent("equal signatures with different local actions".into())),
        }
        expanded += 1;
        if expanded == round_end {
            growth.push(raw.len());
            round_end = raw.len();
        }
    }
    let g = &m.graph;
    let mut states = Vec::with_capacity(raw.len());
    for (i, r) in raw.into_iter().enumerate() {
        let r = r.expect("every interned state is expanded");
        let trans = r
            .trans
            .into_iter()
            .map(|(e, out, next)| {
                let out = if out.is_empty() { Ok(Path::null()) } else { Path::from_edges(g, &out) };
                out.map(|out| Transition { edge: e, out, next })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        states.push(State { name: format!("s{i}"), dom: r.dom, cod: Some(r.cod), trans });
    }
    let raw_states = states.len();
    let classes = state_classes(&states);
    let mut first: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &c) in classes.iter().enumerate() {
        first.entry(c).or_insert(i);
    }
    let ids = NucleusSet::all(identity_states(g));
    let id_of = ids.member_index_of(&states);
    for (i, s) in states.iter_mut().enumerate() {
        if let Some(v) = id_of[i] {
            s.name = format!("1_{}", g.node_name(v));
        } else {
            s.name = format!("s{}", classes[i]);
        }
    }
    let members: Vec<usize> = first.values().copied().collect();
    let set = NucleusSet { states: Arc::new(states), members };
    Ok(ExtractedNucleus { graph: g.clone(), set, raw_states, growth, start_level })
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Constants {
    pub delta: Option<f64>,
    /// 2|g|+39δ+13 for a generator.
    pub triple_threshold: Option<f64>,
    pub triple_radius: Option<f64>,
    pub signature_diameter: Option<f64>,
    pub nucleus_start_level: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Budgets {
    pub max_level: usize,
    pub depth: usize,
    pub horizon: usize,
    pub state_budget: usize,
    pub faithful_radius: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_level: 4, depth: 2, horizon: 3, state_budget: 10_000, faithful_radius: 2 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub schema: &'static str,
    pub oracle: OracleSpec,
    pub constants: Constants,
    pub budgets: Budgets,
    pub stages: Vec<StageReport>,
    pub full: bool,
    pub failed_stage: Option<String>,
    pub type_graph: Option<GraphJson>,
    pub core: Vec<String>,
    pub nucleus: Option<NucleusJson>,
    pub nucleus_dot: Option<String>,
    pub axioms: Option<NucleusCertificate>,
}

impl Certificate {
    fn refuse(mut self, name: &str, detail: String) -> Certificate {
        self.stages.push(StageReport { name: name.into(), pass: false, detail });
        self.failed_stage = Some(name.into());
        self
    }

    fn pass(&mut self, name: &str, detail: String) {
        self.stages.push(StageReport { name: name.into(), pass: true, detail });
    }
}

/// The irreducible-core gate on a graph: a core must exist and the shift
/// must have no isolated points.
pub fn core_gate(g: &DirectedGraph) -> Result<StageReport> {
    let sub = check_subshift(g);
    let core = irreducible_core(g)?;
    let (pass, detail) = match core {
        None => (false, "no irreducible core".to_string()),
        Some(_) if !sub.no_isolated_points => (false, "the shift has isolated points".to_string()),
        Some(c) => {
            let names: Vec<&str> = c.nodes.iter().map(|&v| g.node_name(v)).collect();
            (true, format!("core {{{}}}", names.join(", ")))
        }
    };
    Ok(StageReport { name: "core".into(), pass, detail })
}

/// Faithfulness spot-check: each nontrivial g in B_r moves some address at
/// depth r+2, and distinct elements act differently there.
fn faithful(m: &ConeModel, r: usize) -> Result<std::result::Result<usize, String>> {
    let o = &m.oracle;
    let probes = geodesics(o, r + 2);
    let ball = Ball::new(o, r, 1_000_000)?;
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    for g in &ball.elems {
        let table: Vec<Elem> = probes.iter().map(|w| m.image_root(g, w)).collect();
        if !g.is_empty() && table == probes {
            return Ok(Err(format!("{} acts trivially at depth {}", o.show(g), r + 2)));
        }
        if !seen.insert(table) {
            return Ok(Err(format!("{} acts like an earlier element", o.show(g))));
        }
    }
    Ok(Ok(ball.len()))
}

pub fn certify_full_contracting_rsg(oracle: &GroupOracle, b: Budgets) -> Result<Certificate> {
    let delta = oracle.delta();
    let mut cert = Certificate {
        schema: "v1",
        oracle: oracle.spec().clone(),
        constants: Constants {
            delta,
            triple_threshold: delta.map(|d| triple_threshold(1, d)),
            triple_radius: delta.map(triple_radius),
            signature_diameter: delta.map(signature_diameter_bound),
            nucleus_start_level: None,
        },
        budgets: b.clone(),
        stages: Vec::new(),
        full: false,
        failed_stage: None,
        type_graph: None,
        core: Vec::new(),
        nucleus: None,
        nucleus_dot: None,
        axioms: None,
    };
    let Some(d) = delta else {
        return Ok(cert.refuse("hyperbolicity", format!("{} oracle has no hyperbolicity constant", oracle.kind_name())));
    };
    cert.pass("hyperbolicity", format!("δ = {d}"));

    let tg = type_graph(oracle, b.max_level, b.depth, b.horizon)?;
    cert.type_graph = Some(tg.graph.to_json());
    if !(tg.stabilized && tg.consistent) {
        let r = tg.report();
        return Ok(cert.refuse("types", format!("new types per level {:?}, consistent {}", r.new_types_per_level, r.consistent)));
    }
    if !tg.certified {
        return Ok(cert.refuse("types", "some type identifications are not certified".into()));
    }
    cert.pass("types", format!("{} types, no new types at levels {} and {}", tg.type_count(), b.max_level - 1, b.max_level));

    let gate = core_gate(&tg.graph)?;
    if !gate.pass {
        return Ok(cert.refuse("core", gate.detail));
    }
    let core = irreducible_core(&tg.graph)?.expect("gate passed");
    cert.core = core.nodes.iter().map(|&v| tg.graph.node_name(v).to_string()).collect();
    cert.stages.push(gate);

    let addr = address_system(tg)?;
    let model = ConeModel::new(&addr)?;
    cert.pass("addresses", format!("{} addresses to level {}", addr.atom_of.len(), b.max_level));

    let gens: Vec<Elem> = (0..oracle.gen_count() as u8).map(|s| vec![s]).collect();
    let nuc = nucleus_extract(&model, &gens, b.state_budget)?;
    cert.constants.nucleus_start_level = Some(nuc.start_level);
    let axioms = verify_nucleus_of_injections(&nuc.graph, &nuc.set, &core, b.state_budget)?;
    cert.nucleus = Some(nuc.to_json());
    cert.nucleus_dot = Some(nuc.to_dot());
    let ok = axioms.all_pass();
    let failed = axioms.failed();
    cert.axioms = Some(axioms);
    if !ok {
        return Ok(cert.refuse("nucleus", format!("axioms fail: {}", failed.join(", "))));
    }
    cert.pass("nucleus", format!("{} states (from {} raw), growth {:?}", nuc.set.len(), nuc.raw_states, nuc.growth));

    match faithful(&model, b.faithful_radius)? {
        Ok(n) => cert.pass("faithful", format!("{n} elements of B_{} act distinctly", b.faithful_radius)),
        Err(why) => return Ok(cert.refuse("faithful", why)),
    }
    cert.full = true;
    Ok(cert)
}
