//! Model nuclear generators, their conjugates, and normalish forms
//! g = f·h₁⋯hₙ with f a prefix exchange and the hᵢ nuclear generators of
//! disjoint support.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cycles::{CycleMultiset, HilbertBasis};
use super::{FullRsg, RsgElement, RsgEntry};
use crate::clopen::{ClopenSet, Code};
use crate::error::{Error, Result};
use crate::path::{Path, PathJson};
use crate::thompson::{map_clopen_v, map_cones_v, VElement, VElementJson};
use crate::transducer::{
    assemble, compose, expand_null, identity_states, maps_equal, norm_abs, nucleus_of, InitialEntry, NucleusSet,
    RationalMap,
};

const MATCH_DEPTH: usize = 32;

/// h_P for one generator P = p₁+⋯+p_k of the cycle monoid.
#[derive(Clone, Debug)]
pub struct ModelGenerator {
    pub cycle: CycleMultiset,
    /// νᵢ, with t(νᵢ) = dom(pᵢ), in the order of `cycle.states`.
    pub domain_code: Vec<Path>,
    /// ξᵢ, with t(ξᵢ) = cod(pᵢ).
    pub range_code: Vec<Path>,
    /// The prefix exchange taking g(D) back onto D.
    pub s: VElement,
    pub element: RsgElement,
    /// s⁻¹, so that (r·h_P)|_{νᵢ} = pᵢ.
    pub rectifier: VElement,
}

/// c·h_P·c⁻¹ with c mapping the model's domain code onto `code`.
#[derive(Clone, Debug)]
pub struct NuclearGenerator {
    pub model: usize,
    pub code: Vec<Path>,
    pub states: Vec<usize>,
    pub support: ClopenSet,
    pub conjugator: VElement,
    pub rectifier: VElement,
    pub element: RsgElement,
}

#[derive(Clone, Debug)]
pub struct NormalishForm {
    pub f: VElement,
    pub factors: Vec<NuclearGenerator>,
}

/// Hilbert basis of the cycle monoid with one model generator per element.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub basis: HilbertBasis,
    pub models: Vec<ModelGenerator>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuclearGeneratorJson {
    pub model: usize,
    pub code: Vec<PathJson>,
    pub states: Vec<String>,
    pub conjugator: VElementJson,
    pub rectifier: VElementJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalishFormJson {
    pub f: VElementJson,
    pub factors: Vec<NuclearGeneratorJson>,
}

impl FullRsg {
    /// Takes cones from E, smallest (length, path) first, one per requested
    /// terminus. Always leaves a cone over so the code is incomplete.
    fn incomplete_code(&self, termini: &[usize]) -> Result<Vec<Path>> {
        let g = &self.graph;
        let mut pool = expand_null(g, self.ambient.cones());
        let mut code = Vec::with_capacity(termini.len());
        let budget = 64 * (termini.len() + 4) * (g.node_count() + 1);
        let mut spent = 0;
        for &t in termini {
            loop {
                pool.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
                if pool.len() > 1 {
                    if let Some(k) = pool.iter().position(|p| p.terminus(g) == Some(t)) {
                        code.push(pool.remove(k));
                        break;
                    }
                }
                spent += 1;
                if spent > budget || pool.is_empty() {
                    return Err(Error::DepthExhausted(spent));
                }
                let p = pool.remove(0);
                pool.extend(p.children(g));
            }
        }
        Ok(code)
    }

    fn identity_entries(&self, set: &ClopenSet) -> Vec<InitialEntry> {
        let g = &self.graph;
        expand_null(g, set.cones())
            .into_iter()
            .map(|c| {
                let t = c.terminus(g).expect("non-null");
                InitialEntry { cone: c.clone(), out: c, state: t }
            })
            .collect()
    }

    /// The element that is `inner` on D and the identity on E∖D.
    fn extend_by_identity(&self, inner: &RationalMap, d: &ClopenSet) -> Result<RsgElement> {
        let rest = self.ambient.difference(&self.graph, d);
        let m = assemble(
            self.ambient.clone(),
            &[(inner.initial.clone(), inner.states.clone()), (self.identity_entries(&rest), Arc::new(identity_states(&self.graph)))],
        );
        self.membership(&m, 64)?.ok_or_else(|| Error::NotInNucleus("model generator left the nucleus".into()))
    }

    /// Whether el|_α equals the member q.
    pub fn local_is(&self, el: &RsgElement, alpha: &Path, q: usize) -> Result<bool> {
        let (_, m) = self.to_rational(el).local_action(&self.graph, alpha)?;
        maps_equal(&self.graph, &m, &self.state_map(q))
    }

    pub fn model_nuclear_generator(&self, cycle: &CycleMultiset) -> Result<ModelGenerator> {
        let g = &self.graph;
        if cycle.states.is_empty() || !self.is_cycle(&cycle.states)? {
            return Err(Error::ClassObstruction("not a nonzero cycle".into()));
        }
        let doms: Vec<usize> = cycle.states.iter().map(|&q| self.nucleus.states[q].dom).collect();
        let cods: Vec<usize> = cycle
            .states
            .iter()
            .map(|&q| self.nucleus.states[q].cod.ok_or_else(|| Error::NotInNucleus("state without codomain".into())))
            .collect::<Result<_>>()?;
        let nu = self.incomplete_code(&doms)?;
        let xi = self.incomplete_code(&cods)?;
        let d = ClopenSet::from_paths(g, &nu);
        let mut gd = ClopenSet::empty();
        let mut initial = Vec::new();
        for ((a, b), &q) in nu.iter().zip(&xi).zip(&cycle.states) {
            gd = gd.union(g, &self.state_image(q).prefixed(g, b)?);
            initial.push(InitialEntry { cone: a.clone(), out: norm_abs(b.clone(), self.nucleus.states[q].cod), state: q });
        }
        let gmap = RationalMap { domain: d.clone(), initial, states: self.nucleus.states.clone() };
        let mut pairs = map_clopen_v(g, &gd, &d, MATCH_DEPTH)?;
        pairs.extend(map_clopen_v(g, &self.ambient.difference(g, &gd), &self.ambient.difference(g, &d), MATCH_DEPTH)?);
        let s = VElement::new(g, pairs)?;
        let sg = compose(g, &s.as_rational(g), &gmap, self.budget)?;
        let element = self.extend_by_identity(&sg, &d)?;
        let rectifier = s.invert(g);
        let model = ModelGenerator { cycle: cycle.clone(), domain_code: nu, range_code: xi, s, element, rectifier };
        self.check_rectifier(&model.element, &model.rectifier, &model.domain_code, &model.cycle.states)?;
        Ok(model)
    }

    /// (r·h)|_{αᵢ} = pᵢ for every i.
    pub fn check_rectifier(&self, h: &RsgElement, r: &VElement, code: &[Path], states: &[usize]) -> Result<()> {
        let rh = self.compose(&self.from_v(r)?, h)?;
        for (a, &q) in code.iter().zip(states) {
            if !self.local_is(&rh, a, q)? {
                return Err(Error::InvalidMachine(format!(
                    "rectified local action at {} is not {}",
                    a.display(&self.graph),
                    self.state_name(q)
                )));
            }
        }
        Ok(())
    }

    pub fn generator_set(&self) -> Result<GeneratorSet> {
        let basis = self.ker_del1_generators()?;
        let models = basis.generators.iter().map(|c| self.model_nuclear_generator(c)).collect::<Result<_>>()?;
        Ok(GeneratorSet { basis, models })
    }

    /// The conjugate of model `m` with nuclear code `code`, where code[i]
    /// carries the state m.cycle.states[i].
    pub fn nuclear_generator(&self, gens: &GeneratorSet, m: usize, code: Vec<Path>) -> Result<NuclearGenerator> {
        let g = &self.graph;
        let model = &gens.models[m];
        let pairs: Vec<(Path, Path)> = model.domain_code.iter().cloned().zip(code.iter().cloned()).collect();
        let c = map_cones_v(g, &self.ambient, &pairs, MATCH_DEPTH)?;
        let ce = self.from_v(&c)?;
        let cinv = c.invert(g);
        let element = self.compose(&self.compose(&ce, &model.element)?, &self.from_v(&cinv)?)?;
        let rectifier = model.s.invert(g).compose(g, &cinv)?;
        let support = ClopenSet::from_paths(g, &code);
        Ok(NuclearGenerator { model: m, code, states: model.cycle.states.clone(), support, conjugator: c, rectifier, element })
    }

    /// A normalish form for x. The nuclear code is the set of entries with
    /// non-identity states; when every entry is non-identity it is refined
    /// until the sum of states is not itself a listed generator.
    pub fn normalish_form(&self, gens: &GeneratorSet, x: &RsgElement) -> Result<NormalishForm> {
        let g = &self.graph;
        if let Some(v) = self.as_v(x) {
            return Ok(NormalishForm { f: v, factors: Vec::new() });
        }
        let mut entries: Vec<RsgEntry> = x.entries.clone();
        let mut code: Vec<(Path, usize)> =
            entries.iter().filter(|e| !self.is_identity_state(e.state)).map(|e| (e.dom.clone(), e.state)).collect();
        if code.len() == entries.len() {
            loop {
                let mut sum: Vec<usize> = entries.iter().map(|e| e.state).collect();
                sum.sort_unstable();
                if !gens.basis.generators.iter().any(|c| c.states == sum) {
                    break;
                }
                let first = entries.remove(0);
                for ch in first.dom.children(g) {
                    let (out, q) = self.local_state(x, &ch).ok_or_else(|| Error::InvalidPath("refined cone".into()))?;
                    entries.push(RsgEntry { dom: ch, out, state: q });
                }
            }
            code = entries.iter().map(|e| (e.dom.clone(), e.state)).collect();
        }
        let states: Vec<usize> = code.iter().map(|c| c.1).collect();
        let blocks = gens
            .basis
            .decompose(&states)
            .ok_or_else(|| Error::ClassObstruction("nuclear states do not sum to a cycle".into()))?;
        let mut used = vec![false; code.len()];
        let mut factors = Vec::with_capacity(blocks.len());
        for m in blocks {
            let mut block = Vec::new();
            for &p in &gens.models[m].cycle.states {
                let k = (0..code.len()).find(|&k| !used[k] && code[k].1 == p).expect("decomposition covers the code");
                used[k] = true;
                block.push(code[k].0.clone());
            }
            factors.push(self.nuclear_generator(gens, m, block)?);
        }
        let mut h = self.identity();
        for fac in &factors {
            h = self.compose(&h, &fac.element)?;
        }
        let f = self.compose(x, &self.invert(&h)?)?;
        let f = self.as_v(&f).ok_or_else(|| Error::InvalidMachine("x·H⁻¹ is not a prefix exchange".into()))?;
        Ok(NormalishForm { f, factors })
    }

    /// f·h₁⋯hₙ as one element.
    pub fn evaluate_form(&self, w: &NormalishForm) -> Result<RsgElement> {
        let mut acc = self.from_v(&w.f)?;
        for fac in &w.factors {
            acc = self.compose(&acc, &fac.element)?;
        }
        Ok(acc)
    }

    /// Criterion for x = f·h₁⋯hₙ: each rectified local action (rⱼ·f⁻¹·x)|_α
    /// is the recorded nuclear state, and off the nuclear code x acts as a
    /// prefix exchange.
    pub fn recognize_normalish(&self, x: &RsgElement, w: &NormalishForm) -> Result<bool> {
        let g = &self.graph;
        let mut all: Vec<Path> = Vec::new();
        for fac in &w.factors {
            all.extend(fac.code.iter().cloned());
        }
        if Code::new(all.clone()).is_err() {
            return Ok(false);
        }
        let y = self.compose(&self.from_v(&w.f.invert(g))?, x)?;
        for fac in &w.factors {
            let z = self.compose(&self.from_v(&fac.rectifier)?, &y)?;
            for (a, &q) in fac.code.iter().zip(&fac.states) {
                if !self.local_is(&z, a, q)? {
                    return Ok(false);
                }
            }
        }
        let rest = self.ambient.difference(g, &ClopenSet::from_paths(g, &all));
        let xm = self.to_rational(x);
        for c in expand_null(g, rest.cones()) {
            let (_, local) = xm.local_action(g, &c)?;
            if !is_prefix_exchange(g, &local)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn form_to_json(&self, w: &NormalishForm) -> NormalishFormJson {
        let g = &self.graph;
        NormalishFormJson {
            f: w.f.to_json(g),
            factors: w
                .factors
                .iter()
                .map(|h| NuclearGeneratorJson {
                    model: h.model,
                    code: h.code.iter().map(|p| p.to_json(g)).collect(),
                    states: h.states.iter().map(|&q| self.state_name(q).to_string()).collect(),
                    conjugator: h.conjugator.to_json(g),
                    rectifier: h.rectifier.to_json(g),
                })
                .collect(),
        }
    }

    /// Rebuilds a form, recomputing each factor from its model and code.
    /// The recorded states and rectifier are kept as given.
    pub fn form_from_json(&self, gens: &GeneratorSet, j: &NormalishFormJson) -> Result<NormalishForm> {
        let g = &self.graph;
        let f = VElement::from_json(g, &j.f)?;
        let mut factors = Vec::new();
        for h in &j.factors {
            if h.model >= gens.models.len() {
                return Err(Error::InvalidMachine(format!("no model generator {}", h.model)));
            }
            let code = h.code.iter().map(|p| Path::from_json(g, p)).collect::<Result<Vec<_>>>()?;
            let mut fac = self.nuclear_generator(gens, h.model, code)?;
            fac.states = h.states.iter().map(|n| self.member_by_name(n)).collect::<Result<_>>()?;
            fac.rectifier = VElement::from_json(g, &h.rectifier)?;
            factors.push(fac);
        }
        Ok(NormalishForm { f, factors })
    }
}

/// The map's nucleus holds identities only, so it is a prefix exchange.
fn is_prefix_exchange(g: &crate::graph::DirectedGraph, m: &RationalMap) -> Result<bool> {
    let n = nucleus_of(g, m)?;
    let ids = NucleusSet::all(identity_states(g));
    Ok(ids.includes(&n).is_none())
}
