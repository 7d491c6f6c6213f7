use rsg_atoms::contract::{signature_diameter_bound, triple_radius, triple_threshold, Budgets};
use rsg_atoms::{
    address_system, certify_full_contracting_rsg, mapping_triple, nucleus_extract, type_graph, AtomTree, ConeModel, Elem,
    GroupOracle,
};
use rsg_core::graph::{check_subshift, irreducible, irreducible_core};
use rsg_core::rsg::lambda_map;
use rsg_core::transducer::{compose, image, invert, nucleus_of, verify_nucleus_of_injections, Residual};
use rsg_core::{map_cones_v, push_into_core, ClassesGroup, ClopenSet, DirectedGraph, Error, Path};
use serde_json::{json, Value};

use crate::bundle::Bundle;
use crate::error::CliError;
use crate::output::Outcome;
use crate::{AtomsCmd, Common, GraphCmd, HypCmd, OracleArgs, RsgCmd, TransCmd, VCmd};

const DEFAULT_DEPTH: usize = 12;
const DEFAULT_STATES: usize = 10_000;

fn show(g: &DirectedGraph, p: &Path) -> String {
    p.display(g).to_string()
}

pub fn graph(c: &Common, cmd: &GraphCmd) -> Result<Outcome, CliError> {
    let b = Bundle::load(c.input.as_deref())?;
    let g = b.graph()?;
    let core = irreducible_core(&g)?;
    match cmd {
        GraphCmd::Check => {
            let r = check_subshift(&g);
            let ok = r.no_empty_cones && r.no_isolated_points;
            let body = json!({
                "subshift": r,
                "irreducible": irreducible(&g),
                "has_core": core.is_some(),
            });
            Ok(Outcome::new("graph-check", body)
                .line(format!("no empty cones: {}", r.no_empty_cones))
                .line(format!("no isolated points: {}", r.no_isolated_points))
                .line(format!("irreducible: {}", irreducible(&g)))
                .line(format!("irreducible core: {}", core.is_some()))
                .negative(!ok))
        }
        GraphCmd::Core => {
            let dot = g.to_dot(core.as_ref());
            let Some(core) = core else {
                return Ok(Outcome::new("graph-core", json!({"core": null}))
                    .line("no irreducible core")
                    .artifact("graph.dot", dot)
                    .negative(true));
            };
            let names: Vec<&str> = core.nodes.iter().map(|&v| g.node_name(v)).collect();
            Ok(Outcome::new("graph-core", json!({"core": names, "depth": core.depth}))
                .line(format!("core {{{}}}, depth {}", names.join(", "), core.depth))
                .artifact("graph.dot", dot))
        }
        GraphCmd::Classes => {
            let core = core.ok_or(Error::NoCore)?;
            let cg = ClassesGroup::of_core(&g, &core.nodes)?;
            let inv: Vec<String> = cg.invariants().iter().map(|d| d.to_string()).collect();
            Ok(Outcome::new("graph-classes", json!({"group": cg.describe(), "invariants": inv, "rank": cg.rank()}))
                .line(cg.describe()))
        }
    }
}

pub fn trans(c: &Common, cmd: &TransCmd) -> Result<Outcome, CliError> {
    let b = Bundle::load(c.input.as_deref())?;
    let g = b.graph()?;
    let budget = c.budget_states.unwrap_or(DEFAULT_STATES);
    match cmd {
        TransCmd::Eval => {
            let m = b.map(&g)?;
            let mut rows = Vec::new();
            let mut out = Outcome::new("trans-eval", Value::Null);
            for x in b.inputs(&g)? {
                let (y, res) = m.evaluate(&g, &x, c.depth.unwrap_or(DEFAULT_DEPTH).max(x.len()) * 64)?;
                let rest = match res {
                    Residual::State(q) => m.state(q).name.clone(),
                    Residual::Table(_) => "table".into(),
                };
                out = out.line(format!("{} -> {} [{}]", show(&g, &x), show(&g, &y), rest));
                rows.push(json!({"input": x.to_json(&g), "output": y.to_json(&g), "residual": rest}));
            }
            out.body = json!({ "evaluations": rows });
            Ok(out)
        }
        TransCmd::Compose => {
            let ms = b.maps(&g, 2)?;
            let h = compose(&g, &ms[0], &ms[1], budget)?;
            Ok(Outcome::new("trans-compose", json!({"map": h.to_json(&g)}))
                .line(format!("composite with {} states", h.states.len())))
        }
        TransCmd::Invert => {
            let m = b.map(&g)?;
            let inv = invert(&g, &m, budget)?;
            let img = image(&g, &m, budget)?;
            Ok(Outcome::new("trans-invert", json!({"map": inv.to_json(&g), "image": img.to_json(&g)}))
                .line(format!("image {}", img.display(&g)))
                .line(format!("inverse with {} states", inv.states.len())))
        }
        TransCmd::Nucleus => {
            let m = b.map(&g)?;
            let n = nucleus_of(&g, &m)?;
            let mut names = n.member_names();
            names.sort();
            Ok(Outcome::new("trans-nucleus", json!({"nucleus": n.to_json(&g)}))
                .line(format!("nucleus {{{}}}", names.join(", "))))
        }
        TransCmd::VerifyNucleus => {
            let n = b.nucleus(&g)?;
            let core = irreducible_core(&g)?.ok_or(Error::NoCore)?;
            let cert = verify_nucleus_of_injections(&g, &n, &core, budget)?;
            let mut out = Outcome::new("trans-verify-nucleus", serde_json::to_value(&cert)?);
            for (name, v) in cert.verdicts() {
                let mut l = format!("{name} {}", if v.pass { "PASS" } else { "FAIL" });
                if let Some(w) = &v.witness {
                    l.push_str(&format!(" ({w})"));
                }
                out = out.line(l);
            }
            Ok(out.negative(!cert.all_pass()))
        }
    }
}

pub fn v(c: &Common, cmd: &VCmd) -> Result<Outcome, CliError> {
    let b = Bundle::load(c.input.as_deref())?;
    let g = b.graph()?;
    let e = b.ambient(&g)?;
    let depth = c.depth.unwrap_or(DEFAULT_DEPTH);
    match cmd {
        VCmd::Compose => {
            let vs = b.v_elements(&g, 2)?;
            let h = vs[0].compose(&g, &vs[1])?;
            Ok(Outcome::new("v-compose", json!({"v": h.to_json(&g), "identity": h.is_identity()}))
                .line(format!("{} cone pairs, identity: {}", h.pairs().len(), h.is_identity())))
        }
        VCmd::MapCones => {
            let pairs = b.pairs(&g)?;
            match map_cones_v(&g, &e, &pairs, depth) {
                Ok(h) => {
                    // Each requested cone must map by its canonical similarity.
                    let mut ok = true;
                    for (a, t) in &pairs {
                        for x in ClopenSet::cone(&g, a).code_at_length(&g, a.len() + 3) {
                            let rel = x.strip_prefix(&g, a).expect("inside the cone");
                            ok &= h.apply(&g, &x) == Some(t.concat(&g, &rel)?);
                        }
                    }
                    Ok(Outcome::new("v-map-cones", json!({"v": h.to_json(&g), "verified": ok}))
                        .line(format!("element with {} cone pairs; verified by evaluation: {ok}", h.pairs().len()))
                        .negative(!ok))
                }
                Err(Error::ClassObstruction(why)) => {
                    Ok(Outcome::new("v-map-cones", json!({"obstruction": why})).line(format!("class obstruction: {why}")).negative(true))
                }
                Err(e) => Err(e.into()),
            }
        }
        VCmd::PushCore => {
            let core = irreducible_core(&g)?.ok_or(Error::NoCore)?;
            let (e0, h) = push_into_core(&g, &core, &e)?;
            Ok(Outcome::new("v-push-core", json!({"image": e0.to_json(&g), "v": h.to_json(&g)}))
                .line(format!("{} -> {}", e.display(&g), e0.display(&g))))
        }
    }
}

pub fn rsg(c: &Common, cmd: &RsgCmd) -> Result<Outcome, CliError> {
    let b = Bundle::load(c.input.as_deref())?;
    let r = b.rsg()?;
    let g = r.g().clone();
    let element = |i: usize| -> Result<_, CliError> {
        let j = b.elements.get(i).ok_or(CliError::Missing("elements"))?;
        Ok(r.element_from_json(j)?)
    };
    match cmd {
        RsgCmd::Member => {
            let m = b.map(&g)?;
            match r.membership(&m, c.depth.unwrap_or(DEFAULT_DEPTH))? {
                Some(el) => Ok(Outcome::new("rsg-member", json!({"member": true, "element": r.element_to_json(&el, "input")}))
                    .line(format!("member with {} entries", el.entries.len()))),
                None => Ok(Outcome::new("rsg-member", json!({"member": false})).line("not a member at this depth").negative(true)),
            }
        }
        RsgCmd::Compose => {
            let (x, y) = (element(0)?, element(1)?);
            let h = r.compose(&x, &y)?;
            let id = r.is_identity(&h)?;
            Ok(Outcome::new("rsg-compose", json!({"element": r.element_to_json(&h, "input"), "identity": id}))
                .line(format!("{} entries, identity: {id}", h.entries.len())))
        }
        RsgCmd::Normalish => {
            let x = element(0)?;
            let gens = r.generator_set()?;
            let w = r.normalish_form(&gens, &x)?;
            let ok = r.recognize_normalish(&x, &w)?;
            Ok(Outcome::new("rsg-normalish", json!({"form": r.form_to_json(&w), "recognized": ok}))
                .line(format!("{} nuclear generators; recognized: {ok}", w.factors.len()))
                .negative(!ok))
        }
        RsgCmd::KerDel1 => {
            let basis = r.ker_del1_generators()?;
            let gens: Vec<_> = basis.generators.iter().map(|c| r.cycle_to_json(c)).collect();
            let mut out = Outcome::new("rsg-ker-del1", json!({"generators": gens, "max_degree": basis.max_degree}));
            for c in &basis.generators {
                let names: Vec<&str> = c.states.iter().map(|&q| r.state_name(q)).collect();
                out = out.line(format!("{{{}}}", names.join(", ")));
            }
            Ok(out)
        }
        RsgCmd::Germ => {
            let x = element(0)?;
            let w = b.point(&g)?;
            match lambda_map(&r, &x, &w) {
                Ok(q) => Ok(Outcome::new("rsg-germ", json!({"lambda": r.state_name(q)})).line(format!("λ = {}", r.state_name(q)))),
                Err(Error::NotFixed(_)) => {
                    Ok(Outcome::new("rsg-germ", json!({"lambda": null})).line("the element does not fix the point").negative(true))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn oracle_of(c: &Common, a: &OracleArgs) -> Result<GroupOracle, CliError> {
    Bundle::load(c.input.as_deref())?.oracle(a.oracle.as_deref())
}

fn constants(o: &GroupOracle) -> Value {
    match o.delta() {
        Some(d) => json!({
            "delta": d,
            "triple_threshold_g1": triple_threshold(1, d),
            "triple_radius": triple_radius(d),
            "signature_diameter": signature_diameter_bound(d),
        }),
        None => json!({"delta": null}),
    }
}

pub fn atoms(c: &Common, cmd: &AtomsCmd) -> Result<Outcome, CliError> {
    match cmd {
        AtomsCmd::Build(a) => {
            let o = oracle_of(c, a)?;
            let level = a.level.unwrap_or(4);
            let horizon = c.horizon.unwrap_or(6);
            let t = AtomTree::build(&o, level, horizon)?;
            let mut out = Outcome::new("atoms-build", Value::Null);
            let mut rows = Vec::new();
            for j in 0..=level {
                let inf = t.infinite_at(j);
                let mut hist = std::collections::BTreeMap::new();
                for &x in &inf {
                    *hist.entry(t.atoms[x].children.len()).or_insert(0usize) += 1;
                }
                let kids = if j < level { format!("; children {hist:?}") } else { String::new() };
                out = out.line(format!("level {j}: {} atoms, {} infinite{kids}", t.levels[j].len(), inf.len()));
                rows.push(json!({"level": j, "atoms": t.levels[j].len(), "infinite": inf.len(), "children": hist}));
            }
            out.body = json!({"oracle": o.spec(), "constants": constants(&o), "max_level": level, "horizon": horizon, "levels": rows});
            Ok(out.artifact("atoms.csv", t.to_csv()).artifact("atoms.dot", t.to_dot()))
        }
        AtomsCmd::Types(a) => {
            let o = oracle_of(c, a)?;
            let (level, k, horizon) = (a.level.unwrap_or(6), c.depth.unwrap_or(2), c.horizon.unwrap_or(6));
            let tg = type_graph(&o, level, k, horizon)?;
            let r = tg.report();
            let core = tg.core()?;
            let core_names: Vec<&str> = core.iter().flat_map(|c| c.nodes.iter().map(|&v| tg.graph.node_name(v))).collect();
            let ok = r.stabilized && r.consistent;
            let body = json!({
                "oracle": o.spec(), "constants": constants(&o), "report": r,
                "graph": tg.graph.to_json(), "core": core_names,
            });
            Ok(Outcome::new("atoms-types", body)
                .line(format!("{} types; new per level {:?}", r.types, r.new_types_per_level))
                .line(format!("stabilized: {}; consistent: {}; certified: {}", r.stabilized, r.consistent, r.certified))
                .line(format!("core {{{}}}", core_names.join(", ")))
                .artifact("types.dot", tg.to_dot())
                .negative(!ok))
        }
        AtomsCmd::Addresses(a) => {
            let o = oracle_of(c, a)?;
            let (level, k, horizon) = (a.level.unwrap_or(4), c.depth.unwrap_or(2), c.horizon.unwrap_or(3));
            let addr = address_system(type_graph(&o, level, k, horizon)?)?;
            let mut out = Outcome::new("atoms-addresses", Value::Null);
            let mut rows = Vec::new();
            for j in 0..=level.min(3) {
                for alpha in addr.addresses_at(j) {
                    let w = o.show(addr.tree().least_witness(addr.atom_of[&alpha]));
                    let gm = o.show(&addr.element[&alpha]);
                    out = out.line(format!("{} -> atom at {w}, g = {gm}", addr.show(&alpha)));
                    rows.push(json!({"address": addr.show(&alpha), "witness": w, "morphism": gm}));
                }
            }
            out.body = json!({"oracle": o.spec(), "constants": constants(&o), "addresses": rows});
            Ok(out)
        }
    }
}

fn model(o: &GroupOracle, c: &Common, a: &OracleArgs) -> Result<ConeModel, CliError> {
    let b = Budgets::default();
    let tg = type_graph(o, a.level.unwrap_or(b.max_level), c.depth.unwrap_or(b.depth), c.horizon.unwrap_or(b.horizon))?;
    Ok(ConeModel::new(&address_system(tg)?)?)
}

pub fn hyp(c: &Common, cmd: &HypCmd) -> Result<Outcome, CliError> {
    match cmd {
        HypCmd::Triple { oracle, g, w } => {
            let o = oracle_of(c, oracle)?;
            let m = model(&o, c, oracle)?;
            let (g, w) = (o.parse(g)?, o.parse(w)?);
            let t = mapping_triple(&m, &g, &w)?;
            Ok(Outcome::new("hyp-triple", json!({"constants": constants(&o), "triple": t}))
                .line(format!(
                    "A_β at {} (address {}), distance {} ≤ {}",
                    o.show(&t.v),
                    m.show(&t.beta),
                    t.distance,
                    t.radius
                )))
        }
        HypCmd::Nucleus(a) => {
            let o = oracle_of(c, a)?;
            let m = model(&o, c, a)?;
            let gens: Vec<Elem> = (0..o.gen_count() as u8).map(|s| vec![s]).collect();
            let n = nucleus_extract(&m, &gens, c.budget_states.unwrap_or(DEFAULT_STATES))?;
            let body = json!({
                "constants": constants(&o), "start_level": n.start_level, "raw_states": n.raw_states,
                "growth": n.growth, "identities_only": n.identities_only(), "nucleus": n.to_json(),
                "graph": n.graph.to_json(),
            });
            Ok(Outcome::new("hyp-nucleus", body)
                .line(format!("{} states from {} raw; growth {:?}", n.set.len(), n.raw_states, n.growth))
                .artifact("nucleus.dot", n.to_dot()))
        }
        HypCmd::Certify(a) => {
            let o = oracle_of(c, a)?;
            let d = Budgets::default();
            let b = Budgets {
                max_level: a.level.unwrap_or(d.max_level),
                depth: c.depth.unwrap_or(d.depth),
                horizon: c.horizon.unwrap_or(d.horizon),
                state_budget: c.budget_states.unwrap_or(d.state_budget),
                faithful_radius: d.faithful_radius,
            };
            let cert = certify_full_contracting_rsg(&o, b)?;
            let mut out = Outcome::new("hyp-certify", serde_json::to_value(&cert)?);
            for s in &cert.stages {
                out = out.line(format!("{} {}: {}", s.name, if s.pass { "PASS" } else { "FAIL" }, s.detail));
            }
            let verdict = if cert.full { "full contracting RSG certificate".to_string() } else { format!("refused at {}", cert.failed_stage.clone().unwrap_or_default()) };
            let dot = cert.nucleus_dot.clone();
            out = out.line(verdict).negative(!cert.full);
            if let Some(dot) = dot {
                out = out.artifact("nucleus.dot", dot);
            }
            Ok(out)
        }
    }
}
