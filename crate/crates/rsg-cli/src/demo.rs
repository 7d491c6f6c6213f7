//! Named reproductions. With `--out`, each demo also writes its input
//! bundle so the same data can be fed back through the other subcommands.

use rsg_atoms::contract::{core_gate, Budgets};
use rsg_atoms::{address_system, certify_full_contracting_rsg, nucleus_extract, type_graph, AtomTree, ConeModel, GroupOracle};
use rsg_core::graph::irreducible_core;
use rsg_core::path::PathJson;
use rsg_core::transducer::{compose, image, nucleus_of, verify_nucleus_of_injections, NucleusCertificate};
use rsg_core::rsg::FullRsg;
use rsg_core::{catalog, map_cones_v, ClassesGroup, ClopenSet, DirectedGraph, Error, NucleusSet, Path, RationalPoint};
use serde_json::json;

use crate::bundle::Bundle;
use crate::error::CliError;
use crate::output::Outcome;
use crate::{Common, DemoArgs};

fn bundle_text(b: &Bundle) -> String {
    serde_json::to_string_pretty(b).expect("bundle serializes") + "\n"
}

fn axiom_line(cert: &NucleusCertificate) -> String {
    cert.verdicts().iter().map(|(n, v)| format!("{n} {}", if v.pass { "PASS" } else { "FAIL" })).collect::<Vec<_>>().join(", ")
}

fn verify(g: &DirectedGraph, n: &NucleusSet) -> Result<NucleusCertificate, CliError> {
    let core = irreducible_core(g)?.ok_or(Error::NoCore)?;
    Ok(verify_nucleus_of_injections(g, n, &core, 1000)?)
}

pub fn loops(n: usize) -> DirectedGraph {
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let edges: Vec<(&str, &str, &str)> = names.iter().map(|e| (e.as_str(), "v", "v")).collect();
    DirectedGraph::new(&["v"], &edges).expect("loop graph")
}

pub fn two_node() -> DirectedGraph {
    DirectedGraph::new(
        &["v", "w"],
        &[("a1", "v", "v"), ("a2", "v", "v"), ("x", "v", "w"), ("b1", "w", "w"), ("b2", "w", "w"), ("y", "w", "v")],
    )
    .expect("two-node graph")
}

pub fn parity_graph() -> DirectedGraph {
    DirectedGraph::new(
        &["v", "w"],
        &[("a", "v", "v"), ("x", "v", "w"), ("b1", "w", "w"), ("b2", "w", "w"), ("b3", "w", "w")],
    )
    .expect("parity graph")
}

pub fn houghton(n: usize) -> DirectedGraph {
    let mut nodes = vec!["u".to_string()];
    let mut edges = vec![("l0".to_string(), "u".to_string(), "u".to_string())];
    for i in 1..=n {
        nodes.push(format!("v{i}"));
        edges.push((format!("l{i}"), format!("v{i}"), format!("v{i}")));
        edges.push((format!("f{i}"), format!("v{i}"), "u".to_string()));
    }
    let nr: Vec<&str> = nodes.iter().map(|s| s.as_str()).collect();
    let er: Vec<(&str, &str, &str)> = edges.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    DirectedGraph::new(&nr, &er).expect("Houghton graph")
}

/// Adds two RSG elements (a proof element for `state` and its square), and
/// the point (2 or 1)^∞ that both fix.
fn with_elements(
    mut b: Bundle,
    nucleus: fn() -> (DirectedGraph, NucleusSet),
    state: &str,
    cones: (&str, &str),
) -> Result<Bundle, CliError> {
    let (g, n) = nucleus();
    let r = FullRsg::new(g.clone(), n, ClopenSet::whole())?;
    let q = r.member_by_name(state)?;
    let a = r.proof_element(q, &Path::parse(&g, cones.0)?, &Path::parse(&g, cones.1)?)?;
    let aa = r.compose(&a, &a)?;
    b.elements = vec![r.element_to_json(&a, "bundle"), r.element_to_json(&aa, "bundle")];
    let last = g.edge_name(g.edge_count() - 1).to_string();
    let p = Path::parse(&g, &last)?;
    b.point = Some(RationalPoint::new(&g, p.clone(), p)?.to_json(&g));
    Ok(b)
}

/// The rational map of the first element of the bundle.
fn member_map(b: &Bundle) -> Result<rsg_core::transducer::TransducerJson, CliError> {
    let r = b.rsg()?;
    let el = r.element_from_json(&b.elements[0])?;
    Ok(r.to_rational(&el).to_json(r.g()))
}

pub fn run(_c: &Common, d: &DemoArgs) -> Result<Outcome, CliError> {
    match d.name.as_str() {
        "classes" => {
            let mut out = Outcome::new("demo-classes", json!(null));
            let mut rows = Vec::new();
            for n in 2..=6 {
                let g = loops(n);
                let cg = ClassesGroup::of_core(&g, &[0])?;
                out = out.line(format!("{n} loops: {}", cg.describe()));
                rows.push(json!({"loops": n, "group": cg.describe()}));
            }
            let g = two_node();
            let cg = ClassesGroup::of_core(&g, &[0, 1])?;
            out = out.line(format!("two nodes with two loops each: {}", cg.describe()));
            rows.push(json!({"graph": "two-node", "group": cg.describe()}));
            out.body = json!({ "groups": rows });
            let b = Bundle { graph: Some(loops(3).to_json()), ..Default::default() };
            Ok(out.artifact("loops3.input.json", bundle_text(&b)))
        }
        "z2-atoms" => {
            let n = d.n;
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let o = GroupOracle::zn(2);
            let t = AtomTree::build(&o, n + 1, 6)?;
            let inf = t.infinite_at(n);
            let three = inf.iter().filter(|&&a| t.atoms[a].children.len() == 3).count();
            Ok(Outcome::new("demo-z2-atoms", json!({"level": n, "horizon": 6, "infinite": inf.len(), "three_children": three}))
                .line(format!("{} infinite atoms; {three} with 3 children", inf.len()))
                .artifact("atoms.csv", t.to_csv()))
        }
        "ternary" => {
            let (g, f) = catalog::ternary_f();
            let (_, n) = catalog::ternary_nucleus();
            let cert = verify(&g, &n)?;
            let ff = compose(&g, &f, &f, 100)?;
            let (pre, _) = ff.local_action(&g, &Path::null())?;
            let img = image(&g, &f, 100)?;
            let b = Bundle {
                graph: Some(g.to_json()),
                map: Some(f.to_json(&g)),
                maps: vec![f.to_json(&g), f.to_json(&g)],
                nucleus: Some(n.to_json(&g)),
                inputs: ["0", "1", "2", "0012"].iter().map(|s| Path::parse(&g, s).map(|p| p.to_json(&g))).collect::<Result<_, _>>()?,
                ..Default::default()
            };
            let b = with_elements(b, catalog::ternary_nucleus, "f", ("0", "1"))?;
            Ok(Outcome::new("demo-ternary", json!({"axioms": cert, "ff_prefix": pre.to_json(&g), "image": img.to_json(&g)}))
                .line(axiom_line(&cert))
                .line(format!("f∘f is the prefix map ω ↦ {}ω", pre.display(&g)))
                .line(format!("image(f) = {}", img.display(&g)))
                .artifact("ternary.input.json", bundle_text(&b)))
        }
        "binary" => {
            let (g, f) = catalog::binary_f();
            let mut names = nucleus_of(&g, &f)?.member_names();
            names.sort();
            let (_, closed) = catalog::binary_nucleus();
            let (_, pair) = catalog::binary_pair();
            let c1 = verify(&g, &closed)?;
            let c2 = verify(&g, &pair)?;
            let img = image(&g, &f, 100)?;
            let b = Bundle { graph: Some(g.to_json()), map: Some(f.to_json(&g)), nucleus: Some(closed.to_json(&g)), ..Default::default() };
            let mut member = with_elements(b.clone(), catalog::binary_nucleus, "f", ("0", "11"))?;
            member.map = Some(member_map(&member)?);
            Ok(Outcome::new("demo-binary", json!({"nucleus_of_f": names, "closed": c1, "pair": c2}))
                .line(format!("nucleus of f: {{{}}}", names.join(", ")))
                .line(format!("{{1, f, k}}: {}", axiom_line(&c1)))
                .line(format!("{{1, f}}: {}", axiom_line(&c2)))
                .line(format!("image(f) = {}", img.display(&g)))
                .artifact("binary.input.json", bundle_text(&b))
                .artifact("binary-member.input.json", bundle_text(&member)))
        }
        "wreath" => {
            let (g, pair) = catalog::wreath_pair();
            let (_, with_id) = catalog::wreath_with_identity();
            let c1 = verify(&g, &pair)?;
            let c2 = verify(&g, &with_id)?;
            Ok(Outcome::new("demo-wreath", json!({"pair": c1, "with_identity": c2}))
                .line(format!("{{g, h}}: {}", axiom_line(&c1)))
                .line(format!("{{1, g, h}}: {}", axiom_line(&c2)))
                .negative(false))
        }
        "parity" => {
            let g = parity_graph();
            let e = ClopenSet::cone(&g, &Path::node(0));
            let pair = (Path::parse(&g, "a")?, Path::parse(&g, "a a")?);
            let b = Bundle {
                graph: Some(g.to_json()),
                ambient: Some(vec![PathJson::Node { node: "v".into() }]),
                pairs: vec![(pair.0.to_json(&g), pair.1.to_json(&g))],
                ..Default::default()
            };
            let out = match map_cones_v(&g, &e, &[pair], 8) {
                Err(Error::ClassObstruction(why)) => {
                    Outcome::new("demo-parity", json!({"obstruction": why})).line(format!("class obstruction: {why}"))
                }
                Ok(_) => Outcome::new("demo-parity", json!({"obstruction": null})).line("no obstruction").negative(true),
                Err(e) => return Err(e.into()),
            };
            let s = DirectedGraph::full_shift(2);
            let shift = Bundle {
                graph: Some(s.to_json()),
                pairs: vec![(Path::parse(&s, "0")?.to_json(&s), Path::parse(&s, "00")?.to_json(&s))],
                ..Default::default()
            };
            Ok(out.artifact("parity.input.json", bundle_text(&b)).artifact("shift.input.json", bundle_text(&shift)))
        }
        "free2" => {
            let cert = certify_full_contracting_rsg(&GroupOracle::free(2), Budgets::default())?;
            let mut out = Outcome::new("demo-free2", serde_json::to_value(&cert)?);
            for s in &cert.stages {
                out = out.line(format!("{} {}: {}", s.name, if s.pass { "PASS" } else { "FAIL" }, s.detail));
            }
            let verdict = if cert.full { "full contracting RSG certificate" } else { "refused" };
            Ok(out.line(verdict).negative(!cert.full))
        }
        "free-product" => {
            let o = GroupOracle::free_product(&["Z/2", "Z"])?;
            let b = Budgets::default();
            let tg = type_graph(&o, b.max_level, b.depth, b.horizon)?;
            let m = ConeModel::new(&address_system(tg)?)?;
            let gens: Vec<_> = (0..o.gen_count() as u8).map(|s| vec![s]).collect();
            let n = nucleus_extract(&m, &gens, b.state_budget)?;
            Ok(Outcome::new("demo-free-product", json!({"states": n.set.len(), "growth": n.growth, "nucleus": n.to_json()}))
                .line(format!("(Z/2)*Z nucleus: {} states, growth {:?}", n.set.len(), n.growth))
                .artifact("nucleus.dot", n.to_dot()))
        }
        "houghton" => {
            let g = houghton(3);
            let gate = core_gate(&g)?;
            Ok(Outcome::new("demo-houghton", json!({"core_gate": gate}))
                .line(format!("core gate {}: {}", if gate.pass { "PASS" } else { "FAIL" }, gate.detail))
                .negative(gate.pass))
        }
        other => Err(CliError::Usage(format!(
            "unknown demo {other:?}; try classes, z2-atoms, ternary, binary, wreath, parity, free2, free-product, houghton"
        ))),
    }
}
