//! Small named machines used by the demos, the CLI and the tests.

use serde_json::json;

use crate::graph::DirectedGraph;
use crate::transducer::{NucleusJson, NucleusSet, RationalMap, TransducerJson};

fn map(g: &DirectedGraph, v: serde_json::Value) -> RationalMap {
    let j: TransducerJson = serde_json::from_value(v).expect("catalog json");
    RationalMap::from_json(g, &j).expect("catalog machine")
}

fn nucleus(g: &DirectedGraph, v: serde_json::Value) -> NucleusSet {
    let j: NucleusJson = serde_json::from_value(v).expect("catalog json");
    NucleusSet::from_json(g, &j).expect("catalog nucleus")
}

/// Three-letter injection f(0ω)=0f(ω), f(1ω)=02ω, f(2ω)=1ω.
pub fn ternary_f() -> (DirectedGraph, RationalMap) {
    let g = DirectedGraph::full_shift(3);
    let m = map(
        &g,
        json!({
            "domain": [{"null": true}],
            "initial": [{"cone": {"node": "v"}, "out": {"node": "v"}, "state": "f"}],
            "states": ternary_states(),
        }),
    );
    (g, m)
}

fn ternary_states() -> serde_json::Value {
    json!([
        {"id": "f", "node": "v", "trans": [
            {"edge": "0", "out": ["0"], "next": "f"},
            {"edge": "1", "out": ["0", "2"], "next": "1"},
            {"edge": "2", "out": ["1"], "next": "1"}]},
        {"id": "1", "node": "v", "trans": [
            {"edge": "0", "out": ["0"], "next": "1"},
            {"edge": "1", "out": ["1"], "next": "1"},
            {"edge": "2", "out": ["2"], "next": "1"}]}
    ])
}

/// {1, f} for the three-letter injection.
pub fn ternary_nucleus() -> (DirectedGraph, NucleusSet) {
    let g = DirectedGraph::full_shift(3);
    let n = nucleus(&g, json!({"states": ternary_states()}));
    (g, n)
}

fn binary_states() -> serde_json::Value {
    json!([
        {"id": "f", "node": "v", "trans": [
            {"edge": "0", "out": ["0"], "next": "f"},
            {"edge": "1", "out": [], "next": "k"}]},
        {"id": "k", "node": "v", "trans": [
            {"edge": "0", "out": ["0", "1", "1"], "next": "1"},
            {"edge": "1", "out": ["1", "0"], "next": "1"}]},
        {"id": "1", "node": "v", "trans": [
            {"edge": "0", "out": ["0"], "next": "1"},
            {"edge": "1", "out": ["1"], "next": "1"}]}
    ])
}

/// Two-letter injection f(0ω)=0f(ω), f(10ω)=011ω, f(11ω)=10ω. Its
/// restriction to the cone 1 is the state k.
pub fn binary_f() -> (DirectedGraph, RationalMap) {
    let g = DirectedGraph::full_shift(2);
    let m = map(
        &g,
        json!({
            "domain": [{"null": true}],
            "initial": [{"cone": {"node": "v"}, "out": {"node": "v"}, "state": "f"}],
            "states": binary_states(),
        }),
    );
    (g, m)
}

/// {1, f, k}: the two-letter nucleus closed under restriction.
pub fn binary_nucleus() -> (DirectedGraph, NucleusSet) {
    let g = DirectedGraph::full_shift(2);
    let n = nucleus(&g, json!({"states": binary_states()}));
    (g, n)
}

/// {1, f} for the two-letter injection, without its restriction k.
pub fn binary_pair() -> (DirectedGraph, NucleusSet) {
    let g = DirectedGraph::full_shift(2);
    let n = nucleus(&g, json!({"states": binary_states(), "members": ["1", "f"]}));
    (g, n)
}

fn wreath_states() -> serde_json::Value {
    json!([
        {"id": "g", "node": "v", "trans": [
            {"edge": "0", "out": ["1"], "next": "h"},
            {"edge": "1", "out": ["0"], "next": "h"}]},
        {"id": "h", "node": "v", "trans": [
            {"edge": "0", "out": ["0"], "next": "g"},
            {"edge": "1", "out": ["1"], "next": "g"}]},
        {"id": "1", "node": "v", "trans": [
            {"edge": "0", "out": ["0"], "next": "1"},
            {"edge": "1", "out": ["1"], "next": "1"}]}
    ])
}

/// Tree automorphisms g = (0 1)(h,h), h = (g,g), as the set {g, h}.
pub fn wreath_pair() -> (DirectedGraph, NucleusSet) {
    let g = DirectedGraph::full_shift(2);
    let n = nucleus(&g, json!({"states": wreath_states(), "members": ["g", "h"]}));
    (g, n)
}

/// {1, g, h} for the same automorphisms.
pub fn wreath_with_identity() -> (DirectedGraph, NucleusSet) {
    let g = DirectedGraph::full_shift(2);
    let n = nucleus(&g, json!({"states": wreath_states()}));
    (g, n)
}
