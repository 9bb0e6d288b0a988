//! Independent brute-force evaluators, kept deliberately separate from the
//! library's implementations: monos are enumerated by trying every injective
//! node/edge assignment and checking the structure equations directly, and
//! satisfaction is evaluated by direct recursion over the condition body.

use std::collections::BTreeMap;

use grapair_core::condition::{Body, Condition};
use grapair_core::graph::{EdgeId, Graph, NodeId};
use grapair_core::morphism::Morphism;

/// Every injective structure-preserving morphism `a → g`, by exhaustive
/// assignment.
pub fn brute_monos(a: &Graph, g: &Graph) -> Vec<Morphism> {
    let dom_nodes: Vec<NodeId> = a.node_ids().cloned().collect();
    let cod_nodes: Vec<NodeId> = g.node_ids().cloned().collect();
    let mut out = Vec::new();
    let mut node_map = BTreeMap::new();
    assign_nodes(a, g, &dom_nodes, &cod_nodes, 0, &mut node_map, &mut out);
    out.sort_by_key(|m| m.image_key());
    out
}

fn assign_nodes(
    a: &Graph,
    g: &Graph,
    dom: &[NodeId],
    cod: &[NodeId],
    idx: usize,
    node_map: &mut BTreeMap<NodeId, NodeId>,
    out: &mut Vec<Morphism>,
) {
    if idx == dom.len() {
        let dom_edges: Vec<EdgeId> = a.edge_ids().cloned().collect();
        let mut edge_map = BTreeMap::new();
        assign_edges(a, g, &dom_edges, 0, node_map, &mut edge_map, out);
        return;
    }
    for c in cod {
        if node_map.values().any(|v| v == c) {
            continue;
        }
        node_map.insert(dom[idx].clone(), c.clone());
        assign_nodes(a, g, dom, cod, idx + 1, node_map, out);
        node_map.remove(&dom[idx]);
    }
}

fn assign_edges(
    a: &Graph,
    g: &Graph,
    dom: &[EdgeId],
    idx: usize,
    node_map: &BTreeMap<NodeId, NodeId>,
    edge_map: &mut BTreeMap<EdgeId, EdgeId>,
    out: &mut Vec<Morphism>,
) {
    if idx == dom.len() {
        if check_morphism(a, g, node_map, edge_map) {
            out.push(
                Morphism::new(a.clone(), g.clone(), node_map.clone(), edge_map.clone())
                    .expect("checked assignment"),
            );
        }
        return;
    }
    for (c, _) in g.edges() {
        if edge_map.values().any(|v| v == c) {
            continue;
        }
        edge_map.insert(dom[idx].clone(), c.clone());
        assign_edges(a, g, dom, idx + 1, node_map, edge_map, out);
        edge_map.remove(&dom[idx]);
    }
}

/// The structure equations, checked directly: sources, targets and labels
/// commute with the maps.
fn check_morphism(
    a: &Graph,
    g: &Graph,
    node_map: &BTreeMap<NodeId, NodeId>,
    edge_map: &BTreeMap<EdgeId, EdgeId>,
) -> bool {
    for (n, img) in node_map {
        if a.node_label(n) != g.node_label(img) {
            return false;
        }
    }
    for (e, img) in edge_map {
        let ea = a.edge(e).unwrap();
        let eg = match g.edge(img) {
            Some(x) => x,
            None => return false,
        };
        if ea.label != eg.label {
            return false;
        }
        if node_map.get(&ea.src) != Some(&eg.src) || node_map.get(&ea.tgt) != Some(&eg.tgt) {
            return false;
        }
    }
    true
}

/// Direct recursive satisfaction: `p ⊨ ∃(a, c)` iff some brute-forced mono
/// `q: C ↪ G` has `q ∘ a = p` and `q ⊨ c`.
pub fn brute_satisfies(p: &Morphism, c: &Condition) -> bool {
    assert_eq!(c.ctx(), p.dom(), "oracle misuse: context mismatch");
    match c.body() {
        Body::True => true,
        Body::Exists { mor, sub } => brute_monos(mor.cod(), p.cod()).into_iter().any(|q| {
            commutes(p, mor, &q) && brute_satisfies(&q, sub)
        }),
        Body::Not(sub) => !brute_satisfies(p, sub),
        Body::And(subs) => subs.iter().all(|s| brute_satisfies(p, s)),
    }
}

pub fn brute_graph_satisfies(g: &Graph, c: &Condition) -> bool {
    let p = Morphism::inclusion(&Graph::empty(), g).unwrap();
    brute_satisfies(&p, c)
}

/// `q ∘ a = p`, checked pointwise.
fn commutes(p: &Morphism, a: &Morphism, q: &Morphism) -> bool {
    p.node_map().iter().all(|(x, px)| q.apply_node(&a.node_map()[x]) == Some(px))
        && p.edge_map().iter().all(|(x, px)| q.apply_edge(&a.edge_map()[x]) == Some(px))
}

/// Every (not necessarily injective) morphism `a → g`; used for bounded
/// universal-property checks.
pub fn brute_homs(a: &Graph, g: &Graph) -> Vec<(BTreeMap<NodeId, NodeId>, BTreeMap<EdgeId, EdgeId>)> {
    let dom_nodes: Vec<NodeId> = a.node_ids().cloned().collect();
    let cod_nodes: Vec<NodeId> = g.node_ids().cloned().collect();
    let mut out = Vec::new();
    if cod_nodes.is_empty() && !dom_nodes.is_empty() {
        return out;
    }
    let mut stack = vec![BTreeMap::new()];
    for d in &dom_nodes {
        let mut next = Vec::new();
        for partial in &stack {
            for c in &cod_nodes {
                if a.node_label(d) != g.node_label(c) {
                    continue;
                }
                let mut m: BTreeMap<NodeId, NodeId> = partial.clone();
                m.insert(d.clone(), c.clone());
                next.push(m);
            }
        }
        stack = next;
    }
    for node_map in stack {
        let dom_edges: Vec<EdgeId> = a.edge_ids().cloned().collect();
        let mut emaps = vec![BTreeMap::new()];
        for e in &dom_edges {
            let ea = a.edge(e).unwrap();
            let mut next = Vec::new();
            for partial in &emaps {
                for (c, ec) in g.edges() {
                    if ec.label == ea.label
                        && node_map.get(&ea.src) == Some(&ec.src)
                        && node_map.get(&ea.tgt) == Some(&ec.tgt)
                    {
                        let mut m: BTreeMap<EdgeId, EdgeId> = partial.clone();
                        m.insert(e.clone(), c.clone());
                        next.push(m);
                    }
                }
            }
            emaps = next;
        }
        for edge_map in emaps {
            out.push((node_map.clone(), edge_map));
        }
    }
    out
}
