//! Enumeration of injective morphisms (monos) between graphs.
//!
//! Plain backtracking over candidate node assignments, domain nodes processed
//! in (label, degree, id) order, with label/degree/edge-consistency pruning.
//! Results come back in a canonical order: sorted by the lexicographic node-id
//! image sequence, then by the edge image sequence. No indexes, no heuristics;
//! the graphs here are desk-scale and determinism matters more than speed.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::morphism::Morphism;

/// All injective structure-preserving morphisms `a → g`, canonically ordered.
pub fn enumerate_monos(a: &Graph, g: &Graph) -> Vec<Morphism> {
    monos_with_pins(a, g, &BTreeMap::new(), &BTreeMap::new())
}

/// All injective `g′: C ↪ G` with `g′ ∘ a = g`, for `g: A ↪ G` and `a: A ↪ C`.
pub fn extensions(g: &Morphism, a: &Morphism) -> Result<Vec<Morphism>> {
    if g.dom() != a.dom() {
        return Err(Error::DomainMismatch("extensions: anchors must share their domain".into()));
    }
    // Pin the image of A and extend: g′(a(x)) = g(x).
    let mut node_pins = BTreeMap::new();
    for (x, ax) in a.node_map() {
        let gx = &g.node_map()[x];
        if let Some(prev) = node_pins.insert(ax.clone(), gx.clone()) {
            if &prev != gx {
                return Ok(Vec::new());
            }
        }
    }
    let mut edge_pins = BTreeMap::new();
    for (x, ax) in a.edge_map() {
        let gx = &g.edge_map()[x];
        if let Some(prev) = edge_pins.insert(ax.clone(), gx.clone()) {
            if &prev != gx {
                return Ok(Vec::new());
            }
        }
    }
    Ok(monos_with_pins(a.cod(), g.cod(), &node_pins, &edge_pins))
}

/// Isomorphism test with witness.
pub fn is_isomorphic(g: &Graph, h: &Graph) -> Option<Morphism> {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    // An injective morphism between equally sized finite graphs is bijective.
    enumerate_monos(g, h).into_iter().next()
}

/// First isomorphism `g → h` extending the given item pins, if any.
pub fn iso_with_pins(
    g: &Graph,
    h: &Graph,
    node_pins: &BTreeMap<NodeId, NodeId>,
    edge_pins: &BTreeMap<EdgeId, EdgeId>,
) -> Option<Morphism> {
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    monos_with_pins(g, h, node_pins, edge_pins).into_iter().next()
}

/// Backtracking core: all monos `dom → cod` that extend the given pins.
pub fn monos_with_pins(
    dom: &Graph,
    cod: &Graph,
    node_pins: &BTreeMap<NodeId, NodeId>,
    edge_pins: &BTreeMap<EdgeId, EdgeId>,
) -> Vec<Morphism> {
    // Reject pins that are not even locally plausible.
    for (a, b) in node_pins {
        match (dom.node_label(a), cod.node_label(b)) {
            (Some(la), Some(lb)) if la == lb => {}
            _ => return Vec::new(),
        }
    }
    for (a, b) in edge_pins {
        match (dom.edge(a), cod.edge(b)) {
            (Some(ea), Some(eb)) if ea.label == eb.label => {}
            _ => return Vec::new(),
        }
    }

    let mut order: Vec<NodeId> = dom.node_ids().cloned().collect();
    order.sort_by_key(|n| {
        (
            dom.node_label(n).cloned(),
            std::cmp::Reverse(dom.out_degree(n) + dom.in_degree(n)),
            n.clone(),
        )
    });

    let mut assignment: BTreeMap<NodeId, NodeId> = node_pins.clone();
    let mut results = Vec::new();
    assign_nodes(dom, cod, &order, 0, &mut assignment, edge_pins, &mut results);

    let mut out: Vec<Morphism> = results
        .into_iter()
        .map(|(nm, em)| {
            Morphism::new(dom.clone(), cod.clone(), nm, em)
                .expect("backtracker produced an invalid morphism")
        })
        .collect();
    out.sort_by_key(|m| m.image_key());
    out.dedup();
    out
}

fn assign_nodes(
    dom: &Graph,
    cod: &Graph,
    order: &[NodeId],
    idx: usize,
    assignment: &mut BTreeMap<NodeId, NodeId>,
    edge_pins: &BTreeMap<EdgeId, EdgeId>,
    results: &mut Vec<(BTreeMap<NodeId, NodeId>, BTreeMap<EdgeId, EdgeId>)>,
) {
    if idx == order.len() {
        map_edges(dom, cod, assignment, edge_pins, results);
        return;
    }
    let v = &order[idx];
    if assignment.contains_key(v) {
        // pinned
        assign_nodes(dom, cod, order, idx + 1, assignment, edge_pins, results);
        return;
    }
    let lv = dom.node_label(v).unwrap().clone();
    let used: Vec<NodeId> = assignment.values().cloned().collect();
    let candidates: Vec<NodeId> = cod
        .nodes()
        .filter(|(w, lw)| {
            **lw == lv
                && !used.contains(w)
                && cod.out_degree(w) >= dom.out_degree(v)
                && cod.in_degree(w) >= dom.in_degree(v)
        })
        .map(|(w, _)| w.clone())
        .collect();
    for w in candidates {
        assignment.insert(v.clone(), w.clone());
        if edges_consistent(dom, cod, assignment) {
            assign_nodes(dom, cod, order, idx + 1, assignment, edge_pins, results);
        }
        assignment.remove(v);
    }
}

/// Every dom edge whose endpoints are both assigned must have at least one
/// candidate image edge.
fn edges_consistent(dom: &Graph, cod: &Graph, assignment: &BTreeMap<NodeId, NodeId>) -> bool {
    dom.edges().all(|(_, e)| {
        match (assignment.get(&e.src), assignment.get(&e.tgt)) {
            (Some(s), Some(t)) => cod
                .edges()
                .any(|(_, f)| &f.src == s && &f.tgt == t && f.label == e.label),
            _ => true,
        }
    })
}

/// With all nodes placed, match edges injectively (parallel edges make this a
/// small matching problem solved by backtracking as well).
fn map_edges(
    dom: &Graph,
    cod: &Graph,
    node_assignment: &BTreeMap<NodeId, NodeId>,
    edge_pins: &BTreeMap<EdgeId, EdgeId>,
    results: &mut Vec<(BTreeMap<NodeId, NodeId>, BTreeMap<EdgeId, EdgeId>)>,
) {
    // Pins must agree with the node assignment.
    for (a, b) in edge_pins {
        let ea = dom.edge(a).unwrap();
        let eb = cod.edge(b).unwrap();
        if node_assignment.get(&ea.src) != Some(&eb.src)
            || node_assignment.get(&ea.tgt) != Some(&eb.tgt)
        {
            return;
        }
    }
    let todo: Vec<EdgeId> =
        dom.edge_ids().filter(|e| !edge_pins.contains_key(e)).cloned().collect();
    let mut edge_map = edge_pins.clone();
    assign_edges(dom, cod, node_assignment, &todo, 0, &mut edge_map, results);
}

fn assign_edges(
    dom: &Graph,
    cod: &Graph,
    node_assignment: &BTreeMap<NodeId, NodeId>,
    todo: &[EdgeId],
    idx: usize,
    edge_map: &mut BTreeMap<EdgeId, EdgeId>,
    results: &mut Vec<(BTreeMap<NodeId, NodeId>, BTreeMap<EdgeId, EdgeId>)>,
) {
    if idx == todo.len() {
        results.push((node_assignment.clone(), edge_map.clone()));
        return;
    }
    let a = &todo[idx];
    let ea = dom.edge(a).unwrap();
    let s = node_assignment[&ea.src].clone();
    let t = node_assignment[&ea.tgt].clone();
    let used: Vec<EdgeId> = edge_map.values().cloned().collect();
    let candidates: Vec<EdgeId> = cod
        .edges()
        .filter(|(b, eb)| eb.src == s && eb.tgt == t && eb.label == ea.label && !used.contains(b))
        .map(|(b, _)| b.clone())
        .collect();
    for b in candidates {
        edge_map.insert(a.clone(), b);
        assign_edges(dom, cod, node_assignment, todo, idx + 1, edge_map, results);
        edge_map.remove(a);
    }
}
