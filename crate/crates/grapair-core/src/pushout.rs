//! Pushouts and pushout complements along injective morphisms — the two
//! squares of a double-pushout rewrite step.
//!
//! Conventions that keep everything deterministic:
//! - `pushout(b: K↪R, d: K↪D)` keeps the ids of the `D` side; items copied
//!   from `R − b(K)` get fresh ids `"{side}:{original}"` with a collision
//!   counter (side defaults to `"r"`).
//! - `pushout_complement(l: K↪L, m: L↪G)` returns `D` as an id-level subgraph
//!   of `G`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::morphism::Morphism;

/// The gluing of `R` and `D` along `K`. Returns `(H, R↪H, D↪H)`.
pub fn pushout(b: &Morphism, d: &Morphism) -> Result<(Graph, Morphism, Morphism)> {
    pushout_with_side(b, d, "r")
}

pub fn pushout_with_side(
    b: &Morphism,
    d: &Morphism,
    side: &str,
) -> Result<(Graph, Morphism, Morphism)> {
    if b.dom() != d.dom() {
        return Err(Error::DomainMismatch("pushout legs must share their domain".into()));
    }
    let r = b.cod();
    let dd = d.cod();

    let mut h = dd.clone();
    let mut taken = h.all_ids();

    // node images of K inside R and D, to translate through the span
    let b_node_inv: BTreeMap<&NodeId, &NodeId> =
        b.node_map().iter().map(|(k, v)| (v, k)).collect();
    let b_edge_inv: BTreeMap<&EdgeId, &EdgeId> =
        b.edge_map().iter().map(|(k, v)| (v, k)).collect();

    let mut r_nodes: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for (n, label) in r.nodes() {
        if let Some(k) = b_node_inv.get(n) {
            r_nodes.insert(n.clone(), d.node_map()[*k].clone());
        } else {
            let fresh = NodeId(Graph::fresh_id(side, n.as_str(), &taken));
            taken.insert(fresh.0.clone());
            h.add_node(fresh.clone(), label.clone())?;
            r_nodes.insert(n.clone(), fresh);
        }
    }
    let mut r_edges: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for (e, edge) in r.edges() {
        if let Some(k) = b_edge_inv.get(e) {
            r_edges.insert(e.clone(), d.edge_map()[*k].clone());
        } else {
            let fresh = EdgeId(Graph::fresh_id(side, e.as_str(), &taken));
            taken.insert(fresh.0.clone());
            h.add_edge(
                fresh.clone(),
                r_nodes[&edge.src].clone(),
                r_nodes[&edge.tgt].clone(),
                edge.label.clone(),
            )?;
            r_edges.insert(e.clone(), fresh);
        }
    }

    let r_to_h = Morphism::new(r.clone(), h.clone(), r_nodes, r_edges)?;
    let d_to_h = Morphism::inclusion(dd, &h)?;
    Ok((h, r_to_h, d_to_h))
}

/// The pushout complement of `K ↪ L ↪ G`: removes `m(L − l(K))` from `G`.
///
/// Exists iff the dangling condition holds: no edge of `G` outside `m(L)` is
/// incident to a node of `m(L − l(K))`. On failure the error carries the
/// offending (edge, node) pairs.
pub fn pushout_complement(l: &Morphism, m: &Morphism) -> Result<(Graph, Morphism, Morphism)> {
    if l.cod() != m.dom() {
        return Err(Error::DomainMismatch("pushout complement: l's codomain must be m's domain".into()));
    }
    let g = m.cod();

    let deleted_nodes: BTreeSet<NodeId> = l
        .cod()
        .node_ids()
        .filter(|n| !l.node_map().values().any(|v| v == *n))
        .map(|n| m.node_map()[n].clone())
        .collect();
    let matched_edges: BTreeSet<EdgeId> = m.edge_map().values().cloned().collect();

    let mut offending: Vec<(EdgeId, NodeId)> = Vec::new();
    for (id, e) in g.edges() {
        if matched_edges.contains(id) {
            continue;
        }
        if deleted_nodes.contains(&e.src) {
            offending.push((id.clone(), e.src.clone()));
        }
        if deleted_nodes.contains(&e.tgt) {
            offending.push((id.clone(), e.tgt.clone()));
        }
    }
    if !offending.is_empty() {
        return Err(Error::Dangling(offending));
    }

    let deleted_edges: BTreeSet<EdgeId> = l
        .cod()
        .edge_ids()
        .filter(|e| !l.edge_map().values().any(|v| v == *e))
        .map(|e| m.edge_map()[e].clone())
        .collect();

    let keep_nodes: BTreeSet<NodeId> =
        g.node_ids().filter(|n| !deleted_nodes.contains(*n)).cloned().collect();
    let keep_edges: BTreeSet<EdgeId> =
        g.edge_ids().filter(|e| !deleted_edges.contains(*e)).cloned().collect();
    let d = g.subgraph(&keep_nodes, &keep_edges)?;

    let k_to_d = {
        let node_map =
            l.node_map().iter().map(|(k, v)| (k.clone(), m.node_map()[v].clone())).collect();
        let edge_map =
            l.edge_map().iter().map(|(k, v)| (k.clone(), m.edge_map()[v].clone())).collect();
        Morphism::new(l.dom().clone(), d.clone(), node_map, edge_map)?
    };
    let d_to_g = Morphism::inclusion(&d, g)?;
    Ok((d, k_to_d, d_to_g))
}

/// Validates that a commuting square of injective morphisms is a pushout:
/// both result legs injective (by type), jointly surjective, and the two
/// images intersect exactly in the image of the shared domain.
pub fn validate_pushout_square(
    b: &Morphism,
    d: &Morphism,
    r_to_h: &Morphism,
    d_to_h: &Morphism,
) -> Result<()> {
    if b.dom() != d.dom() {
        return Err(Error::DomainMismatch("square legs must share their domain".into()));
    }
    if r_to_h.cod() != d_to_h.cod() {
        return Err(Error::DomainMismatch("square result legs must share their codomain".into()));
    }
    let via_r = b.then(r_to_h)?;
    let via_d = d.then(d_to_h)?;
    if via_r != via_d {
        return Err(Error::InvalidMorphism("square does not commute".into()));
    }
    let h = r_to_h.cod();

    let from_r_nodes: BTreeSet<&NodeId> = r_to_h.node_map().values().collect();
    let from_d_nodes: BTreeSet<&NodeId> = d_to_h.node_map().values().collect();
    let from_r_edges: BTreeSet<&EdgeId> = r_to_h.edge_map().values().collect();
    let from_d_edges: BTreeSet<&EdgeId> = d_to_h.edge_map().values().collect();

    for n in h.node_ids() {
        if !from_r_nodes.contains(n) && !from_d_nodes.contains(n) {
            return Err(Error::InvalidMorphism(format!("node {n} not jointly covered")));
        }
    }
    for e in h.edge_ids() {
        if !from_r_edges.contains(e) && !from_d_edges.contains(e) {
            return Err(Error::InvalidMorphism(format!("edge {e} not jointly covered")));
        }
    }

    // No identification beyond K: the two images may only meet inside K's image.
    let k_nodes: BTreeSet<NodeId> = via_r.node_map().values().cloned().collect();
    let k_edges: BTreeSet<EdgeId> = via_r.edge_map().values().cloned().collect();
    for n in from_r_nodes.intersection(&from_d_nodes) {
        if !k_nodes.contains(*n) {
            return Err(Error::InvalidMorphism(format!("node {n} glued outside the interface")));
        }
    }
    for e in from_r_edges.intersection(&from_d_edges) {
        if !k_edges.contains(*e) {
            return Err(Error::InvalidMorphism(format!("edge {e} glued outside the interface")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::is_isomorphic;

    fn g(s: &str) -> Graph {
        Graph::parse_brief(s).unwrap()
    }

    #[test]
    fn pushout_along_identity_recovers_the_other_leg() {
        let k = g("a b; e:a->b");
        let d = g("a b c; e:a->b f:b->c");
        let (h, _, _) = pushout(&Morphism::identity(&k), &Morphism::inclusion(&k, &d).unwrap()).unwrap();
        assert!(is_isomorphic(&h, &d).is_some());
    }

    #[test]
    fn pushout_along_empty_is_disjoint_union() {
        let r = g("x; l:x->x");
        let d = g("u v; e:u->v");
        let b = Morphism::inclusion(&Graph::empty(), &r).unwrap();
        let dm = Morphism::inclusion(&Graph::empty(), &d).unwrap();
        let (h, rh, dh) = pushout(&b, &dm).unwrap();
        assert_eq!(h.size(), r.size() + d.size());
        validate_pushout_square(&b, &dm, &rh, &dh).unwrap();
    }

    #[test]
    fn pushout_glues_on_the_shared_node() {
        // K = one node, R = node + loop, D = node + outgoing edge.
        let k = g("a");
        let r = g("a; l:a->a");
        let d = g("a b; e:a->b");
        let b = Morphism::inclusion(&k, &r).unwrap();
        let dm = Morphism::inclusion(&k, &d).unwrap();
        let (h, rh, dh) = pushout(&b, &dm).unwrap();
        assert_eq!(h.node_count(), 2);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.incident_edge_count(&NodeId::from("a")), 2);
        validate_pushout_square(&b, &dm, &rh, &dh).unwrap();
    }

    #[test]
    fn pushout_ids_are_deterministic() {
        let k = Graph::empty();
        let r = g("x");
        let d = g("x"); // same id on both sides forces the collision scheme
        let b = Morphism::inclusion(&k, &r).unwrap();
        let dm = Morphism::inclusion(&k, &d).unwrap();
        let (h1, _, _) = pushout(&b, &dm).unwrap();
        let (h2, _, _) = pushout(&b, &dm).unwrap();
        assert_eq!(h1, h2);
        assert!(h1.has_node(&NodeId::from("r:x")));
    }

    #[test]
    fn complement_of_identity_rule_is_the_host() {
        let l = g("a b; e:a->b");
        let host = g("a b c; e:a->b f:b->c");
        let m = Morphism::inclusion(&l, &host).unwrap();
        let (d, _, _) = pushout_complement(&Morphism::identity(&l), &m).unwrap();
        assert_eq!(d, host);
    }

    #[test]
    fn deleting_a_node_with_an_unmatched_edge_dangles() {
        let l = g("a");
        let host = g("a b; e:a->b");
        let lm = Morphism::inclusion(&Graph::empty(), &l).unwrap();
        let m = Morphism::inclusion(&l, &host).unwrap();
        match pushout_complement(&lm, &m) {
            Err(Error::Dangling(pairs)) => {
                assert_eq!(pairs, vec![(EdgeId::from("e"), NodeId::from("a"))]);
            }
            other => panic!("expected dangling, got {other:?}"),
        }
    }

    #[test]
    fn deleting_an_isolated_node_succeeds() {
        let l = g("a");
        let host = g("a b");
        let lm = Morphism::inclusion(&Graph::empty(), &l).unwrap();
        let m = Morphism::inclusion(&l, &host).unwrap();
        let (d, _, d_to_g) = pushout_complement(&lm, &m).unwrap();
        assert_eq!(d, g("b"));
        assert_eq!(d_to_g.cod(), &host);
    }

    #[test]
    fn pushout_then_complement_round_trips() {
        let k = g("a");
        let l = g("a b; e:a->b");
        let d = g("a; l:a->a");
        let lm = Morphism::inclusion(&k, &l).unwrap();
        let dm = Morphism::inclusion(&k, &d).unwrap();
        let (_h, l_to_h, _) = pushout(&lm, &dm).unwrap();
        let (d2, _, _) = pushout_complement(&lm, &l_to_h).unwrap();
        assert!(is_isomorphic(&d2, &d).is_some());
    }
}
