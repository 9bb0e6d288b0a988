//! Shifting conditions over morphisms.
//!
//! `shift(b, d)` turns a condition `d` over `A` into an equivalent condition
//! over the codomain of `b: A ↪ R`: an anchor `n: R ↪ H` satisfies the result
//! iff `n ∘ b` satisfies `d`. Existentials become disjunctions over all
//! jointly surjective overlaps of the two extensions; negation and
//! conjunction commute.
//!
//! Overlap pairs `(a′: R ↪ E, b′: C → E)` are enumerated up to isomorphism by
//! choosing which items of `C − a(A)` glue onto items of `R − b(A)`; `E` keeps
//! `R`'s ids and unglued `C` items arrive with fresh `"c:…"` ids, so `a′` is
//! always an id-based inclusion. When everything glues (`E = R`, `a′` an
//! isomorphism) the disjunct is inlined instead of quantified, keeping the
//! proper-inclusion invariant of the condition AST.

use std::collections::BTreeMap;

use crate::condition::{Body, Condition};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::morphism::Morphism;

/// One jointly surjective overlap of `C` and `R` over `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlap {
    /// `R ↪ E`, an id-based inclusion (possibly the identity).
    pub into_overlap_r: Morphism,
    /// `C → E`, total injective.
    pub into_overlap_c: Morphism,
}

impl Overlap {
    pub fn overlap_graph(&self) -> &Graph {
        self.into_overlap_r.cod()
    }
}

/// All pairs `(a′: R ↪ E, b′: C → E)` with `b′ ∘ a = a′ ∘ b`, both injective
/// and jointly surjective, up to isomorphism of pairs. Ordered by the number
/// of glued items (fully disjoint first), then by the gluing map itself.
pub fn jointly_surjective_overlaps(a: &Morphism, b: &Morphism) -> Result<Vec<Overlap>> {
    if a.dom() != b.dom() {
        return Err(Error::DomainMismatch("overlap legs must share their domain".into()));
    }
    let c = a.cod();
    let r = b.cod();

    // Items of C and R outside the shared A image.
    let c_extra_nodes: Vec<NodeId> = c
        .node_ids()
        .filter(|n| !a.node_map().values().any(|v| v == *n))
        .cloned()
        .collect();
    let c_extra_edges: Vec<EdgeId> = c
        .edge_ids()
        .filter(|e| !a.edge_map().values().any(|v| v == *e))
        .cloned()
        .collect();
    let r_extra_nodes: Vec<NodeId> = r
        .node_ids()
        .filter(|n| !b.node_map().values().any(|v| v == *n))
        .cloned()
        .collect();
    let r_extra_edges: Vec<EdgeId> = r
        .edge_ids()
        .filter(|e| !b.edge_map().values().any(|v| v == *e))
        .cloned()
        .collect();

    // The fixed part of the gluing: a(x) ↦ b(x) for x in A.
    let base_nodes: BTreeMap<NodeId, NodeId> = a
        .node_map()
        .iter()
        .map(|(x, ax)| (ax.clone(), b.node_map()[x].clone()))
        .collect();
    let base_edges: BTreeMap<EdgeId, EdgeId> = a
        .edge_map()
        .iter()
        .map(|(x, ax)| (ax.clone(), b.edge_map()[x].clone()))
        .collect();

    let mut gluings: Vec<(BTreeMap<NodeId, NodeId>, BTreeMap<EdgeId, EdgeId>)> = Vec::new();
    let mut nodes_acc = BTreeMap::new();
    glue_nodes(
        c,
        r,
        &c_extra_nodes,
        &r_extra_nodes,
        &c_extra_edges,
        &r_extra_edges,
        &base_nodes,
        0,
        &mut nodes_acc,
        &mut gluings,
    );

    // Order: fewer glued items first, then lexicographic encoding.
    gluings.sort_by_key(|(nm, em)| {
        (
            nm.len() + em.len(),
            nm.iter().map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>(),
            em.iter().map(|(k, v)| (k.clone(), v.clone())).collect::<Vec<_>>(),
        )
    });

    let mut out = Vec::new();
    for (glue_n, glue_e) in gluings {
        out.push(build_overlap(a, b, c, r, &base_nodes, &base_edges, &glue_n, &glue_e)?);
    }
    Ok(out)
}

/// Enumerates injective structure-compatible partial maps from the extra
/// items of `C` to the extra items of `R`; edges glue only when both
/// endpoints do.
#[allow(clippy::too_many_arguments)]
fn glue_nodes(
    c: &Graph,
    r: &Graph,
    c_nodes: &[NodeId],
    r_nodes: &[NodeId],
    c_edges: &[EdgeId],
    r_edges: &[EdgeId],
    base_nodes: &BTreeMap<NodeId, NodeId>,
    idx: usize,
    acc: &mut BTreeMap<NodeId, NodeId>,
    out: &mut Vec<(BTreeMap<NodeId, NodeId>, BTreeMap<EdgeId, EdgeId>)>,
) {
    if idx == c_nodes.len() {
        let mut eacc = BTreeMap::new();
        glue_edges(c, r, c_edges, r_edges, base_nodes, acc, 0, &mut eacc, out);
        return;
    }
    let v = &c_nodes[idx];
    // unglued
    glue_nodes(c, r, c_nodes, r_nodes, c_edges, r_edges, base_nodes, idx + 1, acc, out);
    // glued onto each compatible unused R node
    let lv = c.node_label(v).unwrap();
    for w in r_nodes {
        if r.node_label(w) == Some(lv) && !acc.values().any(|u| u == w) {
            acc.insert(v.clone(), w.clone());
            glue_nodes(c, r, c_nodes, r_nodes, c_edges, r_edges, base_nodes, idx + 1, acc, out);
            acc.remove(v);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn glue_edges(
    c: &Graph,
    r: &Graph,
    c_edges: &[EdgeId],
    r_edges: &[EdgeId],
    base_nodes: &BTreeMap<NodeId, NodeId>,
    glue_n: &BTreeMap<NodeId, NodeId>,
    idx: usize,
    acc: &mut BTreeMap<EdgeId, EdgeId>,
    out: &mut Vec<(BTreeMap<NodeId, NodeId>, BTreeMap<EdgeId, EdgeId>)>,
) {
    if idx == c_edges.len() {
        out.push((glue_n.clone(), acc.clone()));
        return;
    }
    let e = &c_edges[idx];
    // unglued
    glue_edges(c, r, c_edges, r_edges, base_nodes, glue_n, idx + 1, acc, out);
    // glued: endpoints must be glued (through the base or the choice) onto
    // the candidate's endpoints
    let ce = c.edge(e).unwrap();
    let src_img = base_nodes.get(&ce.src).or_else(|| glue_n.get(&ce.src));
    let tgt_img = base_nodes.get(&ce.tgt).or_else(|| glue_n.get(&ce.tgt));
    if let (Some(s), Some(t)) = (src_img, tgt_img) {
        for f in r_edges {
            let re = r.edge(f).unwrap();
            if &re.src == s && &re.tgt == t && re.label == ce.label && !acc.values().any(|u| u == f)
            {
                acc.insert(e.clone(), f.clone());
                glue_edges(c, r, c_edges, r_edges, base_nodes, glue_n, idx + 1, acc, out);
                acc.remove(e);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_overlap(
    a: &Morphism,
    b: &Morphism,
    c: &Graph,
    r: &Graph,
    base_nodes: &BTreeMap<NodeId, NodeId>,
    base_edges: &BTreeMap<EdgeId, EdgeId>,
    glue_n: &BTreeMap<NodeId, NodeId>,
    glue_e: &BTreeMap<EdgeId, EdgeId>,
) -> Result<Overlap> {
    let _ = (a, b);
    let mut e_graph = r.clone();
    let mut taken = e_graph.all_ids();
    let mut c_nodes: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut c_edges: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();

    for (n, label) in c.nodes() {
        if let Some(img) = base_nodes.get(n).or_else(|| glue_n.get(n)) {
            c_nodes.insert(n.clone(), img.clone());
        } else {
            let fresh = NodeId(Graph::fresh_id("c", n.as_str(), &taken));
            taken.insert(fresh.0.clone());
            e_graph.add_node(fresh.clone(), label.clone())?;
            c_nodes.insert(n.clone(), fresh);
        }
    }
    for (e, edge) in c.edges() {
        if let Some(img) = base_edges.get(e).or_else(|| glue_e.get(e)) {
            c_edges.insert(e.clone(), img.clone());
        } else {
            let fresh = EdgeId(Graph::fresh_id("c", e.as_str(), &taken));
            taken.insert(fresh.0.clone());
            e_graph.add_edge(
                fresh.clone(),
                c_nodes[&edge.src].clone(),
                c_nodes[&edge.tgt].clone(),
                edge.label.clone(),
            )?;
            c_edges.insert(e.clone(), fresh);
        }
    }

    let into_overlap_r = Morphism::inclusion(r, &e_graph)?;
    let into_overlap_c = Morphism::new(c.clone(), e_graph, c_nodes, c_edges)?;
    Ok(Overlap { into_overlap_r, into_overlap_c })
}

/// The Shift construction: for injective `b: A → R` and `d` over `A`,
/// `n ∘ b ⊨ d  ⟺  n ⊨ shift(b, d)` for every `n: R ↪ H`.
pub fn shift(b: &Morphism, d: &Condition) -> Result<Condition> {
    if d.ctx() != b.dom() {
        return Err(Error::ContextMismatch(format!(
            "shift of a condition over {} along a morphism from {}",
            d.ctx().brief(),
            b.dom().brief()
        )));
    }
    let r = b.cod().clone();
    match d.body() {
        Body::True => Ok(Condition::tt(r)),
        Body::Not(sub) => Ok(Condition::not(shift(b, sub)?)),
        Body::And(subs) => {
            let shifted: Result<Vec<Condition>> = subs.iter().map(|s| shift(b, s)).collect();
            Condition::and(r, shifted?)
        }
        Body::Exists { mor, sub } => {
            let mut disjuncts = Vec::new();
            for ov in jointly_surjective_overlaps(mor, b)? {
                let inner = shift(&ov.into_overlap_c, sub)?;
                if ov.into_overlap_r.is_proper_inclusion() {
                    disjuncts.push(Condition::exists(ov.into_overlap_r.clone(), inner)?);
                } else {
                    // a′ is an isomorphism (E = R): ∃(id, c) ≡ c.
                    disjuncts.push(inner);
                }
            }
            Condition::or(r, disjuncts)
        }
    }
}
