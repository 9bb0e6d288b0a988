//! Graph morphisms: total injective ones, and the partial variant used for
//! interface relations and track morphisms.
//!
//! The whole engine works with injective morphisms only. A morphism owns
//! copies of its domain and codomain so values stay self-contained and
//! shareable. Inclusions are id-based: the domain's ids literally occur in the
//! codomain.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};

/// A total injective structure-preserving map between graphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Morphism {
    dom: Graph,
    cod: Graph,
    node_map: BTreeMap<NodeId, NodeId>,
    edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl Morphism {
    pub fn new(
        dom: Graph,
        cod: Graph,
        node_map: BTreeMap<NodeId, NodeId>,
        edge_map: BTreeMap<EdgeId, EdgeId>,
    ) -> Result<Self> {
        let m = Morphism { dom, cod, node_map, edge_map };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        // totality
        for id in self.dom.node_ids() {
            if !self.node_map.contains_key(id) {
                return Err(Error::InvalidMorphism(format!("node {id} unmapped")));
            }
        }
        for id in self.dom.edge_ids() {
            if !self.edge_map.contains_key(id) {
                return Err(Error::InvalidMorphism(format!("edge {id} unmapped")));
            }
        }
        if self.node_map.len() != self.dom.node_count() || self.edge_map.len() != self.dom.edge_count()
        {
            return Err(Error::InvalidMorphism("map mentions items outside the domain".into()));
        }
        check_structure(&self.dom, &self.cod, &self.node_map, &self.edge_map)?;
        check_injective(&self.node_map, &self.edge_map)
    }

    pub fn identity(g: &Graph) -> Self {
        let node_map = g.node_ids().map(|n| (n.clone(), n.clone())).collect();
        let edge_map = g.edge_ids().map(|e| (e.clone(), e.clone())).collect();
        Morphism { dom: g.clone(), cod: g.clone(), node_map, edge_map }
    }

    /// The id-based inclusion `sub ↪ sup`. Fails if `sub` is not an id-level
    /// subgraph of `sup`.
    pub fn inclusion(sub: &Graph, sup: &Graph) -> Result<Self> {
        if !sub.is_subgraph_of(sup) {
            return Err(Error::InvalidMorphism(format!(
                "{} is not an id-level subgraph of {}",
                sub.brief(),
                sup.brief()
            )));
        }
        let node_map = sub.node_ids().map(|n| (n.clone(), n.clone())).collect();
        let edge_map = sub.edge_ids().map(|e| (e.clone(), e.clone())).collect();
        Ok(Morphism { dom: sub.clone(), cod: sup.clone(), node_map, edge_map })
    }

    pub fn dom(&self) -> &Graph {
        &self.dom
    }

    pub fn cod(&self) -> &Graph {
        &self.cod
    }

    pub fn node_map(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.node_map
    }

    pub fn edge_map(&self) -> &BTreeMap<EdgeId, EdgeId> {
        &self.edge_map
    }

    pub fn apply_node(&self, n: &NodeId) -> Option<&NodeId> {
        self.node_map.get(n)
    }

    pub fn apply_edge(&self, e: &EdgeId) -> Option<&EdgeId> {
        self.edge_map.get(e)
    }

    pub fn is_inclusion(&self) -> bool {
        self.node_map.iter().all(|(a, b)| a == b) && self.edge_map.iter().all(|(a, b)| a == b)
    }

    /// Inclusion with a strictly larger codomain.
    pub fn is_proper_inclusion(&self) -> bool {
        self.is_inclusion() && self.dom.size() < self.cod.size()
    }

    pub fn is_bijective(&self) -> bool {
        self.node_map.len() == self.cod.node_count() && self.edge_map.len() == self.cod.edge_count()
    }

    /// Diagrammatic composition: `self` then `other` (i.e. `other ∘ self`).
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        if self.cod != other.dom {
            return Err(Error::DomainMismatch(
                "composition: codomain differs from next domain".into(),
            ));
        }
        let node_map = self
            .node_map
            .iter()
            .map(|(a, b)| (a.clone(), other.node_map[b].clone()))
            .collect();
        let edge_map = self
            .edge_map
            .iter()
            .map(|(a, b)| (a.clone(), other.edge_map[b].clone()))
            .collect();
        Ok(Morphism { dom: self.dom.clone(), cod: other.cod.clone(), node_map, edge_map })
    }

    /// Inverse of a bijective morphism.
    pub fn inverse(&self) -> Result<Morphism> {
        if !self.is_bijective() {
            return Err(Error::InvalidMorphism("inverse of a non-bijective morphism".into()));
        }
        let node_map = self.node_map.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        let edge_map = self.edge_map.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        Ok(Morphism { dom: self.cod.clone(), cod: self.dom.clone(), node_map, edge_map })
    }

    pub fn to_partial(&self) -> PartialMorphism {
        PartialMorphism {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            node_map: self.node_map.clone(),
            edge_map: self.edge_map.clone(),
        }
    }

    /// Deterministic identity: the image sequence over id-sorted domain items.
    pub fn image_key(&self) -> (Vec<NodeId>, Vec<EdgeId>) {
        (self.node_map.values().cloned().collect(), self.edge_map.values().cloned().collect())
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .node_map
            .iter()
            .map(|(a, b)| format!("{a}↦{b}"))
            .chain(self.edge_map.iter().map(|(a, b)| format!("{a}↦{b}")))
            .collect();
        write!(f, "[{}]", pairs.join(" "))
    }
}

/// An injective morphism defined on a subgraph of its domain.
///
/// The domain of definition must itself be a subgraph: whenever an edge is
/// mapped, both endpoints are mapped consistently.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialMorphism {
    dom: Graph,
    cod: Graph,
    node_map: BTreeMap<NodeId, NodeId>,
    edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl PartialMorphism {
    pub fn new(
        dom: Graph,
        cod: Graph,
        node_map: BTreeMap<NodeId, NodeId>,
        edge_map: BTreeMap<EdgeId, EdgeId>,
    ) -> Result<Self> {
        for id in node_map.keys() {
            if !dom.has_node(id) {
                return Err(Error::InvalidMorphism(format!("node {id} not in domain")));
            }
        }
        for id in edge_map.keys() {
            if !dom.has_edge(id) {
                return Err(Error::InvalidMorphism(format!("edge {id} not in domain")));
            }
            let e = dom.edge(id).unwrap();
            if !node_map.contains_key(&e.src) || !node_map.contains_key(&e.tgt) {
                return Err(Error::InvalidMorphism(format!(
                    "edge {id} mapped without both endpoints"
                )));
            }
        }
        check_structure_partial(&dom, &cod, &node_map, &edge_map)?;
        check_injective(&node_map, &edge_map)?;
        Ok(PartialMorphism { dom, cod, node_map, edge_map })
    }

    /// The nowhere-defined morphism.
    pub fn undefined(dom: Graph, cod: Graph) -> Self {
        PartialMorphism { dom, cod, node_map: BTreeMap::new(), edge_map: BTreeMap::new() }
    }

    pub fn dom(&self) -> &Graph {
        &self.dom
    }

    pub fn cod(&self) -> &Graph {
        &self.cod
    }

    pub fn node_map(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.node_map
    }

    pub fn edge_map(&self) -> &BTreeMap<EdgeId, EdgeId> {
        &self.edge_map
    }

    pub fn apply_node(&self, n: &NodeId) -> Option<&NodeId> {
        self.node_map.get(n)
    }

    pub fn apply_edge(&self, e: &EdgeId) -> Option<&EdgeId> {
        self.edge_map.get(e)
    }

    /// Number of items the morphism is defined on.
    pub fn defined_count(&self) -> usize {
        self.node_map.len() + self.edge_map.len()
    }

    pub fn is_total(&self) -> bool {
        self.node_map.len() == self.dom.node_count() && self.edge_map.len() == self.dom.edge_count()
    }

    /// Composition defined where both legs are defined.
    pub fn then(&self, other: &PartialMorphism) -> Result<PartialMorphism> {
        if self.cod != other.dom {
            return Err(Error::DomainMismatch(
                "partial composition: codomain differs from next domain".into(),
            ));
        }
        let node_map = self
            .node_map
            .iter()
            .filter_map(|(a, b)| other.node_map.get(b).map(|c| (a.clone(), c.clone())))
            .collect();
        let edge_map = self
            .edge_map
            .iter()
            .filter_map(|(a, b)| other.edge_map.get(b).map(|c| (a.clone(), c.clone())))
            .collect();
        Ok(PartialMorphism { dom: self.dom.clone(), cod: other.cod.clone(), node_map, edge_map })
    }

    /// Inverse relation; well-defined because the morphism is injective.
    pub fn inverse(&self) -> PartialMorphism {
        let node_map = self.node_map.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        let edge_map = self.edge_map.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        PartialMorphism {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            node_map,
            edge_map,
        }
    }

    /// The total morphism, if this one is defined everywhere.
    pub fn to_total(&self) -> Result<Morphism> {
        if !self.is_total() {
            return Err(Error::InvalidMorphism("partial morphism is not total".into()));
        }
        Morphism::new(self.dom.clone(), self.cod.clone(), self.node_map.clone(), self.edge_map.clone())
    }

    /// Checks the partial-morphism invariants hold (used by property tests).
    pub fn revalidate(&self) -> Result<()> {
        PartialMorphism::new(
            self.dom.clone(),
            self.cod.clone(),
            self.node_map.clone(),
            self.edge_map.clone(),
        )
        .map(|_| ())
    }
}

impl fmt::Display for PartialMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .node_map
            .iter()
            .map(|(a, b)| format!("{a}↦{b}"))
            .chain(self.edge_map.iter().map(|(a, b)| format!("{a}↦{b}")))
            .collect();
        write!(f, "⇀[{}]", pairs.join(" "))
    }
}

fn check_injective(
    node_map: &BTreeMap<NodeId, NodeId>,
    edge_map: &BTreeMap<EdgeId, EdgeId>,
) -> Result<()> {
    let mut nseen = std::collections::BTreeSet::new();
    for v in node_map.values() {
        if !nseen.insert(v) {
            return Err(Error::InvalidMorphism(format!("node map not injective at {v}")));
        }
    }
    let mut eseen = std::collections::BTreeSet::new();
    for v in edge_map.values() {
        if !eseen.insert(v) {
            return Err(Error::InvalidMorphism(format!("edge map not injective at {v}")));
        }
    }
    Ok(())
}

fn check_structure(
    dom: &Graph,
    cod: &Graph,
    node_map: &BTreeMap<NodeId, NodeId>,
    edge_map: &BTreeMap<EdgeId, EdgeId>,
) -> Result<()> {
    check_structure_partial(dom, cod, node_map, edge_map)
}

fn check_structure_partial(
    dom: &Graph,
    cod: &Graph,
    node_map: &BTreeMap<NodeId, NodeId>,
    edge_map: &BTreeMap<EdgeId, EdgeId>,
) -> Result<()> {
    for (a, b) in node_map {
        let la = dom.node_label(a).ok_or_else(|| Error::InvalidMorphism(format!("{a} not in dom")))?;
        let lb = cod.node_label(b).ok_or_else(|| Error::InvalidMorphism(format!("{b} not in cod")))?;
        if la != lb {
            return Err(Error::InvalidMorphism(format!("label mismatch on node {a}")));
        }
    }
    for (a, b) in edge_map {
        let ea = dom.edge(a).ok_or_else(|| Error::InvalidMorphism(format!("{a} not in dom")))?;
        let eb = cod.edge(b).ok_or_else(|| Error::InvalidMorphism(format!("{b} not in cod")))?;
        if ea.label != eb.label {
            return Err(Error::InvalidMorphism(format!("label mismatch on edge {a}")));
        }
        if node_map.get(&ea.src) != Some(&eb.src) || node_map.get(&ea.tgt) != Some(&eb.tgt) {
            return Err(Error::InvalidMorphism(format!(
                "edge {a} does not commute with source/target maps"
            )));
        }
    }
    Ok(())
}
