//! Finite directed labelled graphs.
//!
//! Nodes and edges carry opaque string ids, unique within their kind, and a
//! label drawn from a shared alphabet. All iteration is in id order, so every
//! operation downstream is deterministic. An "unlabelled" graph is one over a
//! singleton alphabet; the brief syntax (see [`Graph::parse_brief`]) defaults
//! omitted labels to `"n"` for exactly that purpose.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub String);

impl Label {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub String);

impl EdgeId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_string())
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub tgt: NodeId,
    pub label: Label,
}

/// A finite directed labelled graph.
///
/// Graphs are plain values: construction never fails structurally, and
/// [`Graph::validate`] reports the first violated invariant instead of
/// panicking, so ill-formed inputs can be loaded and then rejected.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Graph {
    nodes: BTreeMap<NodeId, Label>,
    edges: BTreeMap<EdgeId, Edge>,
}

/// A named invariant violation, carrying the offending id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DanglingEndpoint { edge: EdgeId, node: NodeId },
    EmptyLabel { id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingEndpoint { edge, node } => {
                write!(f, "dangling endpoint: edge {edge} refers to missing node {node}")
            }
            Violation::EmptyLabel { id } => write!(f, "empty label on {id}"),
        }
    }
}

impl Graph {
    pub fn empty() -> Self {
        Graph::default()
    }

    pub fn add_node(&mut self, id: NodeId, label: Label) -> Result<()> {
        if self.nodes.contains_key(&id) {
            return Err(Error::InvalidGraph(format!("duplicate node id {id}")));
        }
        self.nodes.insert(id, label);
        Ok(())
    }

    pub fn add_edge(&mut self, id: EdgeId, src: NodeId, tgt: NodeId, label: Label) -> Result<()> {
        if self.edges.contains_key(&id) {
            return Err(Error::InvalidGraph(format!("duplicate edge id {id}")));
        }
        self.edges.insert(id, Edge { src, tgt, label });
        Ok(())
    }

    pub fn remove_node(&mut self, id: &NodeId) {
        self.nodes.remove(id);
    }

    pub fn remove_edge(&mut self, id: &EdgeId) {
        self.edges.remove(id);
    }

    pub fn has_node(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn has_edge(&self, id: &EdgeId) -> bool {
        self.edges.contains_key(id)
    }

    pub fn node_label(&self, id: &NodeId) -> Option<&Label> {
        self.nodes.get(id)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.get(id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, &Label)> {
        self.nodes.iter()
    }

    /// Edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = (&EdgeId, &Edge)> {
        self.edges.iter()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &EdgeId> {
        self.edges.keys()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total item count (nodes + edges), each weight 1.
    pub fn size(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    /// Number of edges incident to `node` (loops counted once).
    pub fn incident_edge_count(&self, node: &NodeId) -> usize {
        self.edges.values().filter(|e| &e.src == node || &e.tgt == node).count()
    }

    pub fn incident_edge_ids(&self, node: &NodeId) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, e)| &e.src == node || &e.tgt == node)
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn out_degree(&self, node: &NodeId) -> usize {
        self.edges.values().filter(|e| &e.src == node).count()
    }

    pub fn in_degree(&self, node: &NodeId) -> usize {
        self.edges.values().filter(|e| &e.tgt == node).count()
    }

    pub fn node_labels(&self) -> BTreeSet<Label> {
        self.nodes.values().cloned().collect()
    }

    pub fn edge_labels(&self) -> BTreeSet<Label> {
        self.edges.values().map(|e| e.label.clone()).collect()
    }

    /// Checks all graph invariants; `Ok` or the first violation in id order.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        for (id, label) in &self.nodes {
            if label.0.is_empty() {
                return Err(Violation::EmptyLabel { id: id.0.clone() });
            }
        }
        for (id, e) in &self.edges {
            if !self.nodes.contains_key(&e.src) {
                return Err(Violation::DanglingEndpoint { edge: id.clone(), node: e.src.clone() });
            }
            if !self.nodes.contains_key(&e.tgt) {
                return Err(Violation::DanglingEndpoint { edge: id.clone(), node: e.tgt.clone() });
            }
            if e.label.0.is_empty() {
                return Err(Violation::EmptyLabel { id: id.0.clone() });
            }
        }
        Ok(())
    }

    /// True iff `self` is an id-level subgraph of `other` (same labels and
    /// endpoints for shared ids).
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.nodes.iter().all(|(id, l)| other.node_label(id) == Some(l))
            && self.edges.iter().all(|(id, e)| other.edge(id) == Some(e))
    }

    pub fn is_proper_subgraph_of(&self, other: &Graph) -> bool {
        self.is_subgraph_of(other) && self.size() < other.size()
    }

    /// The subgraph on the given item sets. Fails if an edge endpoint is not
    /// included or an id is unknown.
    pub fn subgraph(&self, nodes: &BTreeSet<NodeId>, edges: &BTreeSet<EdgeId>) -> Result<Graph> {
        let mut g = Graph::empty();
        for id in nodes {
            let label = self
                .node_label(id)
                .ok_or_else(|| Error::InvalidGraph(format!("unknown node {id}")))?;
            g.add_node(id.clone(), label.clone())?;
        }
        for id in edges {
            let e = self.edge(id).ok_or_else(|| Error::InvalidGraph(format!("unknown edge {id}")))?;
            if !nodes.contains(&e.src) || !nodes.contains(&e.tgt) {
                return Err(Error::InvalidGraph(format!(
                    "subgraph would leave edge {id} without an endpoint"
                )));
            }
            g.add_edge(id.clone(), e.src.clone(), e.tgt.clone(), e.label.clone())?;
        }
        Ok(g)
    }

    /// Picks an id of the form `{prefix}:{base}` (with a `#k` counter on
    /// collision) that `taken` does not contain.
    pub fn fresh_id(prefix: &str, base: &str, taken: &BTreeSet<String>) -> String {
        let candidate = format!("{prefix}:{base}");
        if !taken.contains(&candidate) {
            return candidate;
        }
        let mut k = 2usize;
        loop {
            let c = format!("{candidate}#{k}");
            if !taken.contains(&c) {
                return c;
            }
            k += 1;
        }
    }

    pub fn all_ids(&self) -> BTreeSet<String> {
        self.nodes
            .keys()
            .map(|n| n.0.clone())
            .chain(self.edges.keys().map(|e| e.0.clone()))
            .collect()
    }

    /// Parses the brief graph syntax used throughout tests and fixtures:
    /// `"n1:wp n2:wp; t1:n1->n2:track"`. Nodes before the `;`, edges after.
    /// Omitted labels default to `"n"`.
    pub fn parse_brief(s: &str) -> Result<Graph> {
        let mut g = Graph::empty();
        let (nodes_part, edges_part) = match s.split_once(';') {
            Some((n, e)) => (n, e),
            None => (s, ""),
        };
        for tok in nodes_part.split_whitespace() {
            let (id, label) = match tok.split_once(':') {
                Some((id, l)) => (id, l),
                None => (tok, "n"),
            };
            if id.is_empty() {
                return Err(Error::Parse(format!("bad node token {tok:?}")));
            }
            g.add_node(NodeId::from(id), Label::from(label))?;
        }
        for tok in edges_part.split_whitespace() {
            let mut parts = tok.split(':');
            let id = parts.next().unwrap_or("");
            let arrow = parts.next().unwrap_or("");
            let label = parts.next().unwrap_or("n");
            let (src, tgt) = arrow
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("bad edge token {tok:?}")))?;
            if id.is_empty() || src.is_empty() || tgt.is_empty() {
                return Err(Error::Parse(format!("bad edge token {tok:?}")));
            }
            g.add_edge(EdgeId::from(id), NodeId::from(src), NodeId::from(tgt), Label::from(label))?;
        }
        Ok(g)
    }

    /// Inverse of [`Graph::parse_brief`], with default labels elided.
    pub fn brief(&self) -> String {
        let nodes: Vec<String> = self
            .nodes
            .iter()
            .map(|(id, l)| if l.as_str() == "n" { id.0.clone() } else { format!("{id}:{l}") })
            .collect();
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|(id, e)| {
                if e.label.as_str() == "n" {
                    format!("{id}:{}->{}", e.src, e.tgt)
                } else {
                    format!("{id}:{}->{}:{}", e.src, e.tgt, e.label)
                }
            })
            .collect();
        if edges.is_empty() {
            nodes.join(" ")
        } else {
            format!("{}; {}", nodes.join(" "), edges.join(" "))
        }
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.brief())
    }
}
