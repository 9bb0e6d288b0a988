//! Bounded, deterministic enumeration of host graphs over a finite alphabet.
//!
//! Hosts are produced by increasing node count, then increasing edge count;
//! within a size class the order follows the sorted label/slot encoding. Used
//! by the bounded satisfiability check, which only ever needs "some witness or
//! give up".

use crate::graph::{EdgeId, Graph, Label, NodeId};

pub struct EnumLimits {
    pub max_nodes: usize,
    pub max_edges: usize,
    /// Cap on parallel edges with identical (source, target, label).
    pub max_parallel: usize,
    /// Hard ceiling on the number of candidate graphs emitted.
    pub max_candidates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumStatus {
    /// Every graph within the limits was emitted.
    Complete,
    /// The candidate ceiling cut the enumeration short.
    Truncated,
    /// The visitor asked to stop.
    Stopped,
}

/// Calls `visit` for every graph within the limits, smallest first.
/// `visit` returning `true` stops the enumeration.
pub fn for_each_host<F>(
    node_labels: &[Label],
    edge_labels: &[Label],
    limits: &EnumLimits,
    mut visit: F,
) -> EnumStatus
where
    F: FnMut(&Graph) -> bool,
{
    let mut emitted = 0usize;
    for n in 0..=limits.max_nodes {
        if n > 0 && node_labels.is_empty() {
            break;
        }
        let mut labelings = Vec::new();
        label_multisets(node_labels, n, &mut Vec::new(), &mut labelings);
        for labeling in labelings {
            let mut base = Graph::empty();
            for (i, l) in labeling.iter().enumerate() {
                base.add_node(NodeId(format!("v{}", i + 1)), l.clone()).unwrap();
            }
            // All (src, tgt, label) slots in deterministic order.
            let nodes: Vec<NodeId> = base.node_ids().cloned().collect();
            let mut slots = Vec::new();
            for s in &nodes {
                for t in &nodes {
                    for l in edge_labels {
                        slots.push((s.clone(), t.clone(), l.clone()));
                    }
                }
            }
            let status = fill_edges(
                &base,
                &slots,
                0,
                limits.max_edges,
                limits.max_parallel,
                limits.max_candidates,
                &mut emitted,
                &mut visit,
            );
            match status {
                EnumStatus::Complete => {}
                other => return other,
            }
        }
    }
    EnumStatus::Complete
}

fn label_multisets(labels: &[Label], n: usize, acc: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
    if n == 0 {
        out.push(acc.clone());
        return;
    }
    let start = acc.last().map(|l| labels.iter().position(|x| x == l).unwrap()).unwrap_or(0);
    for l in &labels[start..] {
        acc.push(l.clone());
        label_multisets(labels, n - 1, acc, out);
        acc.pop();
    }
}

#[allow(clippy::too_many_arguments)]
fn fill_edges<F>(
    g: &Graph,
    slots: &[(NodeId, NodeId, Label)],
    idx: usize,
    budget: usize,
    max_parallel: usize,
    max_candidates: usize,
    emitted: &mut usize,
    visit: &mut F,
) -> EnumStatus
where
    F: FnMut(&Graph) -> bool,
{
    if idx == slots.len() {
        if *emitted >= max_candidates {
            return EnumStatus::Truncated;
        }
        *emitted += 1;
        if visit(g) {
            return EnumStatus::Stopped;
        }
        return EnumStatus::Complete;
    }
    let (src, tgt, label) = &slots[idx];
    let mut current = g.clone();
    for k in 0..=max_parallel.min(budget) {
        if k > 0 {
            let id = EdgeId(format!("e{}", current.edge_count() + 1));
            current.add_edge(id, src.clone(), tgt.clone(), label.clone()).unwrap();
        }
        let status = fill_edges(
            &current,
            slots,
            idx + 1,
            budget - k,
            max_parallel,
            max_candidates,
            emitted,
            visit,
        );
        match status {
            EnumStatus::Complete => {}
            other => return other,
        }
    }
    EnumStatus::Complete
}
