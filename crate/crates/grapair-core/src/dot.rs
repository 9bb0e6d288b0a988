//! DOT export for graphs and step traces.

use crate::graph::Graph;
use crate::rules::DirectTransformation;

/// Renders a graph as a DOT digraph, items in id order.
pub fn graph_to_dot(g: &Graph, name: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph \"{name}\" {{\n"));
    for (id, label) in g.nodes() {
        out.push_str(&format!("  \"{id}\" [label=\"{id}:{label}\"];\n"));
    }
    for (id, e) in g.edges() {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"{}:{}\"];\n",
            e.src, e.tgt, id, e.label
        ));
    }
    out.push_str("}\n");
    out
}

/// DOT files for a trace: the start graph followed by each step result,
/// deleted dangling edges noted in a comment.
pub fn trace_to_dot(start: &Graph, steps: &[DirectTransformation]) -> Vec<(String, String)> {
    let mut out = vec![("step_000.dot".to_string(), graph_to_dot(start, "start"))];
    for (k, s) in steps.iter().enumerate() {
        let mut dot = graph_to_dot(&s.result, &format!("after {}", s.rule.name));
        if !s.deleted_dangling.is_empty() {
            let ids: Vec<String> = s.deleted_dangling.iter().map(|e| e.to_string()).collect();
            dot.push_str(&format!("// dangling edges removed: {}\n", ids.join(", ")));
        }
        out.push((format!("step_{:03}.dot", k + 1), dot));
    }
    out
}
