//! Shared test helpers: seeded random generators for graphs, anchors and
//! conditions, plus the independent brute-force oracles in [`oracle`].

#![allow(dead_code)]

pub mod oracle;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use grapair_core::condition::Condition;
use grapair_core::graph::{EdgeId, Graph, Label, NodeId};
use grapair_core::morphism::Morphism;

pub fn labels(names: &[&str]) -> Vec<Label> {
    names.iter().map(|n| Label::from(*n)).collect()
}

/// Random graph with up to the given numbers of nodes and edges over the
/// shared alphabet.
pub fn gen_graph(
    rng: &mut ChaCha8Rng,
    max_nodes: usize,
    max_edges: usize,
    alphabet: &[Label],
) -> Graph {
    let n = rng.gen_range(0..=max_nodes);
    let mut g = Graph::empty();
    for i in 0..n {
        let l = alphabet[rng.gen_range(0..alphabet.len())].clone();
        g.add_node(NodeId(format!("n{i}")), l).unwrap();
    }
    if n == 0 {
        return g;
    }
    let m = rng.gen_range(0..=max_edges);
    for j in 0..m {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        let l = alphabet[rng.gen_range(0..alphabet.len())].clone();
        g.add_edge(EdgeId(format!("e{j}")), NodeId(format!("n{s}")), NodeId(format!("n{t}")), l)
            .unwrap();
    }
    g
}

/// Random id-level subgraph.
pub fn gen_subgraph(rng: &mut ChaCha8Rng, g: &Graph) -> Graph {
    let nodes: std::collections::BTreeSet<NodeId> =
        g.node_ids().filter(|_| rng.gen_bool(0.6)).cloned().collect();
    let edges: std::collections::BTreeSet<EdgeId> = g
        .edges()
        .filter(|(_, e)| nodes.contains(&e.src) && nodes.contains(&e.tgt) && rng.gen_bool(0.6))
        .map(|(id, _)| id.clone())
        .collect();
    g.subgraph(&nodes, &edges).unwrap()
}

/// Extends `base` by a few fresh items; returns the extension as a graph
/// containing `base` id-level (so `inclusion(base, ext)` is valid).
pub fn gen_extension(
    rng: &mut ChaCha8Rng,
    base: &Graph,
    extra_nodes: usize,
    extra_edges: usize,
    alphabet: &[Label],
) -> Graph {
    let mut out = base.clone();
    let mut taken = out.all_ids();
    let n = rng.gen_range(0..=extra_nodes);
    for _ in 0..n {
        let id = NodeId(Graph::fresh_id("x", &format!("n{}", rng.gen_range(0..1000)), &taken));
        taken.insert(id.0.clone());
        let l = alphabet[rng.gen_range(0..alphabet.len())].clone();
        out.add_node(id, l).unwrap();
    }
    let nodes: Vec<NodeId> = out.node_ids().cloned().collect();
    if nodes.is_empty() {
        return out;
    }
    let m = rng.gen_range(0..=extra_edges);
    for _ in 0..m {
        let id = EdgeId(Graph::fresh_id("x", &format!("e{}", rng.gen_range(0..1000)), &taken));
        taken.insert(id.0.clone());
        let s = nodes[rng.gen_range(0..nodes.len())].clone();
        let t = nodes[rng.gen_range(0..nodes.len())].clone();
        let l = alphabet[rng.gen_range(0..alphabet.len())].clone();
        out.add_edge(id, s, t, l).unwrap();
    }
    out
}

/// A proper extension (at least one fresh item).
pub fn gen_proper_extension(
    rng: &mut ChaCha8Rng,
    base: &Graph,
    alphabet: &[Label],
) -> Graph {
    loop {
        let ext = gen_extension(rng, base, 2, 2, alphabet);
        if ext.size() > base.size() {
            return ext;
        }
    }
}

/// Random condition over `ctx` with quantifier depth at most `depth`,
/// possibly using negation and conjunction.
pub fn gen_condition(
    rng: &mut ChaCha8Rng,
    ctx: &Graph,
    depth: usize,
    alphabet: &[Label],
) -> Condition {
    let roll: f64 = rng.gen();
    if depth == 0 || roll < 0.2 {
        return if rng.gen_bool(0.7) { Condition::tt(ctx.clone()) } else { Condition::ff(ctx.clone()) };
    }
    if roll < 0.65 {
        let bigger = gen_proper_extension(rng, ctx, alphabet);
        let mor = Morphism::inclusion(ctx, &bigger).unwrap();
        let sub = gen_condition(rng, &bigger, depth - 1, alphabet);
        Condition::exists(mor, sub).unwrap()
    } else if roll < 0.85 {
        Condition::not(gen_condition(rng, ctx, depth, alphabet))
    } else {
        let a = gen_condition(rng, ctx, depth - 1, alphabet);
        let b = gen_condition(rng, ctx, depth - 1, alphabet);
        Condition::and(ctx.clone(), vec![a, b]).unwrap()
    }
}

/// Random proper condition (a constraint when `ctx` is empty): one of the
/// alternating-chain shapes ending in `∃b`, or `∄b`, or `∃(a, ∄b)`, with
/// every context graph at most `max_ctx_nodes` nodes.
pub fn gen_proper_condition(
    rng: &mut ChaCha8Rng,
    ctx: &Graph,
    max_ctx_nodes: usize,
    alphabet: &[Label],
) -> Condition {
    use grapair_core::condition::Quant;
    // chain shapes: quantifier lists + tail
    let shapes: &[(&[Quant], bool)] = &[
        (&[Quant::Exists], true),
        (&[Quant::Forall, Quant::Exists], true),
        (&[Quant::Exists, Quant::Forall, Quant::Exists], true),
        (&[Quant::Forall], false),
        (&[Quant::Exists, Quant::Forall], false),
    ];
    let (quants, tail_true) = shapes[rng.gen_range(0..shapes.len())];
    let mut steps = Vec::new();
    let mut cur = ctx.clone();
    for _ in quants.iter() {
        let bigger = loop {
            let b = gen_proper_extension(rng, &cur, alphabet);
            if b.node_count() <= max_ctx_nodes {
                break b;
            }
        };
        steps.push(Morphism::inclusion(&cur, &bigger).unwrap());
        cur = bigger;
    }
    let mut c = if tail_true { Condition::tt(cur.clone()) } else { Condition::ff(cur.clone()) };
    for (q, mor) in quants.iter().zip(steps.iter()).rev() {
        c = match q {
            Quant::Exists => Condition::exists(mor.clone(), c).unwrap(),
            Quant::Forall => Condition::forall(mor.clone(), c).unwrap(),
        };
    }
    c
}

/// Picks a random mono `pattern ↪ host`, if any exists.
pub fn gen_anchor(rng: &mut ChaCha8Rng, pattern: &Graph, host: &Graph) -> Option<Morphism> {
    let mut monos = grapair_core::embedding::enumerate_monos(pattern, host);
    if monos.is_empty() {
        None
    } else {
        let i = rng.gen_range(0..monos.len());
        Some(monos.swap_remove(i))
    }
}
