//! Repair-program synthesis for proper conditions.
//!
//! For a basic condition `∃a` or `∄a` (with `a: A ↪ C`, `A ⊂ C`) a repairing
//! set is an `A`-interfaced rule set whose try-closure (for `∃`) or
//! delete-iterate (for `∄`) repairs the condition. Two constructions are
//! provided:
//!
//! - **v1**: the single completion rule `A ⇒ C` (resp. the single demolition
//!   rule `C ⇒ A`). Simple, but the resulting programs are in general neither
//!   terminating nor maximally preserving.
//! - **v2**: one increasing rule `B ⇒ C` per intermediate `A ⊆ B ⊂ C`,
//!   guarded so that it fires only when the condition is violated and `B` is
//!   a largest existing partial occurrence (resp. decreasing rules `C ⇒ B`
//!   that delete exactly one edge while edges remain above `A`'s, else
//!   exactly one isolated node). Terminating and maximally preserving.
//!
//! The full synthesis recurses over the alternating-quantifier chain of a
//! proper condition: `true ↦ Skip`, `∃a ↦ try R_a`, `∄a ↦ (S′_a)↓`,
//! `∃(a, c) ↦ P_∃a; ⟨select(a); P_c; unselect(a)⟩` and
//! `∀(a, c) ↦ ⟨select(a, ¬c); P_c; unselect(a)⟩↓`.
//!
//! `delta` computes the inductive bound on necessary deletions and
//! `preservation_report` checks `preserved ≥ size(G) − Δ(g, d)` against the
//! composed track morphism of a run.

use std::collections::BTreeSet;
use std::fmt;

use crate::condition::{classify, simplify, to_anf, view, ChainView, Condition, Quant};
use crate::embedding::{extensions, iso_with_pins, monos_with_pins};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::morphism::Morphism;
use crate::program::{Outcome, Program};
use crate::rules::{track_of_trace, DanglingMode, PlainRule, Rule, Span};
use crate::shift::shift;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    V1,
    V2,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::V1 => write!(f, "v1"),
            Variant::V2 => write!(f, "v2"),
        }
    }
}

/// A basic condition, carried as its proper inclusion `a: A ↪ C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasicTarget {
    Exists(Morphism),
    NotExists(Morphism),
}

impl BasicTarget {
    pub fn from_condition(c: &Condition) -> Result<BasicTarget> {
        let v = view(c)?;
        match (v.steps.as_slice(), v.tail_true) {
            ([(Quant::Exists, a)], true) => Ok(BasicTarget::Exists(a.clone())),
            ([(Quant::Forall, a)], false) => Ok(BasicTarget::NotExists(a.clone())),
            _ => Err(Error::NonBasic(format!("{c}"))),
        }
    }

    pub fn inclusion(&self) -> &Morphism {
        match self {
            BasicTarget::Exists(a) | BasicTarget::NotExists(a) => a,
        }
    }

    /// The interface graph `A` all rules of a repairing set share.
    pub fn interface(&self) -> &Graph {
        self.inclusion().dom()
    }

    pub fn as_condition(&self) -> Condition {
        match self {
            BasicTarget::Exists(a) => Condition::exists_plain(a.clone()).expect("target is valid"),
            BasicTarget::NotExists(a) => {
                Condition::nexists_plain(a.clone()).expect("target is valid")
            }
        }
    }
}

impl fmt::Display for BasicTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_condition())
    }
}

/// An `A`-interfaced rule set repairing a basic condition.
#[derive(Debug, Clone)]
pub struct RepairingSet {
    pub target: BasicTarget,
    pub rules: Vec<Rule>,
    /// `None` for unions of differently constructed sets.
    pub variant: Option<Variant>,
}

impl RepairingSet {
    /// The repair program this set induces: `try {rules}` for `∃a`,
    /// `({primed rules})↓` for `∄a`.
    pub fn repair_fragment(&self) -> Program {
        match self.target {
            BasicTarget::Exists(_) => Program::try_(Program::choice(
                self.rules.iter().cloned().map(Program::call).collect(),
            )),
            BasicTarget::NotExists(_) => Program::iterate(Program::choice(
                self.rules.iter().map(|r| Program::call(r.primed())).collect(),
            )),
        }
    }
}

impl fmt::Display for RepairingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "repairing set for {} ({} rules):", self.target, self.rules.len())?;
        for r in &self.rules {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

fn require_proper_target(target: &BasicTarget) -> Result<(&Graph, &Graph)> {
    let a = target.inclusion();
    if !a.is_proper_inclusion() {
        return Err(Error::NotProperInclusion(format!(
            "{} into {}",
            a.dom().brief(),
            a.cod().brief()
        )));
    }
    Ok((a.dom(), a.cod()))
}

/// The singleton completion/demolition set.
pub fn repairing_set_v1(target: &BasicTarget) -> Result<RepairingSet> {
    let (a_graph, c_graph) = require_proper_target(target)?;
    let a = target.inclusion();
    let rule = match target {
        BasicTarget::Exists(_) => Rule::new(
            "add",
            Morphism::identity(a_graph),
            PlainRule::new("add", Span::from_graphs(a_graph, a_graph, c_graph)?),
            Condition::tt(a_graph.clone()),
            a.clone(),
            DanglingMode::Standard,
        )?,
        BasicTarget::NotExists(_) => Rule::new(
            "del",
            a.clone(),
            PlainRule::new("del", Span::from_graphs(c_graph, a_graph, a_graph)?),
            Condition::tt(c_graph.clone()),
            Morphism::identity(a_graph),
            DanglingMode::Standard,
        )?,
    };
    Ok(RepairingSet { target: target.clone(), rules: vec![rule], variant: Some(Variant::V1) })
}

/// The guarded, maximally preserving set: one rule per intermediate graph.
pub fn repairing_set_v2(target: &BasicTarget) -> Result<RepairingSet> {
    let (a_graph, c_graph) = require_proper_target(target)?;
    let a = target.inclusion();
    let rules = match target {
        BasicTarget::Exists(_) => {
            let mut rules = Vec::new();
            for (i, b_graph) in intermediates(a_graph, c_graph)?.into_iter().enumerate() {
                let b = Morphism::inclusion(a_graph, &b_graph)?;
                let shifted = shift(&b, &Condition::nexists_plain(a.clone())?)?;
                let mut conjuncts = nexists_conjuncts(&simplify(&shifted))
                    .ok_or_else(|| Error::InvalidRule("unexpected shift shape".into()))?;
                for sup in strict_supergraphs_within(&b_graph, c_graph)? {
                    conjuncts.push(Morphism::inclusion(&b_graph, &sup)?);
                }
                let ac = nexists_conjunction(&b_graph, prune_nexists(conjuncts))?;
                rules.push(Rule::new(
                    format!("add{}", i + 1),
                    b.clone(),
                    PlainRule::new(
                        format!("add{}", i + 1),
                        Span::from_graphs(&b_graph, &b_graph, c_graph)?,
                    ),
                    ac,
                    a.clone(),
                    DanglingMode::Standard,
                )?);
            }
            rules
        }
        BasicTarget::NotExists(_) => {
            let mut bs: Vec<Graph> = Vec::new();
            let extra_edges: Vec<EdgeId> =
                c_graph.edge_ids().filter(|e| !a_graph.has_edge(e)).cloned().collect();
            if !extra_edges.is_empty() {
                // delete exactly one edge, keep all nodes
                for e in &extra_edges {
                    let nodes: BTreeSet<NodeId> = c_graph.node_ids().cloned().collect();
                    let edges: BTreeSet<EdgeId> =
                        c_graph.edge_ids().filter(|x| *x != e).cloned().collect();
                    bs.push(c_graph.subgraph(&nodes, &edges)?);
                }
            } else {
                // no removable edge: delete exactly one isolated extra node
                for v in c_graph.node_ids() {
                    if a_graph.has_node(v) || c_graph.incident_edge_count(v) > 0 {
                        continue;
                    }
                    let nodes: BTreeSet<NodeId> =
                        c_graph.node_ids().filter(|x| *x != v).cloned().collect();
                    let edges: BTreeSet<EdgeId> = c_graph.edge_ids().cloned().collect();
                    bs.push(c_graph.subgraph(&nodes, &edges)?);
                }
            }
            bs.into_iter()
                .enumerate()
                .map(|(i, b_graph)| {
                    Rule::new(
                        format!("del{}", i + 1),
                        a.clone(),
                        PlainRule::new(
                            format!("del{}", i + 1),
                            Span::from_graphs(c_graph, &b_graph, &b_graph)?,
                        ),
                        Condition::tt(c_graph.clone()),
                        Morphism::inclusion(a_graph, &b_graph)?,
                        DanglingMode::Standard,
                    )
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(RepairingSet { target: target.clone(), rules, variant: Some(Variant::V2) })
}

/// All id-level subgraphs `B` of `C` with `A ⊆ B ⊂ C`, smallest first.
fn intermediates(a: &Graph, c: &Graph) -> Result<Vec<Graph>> {
    let extra_nodes: Vec<NodeId> = c.node_ids().filter(|n| !a.has_node(n)).cloned().collect();
    let extra_edges: Vec<EdgeId> = c.edge_ids().filter(|e| !a.has_edge(e)).cloned().collect();
    let mut out = Vec::new();
    for node_subset in subsets(&extra_nodes) {
        let nodes: BTreeSet<NodeId> =
            a.node_ids().cloned().chain(node_subset.iter().cloned()).collect();
        let available: Vec<EdgeId> = extra_edges
            .iter()
            .filter(|e| {
                let edge = c.edge(e).unwrap();
                nodes.contains(&edge.src) && nodes.contains(&edge.tgt)
            })
            .cloned()
            .collect();
        for edge_subset in subsets(&available) {
            let edges: BTreeSet<EdgeId> =
                a.edge_ids().cloned().chain(edge_subset.iter().cloned()).collect();
            let b = c.subgraph(&nodes, &edges)?;
            if b.size() < c.size() {
                out.push(b);
            }
        }
    }
    out.sort_by_key(|b| (b.size(), b.brief()));
    Ok(out)
}

/// All id-level `B′` with `B ⊂ B′ ⊆ C`.
fn strict_supergraphs_within(b: &Graph, c: &Graph) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for candidate in intermediates(b, c)? {
        if candidate.size() > b.size() {
            out.push(candidate);
        }
    }
    out.push(c.clone());
    out.sort_by_key(|g| (g.size(), g.brief()));
    Ok(out)
}

fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for item in items {
        let mut extended = Vec::new();
        for s in &out {
            let mut t = s.clone();
            t.push(item.clone());
            extended.push(t);
        }
        out.extend(extended);
    }
    out
}

/// Reads a conjunction of plain non-existence conditions `⋀ ∄(B ↪ Eᵢ)` off a
/// simplified condition; `None` if it has any other shape.
fn nexists_conjuncts(c: &Condition) -> Option<Vec<Morphism>> {
    use crate::condition::Body;
    match c.body() {
        Body::True => Some(Vec::new()),
        Body::Not(sub) => match sub.body() {
            Body::Exists { mor, sub: inner } if inner.is_true() => Some(vec![mor.clone()]),
            _ => None,
        },
        Body::And(subs) => {
            let mut out = Vec::new();
            for s in subs {
                out.extend(nexists_conjuncts(s)?);
            }
            Some(out)
        }
        Body::Exists { .. } => None,
    }
}

/// Deduplicates (up to isomorphism over the shared context) and drops
/// conjuncts implied by a smaller one: a context-preserving mono `Eᵢ ↪ Eⱼ`
/// makes `∄Eᵢ` imply `∄Eⱼ`.
fn prune_nexists(conjuncts: Vec<Morphism>) -> Vec<Morphism> {
    let mut kept: Vec<Morphism> = Vec::new();
    for m in conjuncts {
        let duplicate = kept.iter().any(|k| {
            let node_pins = m.node_map().iter().map(|(a, b)| (b.clone(), k.node_map()[a].clone())).collect();
            let edge_pins = m.edge_map().iter().map(|(a, b)| (b.clone(), k.edge_map()[a].clone())).collect();
            iso_with_pins(m.cod(), k.cod(), &node_pins, &edge_pins).is_some()
        });
        if !duplicate {
            kept.push(m);
        }
    }
    let implied: Vec<bool> = kept
        .iter()
        .map(|big| {
            kept.iter().any(|small| {
                if small.cod().size() >= big.cod().size() {
                    return false;
                }
                let node_pins = small
                    .node_map()
                    .iter()
                    .map(|(a, b)| (b.clone(), big.node_map()[a].clone()))
                    .collect();
                let edge_pins = small
                    .edge_map()
                    .iter()
                    .map(|(a, b)| (b.clone(), big.edge_map()[a].clone()))
                    .collect();
                !monos_with_pins(small.cod(), big.cod(), &node_pins, &edge_pins).is_empty()
            })
        })
        .collect();
    kept.into_iter().zip(implied).filter(|(_, dead)| !dead).map(|(m, _)| m).collect()
}

fn nexists_conjunction(ctx: &Graph, conjuncts: Vec<Morphism>) -> Result<Condition> {
    let mut parts = Vec::new();
    for m in conjuncts {
        parts.push(Condition::nexists_plain(m)?);
    }
    match parts.len() {
        0 => Ok(Condition::tt(ctx.clone())),
        1 => Ok(parts.remove(0)),
        _ => Condition::and(ctx.clone(), parts),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionMode {
    /// Both sets repair the same basic condition.
    SameTarget,
    /// Re-anchor the second set through a prefix `b`, for targets
    /// `∃a`/`∃c` (resp. `∄`) with `a = c ∘ b`.
    Prefix,
}

/// Fact-style composition of repairing sets.
pub fn union_repairing(
    r1: &RepairingSet,
    r2: &RepairingSet,
    mode: UnionMode,
    prefix: Option<&Morphism>,
) -> Result<RepairingSet> {
    let kind_match = matches!(
        (&r1.target, &r2.target),
        (BasicTarget::Exists(_), BasicTarget::Exists(_))
            | (BasicTarget::NotExists(_), BasicTarget::NotExists(_))
    );
    if !kind_match {
        return Err(Error::IncompatibleTargets("∃ and ∄ targets cannot be united".into()));
    }
    let mut rules = r1.rules.clone();
    match mode {
        UnionMode::SameTarget => {
            if r1.target.inclusion() != r2.target.inclusion() {
                return Err(Error::IncompatibleTargets("targets differ".into()));
            }
            for r in &r2.rules {
                if !rules.contains(r) {
                    rules.push(r.clone());
                }
            }
        }
        UnionMode::Prefix => {
            let b = prefix
                .ok_or_else(|| Error::IncompatibleTargets("prefix mode needs a morphism".into()))?;
            let a = r1.target.inclusion();
            let c = r2.target.inclusion();
            if b.dom() != a.dom() || b.cod() != c.dom() || &b.then(c)? != a {
                return Err(Error::IncompatibleTargets(
                    "prefix must factor the first target through the second".into(),
                ));
            }
            for r in &r2.rules {
                if r.left_interface() != c.dom() || r.right_interface() != c.dom() {
                    return Err(Error::IncompatibleTargets(
                        "second set is not interfaced by its target context".into(),
                    ));
                }
                let re = Rule::new(
                    format!("{}@prefix", r.name),
                    b.then(r.x())?,
                    r.plain().clone(),
                    r.ac().clone(),
                    b.then(r.y())?,
                    r.mode,
                )?;
                if !rules.contains(&re) {
                    rules.push(re);
                }
            }
        }
    }
    let variant = if r1.variant == r2.variant { r1.variant } else { None };
    Ok(RepairingSet { target: r1.target.clone(), rules, variant })
}

/// Normalizes to ANF and requires a proper condition; returns the chain view.
pub fn proper_view(d: &Condition) -> Result<ChainView> {
    let normalized = to_anf(&simplify(d))?;
    let cls = classify(&normalized);
    if !cls.proper {
        return Err(Error::NonProper(format!("{d}")));
    }
    view(&normalized)
}

/// Synthesizes the repair program for a proper condition.
pub fn repair_program(d: &Condition, variant: Variant) -> Result<Program> {
    let v = proper_view(d)?;
    Ok(synthesize(&v.steps, v.tail_true, variant, &mut Vec::new())?)
}

/// The repairing sets the synthesis for `d` draws on, in construction order.
pub fn repairing_sets_of(d: &Condition, variant: Variant) -> Result<Vec<RepairingSet>> {
    let v = proper_view(d)?;
    let mut sets = Vec::new();
    synthesize(&v.steps, v.tail_true, variant, &mut sets)?;
    Ok(sets)
}

/// Builds the program and a substitution-ready list of its repairing sets.
pub fn repair_program_with_sets(
    d: &Condition,
    variant: Variant,
) -> Result<(Program, Vec<RepairingSet>)> {
    let v = proper_view(d)?;
    let mut sets = Vec::new();
    let p = synthesize(&v.steps, v.tail_true, variant, &mut sets)?;
    Ok((p, sets))
}

fn synthesize(
    steps: &[(Quant, Morphism)],
    tail_true: bool,
    variant: Variant,
    sets: &mut Vec<RepairingSet>,
) -> Result<Program> {
    let make_set = |target: BasicTarget, sets: &mut Vec<RepairingSet>| -> Result<RepairingSet> {
        let set = match variant {
            Variant::V1 => repairing_set_v1(&target)?,
            Variant::V2 => repairing_set_v2(&target)?,
        };
        sets.push(set.clone());
        Ok(set)
    };
    match (steps, tail_true) {
        ([], true) => Ok(Program::Skip),
        ([], false) => Err(Error::NonProper("false has no repair program".into())),
        ([(Quant::Exists, a)], true) => {
            let set = make_set(BasicTarget::Exists(a.clone()), sets)?;
            Ok(set.repair_fragment())
        }
        ([(Quant::Forall, a)], false) => {
            let set = make_set(BasicTarget::NotExists(a.clone()), sets)?;
            Ok(set.repair_fragment())
        }
        ([(Quant::Exists, a), rest @ ..], _) => {
            let set = make_set(BasicTarget::Exists(a.clone()), sets)?;
            let inner = synthesize(rest, tail_true, variant, sets)?;
            Ok(Program::seq_all(vec![
                set.repair_fragment(),
                Program::call(Rule::select(a.clone(), Condition::tt(a.cod().clone()))?),
                inner,
                Program::call(Rule::unselect(a.clone())?),
            ]))
        }
        ([(Quant::Forall, a), rest @ ..], _) => {
            let sub_view = ChainView {
                ctx: a.cod().clone(),
                steps: rest.to_vec(),
                tail_true,
            };
            let guard = crate::condition::rebuild(&sub_view.negated());
            let inner = synthesize(rest, tail_true, variant, sets)?;
            Ok(Program::iterate(Program::seq_all(vec![
                Program::call(Rule::select(a.clone(), guard)?),
                inner,
                Program::call(Rule::unselect(a.clone())?),
            ])))
        }
    }
}

/// The inductive bound on necessary deletions for a proper condition at an
/// anchor `g: A ↪ G`.
pub fn delta(g: &Morphism, d: &Condition) -> Result<usize> {
    let v = proper_view(d)?;
    if &v.ctx != g.dom() {
        return Err(Error::ContextMismatch("delta anchor must match the condition context".into()));
    }
    delta_view(g, &v.steps, v.tail_true)
}

fn delta_view(g: &Morphism, steps: &[(Quant, Morphism)], tail_true: bool) -> Result<usize> {
    match (steps, tail_true) {
        ([], _) => Ok(0),
        ([(Quant::Exists, _)], true) => Ok(0),
        ([(Quant::Forall, a)], false) => {
            let mut total = 0;
            for ext in extensions(g, a)? {
                total += 1 + dangling_bound(&ext, a);
            }
            Ok(total)
        }
        ([(Quant::Exists, a), rest @ ..], _) => {
            let exts = extensions(g, a)?;
            if exts.is_empty() {
                // No occurrence to extend: the repair creates one first and
                // deeper repairs run against material the recursion over G
                // cannot see. The maximum over an empty family is undefined;
                // resolve it as the trivial upper bound (the whole host).
                return Ok(g.cod().size());
            }
            let mut best = 0;
            for ext in exts {
                best = best.max(delta_view(&ext, rest, tail_true)?);
            }
            Ok(best)
        }
        ([(Quant::Forall, a), rest @ ..], _) => {
            let mut total = 0;
            for ext in extensions(g, a)? {
                total += delta_view(&ext, rest, tail_true)?;
            }
            Ok(total)
        }
    }
}

/// `dang(g′)` for `g′: C ↪ G` extending an `A`-anchor along `a: A ↪ C`:
/// zero when `C − A` contains an edge (repair deletes that edge first),
/// otherwise the worst incident-edge count among the images of the nodes of
/// `C − A`.
fn dangling_bound(ext: &Morphism, a: &Morphism) -> usize {
    let c = a.cod();
    let a_graph = a.dom();
    let has_extra_edge = c.edge_ids().any(|e| !a_graph.has_edge(e));
    if has_extra_edge {
        return 0;
    }
    let host = ext.cod();
    c.node_ids()
        .filter(|n| !a_graph.has_node(n))
        .map(|n| host.incident_edge_count(&ext.node_map()[n]))
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationReport {
    /// Items of the start graph in the domain of the composed track morphism.
    pub preserved: usize,
    pub size_g: usize,
    pub delta: usize,
    /// `preserved ≥ size_g − delta`.
    pub bound_holds: bool,
}

/// Evaluates the preservation bound of one run against a proper condition.
pub fn preservation_report(outcome: &Outcome, d: &Condition) -> Result<PreservationReport> {
    let start = outcome.g.cod();
    let track = track_of_trace(start, &outcome.trace)?;
    let preserved = track.defined_count();
    let size_g = start.size();
    let delta = delta(&outcome.g, d)?;
    Ok(PreservationReport { preserved, size_g, delta, bound_holds: preserved + delta >= size_g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::{satisfies, Body};
    use crate::embedding::is_isomorphic;
    use crate::program::{run_all, Budget};

    fn g(s: &str) -> Graph {
        Graph::parse_brief(s).unwrap()
    }

    fn incl(a: &Graph, c: &Graph) -> Morphism {
        Morphism::inclusion(a, c).unwrap()
    }

    fn one_edge_target() -> BasicTarget {
        // ∃(•1 ↪ •1→•2)
        BasicTarget::Exists(incl(&g("1"), &g("1 2; e:1->2")))
    }

    fn two_cycle_target() -> BasicTarget {
        // ∄(•1 ↪ 2-cycle)
        BasicTarget::NotExists(incl(&g("1"), &g("1 2; e:1->2 f:2->1")))
    }

    #[test]
    fn v1_exists_is_the_single_completion_rule() {
        let set = repairing_set_v1(&one_edge_target()).unwrap();
        assert_eq!(set.rules.len(), 1);
        let r = &set.rules[0];
        assert_eq!(r.plain().lhs(), &g("1"));
        assert_eq!(r.plain().rhs(), &g("1 2; e:1->2"));
        assert!(r.ac().is_true());
        assert_eq!(r.left_interface(), &g("1"));
        assert_eq!(r.right_interface(), &g("1"));
    }

    #[test]
    fn v1_nexists_is_the_single_demolition_rule() {
        let set = repairing_set_v1(&two_cycle_target()).unwrap();
        assert_eq!(set.rules.len(), 1);
        let r = &set.rules[0];
        assert_eq!(r.plain().lhs().edge_count(), 2);
        assert_eq!(r.plain().rhs(), &g("1"));
    }

    #[test]
    fn v1_rejects_identity_targets() {
        let t = BasicTarget::Exists(Morphism::identity(&g("1")));
        assert!(matches!(repairing_set_v1(&t), Err(Error::NotProperInclusion(_))));
    }

    #[test]
    fn v2_exists_reproduces_the_two_guarded_rules() {
        let set = repairing_set_v2(&one_edge_target()).unwrap();
        assert_eq!(set.rules.len(), 2);

        // Rule 1: •1 ⇒ •1→•2 guarded by "no second node".
        let r1 = &set.rules[0];
        assert_eq!(r1.plain().lhs(), &g("1"));
        match r1.ac().body() {
            Body::Not(sub) => match sub.body() {
                Body::Exists { mor, .. } => {
                    assert!(is_isomorphic(mor.cod(), &g("1 2")).is_some());
                }
                other => panic!("unexpected guard {other:?}"),
            },
            other => panic!("unexpected guard {other:?}"),
        }

        // Rule 2: •1 •2 ⇒ •1→•2 guarded by "no 1→2 edge, no outgoing edge at 1".
        let r2 = &set.rules[1];
        assert_eq!(r2.plain().lhs(), &g("1 2"));
        match r2.ac().body() {
            Body::And(subs) => {
                assert_eq!(subs.len(), 2);
                let shapes: Vec<(usize, usize)> = subs
                    .iter()
                    .map(|s| match s.body() {
                        Body::Not(sub) => match sub.body() {
                            Body::Exists { mor, .. } => {
                                (mor.cod().node_count(), mor.cod().edge_count())
                            }
                            _ => panic!("unexpected conjunct"),
                        },
                        _ => panic!("unexpected conjunct"),
                    })
                    .collect();
                assert!(shapes.contains(&(2, 1)), "∄(1→2): {shapes:?}");
                assert!(shapes.contains(&(3, 1)), "∄(1→fresh with 2 apart): {shapes:?}");
            }
            other => panic!("expected a two-part conjunction, got {other:?}"),
        }
    }

    #[test]
    fn v2_nexists_deletes_one_edge_at_a_time() {
        let set = repairing_set_v2(&two_cycle_target()).unwrap();
        // one rule per deletable edge; the paper displays one representative
        assert_eq!(set.rules.len(), 2);
        for r in &set.rules {
            assert_eq!(r.plain().lhs().edge_count(), 2);
            assert_eq!(r.plain().rhs().edge_count(), 1);
            assert_eq!(r.plain().rhs().node_count(), 2);
        }
        // both rules share one unanchored result shape
        assert!(is_isomorphic(set.rules[0].plain().rhs(), set.rules[1].plain().rhs()).is_some());
    }

    #[test]
    fn v2_nexists_without_extra_edges_deletes_an_isolated_node() {
        let t = BasicTarget::NotExists(incl(&g("1"), &g("1 2")));
        let set = repairing_set_v2(&t).unwrap();
        assert_eq!(set.rules.len(), 1);
        assert_eq!(set.rules[0].plain().rhs(), &g("1"));
    }

    #[test]
    fn intermediate_enumeration_for_single_extra_edge() {
        // a: two nodes ↪ two nodes + edge: exactly one intermediate (B = A),
        // hence exactly one completion rule.
        let t = BasicTarget::Exists(incl(&g("1 2"), &g("1 2; e:1->2")));
        let set = repairing_set_v2(&t).unwrap();
        assert_eq!(set.rules.len(), 1);
    }

    #[test]
    fn union_same_target_merges_rules() {
        let t = one_edge_target();
        let a = repairing_set_v1(&t).unwrap();
        let b = repairing_set_v2(&t).unwrap();
        let u = union_repairing(&a, &b, UnionMode::SameTarget, None).unwrap();
        assert_eq!(u.rules.len(), 3);
        assert_eq!(u.variant, None);
    }

    #[test]
    fn union_rejects_mixed_kinds() {
        let a = repairing_set_v1(&one_edge_target()).unwrap();
        let b = repairing_set_v1(&two_cycle_target()).unwrap();
        assert!(union_repairing(&a, &b, UnionMode::SameTarget, None).is_err());
    }

    #[test]
    fn union_prefix_with_identity_is_plain_union() {
        // a = c ∘ id: re-interfacing through the identity is a no-op.
        let t = one_edge_target();
        let s1 = repairing_set_v1(&t).unwrap();
        let s2 = repairing_set_v2(&t).unwrap();
        let id = Morphism::identity(&g("1"));
        let u = union_repairing(&s1, &s2, UnionMode::Prefix, Some(&id)).unwrap();
        // same rules up to the renaming of the re-interfaced copies
        assert_eq!(u.rules.len(), 3);
        for (a, b) in u.rules[1..].iter().zip(&s2.rules) {
            assert_eq!(a.plain(), b.plain());
            assert_eq!(a.x(), b.x());
            assert_eq!(a.y(), b.y());
        }
    }

    #[test]
    fn repair_program_for_true_is_skip() {
        let p = repair_program(&Condition::tt(Graph::empty()), Variant::V2).unwrap();
        assert_eq!(p, Program::Skip);
    }

    #[test]
    fn repair_program_shape_for_exists_nexists() {
        // ∃(•1, ∄ 2-cycle) ↦ ⟨try R_a; ⟨select(a); (S′_b)↓; unselect(a)⟩⟩
        let one = g("1");
        let cyc = g("1 2; e:1->2 f:2->1");
        let d = Condition::exists(
            incl(&Graph::empty(), &one),
            Condition::nexists_plain(incl(&one, &cyc)).unwrap(),
        )
        .unwrap();
        let p = repair_program(&d, Variant::V2).unwrap();
        match &p {
            Program::Seq(first, rest) => {
                assert!(matches!(**first, Program::Try(_)));
                match &**rest {
                    Program::Seq(sel, rest2) => {
                        assert!(matches!(**sel, Program::Call(ref r) if r.name == "select"));
                        match &**rest2 {
                            Program::Seq(iter, uns) => {
                                assert!(matches!(**iter, Program::Iterate(_)));
                                assert!(
                                    matches!(**uns, Program::Call(ref r) if r.name == "unselect")
                                );
                            }
                            other => panic!("unexpected {other}"),
                        }
                    }
                    other => panic!("unexpected {other}"),
                }
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn repair_program_repairs_forall_outgoing_on_a_path() {
        // ∀(•1, ∃ real outgoing edge) on the 3-node path: the sink gets an
        // outgoing edge back into the path; every outcome satisfies d.
        let one = g("1");
        let edge = g("1 2; e:1->2");
        let d = Condition::forall(
            incl(&Graph::empty(), &one),
            Condition::exists_plain(incl(&one, &edge)).unwrap(),
        )
        .unwrap();
        let p = repair_program(&d, Variant::V2).unwrap();
        let path = g("u v w; p:u->v q:v->w");
        let anchor = Morphism::inclusion(&Graph::empty(), &path).unwrap();
        let got = run_all(&p, &anchor, &Budget::default()).unwrap();
        assert!(!got.exhausted);
        assert!(!got.outcomes.is_empty());
        for o in &got.outcomes {
            assert!(crate::condition::graph_satisfies(o.result(), &d).unwrap());
            // repairs by adding a single edge, not by growing nodes
            assert_eq!(o.result().node_count(), 3);
            assert_eq!(o.result().edge_count(), 3);
        }
    }

    #[test]
    fn repair_program_rejects_non_proper() {
        let d = Condition::ff(Graph::empty());
        assert!(matches!(repair_program(&d, Variant::V2), Err(Error::NonProper(_))));
    }

    #[test]
    fn delta_of_true_and_exists_is_zero() {
        let host = g("a b; e:a->b");
        let anchor = Morphism::inclusion(&Graph::empty(), &host).unwrap();
        assert_eq!(delta(&anchor, &Condition::tt(Graph::empty())).unwrap(), 0);
        let d =
            Condition::exists_plain(incl(&Graph::empty(), &g("1 2; e:1->2"))).unwrap();
        assert_eq!(delta(&anchor, &d).unwrap(), 0);
    }

    #[test]
    fn delta_counts_one_per_extension_plus_dangling() {
        // ∄(• → •) on a single-edge host: one extension, edge inside the
        // pattern, so Δ = 1.
        let host = g("a b; e:a->b");
        let anchor = Morphism::inclusion(&Graph::empty(), &host).unwrap();
        let d = Condition::nexists_plain(incl(&Graph::empty(), &g("1 2; e:1->2"))).unwrap();
        assert_eq!(delta(&anchor, &d).unwrap(), 1);
    }

    #[test]
    fn delta_dangling_counts_incident_edges() {
        // ∄(hub node) where the hub has three incident edges: deleting it
        // costs 1 + 3.
        let host = g("h:hub a b c; p:h->a q:b->h r:h->c");
        let anchor = Morphism::inclusion(&Graph::empty(), &host).unwrap();
        let d = Condition::nexists_plain(incl(&Graph::empty(), &g("1:hub"))).unwrap();
        assert_eq!(delta(&anchor, &d).unwrap(), 4);
    }

    #[test]
    fn preservation_skip_outcome_preserves_everything() {
        let host = g("a b; e:a->b");
        let anchor = Morphism::inclusion(&Graph::empty(), &host).unwrap();
        let got = run_all(&Program::Skip, &anchor, &Budget::default()).unwrap();
        let rep =
            preservation_report(&got.outcomes[0], &Condition::tt(Graph::empty())).unwrap();
        assert_eq!(rep.preserved, host.size());
        assert!(rep.bound_holds);
    }

    #[test]
    fn preservation_v2_bound_is_tight_on_two_cycle() {
        // anchored ∄(•1 ↪ 2-cycle) on a 2-cycle host: Δ = 1 and the v2 run
        // deletes exactly one edge.
        let one = g("1");
        let cyc = g("1 2; e:1->2 f:2->1");
        let d = Condition::nexists_plain(incl(&one, &cyc)).unwrap();
        let host = g("u v; p:u->v q:v->u");
        let anchor = monos_with_pins(
            &one,
            &host,
            &[(NodeId::from("1"), NodeId::from("u"))].into(),
            &Default::default(),
        )
        .remove(0);
        assert_eq!(delta(&anchor, &d).unwrap(), 1);
        let p = repair_program(&d, Variant::V2).unwrap();
        let got = run_all(&p, &anchor, &Budget::default()).unwrap();
        assert!(!got.outcomes.is_empty());
        for o in &got.outcomes {
            let rep = preservation_report(o, &d).unwrap();
            assert_eq!(rep.preserved, rep.size_g - 1);
            assert!(rep.bound_holds);
            assert!(satisfies(&o.h.then(&Morphism::identity(o.result())).unwrap(), &d).is_ok());
        }
    }

    #[test]
    fn preservation_v1_violates_the_bound_on_two_cycle() {
        let one = g("1");
        let cyc = g("1 2; e:1->2 f:2->1");
        let d = Condition::nexists_plain(incl(&one, &cyc)).unwrap();
        let host = g("u v; p:u->v q:v->u");
        let anchor = monos_with_pins(
            &one,
            &host,
            &[(NodeId::from("1"), NodeId::from("u"))].into(),
            &Default::default(),
        )
        .remove(0);
        let p = repair_program(&d, Variant::V1).unwrap();
        let got = run_all(&p, &anchor, &Budget::default()).unwrap();
        assert!(!got.outcomes.is_empty());
        // the demolition rule deletes |C − A| = 3 items though Δ = 1
        let worst = got
            .outcomes
            .iter()
            .map(|o| preservation_report(o, &d).unwrap())
            .min_by_key(|r| r.preserved)
            .unwrap();
        assert_eq!(worst.preserved, worst.size_g - 3);
        assert!(!worst.bound_holds);
    }

    #[test]
    fn repairing_fragments_satisfy_their_targets() {
        // Def-10 contract, independent of the full synthesis.
        for variant in [Variant::V1, Variant::V2] {
            for (target, host) in [
                (one_edge_target(), g("u v; e:v->u")),
                (one_edge_target(), g("u")),
                (two_cycle_target(), g("u v; p:u->v q:v->u")),
                (two_cycle_target(), g("u v; p:u->v")),
            ] {
                let set = match variant {
                    Variant::V1 => repairing_set_v1(&target).unwrap(),
                    Variant::V2 => repairing_set_v2(&target).unwrap(),
                };
                let frag = set.repair_fragment();
                let cond = target.as_condition();
                for anchor in crate::embedding::enumerate_monos(target.interface(), &host) {
                    let got = run_all(&frag, &anchor, &Budget::default()).unwrap();
                    assert!(!got.exhausted);
                    for o in &got.outcomes {
                        let handover = o.i.then(&o.h.to_partial()).unwrap().to_total().unwrap();
                        assert!(
                            satisfies(&handover, &cond).unwrap(),
                            "{variant:?} {target} left {} unsatisfied",
                            o.result().brief()
                        );
                    }
                }
            }
        }
    }

    use crate::embedding::monos_with_pins;
    use crate::graph::NodeId;
}
