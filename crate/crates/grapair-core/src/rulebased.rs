//! Rule-based programs over a user-supplied rule set.
//!
//! Given a set `𝓡` of named plain rules, a program is `𝓡`-based when every
//! rule in it is an `𝓡`-member equipped with dangling-edges decoration,
//! context, application condition, and interface (plus the bookkeeping
//! `select`/`unselect` identity rules and `Skip`).
//!
//! Three constructions live here:
//! - `program_of_transformation` compiles a recorded transformation into a
//!   program replaying it: per step, `select` at the concrete match with the
//!   shifted application condition, the context-equipped derived rule (with
//!   the dangling decoration), and `unselect` at the comatch.
//! - `search_equivalent_transformation` looks, breadth-first and bounded, for
//!   an `𝓡`-derivation from a repairing rule's left-hand side whose derived
//!   span matches the rule up to isomorphism, then validates the candidate
//!   behaviourally on a family of bounded host extensions. A label-count
//!   argument rules out provably impossible searches up front: labels the
//!   rule must create (delete) but no `𝓡`-rule can.
//! - `rule_based_repair` replaces every repairing set inside a synthesized
//!   repair program by the compiled programs of its certificates.
//!
//! A not-found certificate is not a proof of incompatibility — except for the
//! label-gap check, which is.

use std::collections::BTreeSet;
use std::fmt;

use crate::embedding::{enumerate_monos, iso_with_pins};
use crate::error::{Error, Result};
use crate::graph::{Graph, Label};
use crate::morphism::{Morphism, PartialMorphism};
use crate::program::{outcomes_equivalent, run_all, Budget, Program};
use crate::repair::{repair_program_with_sets, BasicTarget, RepairingSet, Variant};
use crate::rules::{
    apply_all, derived_rule, track_of_step, DanglingMode, DirectTransformation, PlainRule, Rule,
};
use crate::shift::shift;

/// A named set of plain rules.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<PlainRule>,
}

impl RuleSet {
    pub fn new(rules: Vec<PlainRule>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for r in &rules {
            if !names.insert(r.name.clone()) {
                return Err(Error::InvalidRule(format!("duplicate rule name {}", r.name)));
            }
        }
        Ok(RuleSet { rules })
    }

    pub fn rules(&self) -> &[PlainRule] {
        &self.rules
    }

    pub fn get(&self, name: &str) -> Option<&PlainRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    fn node_labels(&self) -> BTreeSet<Label> {
        self.rules
            .iter()
            .flat_map(|r| {
                [r.lhs(), r.rhs()].into_iter().flat_map(|g| g.node_labels().into_iter())
            })
            .collect()
    }

    fn edge_labels(&self) -> BTreeSet<Label> {
        self.rules
            .iter()
            .flat_map(|r| {
                [r.lhs(), r.rhs()].into_iter().flat_map(|g| g.edge_labels().into_iter())
            })
            .collect()
    }
}

/// A chain of direct transformations, each anchored at the previous handover.
#[derive(Debug, Clone)]
pub struct Transformation {
    start: Graph,
    steps: Vec<DirectTransformation>,
}

impl Transformation {
    pub fn new(start: Graph, steps: Vec<DirectTransformation>) -> Result<Self> {
        if let Some(first) = steps.first() {
            if first.host != start {
                return Err(Error::InvalidTransformation("first step must start at the start graph".into()));
            }
        }
        for w in steps.windows(2) {
            if w[1].g != w[0].h {
                return Err(Error::InvalidTransformation(
                    "steps must chain through the handover anchors".into(),
                ));
            }
        }
        Ok(Transformation { start, steps })
    }

    pub fn identity(start: Graph) -> Self {
        Transformation { steps: Vec::new(), start }
    }

    pub fn start(&self) -> &Graph {
        &self.start
    }

    pub fn end(&self) -> &Graph {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.start)
    }

    pub fn steps(&self) -> &[DirectTransformation] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Composed track morphism `start ⇀ end`.
    pub fn track(&self) -> Result<PartialMorphism> {
        crate::rules::track_of_trace(&self.start, &self.steps)
    }
}

/// Compiles a transformation into a program that replays it: for each step
/// `⟨select(g, Shift(match, ac)); (derived rule)′; unselect(h)⟩`.
pub fn program_of_transformation(t: &Transformation) -> Result<Program> {
    let mut parts = Vec::new();
    for step in &t.steps {
        let ac = shift(&step.matched, step.rule.ac())?;
        parts.push(Program::call(Rule::select(step.g.clone(), ac.clone())?));
        let big = derived_rule(step)?;
        parts.push(Program::call(Rule::new(
            format!("via:{}", step.rule.name),
            Morphism::identity(&step.host),
            big,
            ac_over(&step.host, ac),
            Morphism::identity(&step.result),
            DanglingMode::DeleteDangling,
        )?));
        parts.push(Program::call(Rule::unselect(step.h.clone())?));
    }
    Ok(Program::seq_all(parts))
}

/// The shifted condition already lives over the step's host; reuse it as the
/// big rule's application condition.
fn ac_over(host: &Graph, ac: crate::condition::Condition) -> crate::condition::Condition {
    debug_assert_eq!(ac.ctx(), host);
    ac
}

/// The substitute for a repairing rule: the certificate's steps compiled with
/// wide (identity) interfaces, wrapped in the rule's own anchor and guard.
fn anchored_step_program(rule: &Rule, cert: &Certificate) -> Result<Program> {
    let mut parts = Vec::new();
    parts.push(Program::call(Rule::select(rule.x().clone(), rule.ac().clone())?));
    for step in cert.transformation.steps() {
        let big = derived_rule(step)?;
        parts.push(Program::call(Rule::new(
            format!("via:{}", step.rule.name),
            Morphism::identity(&step.host),
            big,
            crate::condition::Condition::tt(step.host.clone()),
            Morphism::identity(&step.result),
            DanglingMode::DeleteDangling,
        )?));
    }
    let narrowed = rule.y().then(&cert.into_rhs.inverse()?)?;
    parts.push(Program::call(Rule::unselect(narrowed)?));
    Ok(Program::seq_all(parts))
}

/// A certified equivalent transformation for a repairing rule.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub transformation: Transformation,
    /// Isomorphism from the transformation's end graph onto the rule's
    /// right-hand side, commuting with the preserved items.
    pub into_rhs: Morphism,
}

/// Labels a repairing rule needs but the rule set can never produce (created)
/// or remove (deleted).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelGap {
    pub created_node_labels: BTreeSet<Label>,
    pub created_edge_labels: BTreeSet<Label>,
    pub deleted_node_labels: BTreeSet<Label>,
    pub deleted_edge_labels: BTreeSet<Label>,
}

impl LabelGap {
    pub fn is_empty(&self) -> bool {
        self.created_node_labels.is_empty()
            && self.created_edge_labels.is_empty()
            && self.deleted_node_labels.is_empty()
            && self.deleted_edge_labels.is_empty()
    }
}

impl fmt::Display for LabelGap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (set, what) in [
            (&self.created_node_labels, "node label (creation)"),
            (&self.created_edge_labels, "edge label (creation)"),
            (&self.deleted_node_labels, "node label (deletion)"),
            (&self.deleted_edge_labels, "edge label (deletion)"),
        ] {
            for l in set.iter() {
                parts.push(format!("{what} {l}"));
            }
        }
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(Certificate),
    NotFound {
        depth: usize,
        /// `Some` when the failure is a proof of impossibility.
        label_gap: Option<LabelGap>,
    },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

/// Bounded breadth-first search for a derivation via `rs` from the rule's
/// left-hand side whose derived span equals the rule's plain span up to
/// isomorphism, validated behaviourally on bounded extensions of the
/// left-hand side. Returns the first certificate in canonical search order.
pub fn search_equivalent_transformation(
    rule: &Rule,
    rs: &RuleSet,
    depth: usize,
) -> Result<SearchOutcome> {
    let gap = label_gap(rule, rs);
    if !gap.is_empty() {
        return Ok(SearchOutcome::NotFound { depth: 0, label_gap: Some(gap) });
    }

    let lhs = rule.plain().lhs().clone();
    let k_nodes: BTreeSet<_> = rule.plain().interface().node_ids().cloned().collect();
    let k_edges: BTreeSet<_> = rule.plain().interface().edge_ids().cloned().collect();

    let mut queue: Vec<(Graph, PartialMorphism, Vec<DirectTransformation>)> =
        vec![(lhs.clone(), Morphism::identity(&lhs).to_partial(), Vec::new())];
    let mut visited: Vec<(Graph, PartialMorphism)> = Vec::new();
    let mut head = 0;
    let state_cap = 5_000;

    while head < queue.len() {
        let (graph, track, steps) = queue[head].clone();
        head += 1;

        if let Some(cert) = try_accept(rule, &graph, &track, &steps, &k_nodes, &k_edges)? {
            let candidate = anchored_step_program(rule, &cert)?;
            if equivalent_on_extensions(rule, &candidate, rs)? {
                return Ok(SearchOutcome::Found(cert));
            }
        }

        if steps.len() >= depth || queue.len() >= state_cap {
            continue;
        }
        for p in rs.rules() {
            let r = Rule::from_plain(p.clone(), DanglingMode::Standard)?;
            let anchor = Morphism::inclusion(&Graph::empty(), &graph)?;
            for step in apply_all(&r, &anchor)? {
                let next_track = track.then(&track_of_step(&step)?)?;
                let next_graph = step.result.clone();
                if visited.iter().any(|(g, tr)| states_equivalent(g, tr, &next_graph, &next_track))
                {
                    continue;
                }
                visited.push((next_graph.clone(), next_track.clone()));
                let mut next_steps = steps.clone();
                next_steps.push(step);
                queue.push((next_graph, next_track, next_steps));
            }
        }
    }
    Ok(SearchOutcome::NotFound { depth, label_gap: None })
}

/// Accepts a search state when the survivors are exactly the rule interface
/// and the reached graph is isomorphic to the right-hand side over it.
fn try_accept(
    rule: &Rule,
    graph: &Graph,
    track: &PartialMorphism,
    steps: &[DirectTransformation],
    k_nodes: &BTreeSet<crate::graph::NodeId>,
    k_edges: &BTreeSet<crate::graph::EdgeId>,
) -> Result<Option<Certificate>> {
    let dom_nodes: BTreeSet<_> = track.node_map().keys().cloned().collect();
    let dom_edges: BTreeSet<_> = track.edge_map().keys().cloned().collect();
    if &dom_nodes != k_nodes || &dom_edges != k_edges {
        return Ok(None);
    }
    let node_pins = track.node_map().iter().map(|(k, v)| (v.clone(), k.clone())).collect();
    let edge_pins = track.edge_map().iter().map(|(k, v)| (v.clone(), k.clone())).collect();
    let Some(psi) = iso_with_pins(graph, rule.plain().rhs(), &node_pins, &edge_pins) else {
        return Ok(None);
    };
    let t = Transformation::new(rule.plain().lhs().clone(), steps.to_vec())?;
    Ok(Some(Certificate { transformation: t, into_rhs: psi }))
}

fn states_equivalent(g1: &Graph, t1: &PartialMorphism, g2: &Graph, t2: &PartialMorphism) -> bool {
    if t1.node_map().keys().ne(t2.node_map().keys()) || t1.edge_map().keys().ne(t2.edge_map().keys())
    {
        return false;
    }
    let node_pins = t1
        .node_map()
        .iter()
        .map(|(k, v)| (v.clone(), t2.node_map()[k].clone()))
        .collect();
    let edge_pins = t1
        .edge_map()
        .iter()
        .map(|(k, v)| (v.clone(), t2.edge_map()[k].clone()))
        .collect();
    iso_with_pins(g1, g2, &node_pins, &edge_pins).is_some()
}

/// Labels whose creation/deletion the rule requires but no `rs` member offers.
fn label_gap(rule: &Rule, rs: &RuleSet) -> LabelGap {
    let k = rule.plain().interface();
    let created_nodes: BTreeSet<Label> = rule
        .plain()
        .rhs()
        .nodes()
        .filter(|(id, _)| !k.has_node(id))
        .map(|(_, l)| l.clone())
        .collect();
    let created_edges: BTreeSet<Label> = rule
        .plain()
        .rhs()
        .edges()
        .filter(|(id, _)| !k.has_edge(id))
        .map(|(_, e)| e.label.clone())
        .collect();
    let deleted_nodes: BTreeSet<Label> = rule
        .plain()
        .lhs()
        .nodes()
        .filter(|(id, _)| !k.has_node(id))
        .map(|(_, l)| l.clone())
        .collect();
    let deleted_edges: BTreeSet<Label> = rule
        .plain()
        .lhs()
        .edges()
        .filter(|(id, _)| !k.has_edge(id))
        .map(|(_, e)| e.label.clone())
        .collect();

    let can_create_nodes: BTreeSet<Label> = rs
        .rules()
        .iter()
        .flat_map(|p| {
            p.rhs()
                .nodes()
                .filter(|(id, _)| !p.interface().has_node(id))
                .map(|(_, l)| l.clone())
                .collect::<Vec<_>>()
        })
        .collect();
    let can_create_edges: BTreeSet<Label> = rs
        .rules()
        .iter()
        .flat_map(|p| {
            p.rhs()
                .edges()
                .filter(|(id, _)| !p.interface().has_edge(id))
                .map(|(_, e)| e.label.clone())
                .collect::<Vec<_>>()
        })
        .collect();
    let can_delete_nodes: BTreeSet<Label> = rs
        .rules()
        .iter()
        .flat_map(|p| {
            p.lhs()
                .nodes()
                .filter(|(id, _)| !p.interface().has_node(id))
                .map(|(_, l)| l.clone())
                .collect::<Vec<_>>()
        })
        .collect();
    // dangling-edge deletion can remove any edge label, so edge deletion is
    // only impossible when no rule deletes a node either
    let mut can_delete_edges: BTreeSet<Label> = rs
        .rules()
        .iter()
        .flat_map(|p| {
            p.lhs()
                .edges()
                .filter(|(id, _)| !p.interface().has_edge(id))
                .map(|(_, e)| e.label.clone())
                .collect::<Vec<_>>()
        })
        .collect();
    if !can_delete_nodes.is_empty() {
        can_delete_edges.extend(deleted_edges.iter().cloned());
    }

    LabelGap {
        created_node_labels: created_nodes.difference(&can_create_nodes).cloned().collect(),
        created_edge_labels: created_edges.difference(&can_create_edges).cloned().collect(),
        deleted_node_labels: deleted_nodes.difference(&can_delete_nodes).cloned().collect(),
        deleted_edge_labels: deleted_edges.difference(&can_delete_edges).cloned().collect(),
    }
}

/// Bounded behavioural equivalence: on a family of host extensions of the
/// rule's left-hand side, the rule (as used) and the candidate program must
/// produce the same outcome sets at every anchor.
pub fn equivalent_on_extensions(rule: &Rule, candidate: &Program, rs: &RuleSet) -> Result<bool> {
    let budget = Budget { max_steps: 4_000, max_outcomes: 400, max_graph_size: 120 };
    let rule_prog = Program::call(rule.clone());
    for host in extension_hosts(rule.plain().lhs(), rs) {
        for anchor in enumerate_monos(rule.left_interface(), &host) {
            let a = run_all(&rule_prog, &anchor, &budget)?;
            let b = run_all(candidate, &anchor, &budget)?;
            if a.exhausted || b.exhausted {
                return Ok(false);
            }
            let covered = |xs: &[crate::program::Outcome], ys: &[crate::program::Outcome]| {
                xs.iter().all(|x| ys.iter().any(|y| outcomes_equivalent(x, y)))
            };
            if !covered(&a.outcomes, &b.outcomes) || !covered(&b.outcomes, &a.outcomes) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Deterministic family of small extensions of `l`: the graph itself, one
/// extra node per label, one extra node with a connecting edge, and one
/// parallel/extra edge between existing nodes.
fn extension_hosts(l: &Graph, rs: &RuleSet) -> Vec<Graph> {
    let mut node_labels: BTreeSet<Label> = l.node_labels();
    node_labels.extend(rs.node_labels());
    let mut edge_labels: BTreeSet<Label> = l.edge_labels();
    edge_labels.extend(rs.edge_labels());

    let mut out = vec![l.clone()];
    let taken = l.all_ids();
    for nl in &node_labels {
        let mut g = l.clone();
        let fresh = crate::graph::NodeId(Graph::fresh_id("x", "n", &taken));
        g.add_node(fresh.clone(), nl.clone()).unwrap();
        out.push(g.clone());
        for el in &edge_labels {
            for v in l.node_ids() {
                let mut g2 = g.clone();
                let e1 = crate::graph::EdgeId(Graph::fresh_id("x", "e", &g2.all_ids()));
                g2.add_edge(e1, v.clone(), fresh.clone(), el.clone()).unwrap();
                out.push(g2);
                let mut g3 = g.clone();
                let e2 = crate::graph::EdgeId(Graph::fresh_id("x", "e", &g3.all_ids()));
                g3.add_edge(e2, fresh.clone(), v.clone(), el.clone()).unwrap();
                out.push(g3);
            }
        }
    }
    for el in &edge_labels {
        for u in l.node_ids() {
            for v in l.node_ids() {
                let mut g = l.clone();
                let e = crate::graph::EdgeId(Graph::fresh_id("x", "e", &g.all_ids()));
                g.add_edge(e, u.clone(), v.clone(), el.clone()).unwrap();
                out.push(g);
            }
        }
    }
    out.truncate(80);
    out
}

/// Per-rule search results for every repairing set of a repair program.
#[derive(Debug, Clone)]
pub struct RuleEvidence {
    pub set_index: usize,
    pub target: String,
    pub rule_name: String,
    pub outcome: SearchOutcome,
}

#[derive(Debug, Clone)]
pub struct CompatibilityEvidence {
    pub rows: Vec<RuleEvidence>,
    pub compatible: bool,
    pub depth: usize,
}

impl fmt::Display for CompatibilityEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "compatible: {}", self.compatible)?;
        for row in &self.rows {
            let verdict = match &row.outcome {
                SearchOutcome::Found(c) => format!("certified ({} steps)", c.transformation.len()),
                SearchOutcome::NotFound { label_gap: Some(gap), .. } => {
                    format!("impossible: missing {gap}")
                }
                SearchOutcome::NotFound { depth, .. } => format!("not found at depth {depth}"),
            };
            writeln!(f, "  [{}] {} / {}: {}", row.set_index, row.target, row.rule_name, verdict)?;
        }
        Ok(())
    }
}

/// Searches certificates for every rule of every repairing set of the repair
/// program for `d`. A `∃`-set needs all of its rules certified (its guards
/// partition the cases); a `∄`-set is served by any certified nonempty
/// subset, since every rule of the set shares the same applicability.
pub fn check_compatibility(
    rs: &RuleSet,
    d: &crate::condition::Condition,
    variant: Variant,
    depth: usize,
) -> Result<CompatibilityEvidence> {
    let (_, sets) = repair_program_with_sets(d, variant)?;
    let mut rows = Vec::new();
    let mut compatible = true;
    for (i, set) in sets.iter().enumerate() {
        let mut found_any = false;
        let mut all = true;
        for rule in as_used(set) {
            let outcome = search_equivalent_transformation(&rule, rs, depth)?;
            found_any |= outcome.is_found();
            all &= outcome.is_found();
            rows.push(RuleEvidence {
                set_index: i,
                target: set.target.to_string(),
                rule_name: rule.name.clone(),
                outcome,
            });
        }
        let ok = match set.target {
            BasicTarget::Exists(_) => all,
            BasicTarget::NotExists(_) => found_any,
        };
        compatible &= ok;
    }
    Ok(CompatibilityEvidence { rows, compatible, depth })
}

/// The rules of a set in the form the repair program applies them: primed
/// for `∄`-targets, as constructed for `∃`-targets.
fn as_used(set: &RepairingSet) -> Vec<Rule> {
    match set.target {
        BasicTarget::Exists(_) => set.rules.clone(),
        BasicTarget::NotExists(_) => set.rules.iter().map(|r| r.primed()).collect(),
    }
}

#[derive(Debug, Clone)]
pub enum RuleBasedRepair {
    Program(Program),
    Incompatible(Box<CompatibilityEvidence>),
}

/// Builds the `𝓡`-based repair program for `d` by replacing every repairing
/// set with the compiled programs of its certificates; reports the evidence
/// map instead when the rule set is not compatible.
pub fn rule_based_repair(
    rs: &RuleSet,
    d: &crate::condition::Condition,
    variant: Variant,
    depth: usize,
) -> Result<RuleBasedRepair> {
    let evidence = check_compatibility(rs, d, variant, depth)?;
    if !evidence.compatible {
        return Ok(RuleBasedRepair::Incompatible(Box::new(evidence)));
    }
    let (program, sets) = repair_program_with_sets(d, variant)?;

    // substitution map: as-used rule ↦ compiled certificate program
    let mut repl: Vec<(Rule, Option<Program>)> = Vec::new();
    let mut row_iter = evidence.rows.iter();
    for set in &sets {
        for rule in as_used(set) {
            let row = row_iter.next().expect("one evidence row per rule");
            match &row.outcome {
                SearchOutcome::Found(cert) => {
                    let sub = anchored_step_program(&rule, cert)?;
                    repl.push((rule, Some(sub)));
                }
                SearchOutcome::NotFound { .. } => repl.push((rule, None)),
            }
        }
    }
    let substituted = substitute(&program, &repl)?
        .ok_or_else(|| Error::InvalidProgram("substitution emptied the program".into()))?;
    Ok(RuleBasedRepair::Program(substituted))
}

/// Replaces mapped rule calls; `None` entries (uncertified `∄`-rules) are
/// dropped from their surrounding choice.
fn substitute(p: &Program, repl: &[(Rule, Option<Program>)]) -> Result<Option<Program>> {
    Ok(Some(match p {
        Program::Skip => Program::Skip,
        Program::Call(r) => {
            match repl.iter().find(|(k, _)| k == r.as_ref()) {
                Some((_, Some(sub))) => sub.clone(),
                Some((_, None)) => return Ok(None),
                None => p.clone(),
            }
        }
        Program::Choice(alts) => {
            let mut kept = Vec::new();
            for a in alts {
                if let Some(s) = substitute(a, repl)? {
                    kept.push(s);
                }
            }
            if kept.is_empty() {
                return Ok(None);
            }
            Program::Choice(kept)
        }
        Program::Seq(a, b) => {
            let (Some(a), Some(b)) = (substitute(a, repl)?, substitute(b, repl)?) else {
                return Ok(None);
            };
            Program::seq(a, b)
        }
        Program::Try(body) => match substitute(body, repl)? {
            Some(s) => Program::try_(s),
            None => return Ok(None),
        },
        Program::Iterate(body) => match substitute(body, repl)? {
            Some(s) => Program::iterate(s),
            None => return Ok(None),
        },
    }))
}
