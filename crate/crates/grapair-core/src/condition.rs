//! Nested graph conditions: the condition AST, satisfaction, equivalence
//! rewrites, alternating-quantifier normal form, and the
//! linear/ANF/proper/basic classification.
//!
//! The core grammar over a context graph `A` is
//!
//! ```text
//! c ::= true | ∃(a: A ↪ C, c over C) | ¬c | ⋀ cᵢ
//! ```
//!
//! with `false := ¬true`, `∃a := ∃(a, true)`, `∀(a, c) := ¬∃(a, ¬c)`,
//! `∄(a, c) := ¬∃(a, c)` and `∨` as `¬⋀¬` — the AST has no disjunction node,
//! the pretty-printer re-sugars. Quantifier morphisms are proper id-based
//! inclusions (`A` a proper subgraph of `C`); constructors and loaders reject
//! anything else. Conditions over the empty graph are constraints.

use std::collections::BTreeSet;
use std::fmt;

use crate::embedding::extensions;
use crate::enumerate::{for_each_host, EnumLimits, EnumStatus};
use crate::error::{Error, Result};
use crate::graph::{Graph, Label};
use crate::morphism::Morphism;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Condition {
    ctx: Graph,
    body: Body,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Body {
    True,
    Exists { mor: Morphism, sub: Box<Condition> },
    Not(Box<Condition>),
    And(Vec<Condition>),
}

impl Condition {
    pub fn tt(ctx: Graph) -> Self {
        Condition { ctx, body: Body::True }
    }

    pub fn ff(ctx: Graph) -> Self {
        Condition::not(Condition::tt(ctx))
    }

    /// `∃(mor, sub)`. The morphism must be a proper id-based inclusion and
    /// `sub` must live over its codomain.
    pub fn exists(mor: Morphism, sub: Condition) -> Result<Self> {
        if !mor.is_proper_inclusion() {
            return Err(Error::NotProperInclusion(format!(
                "{} into {}",
                mor.dom().brief(),
                mor.cod().brief()
            )));
        }
        if sub.ctx() != mor.cod() {
            return Err(Error::ContextMismatch(
                "sub-condition context must be the quantifier codomain".into(),
            ));
        }
        let ctx = mor.dom().clone();
        Ok(Condition { ctx, body: Body::Exists { mor, sub: Box::new(sub) } })
    }

    /// `∃mor` — short for `∃(mor, true)`.
    pub fn exists_plain(mor: Morphism) -> Result<Self> {
        let tt = Condition::tt(mor.cod().clone());
        Condition::exists(mor, tt)
    }

    pub fn not(sub: Condition) -> Self {
        let ctx = sub.ctx.clone();
        Condition { ctx, body: Body::Not(Box::new(sub)) }
    }

    pub fn and(ctx: Graph, subs: Vec<Condition>) -> Result<Self> {
        for s in &subs {
            if s.ctx() != &ctx {
                return Err(Error::ContextMismatch("conjunct context differs".into()));
            }
        }
        Ok(Condition { ctx, body: Body::And(subs) })
    }

    /// `∀(mor, sub) := ¬∃(mor, ¬sub)`.
    pub fn forall(mor: Morphism, sub: Condition) -> Result<Self> {
        Ok(Condition::not(Condition::exists(mor, Condition::not(sub))?))
    }

    /// `∄(mor, sub) := ¬∃(mor, sub)`.
    pub fn nexists(mor: Morphism, sub: Condition) -> Result<Self> {
        Ok(Condition::not(Condition::exists(mor, sub)?))
    }

    pub fn nexists_plain(mor: Morphism) -> Result<Self> {
        Ok(Condition::not(Condition::exists_plain(mor)?))
    }

    /// Disjunction encoded as `¬⋀¬`. Empty disjunction is `false`; a single
    /// disjunct is returned unchanged.
    pub fn or(ctx: Graph, mut subs: Vec<Condition>) -> Result<Self> {
        match subs.len() {
            0 => Ok(Condition::ff(ctx)),
            1 => Ok(subs.remove(0)),
            _ => {
                let negs = subs.into_iter().map(Condition::not).collect();
                Ok(Condition::not(Condition::and(ctx, negs)?))
            }
        }
    }

    pub fn ctx(&self) -> &Graph {
        &self.ctx
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn is_true(&self) -> bool {
        matches!(self.body, Body::True)
    }

    /// Structurally `¬true`.
    pub fn is_false(&self) -> bool {
        matches!(&self.body, Body::Not(sub) if sub.is_true())
    }

    /// Nesting depth: quantifiers only.
    pub fn depth(&self) -> usize {
        match &self.body {
            Body::True => 0,
            Body::Exists { sub, .. } => 1 + sub.depth(),
            Body::Not(sub) => sub.depth(),
            Body::And(subs) => subs.iter().map(|s| s.depth()).max().unwrap_or(0),
        }
    }

    /// All context graphs occurring in the condition, root included.
    pub fn all_contexts(&self) -> Vec<&Graph> {
        let mut out = vec![&self.ctx];
        match &self.body {
            Body::True => {}
            Body::Exists { sub, .. } => out.extend(sub.all_contexts()),
            Body::Not(sub) => out.extend(sub.all_contexts()),
            Body::And(subs) => {
                for s in subs {
                    out.extend(s.all_contexts());
                }
            }
        }
        out
    }
}

/// Does the injective `p: A ↪ G` satisfy `c` (a condition over `A`)?
pub fn satisfies(p: &Morphism, c: &Condition) -> Result<bool> {
    if c.ctx() != p.dom() {
        return Err(Error::ContextMismatch(format!(
            "condition over {} checked at an anchor from {}",
            c.ctx().brief(),
            p.dom().brief()
        )));
    }
    match &c.body {
        Body::True => Ok(true),
        Body::Exists { mor, sub } => {
            for q in extensions(p, mor)? {
                if satisfies(&q, sub)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Body::Not(sub) => Ok(!satisfies(p, sub)?),
        Body::And(subs) => {
            for s in subs {
                if !satisfies(p, s)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// A graph satisfies a constraint via the unique morphism `∅ ↪ G`.
pub fn graph_satisfies(g: &Graph, c: &Condition) -> Result<bool> {
    let p = Morphism::inclusion(&Graph::empty(), g)?;
    satisfies(&p, c)
}

/// Equivalence rewrites, bottom-up to a fixed point: double negation,
/// `∃(x, false) → false`, empty/degenerate conjunctions, absorbing `false`
/// and dropping `true` conjuncts. Together with the `∀`/`∄` sugar these
/// realize the standard quantifier simplifications (for instance
/// `∀(x, true) → true` and `∀(x, ∃(y, false)) → ∄x`).
pub fn simplify(c: &Condition) -> Condition {
    let mut cur = c.clone();
    loop {
        let next = simplify_once(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn simplify_once(c: &Condition) -> Condition {
    match &c.body {
        Body::True => c.clone(),
        Body::Exists { mor, sub } => {
            let s = simplify_once(sub);
            if s.is_false() {
                Condition::ff(c.ctx.clone())
            } else {
                Condition::exists(mor.clone(), s).expect("simplify preserves well-formedness")
            }
        }
        Body::Not(sub) => {
            let s = simplify_once(sub);
            if let Body::Not(inner) = &s.body {
                (**inner).clone()
            } else {
                Condition::not(s)
            }
        }
        Body::And(subs) => {
            let mut out = Vec::new();
            for s in subs {
                let s = simplify_once(s);
                if s.is_false() {
                    return Condition::ff(c.ctx.clone());
                }
                if !s.is_true() {
                    out.push(s);
                }
            }
            match out.len() {
                0 => Condition::tt(c.ctx.clone()),
                1 => out.remove(0),
                _ => Condition::and(c.ctx.clone(), out).expect("contexts preserved"),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    Exists,
    Forall,
}

impl Quant {
    fn flip(self) -> Quant {
        match self {
            Quant::Exists => Quant::Forall,
            Quant::Forall => Quant::Exists,
        }
    }
}

/// The quantifier-chain reading of a linear condition: sugar applied, double
/// negations cancelled by polarity. Every linear condition has exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainView {
    pub ctx: Graph,
    pub steps: Vec<(Quant, Morphism)>,
    /// `true` when the chain ends in `true`, `false` for `false`.
    pub tail_true: bool,
}

impl ChainView {
    pub fn negated(&self) -> ChainView {
        ChainView {
            ctx: self.ctx.clone(),
            steps: self.steps.iter().map(|(q, m)| (q.flip(), m.clone())).collect(),
            tail_true: !self.tail_true,
        }
    }

    pub fn last_quant(&self) -> Option<Quant> {
        self.steps.last().map(|(q, _)| *q)
    }
}

/// Parses a linear condition into its chain view. `Err(NonLinear)` on any
/// conjunction.
pub fn view(c: &Condition) -> Result<ChainView> {
    let mut steps = Vec::new();
    let tail_true = view_rec(c, true, &mut steps)?;
    Ok(ChainView { ctx: c.ctx().clone(), steps, tail_true })
}

fn view_rec(c: &Condition, positive: bool, steps: &mut Vec<(Quant, Morphism)>) -> Result<bool> {
    match &c.body {
        Body::True => Ok(positive),
        Body::Not(sub) => view_rec(sub, !positive, steps),
        Body::Exists { mor, sub } => {
            steps.push((if positive { Quant::Exists } else { Quant::Forall }, mor.clone()));
            view_rec(sub, positive, steps)
        }
        Body::And(_) => Err(Error::NonLinear("conjunction in a linear-only context".into())),
    }
}

/// Rebuilds the canonical condition for a chain view (minimal negations).
pub fn rebuild(v: &ChainView) -> Condition {
    rebuild_from(&v.ctx, &v.steps, v.tail_true)
}

fn rebuild_from(ctx: &Graph, steps: &[(Quant, Morphism)], tail_true: bool) -> Condition {
    match steps.split_first() {
        None => {
            if tail_true {
                Condition::tt(ctx.clone())
            } else {
                Condition::ff(ctx.clone())
            }
        }
        Some(((q, mor), rest)) => {
            let inner_ctx = mor.cod().clone();
            match q {
                Quant::Exists => {
                    let sub = rebuild_from(&inner_ctx, rest, tail_true);
                    Condition::exists(mor.clone(), sub).expect("view morphisms are valid")
                }
                Quant::Forall => {
                    // ∀(a, c) = ¬∃(a, ¬c): rebuild the negated remainder.
                    let negated: Vec<(Quant, Morphism)> =
                        rest.iter().map(|(q, m)| (q.flip(), m.clone())).collect();
                    let sub = rebuild_from(&inner_ctx, &negated, !tail_true);
                    Condition::not(
                        Condition::exists(mor.clone(), sub).expect("view morphisms are valid"),
                    )
                }
            }
        }
    }
}

/// Normalizes a linear condition to alternating quantifiers by composing
/// adjacent equal quantifiers (`∃(a, ∃(b, c)) ≡ ∃(b∘a, c)`, dually for `∀`)
/// and cancelling double negations. Rejects non-linear input.
pub fn to_anf(c: &Condition) -> Result<Condition> {
    let v = view(c)?;
    let mut steps = v.steps;
    loop {
        let mut changed = false;
        let mut out: Vec<(Quant, Morphism)> = Vec::new();
        for (q, m) in steps {
            match out.last() {
                Some((lq, lm)) if *lq == q => {
                    let composed = lm.then(&m)?;
                    out.last_mut().unwrap().1 = composed;
                    changed = true;
                }
                _ => out.push((q, m)),
            }
        }
        steps = out;
        if !changed {
            break;
        }
    }
    Ok(rebuild(&ChainView { ctx: v.ctx, steps, tail_true: v.tail_true }))
}

/// Classification flags; `basic ⇒ proper ⇒ anf ⇒ linear`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionClass {
    pub linear: bool,
    pub anf: bool,
    pub proper: bool,
    pub basic: bool,
}

pub fn classify(c: &Condition) -> ConditionClass {
    let v = match view(c) {
        Ok(v) => v,
        Err(_) => return ConditionClass { linear: false, anf: false, proper: false, basic: false },
    };
    let alternating = v.steps.windows(2).all(|w| w[0].0 != w[1].0);
    let anf = alternating;
    let quants: Vec<Quant> = v.steps.iter().map(|(q, _)| *q).collect();
    let proper = anf
        && if v.tail_true {
            // `true` itself, or a chain ending in ∃(b, true)
            quants.is_empty() || *quants.last().unwrap() == Quant::Exists
        } else {
            // exactly ∄b or ∃(a, ∄b)
            quants == [Quant::Forall] || quants == [Quant::Exists, Quant::Forall]
        };
    let basic = proper
        && ((v.tail_true && quants == [Quant::Exists]) || (!v.tail_true && quants == [Quant::Forall]));
    ConditionClass { linear: true, anf, proper, basic }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedSat {
    /// A witness graph with at most the requested number of nodes.
    Satisfiable(Graph),
    /// No witness found within the bounds; never claims unsatisfiable.
    Unknown,
}

/// Searches for a witness graph of a constraint by enumerating hosts over the
/// constraint's own label alphabet, by increasing node count then edge count.
/// The edge budget is `max(2·node_bound, largest context edge count)` and
/// parallel-edge multiplicity is capped by the largest multiplicity occurring
/// in the constraint's context graphs.
pub fn is_satisfiable_bounded(c: &Condition, node_bound: usize) -> Result<BoundedSat> {
    if !c.ctx().is_empty() {
        return Err(Error::ContextMismatch("bounded satisfiability expects a constraint".into()));
    }
    let mut node_labels: BTreeSet<Label> = BTreeSet::new();
    let mut edge_labels: BTreeSet<Label> = BTreeSet::new();
    let mut max_ctx_edges = 0usize;
    let mut max_parallel = 1usize;
    for g in c.all_contexts() {
        node_labels.extend(g.node_labels());
        edge_labels.extend(g.edge_labels());
        max_ctx_edges = max_ctx_edges.max(g.edge_count());
        for (_, e) in g.edges() {
            let same = g
                .edges()
                .filter(|(_, f)| f.src == e.src && f.tgt == e.tgt && f.label == e.label)
                .count();
            max_parallel = max_parallel.max(same);
        }
    }
    let limits = EnumLimits {
        max_nodes: node_bound,
        max_edges: (2 * node_bound).max(max_ctx_edges),
        max_parallel,
        max_candidates: 200_000,
    };
    let node_labels: Vec<Label> = node_labels.into_iter().collect();
    let edge_labels: Vec<Label> = edge_labels.into_iter().collect();
    let mut witness: Option<Graph> = None;
    let status = for_each_host(&node_labels, &edge_labels, &limits, |g| {
        match graph_satisfies(g, c) {
            Ok(true) => {
                witness = Some(g.clone());
                true
            }
            _ => false,
        }
    });
    match (witness, status) {
        (Some(g), _) => Ok(BoundedSat::Satisfiable(g)),
        (None, EnumStatus::Complete | EnumStatus::Truncated) => Ok(BoundedSat::Unknown),
        (None, EnumStatus::Stopped) => unreachable!("stop implies witness"),
    }
}

impl fmt::Display for Condition {
    /// Compact notation: `∃C`, `∀(C, …)`, `∄C`, `¬`, `∧`, `∨`, `true`, `false`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", pretty(self))
    }
}

fn pretty(c: &Condition) -> String {
    if c.is_false() {
        return "false".to_string();
    }
    match &c.body {
        Body::True => "true".to_string(),
        Body::Exists { mor, sub } => {
            if sub.is_true() {
                format!("∃({})", mor.cod().brief())
            } else {
                format!("∃({}, {})", mor.cod().brief(), pretty(sub))
            }
        }
        Body::Not(sub) => match &sub.body {
            // ∄ and ∀ re-sugaring
            Body::Exists { mor, sub: inner } if inner.is_true() => {
                format!("∄({})", mor.cod().brief())
            }
            Body::Exists { mor, sub: inner } => match &inner.body {
                Body::Not(pos) => format!("∀({}, {})", mor.cod().brief(), pretty(pos)),
                _ => format!("∄({}, {})", mor.cod().brief(), pretty(inner)),
            },
            // ∨ re-sugaring: ¬(∧ ¬cᵢ)
            Body::And(subs)
                if subs.len() > 1 && subs.iter().all(|s| matches!(s.body, Body::Not(_))) =>
            {
                let parts: Vec<String> = subs
                    .iter()
                    .map(|s| match &s.body {
                        Body::Not(inner) => pretty(inner),
                        _ => unreachable!(),
                    })
                    .collect();
                format!("({})", parts.join(" ∨ "))
            }
            _ => format!("¬{}", pretty(sub)),
        },
        Body::And(subs) => {
            if subs.is_empty() {
                return "⋀∅".to_string();
            }
            let parts: Vec<String> = subs.iter().map(pretty).collect();
            format!("({})", parts.join(" ∧ "))
        }
    }
}
