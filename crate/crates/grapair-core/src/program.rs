//! Graph programs and their nondeterministic triple semantics.
//!
//! A program with interface `X`, run at an anchor `g: X ↪ G`, denotes a set
//! of triples `⟨g, h, i⟩`: the final anchor `h: Y ↪ H` into the result graph
//! and the partial interface relation `i: X ⇀ Y`. The interpreter enumerates
//! that set exactly (up to isomorphism of `(H, h, i)`), subject to a budget;
//! exhaustion is reported, never silently truncated.
//!
//! Semantics notes:
//! - `Seq` composes triples where the first program's `h` is the second's
//!   anchor; `Choice` is union; `Try` falls back to the identity triple
//!   exactly when the body has no outcome.
//! - `Iterate` (`P↓`) explores the reflexive-transitive closure of `Fix(P)`
//!   breadth-first and keeps the anchors where `Fix(P)` has no outcome.
//!   `Fix(P)` collapses `⟨g, h, i⟩` to `⟨g, h∘i, id⟩`, so interface
//!   information crosses iteration rounds only through `h∘i`; outcomes with a
//!   partial `i` cannot form such a triple and are dropped there.
//! - A cycle of states with no terminal anchor is a legitimately empty
//!   iteration semantics, detected and reported as complete (not exhausted).

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::iso_with_pins;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::morphism::{Morphism, PartialMorphism};
use crate::rules::{apply_all, DirectTransformation, Rule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Program {
    Skip,
    Call(Box<Rule>),
    Choice(Vec<Program>),
    Seq(Box<Program>, Box<Program>),
    Try(Box<Program>),
    Iterate(Box<Program>),
}

impl Program {
    pub fn call(rule: Rule) -> Program {
        Program::Call(Box::new(rule))
    }

    pub fn seq(first: Program, second: Program) -> Program {
        Program::Seq(Box::new(first), Box::new(second))
    }

    /// Right-associated sequence of several programs.
    pub fn seq_all(mut parts: Vec<Program>) -> Program {
        match parts.len() {
            0 => Program::Skip,
            1 => parts.remove(0),
            _ => {
                let first = parts.remove(0);
                Program::seq(first, Program::seq_all(parts))
            }
        }
    }

    pub fn choice(alts: Vec<Program>) -> Program {
        Program::Choice(alts)
    }

    pub fn try_(body: Program) -> Program {
        Program::Try(Box::new(body))
    }

    pub fn iterate(body: Program) -> Program {
        Program::Iterate(Box::new(body))
    }
}

/// Static interface type of a program end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IfaceTy {
    /// `Skip`: adapts to any anchor.
    Poly,
    Fixed(Graph),
    /// Branches disagree; fine standalone, an error when composed.
    Mixed,
}

impl IfaceTy {
    fn unify(&self, other: &IfaceTy) -> IfaceTy {
        match (self, other) {
            (IfaceTy::Poly, x) | (x, IfaceTy::Poly) => x.clone(),
            (IfaceTy::Fixed(a), IfaceTy::Fixed(b)) if a == b => IfaceTy::Fixed(a.clone()),
            _ => IfaceTy::Mixed,
        }
    }

    fn compatible(&self, other: &IfaceTy) -> bool {
        !matches!(self.unify(other), IfaceTy::Mixed)
    }
}

/// Left and right interface types, with the composition checks of the
/// program grammar: sequencing requires the handover interfaces to agree and
/// iteration requires equal left and right interfaces.
pub fn interfaces_of(p: &Program) -> Result<(IfaceTy, IfaceTy)> {
    match p {
        Program::Skip => Ok((IfaceTy::Poly, IfaceTy::Poly)),
        Program::Call(r) => Ok((
            IfaceTy::Fixed(r.left_interface().clone()),
            IfaceTy::Fixed(r.right_interface().clone()),
        )),
        Program::Choice(alts) => {
            let mut left = IfaceTy::Poly;
            let mut right = IfaceTy::Poly;
            for a in alts {
                let (l, r) = interfaces_of(a)?;
                if !left.compatible(&l) {
                    return Err(Error::InterfaceMismatch(
                        "choice branches disagree on the left interface".into(),
                    ));
                }
                left = left.unify(&l);
                right = right.unify(&r);
            }
            Ok((left, right))
        }
        Program::Seq(a, b) => {
            let (la, ra) = interfaces_of(a)?;
            let (lb, rb) = interfaces_of(b)?;
            if !ra.compatible(&lb) {
                return Err(Error::InterfaceMismatch(format!(
                    "sequence handover mismatch: {:?} then {:?}",
                    short(&ra),
                    short(&lb)
                )));
            }
            Ok((la, rb))
        }
        Program::Try(body) => {
            // try may yield the identity triple, so its right end is the
            // unification of the body's two ends; Mixed only bites when the
            // try is composed further.
            let (l, r) = interfaces_of(body)?;
            Ok((l.clone(), l.unify(&r)))
        }
        Program::Iterate(body) => {
            let (l, r) = interfaces_of(body)?;
            if !l.compatible(&r) {
                return Err(Error::InterfaceMismatch(
                    "iterated body must preserve its interface".into(),
                ));
            }
            let u = l.unify(&r);
            Ok((u.clone(), u))
        }
    }
}

fn short(t: &IfaceTy) -> String {
    match t {
        IfaceTy::Poly => "∗".into(),
        IfaceTy::Fixed(g) => g.brief(),
        IfaceTy::Mixed => "mixed".into(),
    }
}

/// Execution limits. `GRAPAIR_BUDGET` (steps[,outcomes[,graph-size]]) sets
/// the process-wide default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Rule applications explored in total.
    pub max_steps: usize,
    /// Distinct outcomes (and iteration anchors) kept.
    pub max_outcomes: usize,
    /// Largest graph (items) a branch may grow to.
    pub max_graph_size: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from_env().unwrap_or(Budget {
            max_steps: 20_000,
            max_outcomes: 2_000,
            max_graph_size: 400,
        })
    }
}

impl Budget {
    pub fn with_steps(max_steps: usize) -> Self {
        Budget { max_steps, ..Budget::default() }
    }

    fn from_env() -> Option<Budget> {
        let raw = std::env::var("GRAPAIR_BUDGET").ok()?;
        let mut parts = raw.split(',').map(|p| p.trim().parse::<usize>());
        let steps = parts.next()?.ok()?;
        let outcomes = parts.next().transpose().ok()?.unwrap_or(2_000);
        let size = parts.next().transpose().ok()?.unwrap_or(400);
        Some(Budget { max_steps: steps, max_outcomes: outcomes, max_graph_size: size })
    }
}

/// One element of a program's semantics at an anchor, with the rule-step
/// trace that produced it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub g: Morphism,
    pub h: Morphism,
    pub i: PartialMorphism,
    pub trace: Vec<DirectTransformation>,
}

impl Outcome {
    pub fn result(&self) -> &Graph {
        self.h.cod()
    }

    fn identity(g: &Morphism) -> Outcome {
        Outcome {
            g: g.clone(),
            h: g.clone(),
            i: Morphism::identity(g.dom()).to_partial(),
            trace: Vec::new(),
        }
    }
}

/// `run_all` result: the outcome set and whether any budget limit tripped
/// (in which case the set may be incomplete).
#[derive(Debug, Clone)]
pub struct RunAll {
    pub outcomes: Vec<Outcome>,
    pub exhausted: bool,
}

/// Enumerates the complete semantics of `p` at `g` within the budget.
pub fn run_all(p: &Program, g: &Morphism, budget: &Budget) -> Result<RunAll> {
    check_anchor(p, g)?;
    let mut interp = Interp { budget: *budget, steps: 0, exhausted: false };
    let outcomes = interp.eval(p, g)?;
    Ok(RunAll { outcomes, exhausted: interp.exhausted })
}

fn check_anchor(p: &Program, g: &Morphism) -> Result<()> {
    let (left, _) = interfaces_of(p)?;
    match left {
        IfaceTy::Fixed(x) if &x != g.dom() => Err(Error::InterfaceMismatch(format!(
            "program expects interface {}, anchor has {}",
            x.brief(),
            g.dom().brief()
        ))),
        _ => Ok(()),
    }
}

struct Interp {
    budget: Budget,
    steps: usize,
    exhausted: bool,
}

impl Interp {
    fn eval(&mut self, p: &Program, g: &Morphism) -> Result<Vec<Outcome>> {
        match p {
            Program::Skip => Ok(vec![Outcome::identity(g)]),
            Program::Call(rule) => self.eval_call(rule, g),
            Program::Choice(alts) => {
                let mut out = Vec::new();
                for a in alts {
                    out.extend(self.eval(a, g)?);
                }
                Ok(dedup_outcomes(out))
            }
            Program::Seq(a, b) => {
                let mut out = Vec::new();
                for o1 in self.eval(a, g)? {
                    for o2 in self.eval(b, &o1.h)? {
                        let i = o1.i.then(&o2.i)?;
                        let mut trace = o1.trace.clone();
                        trace.extend(o2.trace);
                        out.push(Outcome { g: g.clone(), h: o2.h, i, trace });
                    }
                }
                Ok(dedup_outcomes(out))
            }
            Program::Try(body) => {
                let before = self.exhausted;
                self.exhausted = false;
                let outs = self.eval(body, g)?;
                let body_exhausted = self.exhausted;
                self.exhausted = before || body_exhausted;
                if outs.is_empty() {
                    if body_exhausted {
                        // cannot soundly claim "no outcome", so no fallback
                        return Ok(Vec::new());
                    }
                    return Ok(vec![Outcome::identity(g)]);
                }
                Ok(outs)
            }
            Program::Iterate(body) => self.eval_iterate(body, g),
        }
    }

    fn eval_call(&mut self, rule: &Rule, g: &Morphism) -> Result<Vec<Outcome>> {
        if self.steps >= self.budget.max_steps {
            self.exhausted = true;
            return Ok(Vec::new());
        }
        let steps = apply_all(rule, g)?;
        let mut out = Vec::new();
        for t in steps {
            self.steps += 1;
            if self.steps > self.budget.max_steps {
                self.exhausted = true;
                break;
            }
            if t.result.size() > self.budget.max_graph_size {
                self.exhausted = true;
                continue;
            }
            out.push(Outcome {
                g: g.clone(),
                h: t.h.clone(),
                i: t.i.clone(),
                trace: vec![t],
            });
        }
        Ok(dedup_outcomes(out))
    }

    /// `Fix(P)` at an anchor: collapse each outcome `⟨g, h, i⟩` with total
    /// `i` to the new anchor `h ∘ i`.
    fn eval_fix(&mut self, body: &Program, g: &Morphism) -> Result<Vec<(Morphism, Vec<DirectTransformation>)>> {
        let outs = self.eval(body, g)?;
        let mut next = Vec::new();
        for o in outs {
            if !o.i.is_total() {
                continue;
            }
            let anchor = o.i.then(&o.h.to_partial())?.to_total()?;
            next.push((anchor, o.trace));
        }
        Ok(next)
    }

    fn eval_iterate(&mut self, body: &Program, g: &Morphism) -> Result<Vec<Outcome>> {
        let mut terminal: Vec<Outcome> = Vec::new();
        let mut visited: Vec<Morphism> = vec![g.clone()];
        let mut queue: VecDeque<(Morphism, Vec<DirectTransformation>)> =
            VecDeque::from([(g.clone(), Vec::new())]);
        while let Some((anchor, trace)) = queue.pop_front() {
            if self.steps >= self.budget.max_steps
                || terminal.len() >= self.budget.max_outcomes
                || visited.len() >= self.budget.max_outcomes
            {
                self.exhausted = true;
                break;
            }
            let before = self.exhausted;
            self.exhausted = false;
            let fix_outs = self.eval_fix(body, &anchor)?;
            let round_exhausted = self.exhausted;
            self.exhausted = before || round_exhausted;
            if fix_outs.is_empty() {
                if round_exhausted {
                    continue; // applicability unknown: not a certified terminal
                }
                terminal.push(Outcome {
                    g: g.clone(),
                    h: anchor.clone(),
                    i: Morphism::identity(g.dom()).to_partial(),
                    trace,
                });
                continue;
            }
            for (next_anchor, step_trace) in fix_outs {
                if visited.iter().any(|v| anchors_equivalent(v, &next_anchor)) {
                    continue;
                }
                visited.push(next_anchor.clone());
                let mut t = trace.clone();
                t.extend(step_trace);
                queue.push_back((next_anchor, t));
            }
        }
        Ok(dedup_outcomes(terminal))
    }
}

/// Anchors are interchangeable iteration states when an isomorphism of the
/// host graphs commutes with them.
fn anchors_equivalent(a: &Morphism, b: &Morphism) -> bool {
    if a.dom() != b.dom() {
        return false;
    }
    if a.cod() == b.cod() && a.node_map() == b.node_map() && a.edge_map() == b.edge_map() {
        return true;
    }
    let node_pins = a
        .node_map()
        .iter()
        .map(|(k, v)| (v.clone(), b.node_map()[k].clone()))
        .collect();
    let edge_pins = a
        .edge_map()
        .iter()
        .map(|(k, v)| (v.clone(), b.edge_map()[k].clone()))
        .collect();
    iso_with_pins(a.cod(), b.cod(), &node_pins, &edge_pins).is_some()
}

/// Outcome equality up to isomorphism of `(H, h, i)`: the interface relations
/// must agree on the nose, and some isomorphism of results must commute with
/// the `h`s.
pub fn outcomes_equivalent(a: &Outcome, b: &Outcome) -> bool {
    a.i.node_map() == b.i.node_map()
        && a.i.edge_map() == b.i.edge_map()
        && a.h.dom() == b.h.dom()
        && anchors_equivalent(&a.h, &b.h)
}

fn dedup_outcomes(outs: Vec<Outcome>) -> Vec<Outcome> {
    let mut kept: Vec<Outcome> = Vec::new();
    for o in outs {
        if !kept.iter().any(|k| outcomes_equivalent(k, &o)) {
            kept.push(o);
        }
    }
    kept
}

/// Result of a single sampled run.
#[derive(Debug, Clone)]
pub enum RunOne {
    Outcome(Box<Outcome>),
    /// The semantics is provably empty at this anchor (within budget).
    Empty,
    /// The budget tripped before either an outcome or emptiness was proven.
    Exhausted,
}

/// Samples one outcome of the nondeterministic semantics, choosing branches
/// and matches pseudo-randomly from `seed`. Deterministic for a fixed seed.
pub fn run_one(p: &Program, g: &Morphism, seed: u64, budget: &Budget) -> Result<RunOne> {
    check_anchor(p, g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = 0usize;
    sample(p, g, &mut rng, budget, &mut steps)
}

fn sample(
    p: &Program,
    g: &Morphism,
    rng: &mut ChaCha8Rng,
    budget: &Budget,
    steps: &mut usize,
) -> Result<RunOne> {
    match p {
        Program::Skip => Ok(RunOne::Outcome(Box::new(Outcome::identity(g)))),
        Program::Call(rule) => {
            if *steps >= budget.max_steps {
                return Ok(RunOne::Exhausted);
            }
            *steps += 1;
            let mut all = apply_all(rule, g)?;
            if all.is_empty() {
                return Ok(RunOne::Empty);
            }
            let idx = rng.gen_range(0..all.len());
            let t = all.swap_remove(idx);
            if t.result.size() > budget.max_graph_size {
                return Ok(RunOne::Exhausted);
            }
            Ok(RunOne::Outcome(Box::new(Outcome {
                g: g.clone(),
                h: t.h.clone(),
                i: t.i.clone(),
                trace: vec![t],
            })))
        }
        Program::Choice(alts) => {
            let mut order: Vec<usize> = (0..alts.len()).collect();
            shuffle(&mut order, rng);
            let mut saw_exhausted = false;
            for idx in order {
                match sample(&alts[idx], g, rng, budget, steps)? {
                    RunOne::Outcome(o) => return Ok(RunOne::Outcome(o)),
                    RunOne::Empty => {}
                    RunOne::Exhausted => saw_exhausted = true,
                }
            }
            Ok(if saw_exhausted { RunOne::Exhausted } else { RunOne::Empty })
        }
        Program::Seq(a, b) => {
            // Retry a few sampled prefixes before giving up; emptiness of the
            // first program is the only sound "Empty" here.
            let mut attempts = 0;
            loop {
                match sample(a, g, rng, budget, steps)? {
                    RunOne::Empty => return Ok(RunOne::Empty),
                    RunOne::Exhausted => return Ok(RunOne::Exhausted),
                    RunOne::Outcome(o1) => match sample(b, &o1.h, rng, budget, steps)? {
                        RunOne::Outcome(o2) => {
                            let i = o1.i.then(&o2.i)?;
                            let mut trace = o1.trace.clone();
                            trace.extend(o2.trace);
                            return Ok(RunOne::Outcome(Box::new(Outcome {
                                g: g.clone(),
                                h: o2.h.clone(),
                                i,
                                trace,
                            })));
                        }
                        _ => {
                            attempts += 1;
                            if attempts >= 8 || *steps >= budget.max_steps {
                                return Ok(RunOne::Exhausted);
                            }
                        }
                    },
                }
            }
        }
        Program::Try(body) => match sample(body, g, rng, budget, steps)? {
            RunOne::Outcome(o) => Ok(RunOne::Outcome(o)),
            RunOne::Empty => Ok(RunOne::Outcome(Box::new(Outcome::identity(g)))),
            RunOne::Exhausted => Ok(RunOne::Exhausted),
        },
        Program::Iterate(body) => {
            let mut anchor = g.clone();
            let mut trace: Vec<DirectTransformation> = Vec::new();
            loop {
                if *steps >= budget.max_steps {
                    return Ok(RunOne::Exhausted);
                }
                match sample(body, &anchor, rng, budget, steps)? {
                    RunOne::Empty => {
                        return Ok(RunOne::Outcome(Box::new(Outcome {
                            g: g.clone(),
                            h: anchor,
                            i: Morphism::identity(g.dom()).to_partial(),
                            trace,
                        })));
                    }
                    RunOne::Exhausted => return Ok(RunOne::Exhausted),
                    RunOne::Outcome(o) => {
                        if !o.i.is_total() {
                            return Err(Error::InvalidProgram(
                                "iterated body produced a partial interface relation".into(),
                            ));
                        }
                        anchor = o.i.then(&o.h.to_partial())?.to_total()?;
                        trace.extend(o.trace);
                    }
                }
            }
        }
    }
}

fn shuffle(xs: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..xs.len()).rev() {
        let j = rng.gen_range(0..=i);
        xs.swap(i, j);
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Skip => write!(f, "Skip"),
            Program::Call(r) => write!(f, "{r}"),
            Program::Choice(alts) => {
                let parts: Vec<String> = alts.iter().map(|p| p.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            Program::Seq(a, b) => write!(f, "⟨{a}; {b}⟩"),
            Program::Try(p) => write!(f, "try {p}"),
            Program::Iterate(p) => write!(f, "({p})↓"),
        }
    }
}
