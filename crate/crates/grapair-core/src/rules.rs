//! Rules and direct transformations.
//!
//! A plain rule is a span of id-based inclusions `L ↩ K ↪ R`. A full rule
//! adds a left application condition over `L`, interface morphisms
//! `x: X ↪ L` and `y: Y ↪ R`, and a dangling mode. Application at an anchor
//! `g: X ↪ G` selects a match `g′` with `g′ ∘ x = g` and `g′ ⊨ ac`, rewrites
//! by double pushout, and hands the narrowed comatch `h = h′ ∘ y` plus the
//! partial interface relation `i = y⁻¹ ∘ r ∘ l⁻¹ ∘ x` to the next step.
//!
//! In delete-dangling mode the match is fixed first, every dangling edge at
//! it is removed (and recorded on the step), and the plain rule is applied
//! afterwards — the single-pushout style of rewriting as a rule decoration.

use std::collections::BTreeSet;
use std::fmt;

use crate::condition::{satisfies, Condition};
use crate::embedding::extensions;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::morphism::{Morphism, PartialMorphism};
use crate::pushout::{pushout, pushout_complement, validate_pushout_square};

/// `L ↩ K ↪ R`, both legs id-based inclusions sharing the domain `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    left: Morphism,
    right: Morphism,
}

impl Span {
    pub fn new(left: Morphism, right: Morphism) -> Result<Self> {
        if left.dom() != right.dom() {
            return Err(Error::InvalidRule("span legs must share their domain".into()));
        }
        if !left.is_inclusion() || !right.is_inclusion() {
            return Err(Error::InvalidRule("span legs must be id-based inclusions".into()));
        }
        Ok(Span { left, right })
    }

    /// Builds the span from the three graphs, with `k ⊆ l` and `k ⊆ r`.
    pub fn from_graphs(l: &Graph, k: &Graph, r: &Graph) -> Result<Self> {
        Span::new(Morphism::inclusion(k, l)?, Morphism::inclusion(k, r)?)
    }

    pub fn left(&self) -> &Morphism {
        &self.left
    }

    pub fn right(&self) -> &Morphism {
        &self.right
    }

    pub fn lhs(&self) -> &Graph {
        self.left.cod()
    }

    pub fn interface(&self) -> &Graph {
        self.left.dom()
    }

    pub fn rhs(&self) -> &Graph {
        self.right.cod()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainRule {
    pub name: String,
    pub span: Span,
}

impl PlainRule {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        PlainRule { name: name.into(), span }
    }

    pub fn lhs(&self) -> &Graph {
        self.span.lhs()
    }

    pub fn interface(&self) -> &Graph {
        self.span.interface()
    }

    pub fn rhs(&self) -> &Graph {
        self.span.rhs()
    }
}

/// The inverse rule `R ↩ K ↪ L`.
pub fn inverse(p: &PlainRule) -> PlainRule {
    PlainRule {
        name: format!("{}⁻¹", p.name),
        span: Span { left: p.span.right.clone(), right: p.span.left.clone() },
    }
}

/// Equips a plain rule with context `c: K ↪ K′`: both sides become pushouts,
/// keeping `K′`'s ids so the result is again a span of inclusions.
pub fn with_context(p: &PlainRule, c: &Morphism) -> Result<PlainRule> {
    if c.dom() != p.interface() {
        return Err(Error::DomainMismatch("context must extend the rule interface".into()));
    }
    let (_, _, kp_to_lp) = crate::pushout::pushout_with_side(&p.span.left, c, "l")?;
    let (_, _, kp_to_rp) = crate::pushout::pushout_with_side(&p.span.right, c, "r")?;
    // pushout keeps the K′ side, so both returned d-legs are inclusions of K′.
    Ok(PlainRule {
        name: format!("{}+ctx", p.name),
        span: Span::new(kp_to_lp, kp_to_rp)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DanglingMode {
    #[default]
    Standard,
    DeleteDangling,
}

/// A rule with application condition and interfaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    x: Morphism,
    plain: PlainRule,
    ac: Condition,
    y: Morphism,
    pub mode: DanglingMode,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        x: Morphism,
        plain: PlainRule,
        ac: Condition,
        y: Morphism,
        mode: DanglingMode,
    ) -> Result<Self> {
        if x.cod() != plain.lhs() {
            return Err(Error::InvalidRule("left interface must map into L".into()));
        }
        if y.cod() != plain.rhs() {
            return Err(Error::InvalidRule("right interface must map into R".into()));
        }
        if ac.ctx() != plain.lhs() {
            return Err(Error::InvalidRule("application condition must live over L".into()));
        }
        let r = Rule { name: name.into(), x, plain, ac, y, mode };
        // the interface relation must compose into a valid partial morphism
        r.interface_relation()?;
        Ok(r)
    }

    /// A plain rule promoted to a full rule: empty interfaces, `true` AC.
    pub fn from_plain(p: PlainRule, mode: DanglingMode) -> Result<Self> {
        let x = Morphism::inclusion(&Graph::empty(), p.lhs())?;
        let y = Morphism::inclusion(&Graph::empty(), p.rhs())?;
        let ac = Condition::tt(p.lhs().clone());
        Rule::new(p.name.clone(), x, p, ac, y, mode)
    }

    /// `select(x, ac) = ⟨x, id_C, ac, id_C⟩`: fixes an occurrence of `C`
    /// extending the anchored `X`, widening the interface. Leaves the host
    /// untouched.
    pub fn select(x: Morphism, ac: Condition) -> Result<Self> {
        let c = x.cod().clone();
        let id = Morphism::identity(&c);
        Rule::new(
            "select",
            x,
            PlainRule::new("id", Span::new(id.clone(), id.clone())?),
            ac,
            id,
            DanglingMode::Standard,
        )
    }

    /// `unselect(x) = ⟨id_C, id_C, true, x⟩`: forgets the selection down to
    /// `X`, narrowing the interface. Leaves the host untouched.
    pub fn unselect(x: Morphism) -> Result<Self> {
        let c = x.cod().clone();
        let id = Morphism::identity(&c);
        Rule::new(
            "unselect",
            id.clone(),
            PlainRule::new("id", Span::new(id.clone(), id)?),
            Condition::tt(c),
            x,
            DanglingMode::Standard,
        )
    }

    pub fn x(&self) -> &Morphism {
        &self.x
    }

    pub fn y(&self) -> &Morphism {
        &self.y
    }

    pub fn plain(&self) -> &PlainRule {
        &self.plain
    }

    pub fn ac(&self) -> &Condition {
        &self.ac
    }

    /// Left interface graph `X`.
    pub fn left_interface(&self) -> &Graph {
        self.x.dom()
    }

    /// Right interface graph `Y`.
    pub fn right_interface(&self) -> &Graph {
        self.y.dom()
    }

    /// A copy of the rule with the dangling-edges decoration.
    pub fn primed(&self) -> Rule {
        let mut r = self.clone();
        r.mode = DanglingMode::DeleteDangling;
        r
    }

    /// `i = y⁻¹ ∘ r ∘ l⁻¹ ∘ x : X ⇀ Y`.
    pub fn interface_relation(&self) -> Result<PartialMorphism> {
        self.x
            .to_partial()
            .then(&self.plain.span.left.to_partial().inverse())?
            .then(&self.plain.span.right.to_partial())?
            .then(&self.y.to_partial().inverse())
    }

    /// True for `select`/`unselect`-style rules: identity span.
    pub fn is_identity_span(&self) -> bool {
        self.plain.lhs() == self.plain.interface() && self.plain.rhs() == self.plain.interface()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity_span() {
            if self.name == "select" {
                if self.ac.is_true() {
                    return write!(f, "select({} ↪ {})", self.x.dom().brief(), self.x.cod().brief());
                }
                return write!(
                    f,
                    "select({} ↪ {}, {})",
                    self.x.dom().brief(),
                    self.x.cod().brief(),
                    self.ac
                );
            }
            if self.name == "unselect" {
                return write!(f, "unselect({} ↪ {})", self.y.dom().brief(), self.y.cod().brief());
            }
        }
        let prime = match self.mode {
            DanglingMode::Standard => "",
            DanglingMode::DeleteDangling => "′",
        };
        if self.ac.is_true() {
            write!(f, "{}{}⟨{} ⇒ {}⟩", self.name, prime, self.plain.lhs().brief(), self.plain.rhs().brief())
        } else {
            write!(
                f,
                "{}{}⟨{} ⇒ {}, {}⟩",
                self.name,
                prime,
                self.plain.lhs().brief(),
                self.plain.rhs().brief(),
                self.ac
            )
        }
    }
}

/// One rule application, carrying the full double-pushout diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectTransformation {
    pub rule: Rule,
    /// Anchor `g: X ↪ G`.
    pub g: Morphism,
    /// Match `g′: L ↪ G` with `g = g′ ∘ x`.
    pub matched: Morphism,
    pub host: Graph,
    pub result: Graph,
    /// Comatch `h′: R ↪ H`.
    pub comatch: Morphism,
    /// `h = h′ ∘ y : Y ↪ H`.
    pub h: Morphism,
    /// Interface relation `i: X ⇀ Y`.
    pub i: PartialMorphism,
    /// DPO intermediate graph `D` with its legs into `G` and `H`.
    pub cut: Graph,
    pub cut_to_host: Morphism,
    pub cut_to_result: Morphism,
    /// Edges removed up front by the dangling-edges decoration.
    pub deleted_dangling: BTreeSet<EdgeId>,
}

/// All admissible applications of `rule` at anchor `g: X ↪ G`, one per match,
/// in canonical match order. An empty list means the rule is not applicable.
pub fn apply_all(rule: &Rule, g: &Morphism) -> Result<Vec<DirectTransformation>> {
    if g.dom() != rule.left_interface() {
        return Err(Error::InterfaceMismatch(format!(
            "rule expects interface {}, anchor has {}",
            rule.left_interface().brief(),
            g.dom().brief()
        )));
    }
    let host = g.cod().clone();
    let mut out = Vec::new();
    for m in extensions(g, &rule.x)? {
        if !satisfies(&m, &rule.ac)? {
            continue;
        }
        let (work_host, work_match, deleted) = match rule.mode {
            DanglingMode::Standard => (host.clone(), m.clone(), BTreeSet::new()),
            DanglingMode::DeleteDangling => {
                let deleted = dangling_edges(&rule.plain, &m);
                let mut trimmed = host.clone();
                for e in &deleted {
                    trimmed.remove_edge(e);
                }
                let m2 = Morphism::new(
                    m.dom().clone(),
                    trimmed.clone(),
                    m.node_map().clone(),
                    m.edge_map().clone(),
                )?;
                (trimmed, m2, deleted)
            }
        };
        let pc = pushout_complement(&rule.plain.span.left, &work_match);
        let (cut, k_to_cut, _) = match pc {
            Ok(v) => v,
            Err(Error::Dangling(_)) => continue,
            Err(e) => return Err(e),
        };
        let (result, comatch, cut_to_result) = pushout(&rule.plain.span.right, &k_to_cut)?;
        let h = rule.y.then(&comatch)?;
        let i = rule.interface_relation()?;
        let cut_to_host = Morphism::inclusion(&cut, &host)?;
        let _ = work_host;
        out.push(DirectTransformation {
            rule: rule.clone(),
            g: g.clone(),
            matched: m,
            host: host.clone(),
            result,
            comatch,
            h,
            i,
            cut,
            cut_to_host,
            cut_to_result,
            deleted_dangling: deleted,
        });
    }
    Ok(out)
}

/// The dangling edges of a match: host edges outside the match image that are
/// incident to a node the rule deletes.
pub fn dangling_edges(p: &PlainRule, m: &Morphism) -> BTreeSet<EdgeId> {
    let host = m.cod();
    let deleted_nodes: BTreeSet<_> = p
        .lhs()
        .node_ids()
        .filter(|n| !p.interface().has_node(n))
        .map(|n| m.node_map()[n].clone())
        .collect();
    let matched_edges: BTreeSet<_> = m.edge_map().values().cloned().collect();
    host.edges()
        .filter(|(id, e)| {
            !matched_edges.contains(*id)
                && (deleted_nodes.contains(&e.src) || deleted_nodes.contains(&e.tgt))
        })
        .map(|(id, _)| id.clone())
        .collect()
}

/// The bottom span `G ↩ D ↪ H` of a step, as a plain rule.
pub fn derived_rule(t: &DirectTransformation) -> Result<PlainRule> {
    Ok(PlainRule::new(
        format!("{}#derived", t.rule.name),
        Span::new(t.cut_to_host.clone(), t.cut_to_result.clone())?,
    ))
}

/// The track morphism of a step: defined exactly on items of `G` with a
/// preimage in `D`, mapping through `r* ∘ (l*)⁻¹`.
pub fn track_of_step(t: &DirectTransformation) -> Result<PartialMorphism> {
    t.cut_to_host.to_partial().inverse().then(&t.cut_to_result.to_partial())
}

/// The composed track morphism of a chain of steps (total identity for the
/// empty chain over `start`).
pub fn track_of_trace(start: &Graph, steps: &[DirectTransformation]) -> Result<PartialMorphism> {
    let mut track = Morphism::identity(start).to_partial();
    for s in steps {
        track = track.then(&track_of_step(s)?)?;
    }
    Ok(track)
}

/// Re-validates everything a direct transformation claims: the anchor and
/// comatch factorizations, the application condition, both pushout squares
/// (accounting for edges removed by the dangling decoration), and the
/// interface equation `h ∘ i = tr ∘ g` where `i` is defined.
pub fn validate_step(t: &DirectTransformation) -> Result<()> {
    if t.rule.x.then(&t.matched)? != t.g {
        return Err(Error::InvalidRule("anchor does not factor through the match".into()));
    }
    if t.rule.y.then(&t.comatch)? != t.h {
        return Err(Error::InvalidRule("h does not factor through the comatch".into()));
    }
    if !satisfies(&t.matched, &t.rule.ac)? {
        return Err(Error::InvalidRule("match violates the application condition".into()));
    }
    let mut trimmed = t.host.clone();
    for e in &t.deleted_dangling {
        trimmed.remove_edge(e);
    }
    let m = Morphism::new(
        t.matched.dom().clone(),
        trimmed.clone(),
        t.matched.node_map().clone(),
        t.matched.edge_map().clone(),
    )?;
    let cut_to_trimmed = Morphism::inclusion(&t.cut, &trimmed)?;
    let k_to_cut = t.rule.plain.span.left.then(&m)?;
    let k_to_cut = Morphism::new(
        k_to_cut.dom().clone(),
        t.cut.clone(),
        k_to_cut.node_map().clone(),
        k_to_cut.edge_map().clone(),
    )?;
    validate_pushout_square(&t.rule.plain.span.left, &k_to_cut, &m, &cut_to_trimmed)?;
    validate_pushout_square(&t.rule.plain.span.right, &k_to_cut, &t.comatch, &t.cut_to_result)?;

    let track = track_of_step(t)?;
    let via_i = t.i.then(&t.h.to_partial())?;
    let via_track = t.g.to_partial().then(&track)?;
    for (k, v) in via_i.node_map() {
        if via_track.apply_node(k) != Some(v) {
            return Err(Error::InvalidRule("interface relation disagrees with the track".into()));
        }
    }
    for (k, v) in via_i.edge_map() {
        if via_track.apply_edge(k) != Some(v) {
            return Err(Error::InvalidRule("interface relation disagrees with the track".into()));
        }
    }
    Ok(())
}
