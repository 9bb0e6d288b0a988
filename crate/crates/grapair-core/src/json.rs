//! JSON wire formats for graphs, morphisms, conditions, rules, rule sets and
//! programs.
//!
//! Conditions accept the sugar kinds `forall`, `nexists`, `false` and `or` on
//! load and are emitted in core form (`true`/`exists`/`not`/`and`) with the
//! context graph spelled out at the root. Programs round-trip `select` and
//! `unselect` as their own kinds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::condition::{Body, Condition};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Label, NodeId};
use crate::morphism::{Morphism, PartialMorphism};
use crate::program::{Outcome, Program};
use crate::rulebased::RuleSet;
use crate::rules::{DanglingMode, PlainRule, Rule, Span};

fn default_label() -> String {
    "n".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeDto {
    pub id: String,
    #[serde(default = "default_label")]
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDto {
    pub id: String,
    pub src: String,
    pub tgt: String,
    #[serde(default = "default_label")]
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct GraphDto {
    #[serde(default)]
    pub nodes: Vec<NodeDto>,
    #[serde(default)]
    pub edges: Vec<EdgeDto>,
}

impl GraphDto {
    pub fn from_graph(g: &Graph) -> Self {
        GraphDto {
            nodes: g
                .nodes()
                .map(|(id, l)| NodeDto { id: id.0.clone(), label: l.0.clone() })
                .collect(),
            edges: g
                .edges()
                .map(|(id, e)| EdgeDto {
                    id: id.0.clone(),
                    src: e.src.0.clone(),
                    tgt: e.tgt.0.clone(),
                    label: e.label.0.clone(),
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        let mut g = Graph::empty();
        for n in &self.nodes {
            g.add_node(NodeId(n.id.clone()), Label(n.label.clone()))?;
        }
        for e in &self.edges {
            g.add_edge(
                EdgeId(e.id.clone()),
                NodeId(e.src.clone()),
                NodeId(e.tgt.clone()),
                Label(e.label.clone()),
            )?;
        }
        if let Err(v) = g.validate() {
            return Err(Error::InvalidGraph(v.to_string()));
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismDto {
    pub dom: GraphDto,
    pub cod: GraphDto,
    #[serde(default)]
    pub nodes: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: BTreeMap<String, String>,
}

impl MorphismDto {
    pub fn from_morphism(m: &Morphism) -> Self {
        MorphismDto {
            dom: GraphDto::from_graph(m.dom()),
            cod: GraphDto::from_graph(m.cod()),
            nodes: m.node_map().iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect(),
            edges: m.edge_map().iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect(),
        }
    }

    pub fn from_partial(m: &PartialMorphism) -> Self {
        MorphismDto {
            dom: GraphDto::from_graph(m.dom()),
            cod: GraphDto::from_graph(m.cod()),
            nodes: m.node_map().iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect(),
            edges: m.edge_map().iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect(),
        }
    }

    pub fn to_morphism(&self) -> Result<Morphism> {
        Morphism::new(
            self.dom.to_graph()?,
            self.cod.to_graph()?,
            self.nodes.iter().map(|(a, b)| (NodeId(a.clone()), NodeId(b.clone()))).collect(),
            self.edges.iter().map(|(a, b)| (EdgeId(a.clone()), EdgeId(b.clone()))).collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CondDto {
    True {
        #[serde(skip_serializing_if = "Option::is_none")]
        ctx: Option<GraphDto>,
    },
    False {
        #[serde(skip_serializing_if = "Option::is_none")]
        ctx: Option<GraphDto>,
    },
    Exists {
        #[serde(skip_serializing_if = "Option::is_none")]
        ctx: Option<GraphDto>,
        mor: MorphismDto,
        #[serde(skip_serializing_if = "Option::is_none")]
        sub: Option<Box<CondDto>>,
    },
    Nexists {
        #[serde(skip_serializing_if = "Option::is_none")]
        ctx: Option<GraphDto>,
        mor: MorphismDto,
        #[serde(skip_serializing_if = "Option::is_none")]
        sub: Option<Box<CondDto>>,
    },
    Forall {
        #[serde(skip_serializing_if = "Option::is_none")]
        ctx: Option<GraphDto>,
        mor: MorphismDto,
        sub: Box<CondDto>,
    },
    Not {
        #[serde(skip_serializing_if = "Option::is_none")]
        ctx: Option<GraphDto>,
        sub: Box<CondDto>,
    },
    And {
        #[serde(skip_serializing_if = "Option::is_none")]
        ctx: Option<GraphDto>,
        subs: Vec<CondDto>,
    },
    Or {
        #[serde(skip_serializing_if = "Option::is_none")]
        ctx: Option<GraphDto>,
        subs: Vec<CondDto>,
    },
}

impl CondDto {
    pub fn from_condition(c: &Condition, with_ctx: bool) -> Self {
        let ctx = with_ctx.then(|| GraphDto::from_graph(c.ctx()));
        match c.body() {
            Body::True => CondDto::True { ctx },
            Body::Exists { mor, sub } => CondDto::Exists {
                ctx,
                mor: MorphismDto::from_morphism(mor),
                sub: if sub.is_true() {
                    None
                } else {
                    Some(Box::new(CondDto::from_condition(sub, false)))
                },
            },
            Body::Not(sub) => {
                CondDto::Not { ctx, sub: Box::new(CondDto::from_condition(sub, false)) }
            }
            Body::And(subs) => CondDto::And {
                ctx,
                subs: subs.iter().map(|s| CondDto::from_condition(s, false)).collect(),
            },
        }
    }

    pub fn to_condition(&self, expected_ctx: Option<&Graph>) -> Result<Condition> {
        let resolve = |explicit: &Option<GraphDto>| -> Result<Graph> {
            match (explicit, expected_ctx) {
                (Some(dto), Some(exp)) => {
                    let g = dto.to_graph()?;
                    if &g != exp {
                        return Err(Error::ContextMismatch(
                            "explicit context disagrees with the enclosing condition".into(),
                        ));
                    }
                    Ok(g)
                }
                (Some(dto), None) => dto.to_graph(),
                (None, Some(exp)) => Ok(exp.clone()),
                (None, None) => Err(Error::Parse(
                    "condition needs a context: add a \"ctx\" graph".into(),
                )),
            }
        };
        match self {
            CondDto::True { ctx } => Ok(Condition::tt(resolve(ctx)?)),
            CondDto::False { ctx } => Ok(Condition::ff(resolve(ctx)?)),
            CondDto::Exists { ctx, mor, sub } => {
                let m = mor.to_morphism()?;
                if let Some(exp) = expected_ctx {
                    if m.dom() != exp {
                        return Err(Error::ContextMismatch(
                            "quantifier domain disagrees with the enclosing condition".into(),
                        ));
                    }
                }
                if let Some(c) = ctx {
                    if &c.to_graph()? != m.dom() {
                        return Err(Error::ContextMismatch(
                            "explicit context disagrees with the quantifier domain".into(),
                        ));
                    }
                }
                let inner = match sub {
                    Some(s) => s.to_condition(Some(m.cod()))?,
                    None => Condition::tt(m.cod().clone()),
                };
                Condition::exists(m, inner)
            }
            CondDto::Nexists { ctx, mor, sub } => {
                let inner = CondDto::Exists { ctx: ctx.clone(), mor: mor.clone(), sub: sub.clone() };
                Ok(Condition::not(inner.to_condition(expected_ctx)?))
            }
            CondDto::Forall { ctx, mor, sub } => {
                let inner = CondDto::Exists {
                    ctx: ctx.clone(),
                    mor: mor.clone(),
                    sub: Some(Box::new(CondDto::Not { ctx: None, sub: sub.clone() })),
                };
                Ok(Condition::not(inner.to_condition(expected_ctx)?))
            }
            CondDto::Not { ctx, sub } => {
                let ctx = match (ctx, expected_ctx) {
                    (_, Some(_)) => None,
                    (Some(c), None) => Some(c.to_graph()?),
                    (None, None) => None,
                };
                let inner = sub.to_condition(expected_ctx.or(ctx.as_ref()))?;
                Ok(Condition::not(inner))
            }
            CondDto::And { ctx, subs } => {
                let ctx = match (expected_ctx, ctx) {
                    (Some(e), _) => e.clone(),
                    (None, Some(c)) => c.to_graph()?,
                    (None, None) => {
                        return Err(Error::Parse("conjunction needs a \"ctx\" graph".into()))
                    }
                };
                let parts: Result<Vec<Condition>> =
                    subs.iter().map(|s| s.to_condition(Some(&ctx))).collect();
                Condition::and(ctx, parts?)
            }
            CondDto::Or { ctx, subs } => {
                let ctx = match (expected_ctx, ctx) {
                    (Some(e), _) => e.clone(),
                    (None, Some(c)) => c.to_graph()?,
                    (None, None) => {
                        return Err(Error::Parse("disjunction needs a \"ctx\" graph".into()))
                    }
                };
                let parts: Result<Vec<Condition>> =
                    subs.iter().map(|s| s.to_condition(Some(&ctx))).collect();
                Condition::or(ctx, parts?)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleDto {
    pub name: String,
    #[serde(rename = "L")]
    pub l: GraphDto,
    #[serde(rename = "K")]
    pub k: GraphDto,
    #[serde(rename = "R")]
    pub r: GraphDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ac: Option<CondDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<MorphismDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<MorphismDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dangling: Option<String>,
}

impl RuleDto {
    pub fn from_rule(r: &Rule) -> Self {
        RuleDto {
            name: r.name.clone(),
            l: GraphDto::from_graph(r.plain().lhs()),
            k: GraphDto::from_graph(r.plain().interface()),
            r: GraphDto::from_graph(r.plain().rhs()),
            ac: if r.ac().is_true() {
                None
            } else {
                Some(CondDto::from_condition(r.ac(), true))
            },
            x: if r.x().dom().is_empty() { None } else { Some(MorphismDto::from_morphism(r.x())) },
            y: if r.y().dom().is_empty() { None } else { Some(MorphismDto::from_morphism(r.y())) },
            dangling: match r.mode {
                DanglingMode::Standard => None,
                DanglingMode::DeleteDangling => Some("delete".into()),
            },
        }
    }

    pub fn from_plain(p: &PlainRule) -> Self {
        RuleDto {
            name: p.name.clone(),
            l: GraphDto::from_graph(p.lhs()),
            k: GraphDto::from_graph(p.interface()),
            r: GraphDto::from_graph(p.rhs()),
            ac: None,
            x: None,
            y: None,
            dangling: None,
        }
    }

    pub fn to_rule(&self) -> Result<Rule> {
        let l = self.l.to_graph()?;
        let k = self.k.to_graph()?;
        let r = self.r.to_graph()?;
        let plain = PlainRule::new(self.name.clone(), Span::from_graphs(&l, &k, &r)?);
        let x = match &self.x {
            Some(m) => m.to_morphism()?,
            None => Morphism::inclusion(&Graph::empty(), &l)?,
        };
        let y = match &self.y {
            Some(m) => m.to_morphism()?,
            None => Morphism::inclusion(&Graph::empty(), &r)?,
        };
        let ac = match &self.ac {
            Some(c) => c.to_condition(Some(&l))?,
            None => Condition::tt(l.clone()),
        };
        let mode = match self.dangling.as_deref() {
            None | Some("standard") => DanglingMode::Standard,
            Some("delete") => DanglingMode::DeleteDangling,
            Some(other) => return Err(Error::Parse(format!("unknown dangling mode {other:?}"))),
        };
        Rule::new(self.name.clone(), x, plain, ac, y, mode)
    }

    pub fn to_plain(&self) -> Result<PlainRule> {
        if self.ac.is_some() || self.x.is_some() || self.y.is_some() || self.dangling.is_some() {
            return Err(Error::Parse(format!(
                "rule {} must be plain (no ac, interfaces, or dangling mode)",
                self.name
            )));
        }
        let l = self.l.to_graph()?;
        let k = self.k.to_graph()?;
        let r = self.r.to_graph()?;
        Ok(PlainRule::new(self.name.clone(), Span::from_graphs(&l, &k, &r)?))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleSetDto {
    pub rules: Vec<RuleDto>,
}

impl RuleSetDto {
    pub fn from_rule_set(rs: &RuleSet) -> Self {
        RuleSetDto { rules: rs.rules().iter().map(RuleDto::from_plain).collect() }
    }

    pub fn to_rule_set(&self) -> Result<RuleSet> {
        let rules: Result<Vec<PlainRule>> = self.rules.iter().map(|r| r.to_plain()).collect();
        RuleSet::new(rules?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProgramDto {
    Skip,
    Rule {
        rule: RuleDto,
    },
    Select {
        mor: MorphismDto,
        #[serde(skip_serializing_if = "Option::is_none")]
        ac: Option<CondDto>,
    },
    Unselect {
        mor: MorphismDto,
    },
    Choice {
        alts: Vec<ProgramDto>,
    },
    Seq {
        steps: Vec<ProgramDto>,
    },
    Try {
        body: Box<ProgramDto>,
    },
    Iterate {
        body: Box<ProgramDto>,
    },
}

impl ProgramDto {
    pub fn from_program(p: &Program) -> Self {
        match p {
            Program::Skip => ProgramDto::Skip,
            Program::Call(r) if r.name == "select" && r.is_identity_span() => ProgramDto::Select {
                mor: MorphismDto::from_morphism(r.x()),
                ac: if r.ac().is_true() {
                    None
                } else {
                    Some(CondDto::from_condition(r.ac(), true))
                },
            },
            Program::Call(r) if r.name == "unselect" && r.is_identity_span() => {
                ProgramDto::Unselect { mor: MorphismDto::from_morphism(r.y()) }
            }
            Program::Call(r) => ProgramDto::Rule { rule: RuleDto::from_rule(r) },
            Program::Choice(alts) => {
                ProgramDto::Choice { alts: alts.iter().map(ProgramDto::from_program).collect() }
            }
            Program::Seq(a, b) => {
                // flatten right-nested sequences into a step list
                let mut steps = vec![ProgramDto::from_program(a)];
                let mut cur = b.as_ref();
                while let Program::Seq(x, y) = cur {
                    steps.push(ProgramDto::from_program(x));
                    cur = y;
                }
                steps.push(ProgramDto::from_program(cur));
                ProgramDto::Seq { steps }
            }
            Program::Try(body) => ProgramDto::Try { body: Box::new(ProgramDto::from_program(body)) },
            Program::Iterate(body) => {
                ProgramDto::Iterate { body: Box::new(ProgramDto::from_program(body)) }
            }
        }
    }

    pub fn to_program(&self) -> Result<Program> {
        Ok(match self {
            ProgramDto::Skip => Program::Skip,
            ProgramDto::Rule { rule } => Program::call(rule.to_rule()?),
            ProgramDto::Select { mor, ac } => {
                let x = mor.to_morphism()?;
                let ac = match ac {
                    Some(c) => c.to_condition(Some(x.cod()))?,
                    None => Condition::tt(x.cod().clone()),
                };
                Program::call(Rule::select(x, ac)?)
            }
            ProgramDto::Unselect { mor } => Program::call(Rule::unselect(mor.to_morphism()?)?),
            ProgramDto::Choice { alts } => {
                let parts: Result<Vec<Program>> = alts.iter().map(|a| a.to_program()).collect();
                Program::Choice(parts?)
            }
            ProgramDto::Seq { steps } => {
                let parts: Result<Vec<Program>> = steps.iter().map(|s| s.to_program()).collect();
                Program::seq_all(parts?)
            }
            ProgramDto::Try { body } => Program::try_(body.to_program()?),
            ProgramDto::Iterate { body } => Program::iterate(body.to_program()?),
        })
    }
}

/// Serialized run result for the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeDto {
    pub result: GraphDto,
    pub h: MorphismDto,
    pub i: MorphismDto,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preservation: Option<PreservationDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreservationDto {
    pub preserved: usize,
    pub size_g: usize,
    pub delta: usize,
    pub bound_holds: bool,
}

impl OutcomeDto {
    pub fn from_outcome(o: &Outcome) -> Self {
        OutcomeDto {
            result: GraphDto::from_graph(o.result()),
            h: MorphismDto::from_morphism(&o.h),
            i: MorphismDto::from_partial(&o.i),
            steps: o.trace.len(),
            preservation: None,
        }
    }
}

fn de<T: serde::de::DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

fn ser<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialization cannot fail")
}

pub fn parse_graph(s: &str) -> Result<Graph> {
    de::<GraphDto>(s)?.to_graph()
}

pub fn graph_to_json(g: &Graph) -> String {
    ser(&GraphDto::from_graph(g))
}

pub fn parse_morphism(s: &str) -> Result<Morphism> {
    de::<MorphismDto>(s)?.to_morphism()
}

pub fn morphism_to_json(m: &Morphism) -> String {
    ser(&MorphismDto::from_morphism(m))
}

pub fn parse_condition(s: &str) -> Result<Condition> {
    de::<CondDto>(s)?.to_condition(None)
}

pub fn condition_to_json(c: &Condition) -> String {
    ser(&CondDto::from_condition(c, true))
}

pub fn parse_rule(s: &str) -> Result<Rule> {
    de::<RuleDto>(s)?.to_rule()
}

pub fn rule_to_json(r: &Rule) -> String {
    ser(&RuleDto::from_rule(r))
}

pub fn parse_rule_set(s: &str) -> Result<RuleSet> {
    de::<RuleSetDto>(s)?.to_rule_set()
}

pub fn rule_set_to_json(rs: &RuleSet) -> String {
    ser(&RuleSetDto::from_rule_set(rs))
}

pub fn parse_program(s: &str) -> Result<Program> {
    de::<ProgramDto>(s)?.to_program()
}

pub fn program_to_json(p: &Program) -> String {
    ser(&ProgramDto::from_program(p))
}
