//! The railroad fixture corpus: waypoints connected by tracks, trains as
//! edges whose source/target encode position and heading.
//!
//! Tracks are bi-directional in the domain but the formal model is directed:
//! a track is stored as a single directed `track` edge, and rules meant to
//! match either orientation are expanded into explicit directed variants by
//! [`orientation_variants`] at load time. The shipped fixtures orient all
//! tracks consistently, so the base rules apply as-is.

use crate::condition::Condition;
use crate::error::Result;
use crate::graph::Graph;
use crate::morphism::Morphism;
use crate::rulebased::RuleSet;
use crate::rules::{PlainRule, Span};

pub const WAYPOINT: &str = "wp";
pub const TRACK: &str = "track";
pub const TRAIN: &str = "train";
pub const STATION: &str = "station";

fn g(s: &str) -> Graph {
    Graph::parse_brief(s).expect("fixture graphs are well-formed")
}

/// Removes the train from a track: `⟨wp—wp + train ⟵ wp—wp ⟶ wp—wp⟩`.
pub fn delete_rule() -> PlainRule {
    let l = g("1:wp 2:wp; t12:1->2:track ln:1->2:train");
    let k = g("1:wp 2:wp; t12:1->2:track");
    PlainRule::new("Delete", Span::from_graphs(&l, &k, &k).expect("valid span"))
}

/// Moves a train one track forward.
pub fn move_rule() -> PlainRule {
    let l = g("1:wp 2:wp 3:wp; t12:1->2:track t23:2->3:track ln:1->2:train");
    let k = g("1:wp 2:wp 3:wp; t12:1->2:track t23:2->3:track");
    let r = g("1:wp 2:wp 3:wp; t12:1->2:track t23:2->3:track mv:2->3:train");
    PlainRule::new("Move", Span::from_graphs(&l, &k, &r).expect("valid span"))
}

/// Lays a track between two waypoints.
pub fn build_rule() -> PlainRule {
    let k = g("1:wp 2:wp");
    let r = g("1:wp 2:wp; t12:1->2:track");
    PlainRule::new("build", Span::from_graphs(&k, &k, &r).expect("valid span"))
}

pub fn move_delete_set() -> RuleSet {
    RuleSet::new(vec![move_rule(), delete_rule()]).expect("unique names")
}

/// "No two trains occupy the same piece of track."
pub fn no_two() -> Condition {
    let c = g("v1:wp v2:wp; tk:v1->v2:track l1:v1->v2:train l2:v1->v2:train");
    Condition::nexists_plain(Morphism::inclusion(&Graph::empty(), &c).expect("inclusion"))
        .expect("valid constraint")
}

/// "There exists a train station."
pub fn station() -> Condition {
    let c = g("s1:station");
    Condition::exists_plain(Morphism::inclusion(&Graph::empty(), &c).expect("inclusion"))
        .expect("valid constraint")
}

/// The two-train host violating [`no_two`].
pub fn two_trains() -> Graph {
    g("n1:wp n2:wp; t1:n1->n2:track r1:n1->n2:train r2:n1->n2:train")
}

/// A three-waypoint line with one train on the first track and a spare track.
pub fn train_with_spare_track() -> Graph {
    g("n1:wp n2:wp n3:wp; t1:n1->n2:track t2:n2->n3:track r1:n1->n2:train")
}

/// Unlabelled 3-node path (singleton alphabet).
pub fn three_path() -> Graph {
    g("u v w; p:u->v q:v->w")
}

/// "Every node has a real outgoing edge", over the singleton alphabet.
pub fn forall_outgoing() -> Condition {
    let one = g("1");
    let edge = g("1 2; e:1->2");
    Condition::forall(
        Morphism::inclusion(&Graph::empty(), &one).expect("inclusion"),
        Condition::exists_plain(Morphism::inclusion(&one, &edge).expect("inclusion"))
            .expect("valid"),
    )
    .expect("valid constraint")
}

/// Expands a rule into its directed track variants: every subset of its
/// `track`-labelled edges flipped. The unflipped rule comes first and keeps
/// its name; variants get a `~k` suffix.
pub fn orientation_variants(p: &PlainRule) -> Result<Vec<PlainRule>> {
    let track_edges: Vec<crate::graph::EdgeId> = {
        let mut ids: Vec<_> = p
            .lhs()
            .edges()
            .chain(p.rhs().edges())
            .filter(|(_, e)| e.label.as_str() == TRACK)
            .map(|(id, _)| id.clone())
            .collect();
        ids.sort();
        ids.dedup();
        ids
    };
    let mut out = Vec::new();
    for mask in 0..(1u32 << track_edges.len()) {
        let flip: Vec<_> = track_edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, id)| id.clone())
            .collect();
        let flip_graph = |graph: &Graph| -> Result<Graph> {
            let mut out = Graph::empty();
            for (id, l) in graph.nodes() {
                out.add_node(id.clone(), l.clone())?;
            }
            for (id, e) in graph.edges() {
                if flip.contains(id) {
                    out.add_edge(id.clone(), e.tgt.clone(), e.src.clone(), e.label.clone())?;
                } else {
                    out.add_edge(id.clone(), e.src.clone(), e.tgt.clone(), e.label.clone())?;
                }
            }
            Ok(out)
        };
        let name =
            if mask == 0 { p.name.clone() } else { format!("{}~{mask}", p.name) };
        out.push(PlainRule::new(
            name,
            Span::from_graphs(&flip_graph(p.lhs())?, &flip_graph(p.interface())?, &flip_graph(p.rhs())?)?,
        ));
    }
    Ok(out)
}
