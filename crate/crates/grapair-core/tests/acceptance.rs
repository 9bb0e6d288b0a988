//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the numbers it verified (run with `--nocapture` to see them).
//!
//! The sweeps are seeded and deterministic. Criteria 2–4 share one sweep
//! (computed once): randomly generated proper conditions with context graphs
//! of at most 3 nodes and quantifier depth at most 3, run against hosts of at
//! most 5 nodes with both repairing-set constructions.

mod common;

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::oracle;
use grapair_core::condition::{satisfies, Condition};
use grapair_core::embedding::{enumerate_monos, is_isomorphic};
use grapair_core::graph::{Graph, Label, NodeId};
use grapair_core::morphism::Morphism;
use grapair_core::program::{run_all, Budget, Program};
use grapair_core::railroad;
use grapair_core::repair::{
    preservation_report, repair_program, repairing_set_v1, repairing_set_v2, repairing_sets_of,
    BasicTarget, PreservationReport, Variant,
};
use grapair_core::rulebased::{
    check_compatibility, equivalent_on_extensions, program_of_transformation, rule_based_repair,
    RuleBasedRepair, RuleSet, SearchOutcome, Transformation,
};
use grapair_core::rules::{apply_all, DanglingMode, Rule};
use grapair_core::shift::shift;

// ---------------------------------------------------------------------------
// Criterion 1: shift lemma
// ---------------------------------------------------------------------------

#[test]
fn acceptance_1_shift_lemma_oracle_suite() {
    let alphabet = common::labels(&["a", "b"]);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5317AC);
    let mut instances = 0usize;
    let mut anchor_checks = 0usize;
    for _ in 0..2_500 {
        let a = common::gen_graph(&mut rng, 2, 1, &alphabet);
        let r = common::gen_extension(&mut rng, &a, 2, 2, &alphabet);
        if r.node_count() > 4 {
            continue;
        }
        let b = Morphism::inclusion(&a, &r).unwrap();
        let d = common::gen_condition(&mut rng, &a, 2, &alphabet);
        let s = shift(&b, &d).expect("shift is total on valid input");
        instances += 1;
        // hosts grown from R so anchors exist; plus one unrelated host
        for host in [
            common::gen_extension(&mut rng, &r, 1, 2, &alphabet),
            common::gen_graph(&mut rng, 4, 4, &alphabet),
        ] {
            if host.node_count() > 4 {
                continue;
            }
            for n in enumerate_monos(&r, &host) {
                let lhs = satisfies(&b.then(&n).unwrap(), &d).unwrap();
                let rhs = satisfies(&n, &s).unwrap();
                assert_eq!(lhs, rhs, "counterexample: b = {b}, d = {d}, n = {n}");
                anchor_checks += 1;
            }
        }
    }
    assert!(instances >= 2_000 && anchor_checks >= 4_000, "sweep too small: {instances} / {anchor_checks}");
    println!(
        "ACCEPTANCE 1 (shift lemma): PASS — {instances} (b, d) instances, {anchor_checks} anchors, 0 counterexamples"
    );
}

// ---------------------------------------------------------------------------
// Criteria 2-4: the shared repair sweep
// ---------------------------------------------------------------------------

struct SweepRun {
    condition: Condition,
    host: Graph,
    variant: Variant,
    exhausted: bool,
    satisfied: usize,
    violated: usize,
    preservation: Vec<PreservationReport>,
}

fn sweep_budget() -> Budget {
    Budget { max_steps: 1_500, max_outcomes: 300, max_graph_size: 60 }
}

fn sweep() -> &'static Vec<SweepRun> {
    static SWEEP: OnceLock<Vec<SweepRun>> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let alphabet = common::labels(&["a", "b"]);
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE55);
        let mut runs = Vec::new();
        let mut conditions = 0;
        while conditions < 220 {
            // 3 in 4 constraints, 1 in 4 anchored conditions
            let anchored = conditions % 4 == 3;
            let ctx = if anchored {
                common::gen_graph(&mut rng, 1, 0, &alphabet)
            } else {
                Graph::empty()
            };
            let d = common::gen_proper_condition(&mut rng, &ctx, 3, &alphabet);
            conditions += 1;
            let mut hosts = 0;
            while hosts < 2 {
                let host = common::gen_graph(&mut rng, 5, 5, &alphabet);
                let Some(anchor) = common::gen_anchor(&mut rng, &ctx, &host) else {
                    if ctx.is_empty() {
                        unreachable!("the empty graph embeds everywhere");
                    }
                    continue;
                };
                hosts += 1;
                for variant in [Variant::V1, Variant::V2] {
                    let p = repair_program(&d, variant).expect("generated conditions are proper");
                    let got = run_all(&p, &anchor, &sweep_budget()).expect("typed program");
                    let mut satisfied = 0;
                    let mut violated = 0;
                    let mut preservation = Vec::new();
                    for o in &got.outcomes {
                        let handover =
                            o.i.then(&o.h.to_partial()).unwrap().to_total().unwrap();
                        if satisfies(&handover, &d).unwrap() {
                            satisfied += 1;
                        } else {
                            violated += 1;
                        }
                        if variant == Variant::V2 {
                            preservation.push(preservation_report(o, &d).unwrap());
                        }
                    }
                    runs.push(SweepRun {
                        condition: d.clone(),
                        host: host.clone(),
                        variant,
                        exhausted: got.exhausted,
                        satisfied,
                        violated,
                        preservation,
                    });
                }
            }
        }
        runs
    })
}

#[test]
fn acceptance_2_repair_soundness_sweep() {
    let runs = sweep();
    let conditions: std::collections::BTreeSet<String> =
        runs.iter().map(|r| r.condition.to_string()).collect();
    let mut outcomes = 0;
    for r in runs {
        assert_eq!(
            r.violated,
            0,
            "{} outcome(s) of {:?} for {} on {} violate the condition",
            r.violated,
            r.variant,
            r.condition,
            r.host.brief()
        );
        outcomes += r.satisfied;
    }
    assert!(conditions.len() >= 200, "need at least 200 distinct conditions: {}", conditions.len());
    assert!(outcomes > 1_000, "sweep too small: {outcomes}");
    println!(
        "ACCEPTANCE 2 (repair soundness): PASS — {} conditions, {} runs, {outcomes} outcomes, 100% satisfied",
        conditions.len(),
        runs.len()
    );
}

#[test]
fn acceptance_3_termination_contrast() {
    // v1 for ∀(•1, ∃ real outgoing) exceeds a 50-step budget on one node
    let d = railroad::forall_outgoing();
    let single = Graph::parse_brief("u").unwrap();
    let anchor = Morphism::inclusion(&Graph::empty(), &single).unwrap();
    let v1 = repair_program(&d, Variant::V1).unwrap();
    let tight = Budget { max_steps: 50, max_outcomes: 1_000, max_graph_size: 10_000 };
    let got = run_all(&v1, &anchor, &tight).unwrap();
    assert!(got.exhausted, "the unguarded completion program must out-run 50 steps");

    // v2 finishes every sweep run without exhaustion
    let mut v2_runs = 0;
    for r in sweep() {
        if r.variant == Variant::V2 {
            assert!(
                !r.exhausted,
                "v2 exhausted on {} for {}",
                r.host.brief(),
                r.condition
            );
            v2_runs += 1;
        }
    }
    println!(
        "ACCEPTANCE 3 (termination contrast): PASS — v1 exhausted a 50-step budget; v2 finished all {v2_runs} sweep runs"
    );
}

#[test]
fn acceptance_4_preservation_bound() {
    let mut checked = 0;
    for r in sweep() {
        for rep in &r.preservation {
            assert!(
                rep.preserved + rep.delta >= rep.size_g,
                "preserved {} < size {} − Δ {} for {} on {}",
                rep.preserved,
                rep.size_g,
                rep.delta,
                r.condition,
                r.host.brief()
            );
            checked += 1;
        }
    }
    assert!(checked > 500, "sweep too small: {checked}");
    println!(
        "ACCEPTANCE 4 (preservation bound): PASS — {checked} v2 outcomes, preserved ≥ size − Δ with 0 violations"
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: golden examples
// ---------------------------------------------------------------------------

#[test]
fn acceptance_5a_guarded_repairing_sets_reproduce_the_worked_example() {
    let one = Graph::parse_brief("1").unwrap();
    let edge = Graph::parse_brief("1 2; e:1->2").unwrap();
    let cyc = Graph::parse_brief("1 2; e:1->2 f:2->1").unwrap();
    let single_edge = Graph::parse_brief("1 2; e:1->2").unwrap();

    // ∃(•1 ↪ •1→•2)
    let t_exists = BasicTarget::Exists(Morphism::inclusion(&one, &edge).unwrap());
    let v1 = repairing_set_v1(&t_exists).unwrap();
    assert_eq!(v1.rules.len(), 1);
    assert_eq!(v1.rules[0].plain().lhs(), &one);
    assert_eq!(v1.rules[0].plain().rhs(), &edge);

    let v2 = repairing_set_v2(&t_exists).unwrap();
    assert_eq!(v2.rules.len(), 2, "one rule per intermediate graph");
    // rule 1 grows from the bare node, guarded by ∄(two nodes)
    let g1 = conjunct_shapes(v2.rules[0].ac());
    assert_eq!(g1, vec![(2, 0)], "first guard is a single ∄ over the discrete pair: {g1:?}");
    // rule 2 grows from two nodes, guarded by ∄(1→2) ∧ ∄(1→fresh with 2 apart)
    let mut g2 = conjunct_shapes(v2.rules[1].ac());
    g2.sort();
    assert_eq!(g2, vec![(2, 1), (3, 1)], "second guard has the two-part conjunction: {g2:?}");

    // ∄(•1 ↪ two-cycle)
    let t_nexists = BasicTarget::NotExists(Morphism::inclusion(&one, &cyc).unwrap());
    let s1 = repairing_set_v1(&t_nexists).unwrap();
    assert_eq!(s1.rules.len(), 1);
    assert_eq!(s1.rules[0].plain().lhs(), &cyc);
    assert_eq!(s1.rules[0].plain().rhs(), &one);

    let s2 = repairing_set_v2(&t_nexists).unwrap();
    // the id-level enumeration yields one rule per deletable edge; both fall
    // into the single span class displayed in the worked example
    assert_eq!(s2.rules.len(), 2);
    for r in &s2.rules {
        assert_eq!(r.plain().lhs(), &cyc);
        assert!(is_isomorphic(r.plain().rhs(), &single_edge).is_some());
        assert!(r.ac().is_true());
    }
    println!(
        "ACCEPTANCE 5a (worked-example repairing sets): PASS — rule counts 1/2/1/2, guard shapes reproduced"
    );
}

/// Shapes (nodes, edges) of the codomains of a `⋀∄` application condition.
fn conjunct_shapes(ac: &Condition) -> Vec<(usize, usize)> {
    use grapair_core::condition::Body;
    fn of(c: &Condition, out: &mut Vec<(usize, usize)>) {
        match c.body() {
            Body::Not(sub) => match sub.body() {
                Body::Exists { mor, .. } => {
                    out.push((mor.cod().node_count(), mor.cod().edge_count()))
                }
                _ => panic!("unexpected guard shape"),
            },
            Body::And(subs) => subs.iter().for_each(|s| of(s, out)),
            Body::True => {}
            _ => panic!("unexpected guard shape"),
        }
    }
    let mut out = Vec::new();
    of(ac, &mut out);
    out
}

#[test]
fn acceptance_5b_path_repair_gives_every_node_an_outgoing_edge() {
    let d = railroad::forall_outgoing();
    let path = railroad::three_path();
    let anchor = Morphism::inclusion(&Graph::empty(), &path).unwrap();
    let p = repair_program(&d, Variant::V2).unwrap();
    let got = run_all(&p, &anchor, &Budget::default()).unwrap();
    assert!(!got.exhausted);
    assert!(!got.outcomes.is_empty());
    for o in &got.outcomes {
        assert!(grapair_core::condition::graph_satisfies(o.result(), &d).unwrap());
        assert_eq!(o.result().node_count(), 3, "repairs by adding one edge");
        for n in o.result().node_ids() {
            let has_real_out = o
                .result()
                .edges()
                .any(|(_, e)| &e.src == n && e.tgt != e.src);
            assert!(has_real_out, "node {n} still lacks a real outgoing edge");
        }
    }
    println!(
        "ACCEPTANCE 5b (path repair): PASS — {} outcome(s), every node has a real outgoing edge",
        got.outcomes.len()
    );
}

#[test]
fn acceptance_5c_no_two_repair_via_delete() {
    let rs = RuleSet::new(vec![railroad::delete_rule()]).unwrap();
    let d = railroad::no_two();
    let RuleBasedRepair::Program(p) = rule_based_repair(&rs, &d, Variant::V2, 3).unwrap() else {
        panic!("the delete rule must be compatible with the no-two constraint");
    };
    let host = railroad::two_trains();
    let anchor = Morphism::inclusion(&Graph::empty(), &host).unwrap();
    let got = run_all(&p, &anchor, &Budget::default()).unwrap();
    assert!(!got.exhausted);
    assert!(!got.outcomes.is_empty());
    for o in &got.outcomes {
        assert!(grapair_core::condition::graph_satisfies(o.result(), &d).unwrap());
        assert_eq!(o.result().node_count(), 2);
        assert_eq!(o.result().edge_count(), 2, "exactly one train edge removed");
        let trains =
            o.result().edges().filter(|(_, e)| e.label.as_str() == railroad::TRAIN).count();
        let tracks =
            o.result().edges().filter(|(_, e)| e.label.as_str() == railroad::TRACK).count();
        assert_eq!((trains, tracks), (1, 1));
    }
    println!(
        "ACCEPTANCE 5c (no-two repair via delete): PASS — {} outcome(s), one train removed, constraint re-checks",
        got.outcomes.len()
    );
}

#[test]
fn acceptance_5d_station_is_incompatible_with_move_delete() {
    let rs = railroad::move_delete_set();
    match rule_based_repair(&rs, &railroad::station(), Variant::V2, 3).unwrap() {
        RuleBasedRepair::Incompatible(ev) => {
            let gap = ev
                .rows
                .iter()
                .find_map(|r| match &r.outcome {
                    SearchOutcome::NotFound { label_gap: Some(gap), .. } => Some(gap.clone()),
                    _ => None,
                })
                .expect("the label gap must be diagnosed");
            assert!(gap.created_node_labels.contains(&Label::from(railroad::STATION)));
            println!(
                "ACCEPTANCE 5d (station incompatibility): PASS — incompatible, diagnostic: missing {gap}"
            );
        }
        RuleBasedRepair::Program(_) => panic!("no station can be created by move/delete"),
    }
}

// ---------------------------------------------------------------------------
// Criterion 6: replay of recorded transformations
// ---------------------------------------------------------------------------

#[test]
fn acceptance_6_transformation_replay_and_extension_surrogate() {
    let rules = vec![railroad::move_rule(), railroad::delete_rule(), railroad::build_rule()];
    let rs = RuleSet::new(rules.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x8E7FAE);
    let mut replayed = 0;
    while replayed < 100 {
        let host = random_rail_net(&mut rng);
        let mut steps = Vec::new();
        let mut anchor = Morphism::inclusion(&Graph::empty(), &host).unwrap();
        for _ in 0..rng.gen_range(1..=3) {
            let mut all = Vec::new();
            for p in &rules {
                let rule = Rule::from_plain(p.clone(), DanglingMode::Standard).unwrap();
                all.extend(apply_all(&rule, &anchor).unwrap());
            }
            if all.is_empty() {
                break;
            }
            let step = all.swap_remove(rng.gen_range(0..all.len()));
            anchor = step.h.clone();
            steps.push(step);
        }
        if steps.is_empty() {
            continue;
        }
        let t = Transformation::new(host.clone(), steps).unwrap();
        let p = program_of_transformation(&t).unwrap();
        let start = Morphism::inclusion(&Graph::empty(), &host).unwrap();
        let got = run_all(&p, &start, &Budget::default()).unwrap();
        assert!(!got.outcomes.is_empty(), "replay produced nothing for {}", host.brief());
        for o in &got.outcomes {
            assert!(
                is_isomorphic(o.result(), t.end()).is_some(),
                "replay diverged: {} vs {}",
                o.result().brief(),
                t.end().brief()
            );
        }
        replayed += 1;
    }

    // the bounded extension surrogate on every certified compatibility pair
    let delete_set = RuleSet::new(vec![railroad::delete_rule()]).unwrap();
    let mut certified = 0;
    for (rs, d) in [
        (&delete_set, railroad::no_two()),
        (&rs, railroad::no_two()),
    ] {
        let ev = check_compatibility(rs, &d, Variant::V2, 3).unwrap();
        assert!(ev.compatible);
        let sets = repairing_sets_of(&d, Variant::V2).unwrap();
        let mut rows = ev.rows.iter();
        for set in &sets {
            for rule in &set.rules {
                let used = match set.target {
                    BasicTarget::Exists(_) => rule.clone(),
                    BasicTarget::NotExists(_) => rule.primed(),
                };
                let row = rows.next().unwrap();
                if let SearchOutcome::Found(cert) = &row.outcome {
                    let compiled = program_of_transformation(&cert.transformation).unwrap();
                    assert!(
                        equivalent_on_extensions(&used, &compiled, rs).unwrap(),
                        "surrogate failed for {}",
                        rule.name
                    );
                    certified += 1;
                }
            }
        }
    }
    assert!(certified >= 4, "expected several certified pairs: {certified}");
    println!(
        "ACCEPTANCE 6 (replay + extension surrogate): PASS — 100/100 replays isomorphic, {certified} certified pairs pass the surrogate"
    );
}

fn random_rail_net(rng: &mut ChaCha8Rng) -> Graph {
    let n = rng.gen_range(2..=4);
    let mut g = Graph::empty();
    for i in 0..n {
        g.add_node(NodeId(format!("w{i}")), Label::from(railroad::WAYPOINT)).unwrap();
    }
    for i in 0..n - 1 {
        g.add_edge(
            grapair_core::graph::EdgeId(format!("t{i}")),
            NodeId(format!("w{i}")),
            NodeId(format!("w{}", i + 1)),
            Label::from(railroad::TRACK),
        )
        .unwrap();
    }
    for j in 0..rng.gen_range(0..=2usize) {
        let i = rng.gen_range(0..n - 1);
        g.add_edge(
            grapair_core::graph::EdgeId(format!("r{j}")),
            NodeId(format!("w{i}")),
            NodeId(format!("w{}", i + 1)),
            Label::from(railroad::TRAIN),
        )
        .unwrap();
    }
    g
}

// ---------------------------------------------------------------------------
// Criterion 7: brute-force oracles
// ---------------------------------------------------------------------------

#[test]
fn acceptance_7_brute_force_oracle_agreement() {
    let alphabet = common::labels(&["a", "b"]);

    let mut rng = ChaCha8Rng::seed_from_u64(0x04AC1E);
    let mut mono_checks = 0usize;
    while mono_checks < 10_000 {
        let pattern = common::gen_graph(&mut rng, 3, 3, &alphabet);
        let host = common::gen_graph(&mut rng, 4, 6, &alphabet);
        assert_eq!(
            enumerate_monos(&pattern, &host),
            oracle::brute_monos(&pattern, &host),
            "mono mismatch for {} into {}",
            pattern.brief(),
            host.brief()
        );
        mono_checks += 1;
    }

    let mut sat_checks = 0usize;
    while sat_checks < 10_000 {
        let ctx = common::gen_graph(&mut rng, 2, 1, &alphabet);
        let c = common::gen_condition(&mut rng, &ctx, 2, &alphabet);
        let host = common::gen_graph(&mut rng, 4, 4, &alphabet);
        let Some(anchor) = common::gen_anchor(&mut rng, &ctx, &host) else {
            continue;
        };
        assert_eq!(
            satisfies(&anchor, &c).unwrap(),
            oracle::brute_satisfies(&anchor, &c),
            "satisfaction mismatch for {c} on {}",
            host.brief()
        );
        sat_checks += 1;
    }
    println!(
        "ACCEPTANCE 7 (oracle agreement): PASS — {mono_checks} mono instances, {sat_checks} satisfaction instances, 0 mismatches"
    );
}

// keep the program import used even if future edits drop a criterion body
#[allow(dead_code)]
fn _assert_types(p: &Program) {
    let _ = p;
}
