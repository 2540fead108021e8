//! The worklist solver against the naive rule-iteration reference.
//!
//! The reference evaluator re-derives the whole fixpoint from scratch each
//! round, so agreement here pins down the difference-propagation machinery:
//! any dropped delta or stale snapshot shows up as a missing fact.

mod common;

use csc_core::cutshortcut::PatternSet;
use csc_core::solver::{solve, CutKind, EdgeKind, EmptyPolicy};
use csc_oracle::solve_naive;
use proptest::prelude::*;

fn stmt_count(program: &csc_core::ir::Program) -> usize {
    program.methods.iter().map(|m| m.body.len()).sum()
}

#[test]
fn solver_matches_reference_on_small_corpus() {
    let mut compared = 0;
    for sub in ["paper", "hand"] {
        for path in common::corpus_files(sub) {
            let program = common::load(&path);
            if stmt_count(&program) > 50 {
                continue;
            }
            let entry = common::entry(&program);
            let fast = solve(&program, entry, &mut EmptyPolicy);
            let naive = solve_naive(&program, entry);
            assert_eq!(fast.pt, naive.pt, "{}: pt", path.display());
            assert_eq!(fast.edges, naive.edges, "{}: edges", path.display());
            assert_eq!(fast.reachable, naive.reachable, "{}: reachable", path.display());
            assert_eq!(fast.call_edges, naive.call_edges, "{}: call edges", path.display());
            assert_eq!(fast.diagnostics, naive.diagnostics, "{}: diagnostics", path.display());
            compared += 1;
        }
    }
    assert!(compared >= 10, "only {compared} corpus programs were small enough to compare");
}

#[test]
fn solver_is_deterministic() {
    for path in common::corpus_files("paper") {
        let program = common::load(&path);
        let a = common::solve_ci(&program);
        let b = common::solve_ci(&program);
        assert_eq!(a, b, "{}", path.display());
    }
}

#[test]
fn unreachable_code_contributes_nothing() {
    let src = "
class T {
}

class Main {
  method dead(this) {
    local t: T;
    t = new T @oDead;
  }

  method main() {
    local t: T;
    t = new T @oLive;
  }
}
";
    let program = csc_core::parse_program(src).expect("parse");
    let result = common::solve_ci(&program);
    let live = program.site_id("oLive").unwrap();
    let dead = program.site_id("oDead").unwrap();
    let all: std::collections::BTreeSet<_> = result.pt.values().flatten().copied().collect();
    assert!(all.contains(&live));
    assert!(!all.contains(&dead), "dead method was analyzed");
    assert_eq!(result.reachable.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// On generated programs (well beyond 50 statements) the solver and the
    /// reference evaluator still agree exactly.
    #[test]
    fn solver_matches_reference_on_generated(
        seed in 0u64..100_000,
        n_field_wrappers in 0u32..2,
        n_local_flows in 0u32..2,
        depth in 1u32..3,
    ) {
        let spec = csc_core::stress::StressSpec {
            seed, n_containers: 1, n_field_wrappers, n_local_flows, depth,
        };
        let text = csc_core::stress::generate(&spec);
        let program = csc_core::parse_program(&text).expect("parse");
        let entry = common::entry(&program);
        let fast = solve(&program, entry, &mut EmptyPolicy);
        let naive = solve_naive(&program, entry);
        prop_assert_eq!(&fast.pt, &naive.pt);
        prop_assert_eq!(&fast.call_edges, &naive.call_edges);
        prop_assert_eq!(&fast.reachable, &naive.reachable);
    }
}

/// At fixpoint every recorded flow edge has fully propagated:
/// `pt(src) ⊆ pt(tgt)`.  Load and store edges are materialized at the
/// object-field level, so the subset claim covers them too.
#[test]
fn fixpoint_satisfies_subset_propagation_along_every_edge() {
    let empty = std::collections::BTreeSet::new();
    for sub in ["paper", "hand", "gen"] {
        for path in common::corpus_files(sub) {
            let program = common::load(&path);
            for (name, result) in [
                ("ci", common::solve_ci(&program)),
                ("csc", common::solve_csc(&program, PatternSet::all())),
            ] {
                for (src, succs) in &result.edges {
                    let src_pt = result.pt.get(src).unwrap_or(&empty);
                    for (tgt, kind) in succs {
                        let tgt_pt = result.pt.get(tgt).unwrap_or(&empty);
                        assert!(
                            src_pt.is_subset(tgt_pt),
                            "{} [{name}]: {src:?} -{kind:?}-> {tgt:?} not propagated",
                            path.display()
                        );
                    }
                }
            }
        }
    }
}

/// A cut edge is really cut: no (source, target, kind) triple from the cut
/// log also appears in the edge set.
#[test]
fn cut_edges_are_absent_from_the_edge_set() {
    let mut cuts_seen = 0usize;
    for sub in ["paper", "hand", "gen"] {
        for path in common::corpus_files(sub) {
            let program = common::load(&path);
            let result = common::solve_csc(&program, PatternSet::all());
            for entry in &result.cut_log {
                cuts_seen += 1;
                let kind = match entry.kind {
                    CutKind::Store => EdgeKind::Store,
                    CutKind::Return => EdgeKind::Return,
                };
                let present = result
                    .edges
                    .get(&entry.src)
                    .is_some_and(|succs| succs.contains(&(entry.tgt, kind)));
                assert!(
                    !present,
                    "{}: cut edge {entry:?} still in the edge set",
                    path.display()
                );
            }
        }
    }
    assert!(cuts_seen > 0, "corpus exercised no cuts at all");
}
