//! Interpreter behavior: fact recording, budget handling, and the recall
//! check against analysis results.

mod common;

use csc_core::cutshortcut::PatternSet;
use csc_core::interp::{explore, render_facts, CastOutcome};
use csc_core::{check_recall, Budget};

#[test]
fn analyses_over_approximate_every_corpus_execution() {
    for sub in ["paper", "hand", "gen"] {
        for path in common::corpus_files(sub) {
            let program = common::load(&path);
            let entry = common::entry(&program);
            let facts = explore(&program, entry, Budget::default());
            for (name, result) in [
                ("ci", common::solve_ci(&program)),
                ("csc", common::solve_csc(&program, PatternSet::all())),
            ] {
                let violations = check_recall(&program, &facts, &result);
                assert!(violations.is_empty(), "{} [{name}]: {violations:?}", path.display());
            }
        }
    }
}

#[test]
fn branch_exploration_is_exhaustive_on_small_programs() {
    let program = common::load(&common::corpus_dir().join("paper/fig5.ir"));
    let facts = explore(&program, common::entry(&program), Budget::default());
    assert!(!facts.exhausted, "two independent branches fit the default budget");
    // Both arms of each select were observed.
    let r1 = facts
        .var_points_to
        .iter()
        .find(|((m, v), _)| {
            program.qualified_name(*m) == "Main.main" && program.var_name(*m, *v) == "r1"
        })
        .map(|(_, sites)| sites.len())
        .unwrap_or(0);
    assert_eq!(r1, 2, "both branch decisions were explored");
}

#[test]
fn more_paths_never_shrink_the_facts() {
    let program = common::load(&common::corpus_dir().join("hand/cast_chains.ir"));
    let entry = common::entry(&program);
    let small = explore(&program, entry, Budget { max_paths: 1, ..Budget::default() });
    let full = explore(&program, entry, Budget::default());
    assert!(small.reach_methods.is_subset(&full.reach_methods));
    assert!(small.call_edges.is_subset(&full.call_edges));
    for (key, sites) in &small.var_points_to {
        assert!(sites.is_subset(&full.var_points_to[key]));
    }
    assert!(small.exhausted, "path budget of one must flag exhaustion on a branching program");
    assert!(!full.exhausted);
}

#[test]
fn recursion_is_bounded_by_call_depth() {
    let program = common::load(&common::corpus_dir().join("hand/recursion.ir"));
    let entry = common::entry(&program);
    let facts = explore(&program, entry, Budget::default());
    assert!(facts.exhausted, "the all-recurse path hits the depth bound");
    let dive = program.methods_by_qualified_name("Rec.dive")[0];
    assert!(facts.reach_methods.contains(&dive));
    // The base case still completes on shallow paths, so the returned value
    // was observed flowing back out.
    let observed = facts.var_points_to.iter().any(|((m, v), sites)| {
        program.qualified_name(*m) == "Main.main"
            && program.var_name(*m, *v) == "r1"
            && !sites.is_empty()
    });
    assert!(observed, "base-case return value reached the caller");
}

#[test]
fn cast_outcomes_distinguish_success_from_failure() {
    let program = common::load(&common::corpus_dir().join("hand/cast_chains.ir"));
    let facts = explore(&program, common::entry(&program), Budget::default());
    let outcomes: Vec<(&str, CastOutcome)> =
        facts.cast_outcomes.iter().map(|(label, &o)| (label.as_str(), o)).collect();
    // `y = (B) x` fails when x holds the C object; `z = (A) y` only ever
    // sees a B and an upcast always succeeds.
    assert!(
        outcomes.iter().any(|&(_, o)| o == CastOutcome::MayFail),
        "sibling cast must fail on one path: {outcomes:?}"
    );
    assert!(
        outcomes.iter().any(|&(_, o)| o == CastOutcome::AlwaysOk),
        "upcast must succeed: {outcomes:?}"
    );
}

#[test]
fn null_paths_record_no_spurious_facts() {
    let program = common::load(&common::corpus_dir().join("hand/null_flow.ir"));
    let facts = explore(&program, common::entry(&program), Budget::default());
    let main = common::entry(&program);
    let b = program.var_id(main, "b").unwrap();
    assert!(
        !facts.var_points_to.contains_key(&(main, b)),
        "b only ever holds null at runtime"
    );
}

#[test]
fn exploration_is_deterministic() {
    for path in common::corpus_files("hand") {
        let program = common::load(&path);
        let entry = common::entry(&program);
        let a = explore(&program, entry, Budget::default());
        let b = explore(&program, entry, Budget::default());
        assert_eq!(a, b, "{}", path.display());
        assert_eq!(
            render_facts(&program, &a),
            render_facts(&program, &b),
            "{}",
            path.display()
        );
    }
}

#[test]
fn facts_render_sorted_and_newline_terminated() {
    let program = common::load(&common::corpus_dir().join("paper/fig1.ir"));
    let facts = explore(&program, common::entry(&program), Budget::default());
    let text = render_facts(&program, &facts);
    assert!(text.ends_with('\n'));
    let doc: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    for key in ["callEdges", "castOutcomes", "exhausted", "fieldPointsTo", "reachMethods", "varPointsTo"]
    {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
}

/// Merged facts do not depend on the order in which paths are enumerated.
/// The two programs below have the same two behaviors but opposite arm
/// order, so the explorer visits them in opposite order; the rendered
/// facts must nevertheless be identical.
#[test]
fn facts_are_independent_of_path_enumeration_order() {
    let arms = |first: &str, second: &str| {
        format!(
            "class A {{\n}}\n\nclass B {{\n}}\n\nclass Main {{\n  method main() {{\n    \
             local x: A;\n    local y: A;\n    if * goto Alt;\n    {first}\n    goto Done;\n    \
             Alt: {second}\n    Done: y = x;\n  }}\n}}\n"
        )
    };
    let a_then_b = arms("x = new A @oA;", "x = new B @oB;");
    let b_then_a = arms("x = new B @oB;", "x = new A @oA;");
    let mut rendered = Vec::new();
    for text in [a_then_b, b_then_a] {
        let program = csc_core::ir::parse_program(&text).expect("inline program parses");
        let facts = explore(&program, common::entry(&program), Budget::default());
        assert!(!facts.exhausted);
        rendered.push(render_facts(&program, &facts));
    }
    assert_eq!(rendered[0], rendered[1]);
}
