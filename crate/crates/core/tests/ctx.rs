//! The k-CFA / k-obj baselines: degenerate-k equivalence, projection
//! dominance, and the precision profiles the two flavors are known for.

mod common;

use csc_core::ctxsens::{project_to_ci, solve_context_sensitive, CtxFlavor};
use csc_core::solver::render_report;
use csc_core::{compute_metrics, Budget};

fn project(program: &csc_core::Program, flavor: CtxFlavor) -> csc_core::AnalysisResult {
    project_to_ci(&solve_context_sensitive(program, common::entry(program), flavor))
}

#[test]
fn zero_k_is_exactly_the_baseline() {
    for sub in ["paper", "hand"] {
        for path in common::corpus_files(sub) {
            let program = common::load(&path);
            let ci = common::solve_ci(&program);
            for flavor in [CtxFlavor::KCfa(0), CtxFlavor::KObj(0)] {
                let projected = project(&program, flavor);
                assert_eq!(
                    render_report(&program, &projected, &compute_metrics(&program, &projected)),
                    render_report(&program, &ci, &compute_metrics(&program, &ci)),
                    "{}: {flavor:?}",
                    path.display()
                );
            }
        }
    }
}

#[test]
fn projections_are_dominated_by_the_baseline() {
    for sub in ["paper", "hand"] {
        for path in common::corpus_files(sub) {
            let program = common::load(&path);
            let ci = common::solve_ci(&program);
            for flavor in [CtxFlavor::KCfa(1), CtxFlavor::KCfa(2), CtxFlavor::KObj(2)] {
                let projected = project(&program, flavor);
                for (ptr, objs) in &projected.pt {
                    assert!(
                        objs.is_subset(ci.pt_of(*ptr)),
                        "{}: {flavor:?} pt({}) exceeds baseline",
                        path.display(),
                        ptr.render(&program)
                    );
                }
                assert!(projected.reachable.is_subset(&ci.reachable));
                assert!(projected.call_edges.is_subset(&ci.call_edges));
            }
        }
    }
}

#[test]
fn projections_keep_full_recall() {
    for sub in ["paper", "hand"] {
        for path in common::corpus_files(sub) {
            let program = common::load(&path);
            let entry = common::entry(&program);
            let facts = csc_core::explore(&program, entry, Budget::default());
            for flavor in [CtxFlavor::KCfa(1), CtxFlavor::KCfa(2), CtxFlavor::KObj(2)] {
                let projected = project(&program, flavor);
                let violations = csc_core::check_recall(&program, &facts, &projected);
                assert!(violations.is_empty(), "{}: {flavor:?} {violations:?}", path.display());
            }
        }
    }
}

#[test]
fn one_call_site_of_context_splits_direct_setters() {
    let program = common::load(&common::corpus_dir().join("paper/fig1.ir"));
    let r = project(&program, CtxFlavor::KCfa(1));
    assert_eq!(common::pt_labels(&program, &r, "Main.main/result1"), ["o16"]);
    assert_eq!(common::pt_labels(&program, &r, "Main.main/result2"), ["o21"]);
}

#[test]
fn nested_setters_need_two_levels_of_call_context() {
    let program = common::load(&common::corpus_dir().join("paper/fig3.ir"));
    let one = project(&program, CtxFlavor::KCfa(1));
    assert_eq!(
        common::pt_labels(&program, &one, "Main.main/chk1"),
        ["o7", "o9"],
        "one level cannot separate the two init chains"
    );
    let two = project(&program, CtxFlavor::KCfa(2));
    assert_eq!(common::pt_labels(&program, &two, "Main.main/chk1"), ["o7"]);
    let obj2 = project(&program, CtxFlavor::KObj(2));
    assert_eq!(common::pt_labels(&program, &obj2, "Main.main/chk1"), ["o7"]);
}

#[test]
fn object_sensitivity_cannot_split_static_helpers() {
    let program = common::load(&common::corpus_dir().join("paper/fig5.ir"));
    let kcfa = project(&program, CtxFlavor::KCfa(1));
    assert_eq!(common::pt_labels(&program, &kcfa, "Main.main/r1"), ["o10", "o11"]);
    let kobj = project(&program, CtxFlavor::KObj(2));
    assert_eq!(
        common::pt_labels(&program, &kobj, "Main.main/r1"),
        ["o10", "o11", "o14", "o15"],
        "static calls reuse the caller context under object sensitivity"
    );
}

#[test]
fn context_solver_is_deterministic() {
    let program = common::load(&common::corpus_dir().join("paper/fig4.ir"));
    for flavor in [CtxFlavor::KCfa(2), CtxFlavor::KObj(2)] {
        let a = solve_context_sensitive(&program, common::entry(&program), flavor);
        let b = solve_context_sensitive(&program, common::entry(&program), flavor);
        assert_eq!(a.pt, b.pt, "{flavor:?}");
        assert_eq!(a.contexts, b.contexts, "{flavor:?}");
        assert_eq!(project_to_ci(&a), project_to_ci(&b), "{flavor:?}");
    }
}

#[test]
fn flavor_names_round_trip() {
    assert_eq!(CtxFlavor::KCfa(2).name(), "kcfa:2");
    assert_eq!(CtxFlavor::KObj(0).name(), "kobj:0");
    assert_eq!(CtxFlavor::KCfa(2).k(), 2);
}

/// No interned context string is ever longer than k, and k = 0 admits only
/// the empty context.
#[test]
fn context_length_never_exceeds_k() {
    for sub in ["paper", "hand"] {
        for path in common::corpus_files(sub) {
            let program = common::load(&path);
            for flavor in [
                CtxFlavor::KCfa(0),
                CtxFlavor::KCfa(1),
                CtxFlavor::KCfa(2),
                CtxFlavor::KObj(0),
                CtxFlavor::KObj(2),
            ] {
                let cs = solve_context_sensitive(&program, common::entry(&program), flavor);
                let k = flavor.k() as usize;
                for ctx in &cs.contexts {
                    assert!(
                        ctx.len() <= k,
                        "{}: {flavor:?} interned a context of length {}",
                        path.display(),
                        ctx.len()
                    );
                }
            }
        }
    }
}
