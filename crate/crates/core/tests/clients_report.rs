//! Metric counting and the rendered artifacts (report JSON, DOT).

mod common;

use csc_core::cutshortcut::PatternSet;
use csc_core::solver::{export_dot, render_report};
use csc_core::{compare_metrics, compute_metrics};

#[test]
fn fail_cast_counts_may_fail_casts_only() {
    let program = common::load(&common::corpus_dir().join("paper/fig1.ir"));
    let ci = common::solve_ci(&program);
    let m = compute_metrics(&program, &ci);
    assert_eq!(m.fail_cast, 1, "the downcast of the merged result may fail under CI");
    assert_eq!(m.fail_cast_labels.len() as u64, m.fail_cast);

    let csc = common::solve_csc(&program, PatternSet::all());
    let m = compute_metrics(&program, &csc);
    assert_eq!(m.fail_cast, 0, "per-site stores devirtualize the cast");
}

#[test]
fn poly_call_needs_at_least_two_targets() {
    let program = common::load(&common::corpus_dir().join("hand/polycall_devirt.ir"));
    let ci = common::solve_ci(&program);
    let m_ci = compute_metrics(&program, &ci);
    assert_eq!(m_ci.poly_call, 1);
    assert_eq!(m_ci.poly_call_labels.len(), 1);

    let csc = common::solve_csc(&program, PatternSet::all());
    let m_csc = compute_metrics(&program, &csc);
    assert_eq!(m_csc.poly_call, 0);
    assert_eq!(m_csc.reach_mtd, m_ci.reach_mtd - 1, "Cat.speak is no longer dragged in");
    assert_eq!(m_csc.call_edge, m_ci.call_edge - 1);
    assert!(m_csc.improves_on(&m_ci));
    assert!(!m_ci.improves_on(&m_csc));
    assert!(m_ci.dominated_by(&m_ci), "dominance is reflexive");
}

#[test]
fn comparison_table_flags_regressions_and_improvements() {
    let program = common::load(&common::corpus_dir().join("paper/fig4.ir"));
    let ci = compute_metrics(&program, &common::solve_ci(&program));
    let csc = compute_metrics(&program, &common::solve_csc(&program, PatternSet::all()));
    let cmp = compare_metrics(vec![("ci".into(), ci.clone()), ("csc".into(), csc)]);
    let table = cmp.render_table();
    assert!(table.contains("baseline"), "{table}");
    assert!(table.contains("better"), "{table}");
    let csv = cmp.render_csv();
    assert_eq!(csv.lines().count(), 3, "header plus one row per analysis: {csv}");
    assert!(csv.lines().next().unwrap().starts_with("analysis,"), "{csv}");

    // A strictly worse row (relative to csc as baseline) is called out.
    let cmp = compare_metrics(vec![
        ("csc".into(), compute_metrics(&program, &common::solve_csc(&program, PatternSet::all()))),
        ("ci".into(), ci),
    ]);
    assert!(cmp.render_table().contains("WORSE"), "{}", cmp.render_table());
}

#[test]
fn report_is_stable_sorted_and_newline_terminated() {
    let program = common::load(&common::corpus_dir().join("paper/fig4.ir"));
    let result = common::solve_csc(&program, PatternSet::all());
    let metrics = compute_metrics(&program, &result);
    let a = render_report(&program, &result, &metrics);
    let b = render_report(&program, &result, &metrics);
    assert_eq!(a, b);
    assert!(a.ends_with('\n'));
    let doc: serde_json::Value = serde_json::from_str(&a).expect("valid JSON");
    for key in ["pt", "reachable", "callEdges", "metrics", "diagnostics"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert!(
        doc.get("analysis").is_none(),
        "the report must not embed the analysis name; equal analyses must render equal bytes"
    );
    // Container host sets are present for the container-pattern run.
    assert!(doc.get("hosts").is_some());
}

#[test]
fn dot_export_is_deterministic_and_marks_edge_roles() {
    let program = common::load(&common::corpus_dir().join("paper/fig4.ir"));
    let result = common::solve_csc(&program, PatternSet::all());
    let a = export_dot(&program, &result);
    assert_eq!(a, export_dot(&program, &result));
    assert!(a.starts_with("digraph"), "{}", &a[..40.min(a.len())]);
    assert!(a.contains("color=blue"), "shortcut styling present");
    assert!(a.contains("style=dashed"), "cut styling present");
    assert!(a.ends_with('\n'));
}

#[test]
fn metrics_match_between_report_and_recomputation() {
    let program = common::load(&common::corpus_dir().join("paper/fig5.ir"));
    let result = common::solve_ci(&program);
    let metrics = compute_metrics(&program, &result);
    let report = render_report(&program, &result, &metrics);
    let doc: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(doc["metrics"]["failCast"], serde_json::json!(metrics.fail_cast));
    assert_eq!(doc["metrics"]["reachMtd"], serde_json::json!(metrics.reach_mtd));
    assert_eq!(doc["metrics"]["polyCall"], serde_json::json!(metrics.poly_call));
    assert_eq!(doc["metrics"]["callEdge"], serde_json::json!(metrics.call_edge));
}

/// Metrics are monotone in the points-to relation: enlarging any set can
/// only hold or raise `failCast` and `polyCall`.
#[test]
fn metrics_grow_monotonically_with_points_to() {
    for stem in ["paper/fig1.ir", "hand/cast_chains.ir", "hand/polycall_devirt.ir"] {
        let program = common::load(&common::corpus_dir().join(stem));
        let result = common::solve_ci(&program);
        let before = compute_metrics(&program, &result);
        let all_sites: std::collections::BTreeSet<_> =
            (0..program.sites.len() as u32).map(csc_core::ir::SiteId).collect();
        let mut inflated = result.clone();
        for objs in inflated.pt.values_mut() {
            objs.extend(all_sites.iter().copied());
        }
        let after = compute_metrics(&program, &inflated);
        assert!(after.fail_cast >= before.fail_cast, "{stem}: failCast shrank");
        assert!(after.poly_call >= before.poly_call, "{stem}: polyCall shrank");
    }
}

/// A call graph connected from the entry needs at least one edge per
/// reachable method beyond the entry itself.
#[test]
fn call_edges_cover_reachable_methods() {
    for sub in ["paper", "hand", "gen"] {
        for path in common::corpus_files(sub) {
            let program = common::load(&path);
            let metrics = compute_metrics(&program, &common::solve_ci(&program));
            assert!(
                metrics.call_edge >= metrics.reach_mtd.saturating_sub(1),
                "{}: {} edges for {} reachable methods",
                path.display(),
                metrics.call_edge,
                metrics.reach_mtd
            );
        }
    }
}
