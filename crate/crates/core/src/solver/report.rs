//! Deterministic JSON serialization of analysis results.
//!
//! Keys appear in sorted order and every array is sorted by its rendered
//! string form, so two equal results serialize to identical bytes.

use super::AnalysisResult;
use crate::clients::Metrics;
use crate::ir::Program;
use serde_json::{json, Map, Value};
use std::collections::BTreeSet;

pub fn render_report(program: &Program, result: &AnalysisResult, metrics: &Metrics) -> String {
    let mut root = Map::new();

    let mut call_edges: Vec<(String, String)> = result
        .call_edges
        .iter()
        .map(|&(site, callee)| (program.call_site_label(site), program.qualified_name(callee)))
        .collect();
    call_edges.sort();
    root.insert(
        "callEdges".into(),
        Value::Array(
            call_edges
                .into_iter()
                .map(|(site, callee)| json!({ "callee": callee, "site": site }))
                .collect(),
        ),
    );

    let mut cut_log: Vec<(String, String, String, String)> = result
        .cut_log
        .iter()
        .map(|e| {
            (
                e.src.render(program),
                e.tgt.render(program),
                e.kind.name().to_string(),
                e.rule.clone(),
            )
        })
        .collect();
    cut_log.sort();
    root.insert(
        "cutLog".into(),
        Value::Array(
            cut_log
                .into_iter()
                .map(|(src, tgt, kind, rule)| {
                    json!({ "kind": kind, "rule": rule, "src": src, "tgt": tgt })
                })
                .collect(),
        ),
    );

    root.insert(
        "diagnostics".into(),
        Value::Array(result.diagnostics.iter().map(|d| Value::String(d.clone())).collect()),
    );

    root.insert("hosts".into(), points_to_object(program, &result.hosts));

    root.insert(
        "metrics".into(),
        json!({
            "callEdge": metrics.call_edge,
            "failCast": metrics.fail_cast,
            "polyCall": metrics.poly_call,
            "reachMtd": metrics.reach_mtd,
        }),
    );

    root.insert("pt".into(), points_to_object(program, &result.pt));

    let mut reachable: Vec<String> =
        result.reachable.iter().map(|&m| program.qualified_name(m)).collect();
    reachable.sort();
    root.insert(
        "reachable".into(),
        Value::Array(reachable.into_iter().map(Value::String).collect()),
    );

    let mut shortcuts: Vec<(String, String, String)> = result
        .shortcuts
        .iter()
        .map(|&(src, tgt, rule)| (src.render(program), tgt.render(program), rule.to_string()))
        .collect();
    shortcuts.sort();
    root.insert(
        "shortcuts".into(),
        Value::Array(
            shortcuts
                .into_iter()
                .map(|(src, tgt, rule)| json!({ "rule": rule, "src": src, "tgt": tgt }))
                .collect(),
        ),
    );

    let mut out = serde_json::to_string_pretty(&Value::Object(root)).expect("report is valid JSON");
    out.push('\n');
    out
}

fn points_to_object(
    program: &Program,
    map: &std::collections::BTreeMap<super::Pointer, BTreeSet<crate::ir::SiteId>>,
) -> Value {
    let mut obj = Map::new();
    for (ptr, sites) in map {
        if sites.is_empty() {
            continue;
        }
        let mut labels: Vec<String> =
            sites.iter().map(|&s| program.site(s).label.clone()).collect();
        labels.sort();
        obj.insert(
            ptr.render(program),
            Value::Array(labels.into_iter().map(Value::String).collect()),
        );
    }
    Value::Object(obj)
}
