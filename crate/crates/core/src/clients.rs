//! Precision clients: metrics computed from an analysis result.
//!
//! Four standard counts are produced: may-fail casts, reachable methods,
//! polymorphic virtual call sites, and call-graph edges.  Lower is more
//! precise for every metric.

use crate::ir::{CallSite, Program, Receiver, StmtKind};
use crate::solver::{AnalysisResult, Pointer};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metrics {
    pub fail_cast: u64,
    pub reach_mtd: u64,
    pub poly_call: u64,
    pub call_edge: u64,
    /// Statement labels of the casts counted by `fail_cast`.
    pub fail_cast_labels: BTreeSet<String>,
    /// Statement labels of the call sites counted by `poly_call`.
    pub poly_call_labels: BTreeSet<String>,
}

impl Metrics {
    /// Pointwise `<=` on all four counts.
    pub fn dominated_by(&self, baseline: &Metrics) -> bool {
        self.fail_cast <= baseline.fail_cast
            && self.reach_mtd <= baseline.reach_mtd
            && self.poly_call <= baseline.poly_call
            && self.call_edge <= baseline.call_edge
    }

    /// Strictly smaller in at least one count.
    pub fn improves_on(&self, baseline: &Metrics) -> bool {
        self.dominated_by(baseline)
            && (self.fail_cast < baseline.fail_cast
                || self.reach_mtd < baseline.reach_mtd
                || self.poly_call < baseline.poly_call
                || self.call_edge < baseline.call_edge)
    }
}

pub fn compute_metrics(program: &Program, result: &AnalysisResult) -> Metrics {
    let mut fail_cast_labels = BTreeSet::new();
    for &m in &result.reachable {
        for (i, stmt) in program.method(m).body.iter().enumerate() {
            if let StmtKind::Cast { ty, rhs, .. } = stmt.kind {
                let may_fail = result
                    .pt_of(Pointer::Var(m, rhs))
                    .iter()
                    .any(|&o| !program.subtype_of(program.site(o).ty, ty));
                if may_fail {
                    fail_cast_labels.insert(program.stmt_label(m, i as u32));
                }
            }
        }
    }

    let mut per_site: BTreeMap<CallSite, BTreeSet<crate::ir::MethodId>> = BTreeMap::new();
    for &(site, callee) in &result.call_edges {
        per_site.entry(site).or_default().insert(callee);
    }
    let poly_call_labels: BTreeSet<String> = per_site
        .iter()
        .filter(|(site, callees)| {
            callees.len() >= 2
                && matches!(
                    &program.method(site.method).body[site.stmt as usize].kind,
                    StmtKind::Invoke(inv) if matches!(inv.recv, Receiver::Virtual(_))
                )
        })
        .map(|(site, _)| program.stmt_label(site.method, site.stmt))
        .collect();

    Metrics {
        fail_cast: fail_cast_labels.len() as u64,
        reach_mtd: result.reachable.len() as u64,
        poly_call: poly_call_labels.len() as u64,
        call_edge: result.call_edges.len() as u64,
        fail_cast_labels,
        poly_call_labels,
    }
}

/// A metrics table; the first row is the baseline the others are compared to.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub rows: Vec<(String, Metrics)>,
    /// Per row: pointwise `<=` the baseline row.
    pub dominates_baseline: Vec<bool>,
    /// Per row: dominates and strictly improves at least one metric.
    pub strictly_better: Vec<bool>,
}

pub fn compare_metrics(rows: Vec<(String, Metrics)>) -> Comparison {
    let baseline = rows.first().map(|(_, m)| m.clone()).unwrap_or_default();
    let dominates_baseline = rows.iter().map(|(_, m)| m.dominated_by(&baseline)).collect();
    let strictly_better = rows.iter().map(|(_, m)| m.improves_on(&baseline)).collect();
    Comparison { rows, dominates_baseline, strictly_better }
}

impl Comparison {
    pub fn render_table(&self) -> String {
        let mut widths = vec!["analysis".len(), 8, 8, 8, 8];
        for (name, _) in &self.rows {
            widths[0] = widths[0].max(name.len());
        }
        let mut out = format!(
            "{:<w0$}  {:>8}  {:>8}  {:>8}  {:>8}  {}\n",
            "analysis",
            "failCast",
            "reachMtd",
            "polyCall",
            "callEdge",
            "vs-baseline",
            w0 = widths[0]
        );
        for (i, (name, m)) in self.rows.iter().enumerate() {
            let flag = if i == 0 {
                "baseline"
            } else if self.strictly_better[i] {
                "better"
            } else if self.dominates_baseline[i] {
                "equal-or-better"
            } else {
                "WORSE"
            };
            out.push_str(&format!(
                "{:<w0$}  {:>8}  {:>8}  {:>8}  {:>8}  {}\n",
                name,
                m.fail_cast,
                m.reach_mtd,
                m.poly_call,
                m.call_edge,
                flag,
                w0 = widths[0]
            ));
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("analysis,failCast,reachMtd,polyCall,callEdge,dominatesBaseline\n");
        for (i, (name, m)) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                name, m.fail_cast, m.reach_mtd, m.poly_call, m.call_edge, self.dominates_baseline[i]
            ));
        }
        out
    }
}
