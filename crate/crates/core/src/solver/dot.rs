//! Graphviz export of the pointer flow graph.
//!
//! Regular edges are solid and labelled by kind, shortcut edges are bold
//! blue with their rule, and suppressed (cut) edges are rendered dashed red
//! from the cut log.  Lines are sorted, so output is byte-deterministic.

use super::{AnalysisResult, EdgeKind};
use crate::ir::Program;

pub fn export_dot(program: &Program, result: &AnalysisResult) -> String {
    let mut lines: Vec<String> = Vec::new();
    for (src, succs) in &result.edges {
        for &(tgt, kind) in succs {
            let attrs = match kind {
                EdgeKind::Shortcut => {
                    let rule = result
                        .shortcuts
                        .iter()
                        .find(|&&(s, t, _)| s == *src && t == tgt)
                        .map(|&(_, _, r)| r)
                        .unwrap_or("shortcut");
                    format!("color=blue, penwidth=2, label=\"{rule}\"")
                }
                EdgeKind::Load | EdgeKind::Store => {
                    format!("color=darkgreen, label=\"{}\"", kind.name())
                }
                EdgeKind::Param | EdgeKind::Return => {
                    format!("color=gray40, label=\"{}\"", kind.name())
                }
                EdgeKind::Assign => format!("label=\"{}\"", kind.name()),
            };
            lines.push(format!(
                "  \"{}\" -> \"{}\" [{}];",
                src.render(program),
                tgt.render(program),
                attrs
            ));
        }
    }
    for entry in &result.cut_log {
        lines.push(format!(
            "  \"{}\" -> \"{}\" [style=dashed, color=red, label=\"cut:{}\"];",
            entry.src.render(program),
            entry.tgt.render(program),
            entry.rule
        ));
    }
    lines.sort();
    lines.dedup();
    let mut out = String::from("digraph pfg {\n  rankdir=LR;\n  node [shape=box];\n");
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}
