//! Naive reference evaluator: applies the base analysis rules over and over
//! until nothing changes.
//!
//! No worklist, no difference propagation, no policy — just the rules.  The
//! point is to be obviously correct so the optimised solver can be checked
//! against it bit-for-bit on small programs.

use csc_core::ir::{MethodId, Program, Receiver, StmtKind};
use csc_core::solver::{AnalysisResult, EdgeKind, Pointer};
use std::collections::{BTreeMap, BTreeSet};

/// Context-insensitive, cut-free solve by exhaustive rule iteration.
pub fn solve_naive(program: &Program, entry: MethodId) -> AnalysisResult {
    let mut pt: BTreeMap<Pointer, BTreeSet<csc_core::ir::SiteId>> = BTreeMap::new();
    let mut edges: BTreeMap<Pointer, BTreeSet<(Pointer, EdgeKind)>> = BTreeMap::new();
    let mut reachable: BTreeSet<MethodId> = BTreeSet::from([entry]);
    let mut call_edges: BTreeSet<(csc_core::ir::CallSite, MethodId)> = BTreeSet::new();
    let mut diagnostics: BTreeSet<String> = BTreeSet::new();

    loop {
        let mut changed = false;

        for m in reachable.clone() {
            let def = program.method(m);
            for (i, stmt) in def.body.iter().enumerate() {
                match &stmt.kind {
                    StmtKind::New { lhs, site, .. } => {
                        changed |= pt.entry(Pointer::Var(m, *lhs)).or_default().insert(*site);
                    }
                    StmtKind::Assign { lhs, rhs } | StmtKind::Cast { lhs, rhs, .. } => {
                        changed |= edges
                            .entry(Pointer::Var(m, *rhs))
                            .or_default()
                            .insert((Pointer::Var(m, *lhs), EdgeKind::Assign));
                    }
                    StmtKind::Load { lhs, base, field } => {
                        let base_pt =
                            pt.get(&Pointer::Var(m, *base)).cloned().unwrap_or_default();
                        for o in base_pt {
                            changed |= edges
                                .entry(Pointer::ObjField(o, *field))
                                .or_default()
                                .insert((Pointer::Var(m, *lhs), EdgeKind::Load));
                        }
                    }
                    StmtKind::Store { base, field, rhs } => {
                        let base_pt =
                            pt.get(&Pointer::Var(m, *base)).cloned().unwrap_or_default();
                        for o in base_pt {
                            changed |= edges
                                .entry(Pointer::Var(m, *rhs))
                                .or_default()
                                .insert((Pointer::ObjField(o, *field), EdgeKind::Store));
                        }
                    }
                    StmtKind::Invoke(inv) => {
                        let site = csc_core::ir::CallSite { method: m, stmt: i as u32 };
                        match &inv.recv {
                            Receiver::Virtual(recv) => {
                                let recv_pt =
                                    pt.get(&Pointer::Var(m, *recv)).cloned().unwrap_or_default();
                                for o in recv_pt {
                                    let ty = program.site(o).ty;
                                    match program.dispatch(ty, &inv.method, inv.args.len()) {
                                        Some(callee) => {
                                            changed |= link_call(
                                                program,
                                                site,
                                                callee,
                                                &mut reachable,
                                                &mut call_edges,
                                                &mut edges,
                                            );
                                            if let Some(this) = program.param_var(callee, 0) {
                                                changed |= pt
                                                    .entry(Pointer::Var(callee, this))
                                                    .or_default()
                                                    .insert(o);
                                            }
                                        }
                                        None => {
                                            changed |= diagnostics.insert(format!(
                                                "dispatch failure at {}: `{}` has no method `{}`/{}",
                                                program.call_site_label(site),
                                                program.class(ty).name,
                                                inv.method,
                                                inv.args.len()
                                            ));
                                        }
                                    }
                                }
                            }
                            Receiver::Static(class) => {
                                match program.resolve_static(*class, &inv.method, inv.args.len())
                                {
                                    Some(callee) => {
                                        changed |= link_call(
                                            program,
                                            site,
                                            callee,
                                            &mut reachable,
                                            &mut call_edges,
                                            &mut edges,
                                        );
                                    }
                                    None => {
                                        changed |= diagnostics.insert(format!(
                                            "unresolved static call `{}.{}` at {}",
                                            program.class(*class).name,
                                            inv.method,
                                            program.call_site_label(site)
                                        ));
                                    }
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }

        for (src, succs) in edges.clone() {
            let src_pt = pt.get(&src).cloned().unwrap_or_default();
            if src_pt.is_empty() {
                continue;
            }
            for (tgt, _) in succs {
                let tgt_pt = pt.entry(tgt).or_default();
                let before = tgt_pt.len();
                tgt_pt.extend(src_pt.iter().copied());
                changed |= tgt_pt.len() != before;
            }
        }

        if !changed {
            break;
        }
    }

    let mut result = AnalysisResult::default();
    result.pt = pt.into_iter().filter(|(_, s)| !s.is_empty()).collect();
    result.edges = edges.into_iter().filter(|(_, s)| !s.is_empty()).collect();
    result.reachable = reachable;
    result.call_edges = call_edges;
    result.diagnostics = diagnostics;
    result
}

fn link_call(
    program: &Program,
    site: csc_core::ir::CallSite,
    callee: MethodId,
    reachable: &mut BTreeSet<MethodId>,
    call_edges: &mut BTreeSet<(csc_core::ir::CallSite, MethodId)>,
    edges: &mut BTreeMap<Pointer, BTreeSet<(Pointer, EdgeKind)>>,
) -> bool {
    let mut changed = reachable.insert(callee);
    changed |= call_edges.insert((site, callee));
    let def = program.method(callee);
    for k in 1..=def.arity {
        if let (Some(arg), Some(param)) = (program.arg_var(site, k), program.param_var(callee, k))
        {
            changed |= edges
                .entry(Pointer::Var(site.method, arg))
                .or_default()
                .insert((Pointer::Var(callee, param), EdgeKind::Param));
        }
    }
    if let StmtKind::Invoke(inv) = &program.method(site.method).body[site.stmt as usize].kind {
        if let (Some(lhs), Some(ret)) = (inv.lhs, def.ret_var) {
            changed |= edges
                .entry(Pointer::Var(callee, ret))
                .or_default()
                .insert((Pointer::Var(site.method, lhs), EdgeKind::Return));
        }
    }
    changed
}
