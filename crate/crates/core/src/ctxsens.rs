//! Reference context-sensitive analyses: k-call-site (k-CFA) and k-object
//! sensitivity, both with (k−1)-context heap abstraction.
//!
//! These are precision oracles for comparing against the cut-shortcut
//! analysis, not the artifact's contribution, so the implementation favours
//! clarity: the base solver's rules are lifted pointwise over contexts with
//! no cuts, no shortcuts and no policy hooks.
//!
//! Conventions (standard, chosen where the literature leaves slack):
//! * contexts append at the end and keep the most recent `k` elements;
//! * the heap context of an object is the allocating method's context
//!   truncated to `k − 1`;
//! * static calls under k-obj reuse the caller's context, under k-CFA they
//!   append the call site like any other call.
//!
//! With `k = 0` every context is empty and the projection collapses to the
//! context-insensitive result exactly.

use crate::ir::{CallSite, FieldId, MethodId, Program, Receiver, SiteId, StmtKind};
use crate::solver::{AnalysisResult, EdgeKind, Pointer};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Which family of contexts to use, with its depth `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtxFlavor {
    KCfa(u32),
    KObj(u32),
}

impl CtxFlavor {
    pub fn k(self) -> u32 {
        match self {
            CtxFlavor::KCfa(k) | CtxFlavor::KObj(k) => k,
        }
    }

    pub fn name(self) -> String {
        match self {
            CtxFlavor::KCfa(k) => format!("kcfa:{k}"),
            CtxFlavor::KObj(k) => format!("kobj:{k}"),
        }
    }
}

/// One element of a context string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CtxElem {
    /// A call site (k-CFA).
    Site(CallSite),
    /// An allocation site (k-obj).
    Alloc(SiteId),
}

/// Interned context identifier; `CtxId(0)` is always the empty context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CtxId(pub u32);

/// An abstract object: allocation site plus heap context.
pub type CsObj = (CtxId, SiteId);

/// A context-qualified pointer.  For `Pointer::Var` the context is the
/// analysed method's context; for `Pointer::ObjField` it is the base
/// object's heap context.
pub type CsPointer = (CtxId, Pointer);

/// Result of a context-sensitive solve.
#[derive(Clone, Debug)]
pub struct CsResult {
    /// Interned context strings, indexed by `CtxId`.
    pub contexts: Vec<Vec<CtxElem>>,
    pub pt: BTreeMap<CsPointer, BTreeSet<CsObj>>,
    pub edges: BTreeMap<CsPointer, BTreeSet<(CsPointer, EdgeKind)>>,
    pub reachable: BTreeSet<(MethodId, CtxId)>,
    pub call_edges: BTreeSet<((CtxId, CallSite), (CtxId, MethodId))>,
    pub diagnostics: BTreeSet<String>,
}

/// Forget contexts: union points-to sets, edges, reachability and call
/// edges over all contexts, producing the base result shape.
pub fn project_to_ci(r: &CsResult) -> AnalysisResult {
    let mut out = AnalysisResult::default();
    for (&(_, ptr), objs) in &r.pt {
        let merged: BTreeSet<SiteId> = objs.iter().map(|&(_, site)| site).collect();
        out.pt.entry(ptr).or_default().extend(merged);
    }
    for (&(_, src), succs) in &r.edges {
        let tgt_set = out.edges.entry(src).or_default();
        for &((_, tgt), kind) in succs {
            tgt_set.insert((tgt, kind));
        }
    }
    for &(m, _) in &r.reachable {
        out.reachable.insert(m);
    }
    for &((_, site), (_, callee)) in &r.call_edges {
        out.call_edges.insert((site, callee));
    }
    out.diagnostics = r.diagnostics.clone();
    out
}

struct CtxTable {
    list: Vec<Vec<CtxElem>>,
    index: BTreeMap<Vec<CtxElem>, CtxId>,
}

impl CtxTable {
    fn new() -> Self {
        let empty = Vec::new();
        CtxTable { list: vec![empty.clone()], index: BTreeMap::from([(empty, CtxId(0))]) }
    }

    fn intern(&mut self, elems: Vec<CtxElem>) -> CtxId {
        if let Some(&id) = self.index.get(&elems) {
            return id;
        }
        let id = CtxId(self.list.len() as u32);
        self.list.push(elems.clone());
        self.index.insert(elems, id);
        id
    }

    /// `base` extended with `elem`, keeping the most recent `k` elements.
    fn extend(&mut self, base: CtxId, elem: CtxElem, k: u32) -> CtxId {
        if k == 0 {
            return CtxId(0);
        }
        let mut elems = self.list[base.0 as usize].clone();
        elems.push(elem);
        let keep = k as usize;
        if elems.len() > keep {
            elems.drain(..elems.len() - keep);
        }
        self.intern(elems)
    }

    /// `base` truncated to its most recent `n` elements.
    fn truncate(&mut self, base: CtxId, n: u32) -> CtxId {
        let elems = &self.list[base.0 as usize];
        let keep = n as usize;
        if elems.len() <= keep {
            return base;
        }
        let tail = elems[elems.len() - keep..].to_vec();
        self.intern(tail)
    }
}

#[derive(Default)]
struct CsNode {
    pt: BTreeSet<CsObj>,
    succs: BTreeSet<(CsPointer, EdgeKind)>,
}

struct CsSolver<'p> {
    program: &'p Program,
    flavor: CtxFlavor,
    ctxs: CtxTable,
    nodes: BTreeMap<CsPointer, CsNode>,
    reachable: BTreeSet<(MethodId, CtxId)>,
    call_edges: BTreeSet<((CtxId, CallSite), (CtxId, MethodId))>,
    loads_on: BTreeMap<CsPointer, Vec<(FieldId, CsPointer)>>,
    stores_on: BTreeMap<CsPointer, Vec<(FieldId, CsPointer)>>,
    vcalls_on: BTreeMap<CsPointer, BTreeSet<(CtxId, CallSite)>>,
    diagnostics: BTreeSet<String>,
    worklist: VecDeque<(CsPointer, BTreeSet<CsObj>)>,
}

impl<'p> CsSolver<'p> {
    fn add_edge(&mut self, src: CsPointer, tgt: CsPointer, kind: EdgeKind) {
        if !self.nodes.entry(src).or_default().succs.insert((tgt, kind)) {
            return;
        }
        let seed = self.nodes.get(&src).map(|n| n.pt.clone()).unwrap_or_default();
        if !seed.is_empty() {
            self.worklist.push_back((tgt, seed));
        }
    }

    fn add_reachable(&mut self, m: MethodId, ctx: CtxId) {
        if !self.reachable.insert((m, ctx)) {
            return;
        }
        let def = self.program.method(m);
        let k = self.flavor.k();
        for (i, stmt) in def.body.iter().enumerate() {
            match &stmt.kind {
                StmtKind::New { lhs, site, .. } => {
                    let heap_ctx = self.ctxs.truncate(ctx, k.saturating_sub(1));
                    self.worklist.push_back((
                        (ctx, Pointer::Var(m, *lhs)),
                        BTreeSet::from([(heap_ctx, *site)]),
                    ));
                }
                StmtKind::Assign { lhs, rhs } | StmtKind::Cast { lhs, rhs, .. } => {
                    self.add_edge(
                        (ctx, Pointer::Var(m, *rhs)),
                        (ctx, Pointer::Var(m, *lhs)),
                        EdgeKind::Assign,
                    );
                }
                StmtKind::Load { lhs, base, field } => {
                    self.loads_on
                        .entry((ctx, Pointer::Var(m, *base)))
                        .or_default()
                        .push((*field, (ctx, Pointer::Var(m, *lhs))));
                }
                StmtKind::Store { base, field, rhs } => {
                    self.stores_on
                        .entry((ctx, Pointer::Var(m, *base)))
                        .or_default()
                        .push((*field, (ctx, Pointer::Var(m, *rhs))));
                }
                StmtKind::Invoke(inv) => {
                    let site = CallSite { method: m, stmt: i as u32 };
                    match &inv.recv {
                        Receiver::Virtual(recv) => {
                            self.vcalls_on
                                .entry((ctx, Pointer::Var(m, *recv)))
                                .or_default()
                                .insert((ctx, site));
                        }
                        Receiver::Static(class) => {
                            match self.program.resolve_static(*class, &inv.method, inv.args.len())
                            {
                                Some(callee) => {
                                    let callee_ctx = match self.flavor {
                                        CtxFlavor::KCfa(k) => {
                                            self.ctxs.extend(ctx, CtxElem::Site(site), k)
                                        }
                                        CtxFlavor::KObj(_) => ctx,
                                    };
                                    self.add_call_edge(ctx, site, callee_ctx, callee);
                                }
                                None => {
                                    self.diagnostics.insert(format!(
                                        "unresolved static call `{}.{}` at {}",
                                        self.program.class(*class).name,
                                        inv.method,
                                        self.program.stmt_label(m, i as u32),
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

    fn add_call_edge(&mut self, caller_ctx: CtxId, site: CallSite, callee_ctx: CtxId, callee: MethodId) {
        if !self.call_edges.insert(((caller_ctx, site), (callee_ctx, callee))) {
            return;
        }
        self.add_reachable(callee, callee_ctx);
        let def = self.program.method(callee);
        for k in 1..=def.arity {
            if let (Some(arg), Some(param)) =
                (self.program.arg_var(site, k), self.program.param_var(callee, k))
            {
                self.add_edge(
                    (caller_ctx, Pointer::Var(site.method, arg)),
                    (callee_ctx, Pointer::Var(callee, param)),
                    EdgeKind::Param,
                );
            }
        }
        if let StmtKind::Invoke(inv) = &self.program.method(site.method).body[site.stmt as usize].kind
        {
            if let (Some(lhs), Some(ret)) = (inv.lhs, def.ret_var) {
                self.add_edge(
                    (callee_ctx, Pointer::Var(callee, ret)),
                    (caller_ctx, Pointer::Var(site.method, lhs)),
                    EdgeKind::Return,
                );
            }
        }
    }

    fn process(&mut self, ptr: CsPointer, delta: BTreeSet<CsObj>) {
        let node = self.nodes.entry(ptr).or_default();
        let new: BTreeSet<CsObj> = delta.difference(&node.pt).copied().collect();
        if new.is_empty() {
            return;
        }
        node.pt.extend(new.iter().copied());

        for (field, tgt) in self.loads_on.get(&ptr).cloned().unwrap_or_default() {
            for &(hctx, o) in &new {
                self.add_edge((hctx, Pointer::ObjField(o, field)), tgt, EdgeKind::Load);
            }
        }
        for (field, src) in self.stores_on.get(&ptr).cloned().unwrap_or_default() {
            for &(hctx, o) in &new {
                self.add_edge(src, (hctx, Pointer::ObjField(o, field)), EdgeKind::Store);
            }
        }
        for (caller_ctx, site) in self.vcalls_on.get(&ptr).cloned().unwrap_or_default() {
            let StmtKind::Invoke(inv) =
                &self.program.method(site.method).body[site.stmt as usize].kind
            else {
                continue;
            };
            let (name, argc) = (inv.method.clone(), inv.args.len());
            for &(hctx, o) in &new {
                let ty = self.program.site(o).ty;
                match self.program.dispatch(ty, &name, argc) {
                    Some(callee) => {
                        let callee_ctx = match self.flavor {
                            CtxFlavor::KCfa(k) => {
                                self.ctxs.extend(caller_ctx, CtxElem::Site(site), k)
                            }
                            CtxFlavor::KObj(k) => self.ctxs.extend(hctx, CtxElem::Alloc(o), k),
                        };
                        self.add_call_edge(caller_ctx, site, callee_ctx, callee);
                        if let Some(this) = self.program.param_var(callee, 0) {
                            self.worklist.push_back((
                                (callee_ctx, Pointer::Var(callee, this)),
                                BTreeSet::from([(hctx, o)]),
                            ));
                        }
                    }
                    None => {
                        self.diagnostics.insert(format!(
                            "dispatch failure at {}: `{}` has no method `{}`/{}",
                            self.program.stmt_label(site.method, site.stmt),
                            self.program.class(ty).name,
                            name,
                            argc,
                        ));
                    }
                }
            }
        }

        let succs = self.nodes.get(&ptr).map(|n| n.succs.clone()).unwrap_or_default();
        for (tgt, _) in succs {
            self.worklist.push_back((tgt, new.clone()));
        }
    }
}

/// Run the context-sensitive analysis from `entry` (analysed under the
/// empty context).
pub fn solve_context_sensitive(program: &Program, entry: MethodId, flavor: CtxFlavor) -> CsResult {
    let mut solver = CsSolver {
        program,
        flavor,
        ctxs: CtxTable::new(),
        nodes: BTreeMap::new(),
        reachable: BTreeSet::new(),
        call_edges: BTreeSet::new(),
        loads_on: BTreeMap::new(),
        stores_on: BTreeMap::new(),
        vcalls_on: BTreeMap::new(),
        diagnostics: BTreeSet::new(),
        worklist: VecDeque::new(),
    };
    solver.add_reachable(entry, CtxId(0));
    while let Some((ptr, delta)) = solver.worklist.pop_front() {
        solver.process(ptr, delta);
    }

    let mut pt = BTreeMap::new();
    let mut edges = BTreeMap::new();
    for (ptr, node) in solver.nodes {
        if !node.pt.is_empty() {
            pt.insert(ptr, node.pt);
        }
        if !node.succs.is_empty() {
            edges.insert(ptr, node.succs);
        }
    }
    CsResult {
        contexts: solver.ctxs.list,
        pt,
        edges,
        reachable: solver.reachable,
        call_edges: solver.call_edges,
        diagnostics: solver.diagnostics,
    }
}
