//! Context-insensitive inclusion solver over an explicit pointer flow graph.
//!
//! Nodes are [`Pointer`]s (variables and per-object fields); a directed edge
//! `s -> t` means `pt(s) ⊆ pt(t)`.  The solver runs difference propagation
//! over a FIFO worklist and keeps reachability and the call graph on the fly.
//!
//! Cut/shortcut behaviour is injected through an [`EdgePolicy`]: the policy
//! fixes the cut sets before propagation starts and reacts to solver
//! [`Event`]s by emitting shortcut edges.  The empty policy yields plain
//! Andersen-style analysis.

mod dot;
mod report;

pub use dot::export_dot;
pub use report::render_report;

use crate::ir::{CallSite, MethodId, Program, Receiver, SiteId, StmtKind, VarId};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::OnceLock;

/// A pointer-flow-graph node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pointer {
    /// A local variable or parameter of a method.
    Var(MethodId, VarId),
    /// The `f` slot of the abstract object allocated at a site.
    ObjField(SiteId, crate::ir::FieldId),
}

impl Pointer {
    /// Human-readable form: `Class.method/var` or `label.field`.
    pub fn render(&self, p: &Program) -> String {
        match *self {
            Pointer::Var(m, v) => format!("{}/{}", p.qualified_name(m), p.var_name(m, v)),
            Pointer::ObjField(s, f) => format!("{}.{}", p.site(s).label, p.field_name(f)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    Assign,
    Param,
    Return,
    Load,
    Store,
    Shortcut,
}

impl EdgeKind {
    pub fn name(&self) -> &'static str {
        match self {
            EdgeKind::Assign => "assign",
            EdgeKind::Param => "param",
            EdgeKind::Return => "return",
            EdgeKind::Load => "load",
            EdgeKind::Store => "store",
            EdgeKind::Shortcut => "shortcut",
        }
    }
}

/// Where an edge came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    /// A statement (assign, cast, load, store).
    Stmt(MethodId, u32),
    /// A parameter or return edge of a call.
    Call { site: CallSite, callee: MethodId },
    /// A shortcut emitted by the policy under the named rule.
    Policy(&'static str),
}

/// Which kind of base edge a cut suppressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CutKind {
    Store,
    Return,
}

impl CutKind {
    pub fn name(&self) -> &'static str {
        match self {
            CutKind::Store => "store",
            CutKind::Return => "return",
        }
    }
}

/// A suppressed base edge, with the pattern that decided the cut.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CutLogEntry {
    pub src: Pointer,
    pub tgt: Pointer,
    pub kind: CutKind,
    pub rule: String,
}

/// Solver notifications consumed by the policy, in emission order.
#[derive(Clone, Debug)]
pub enum Event {
    Reachable(MethodId),
    CallEdge { site: CallSite, callee: MethodId },
    PtDelta { ptr: Pointer, new: BTreeSet<SiteId> },
    EdgeAdded { src: Pointer, tgt: Pointer, kind: EdgeKind, prov: Provenance },
}

/// Edits a policy may request in response to an event.
#[derive(Clone, Debug)]
pub enum PolicyAction {
    AddShortcut { src: Pointer, tgt: Pointer, rule: &'static str },
}

/// Decides cuts up front and reacts to solver events with shortcut edges.
pub trait EdgePolicy {
    /// Store statements whose `[STORE]` edges are suppressed, fixed before
    /// propagation.
    fn cut_stores(&self) -> BTreeSet<(MethodId, u32)> {
        BTreeSet::new()
    }

    /// Methods whose return edges are suppressed, with the pattern tag(s)
    /// justifying the cut.
    fn cut_returns(&self) -> BTreeMap<MethodId, String> {
        BTreeMap::new()
    }

    fn on_event(&mut self, _pfg: &Pfg, _event: &Event, _out: &mut Vec<PolicyAction>) {}

    /// Called once after the fixpoint; lets a policy publish extra state
    /// (e.g. host sets) into the result.
    fn finish(&mut self, _result: &mut AnalysisResult) {}
}

/// The trivial policy: no cuts, no shortcuts — plain Andersen analysis.
#[derive(Clone, Copy, Debug, Default)]
pub struct EmptyPolicy;

impl EdgePolicy for EmptyPolicy {}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnalysisResult {
    pub pt: BTreeMap<Pointer, BTreeSet<SiteId>>,
    /// Adjacency: src -> {(tgt, kind)}.
    pub edges: BTreeMap<Pointer, BTreeSet<(Pointer, EdgeKind)>>,
    pub reachable: BTreeSet<MethodId>,
    pub call_edges: BTreeSet<(CallSite, MethodId)>,
    pub cut_log: BTreeSet<CutLogEntry>,
    /// Shortcut edges with the rule that produced them.
    pub shortcuts: BTreeSet<(Pointer, Pointer, &'static str)>,
    /// Container-host sets (`pt_H`); empty unless the container pattern ran.
    pub hosts: BTreeMap<Pointer, BTreeSet<SiteId>>,
    pub diagnostics: BTreeSet<String>,
}

fn empty_pt() -> &'static BTreeSet<SiteId> {
    static EMPTY: OnceLock<BTreeSet<SiteId>> = OnceLock::new();
    EMPTY.get_or_init(BTreeSet::new)
}

impl AnalysisResult {
    pub fn pt_of(&self, ptr: Pointer) -> &BTreeSet<SiteId> {
        self.pt.get(&ptr).unwrap_or_else(|| empty_pt())
    }

    pub fn hosts_of(&self, ptr: Pointer) -> &BTreeSet<SiteId> {
        self.hosts.get(&ptr).unwrap_or_else(|| empty_pt())
    }
}

/// Is `tgt` reachable from `src` along PFG flows?
///
/// Flows are the explicit edges plus the receiver hops of resolved virtual
/// calls: receiver binding seeds `pt(this)` per dispatched object instead of
/// adding a `recv -> this` edge (which would merge receivers), so
/// reachability has to follow the recorded call edges for that step.
pub fn pfg_reachable(program: &Program, result: &AnalysisResult, src: Pointer, tgt: Pointer) -> bool {
    let mut recv_hops: BTreeMap<Pointer, BTreeSet<Pointer>> = BTreeMap::new();
    for &(site, callee) in &result.call_edges {
        let StmtKind::Invoke(inv) = &program.method(site.method).body[site.stmt as usize].kind
        else {
            continue;
        };
        let Receiver::Virtual(recv) = inv.recv else { continue };
        if let Some(this_var) = program.param_var(callee, 0) {
            recv_hops
                .entry(Pointer::Var(site.method, recv))
                .or_default()
                .insert(Pointer::Var(callee, this_var));
        }
    }

    if src == tgt {
        return true;
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([src]);
    while let Some(n) = queue.pop_front() {
        let edge_succs = result.edges.get(&n).into_iter().flatten().map(|&(t, _)| t);
        let hop_succs = recv_hops.get(&n).into_iter().flatten().copied();
        for t in edge_succs.chain(hop_succs) {
            if t == tgt {
                return true;
            }
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    false
}

/// Live solver state, readable by policies during [`EdgePolicy::on_event`].
pub struct Pfg<'p> {
    program: &'p Program,
    nodes: BTreeMap<Pointer, Node>,
    reachable: BTreeSet<MethodId>,
    call_edges: BTreeSet<(CallSite, MethodId)>,
    cut_log: BTreeSet<CutLogEntry>,
    shortcuts: BTreeSet<(Pointer, Pointer, &'static str)>,
    diagnostics: BTreeSet<String>,
    cut_stores: BTreeSet<(MethodId, u32)>,
    cut_returns: BTreeMap<MethodId, String>,
    // Statement registrations, keyed by the base/receiver variable pointer.
    loads_on: BTreeMap<Pointer, Vec<LoadReg>>,
    stores_on: BTreeMap<Pointer, Vec<StoreReg>>,
    cut_stores_on: BTreeMap<Pointer, Vec<StoreReg>>,
    vcalls_on: BTreeMap<Pointer, Vec<CallSite>>,
    worklist: VecDeque<(Pointer, BTreeSet<SiteId>)>,
    events: VecDeque<Event>,
}

#[derive(Default)]
struct Node {
    pt: BTreeSet<SiteId>,
    succs: BTreeSet<(Pointer, EdgeKind)>,
}

type LoadReg = (crate::ir::FieldId, Pointer, MethodId, u32);
type StoreReg = (crate::ir::FieldId, Pointer, MethodId, u32);

impl<'p> Pfg<'p> {
    pub fn program(&self) -> &'p Program {
        self.program
    }

    pub fn pt(&self, ptr: Pointer) -> &BTreeSet<SiteId> {
        self.nodes.get(&ptr).map(|n| &n.pt).unwrap_or_else(|| empty_pt())
    }

    pub fn reachable(&self) -> &BTreeSet<MethodId> {
        &self.reachable
    }

    pub fn call_edges(&self) -> &BTreeSet<(CallSite, MethodId)> {
        &self.call_edges
    }

    fn new(program: &'p Program) -> Self {
        Pfg {
            program,
            nodes: BTreeMap::new(),
            reachable: BTreeSet::new(),
            call_edges: BTreeSet::new(),
            cut_log: BTreeSet::new(),
            shortcuts: BTreeSet::new(),
            diagnostics: BTreeSet::new(),
            cut_stores: BTreeSet::new(),
            cut_returns: BTreeMap::new(),
            loads_on: BTreeMap::new(),
            stores_on: BTreeMap::new(),
            cut_stores_on: BTreeMap::new(),
            vcalls_on: BTreeMap::new(),
            worklist: VecDeque::new(),
            events: VecDeque::new(),
        }
    }

    fn enqueue(&mut self, ptr: Pointer, delta: BTreeSet<SiteId>) {
        if !delta.is_empty() {
            self.worklist.push_back((ptr, delta));
        }
    }

    fn add_edge(&mut self, src: Pointer, tgt: Pointer, kind: EdgeKind, prov: Provenance) {
        if !self.nodes.entry(src).or_default().succs.insert((tgt, kind)) {
            return;
        }
        if kind == EdgeKind::Shortcut {
            if let Provenance::Policy(rule) = prov {
                self.shortcuts.insert((src, tgt, rule));
            }
        }
        self.events.push_back(Event::EdgeAdded { src, tgt, kind, prov });
        let seed = self.pt(src).clone();
        self.enqueue(tgt, seed);
    }

    fn add_reachable(&mut self, m: MethodId) {
        if !self.reachable.insert(m) {
            return;
        }
        self.events.push_back(Event::Reachable(m));
        let body = self.program.method(m).body.clone();
        for (i, stmt) in body.iter().enumerate() {
            let i = i as u32;
            match &stmt.kind {
                StmtKind::New { lhs, site, .. } => {
                    self.enqueue(Pointer::Var(m, *lhs), BTreeSet::from([*site]));
                }
                StmtKind::Assign { lhs, rhs } | StmtKind::Cast { lhs, rhs, .. } => {
                    self.add_edge(
                        Pointer::Var(m, *rhs),
                        Pointer::Var(m, *lhs),
                        EdgeKind::Assign,
                        Provenance::Stmt(m, i),
                    );
                }
                StmtKind::Load { lhs, base, field } => {
                    self.loads_on
                        .entry(Pointer::Var(m, *base))
                        .or_default()
                        .push((*field, Pointer::Var(m, *lhs), m, i));
                }
                StmtKind::Store { base, field, rhs } => {
                    let reg = (*field, Pointer::Var(m, *rhs), m, i);
                    let key = Pointer::Var(m, *base);
                    if self.cut_stores.contains(&(m, i)) {
                        self.cut_stores_on.entry(key).or_default().push(reg);
                    } else {
                        self.stores_on.entry(key).or_default().push(reg);
                    }
                }
                StmtKind::Invoke(inv) => {
                    let site = CallSite { method: m, stmt: i };
                    match &inv.recv {
                        Receiver::Virtual(recv) => {
                            self.vcalls_on.entry(Pointer::Var(m, *recv)).or_default().push(site);
                        }
                        Receiver::Static(class) => {
                            match self.program.resolve_static(*class, &inv.method, inv.args.len())
                            {
                                Some(callee) => self.add_call_edge(site, callee),
                                None => {
                                    self.diagnostics.insert(format!(
                                        "unresolved static call `{}.{}` at {}",
                                        self.program.class(*class).name,
                                        inv.method,
                                        self.program.call_site_label(site)
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

    fn add_call_edge(&mut self, site: CallSite, callee: MethodId) {
        if !self.call_edges.insert((site, callee)) {
            return;
        }
        self.add_reachable(callee);
        let prov = Provenance::Call { site, callee };
        let callee_def = self.program.method(callee);
        let (arity, ret_var) = (callee_def.arity, callee_def.ret_var);
        for k in 1..=arity {
            if let (Some(arg), Some(param)) =
                (self.program.arg_var(site, k), self.program.param_var(callee, k))
            {
                self.add_edge(
                    Pointer::Var(site.method, arg),
                    Pointer::Var(callee, param),
                    EdgeKind::Param,
                    prov,
                );
            }
        }
        let lhs = match &self.program.method(site.method).body[site.stmt as usize].kind {
            StmtKind::Invoke(inv) => inv.lhs,
            _ => None,
        };
        if let (Some(lhs), Some(ret)) = (lhs, ret_var) {
            let src = Pointer::Var(callee, ret);
            let tgt = Pointer::Var(site.method, lhs);
            match self.cut_returns.get(&callee) {
                Some(rule) => {
                    self.cut_log.insert(CutLogEntry {
                        src,
                        tgt,
                        kind: CutKind::Return,
                        rule: rule.clone(),
                    });
                }
                None => self.add_edge(src, tgt, EdgeKind::Return, prov),
            }
        }
        self.events.push_back(Event::CallEdge { site, callee });
    }

    /// Merge a delta into `pt(ptr)` and fire the consequences.
    fn process(&mut self, ptr: Pointer, delta: BTreeSet<SiteId>) {
        let node = self.nodes.entry(ptr).or_default();
        let new: BTreeSet<SiteId> = delta.difference(&node.pt).copied().collect();
        if new.is_empty() {
            return;
        }
        node.pt.extend(&new);
        self.events.push_back(Event::PtDelta { ptr, new: new.clone() });

        if let Some(regs) = self.loads_on.get(&ptr).cloned() {
            for (field, lhs, m, i) in regs {
                for &o in &new {
                    self.add_edge(
                        Pointer::ObjField(o, field),
                        lhs,
                        EdgeKind::Load,
                        Provenance::Stmt(m, i),
                    );
                }
            }
        }
        if let Some(regs) = self.stores_on.get(&ptr).cloned() {
            for (field, rhs, m, i) in regs {
                for &o in &new {
                    self.add_edge(
                        rhs,
                        Pointer::ObjField(o, field),
                        EdgeKind::Store,
                        Provenance::Stmt(m, i),
                    );
                }
            }
        }
        if let Some(regs) = self.cut_stores_on.get(&ptr).cloned() {
            for (field, rhs, _m, _i) in regs {
                for &o in &new {
                    self.cut_log.insert(CutLogEntry {
                        src: rhs,
                        tgt: Pointer::ObjField(o, field),
                        kind: CutKind::Store,
                        rule: "fieldStore".into(),
                    });
                }
            }
        }
        if let Some(sites) = self.vcalls_on.get(&ptr).cloned() {
            for site in sites {
                let inv = match &self.program.method(site.method).body[site.stmt as usize].kind {
                    StmtKind::Invoke(inv) => inv.clone(),
                    _ => continue,
                };
                for &o in &new {
                    let ty = self.program.site(o).ty;
                    match self.program.dispatch(ty, &inv.method, inv.args.len()) {
                        Some(callee) => {
                            self.add_call_edge(site, callee);
                            if let Some(this) = self.program.param_var(callee, 0) {
                                self.enqueue(Pointer::Var(callee, this), BTreeSet::from([o]));
                            }
                        }
                        None => {
                            self.diagnostics.insert(format!(
                                "dispatch failure at {}: `{}` has no method `{}`/{}",
                                self.program.call_site_label(site),
                                self.program.class(ty).name,
                                inv.method,
                                inv.args.len()
                            ));
                        }
                    }
                }
            }
        }

        let succs: BTreeSet<Pointer> = self
            .nodes
            .get(&ptr)
            .map(|n| n.succs.iter().map(|&(t, _)| t).collect())
            .unwrap_or_default();
        for tgt in succs {
            self.enqueue(tgt, new.clone());
        }
    }

    fn into_result(self) -> AnalysisResult {
        let mut pt = BTreeMap::new();
        let mut edges = BTreeMap::new();
        for (ptr, node) in self.nodes {
            if !node.pt.is_empty() {
                pt.insert(ptr, node.pt);
            }
            if !node.succs.is_empty() {
                edges.insert(ptr, node.succs);
            }
        }
        AnalysisResult {
            pt,
            edges,
            reachable: self.reachable,
            call_edges: self.call_edges,
            cut_log: self.cut_log,
            shortcuts: self.shortcuts,
            hosts: BTreeMap::new(),
            diagnostics: self.diagnostics,
        }
    }
}

/// Run the inclusion solver from `entry` under the given edge policy.
pub fn solve<P: EdgePolicy>(program: &Program, entry: MethodId, policy: &mut P) -> AnalysisResult {
    let mut pfg = Pfg::new(program);
    pfg.cut_stores = policy.cut_stores();
    pfg.cut_returns = policy.cut_returns();
    pfg.add_reachable(entry);
    drain(&mut pfg, policy);
    while let Some((ptr, delta)) = pfg.worklist.pop_front() {
        pfg.process(ptr, delta);
        drain(&mut pfg, policy);
    }
    let mut result = pfg.into_result();
    policy.finish(&mut result);
    result
}

fn drain<P: EdgePolicy>(pfg: &mut Pfg, policy: &mut P) {
    while let Some(event) = pfg.events.pop_front() {
        let mut actions = Vec::new();
        policy.on_event(pfg, &event, &mut actions);
        for PolicyAction::AddShortcut { src, tgt, rule } in actions {
            pfg.add_edge(src, tgt, EdgeKind::Shortcut, Provenance::Policy(rule));
        }
    }
}
