//! The cut-shortcut edge policy.
//!
//! Instead of cloning contexts, the policy removes ("cuts") the imprecision-
//! causing PFG edges of four patterns and replaces them with direct
//! ("shortcut") edges between the right endpoints:
//!
//! * **field store** — a store `x.f = y` whose base and value are both
//!   never-redefined parameters is cut; temp-store triples are lifted
//!   caller-wards until an endpoint is concrete, then the value flows
//!   straight into the concrete objects' fields.
//! * **field load** — a method returning `this.f`-style loads has its return
//!   edges cut; call sites get per-site `o.f -> lhs` edges instead, with
//!   relay edges re-connecting any other flows into the return variable.
//! * **container** — modelled entrance/exit/transfer methods move values in
//!   and out of host objects; matching entrance/exit pairs on the same host
//!   and category are bridged directly.
//! * **local flow** — methods whose return value is assembled only from
//!   parameters have their return edges cut; each call site gets direct
//!   argument-to-result edges.
//!
//! All cut sets are fixed before propagation; the dynamic machinery only
//! ever adds shortcut edges, so the solver's monotone fixpoint argument is
//! unchanged.

mod model;

pub use model::{
    resolve_model, Category, ContainerModel, Entrance, Exit, ModelResolution, ResolvedModel,
};

use crate::ir::{CallSite, FieldId, MethodId, Program, SiteId, StmtKind, VarId};
use crate::solver::{
    AnalysisResult, EdgeKind, EdgePolicy, Event, Pfg, Pointer, PolicyAction, Provenance,
};
use std::collections::{BTreeMap, BTreeSet};

/// One of the three user-selectable patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    Field,
    Container,
    Local,
}

/// Which patterns are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatternSet {
    pub field: bool,
    pub container: bool,
    pub local: bool,
    /// Sub-toggle of the field pattern: handle loads (cuts, temp-loads and
    /// relay edges) in addition to stores.  Disabling reproduces the
    /// store-only variant.
    pub load_handling: bool,
}

impl PatternSet {
    pub fn all() -> Self {
        PatternSet { field: true, container: true, local: true, load_handling: true }
    }

    pub fn none() -> Self {
        PatternSet { field: false, container: false, local: false, load_handling: false }
    }

    pub fn only(pattern: Pattern) -> Self {
        let mut set = PatternSet::none();
        match pattern {
            Pattern::Field => {
                set.field = true;
                set.load_handling = true;
            }
            Pattern::Container => set.container = true,
            Pattern::Local => set.local = true,
        }
        set
    }
}

impl Default for PatternSet {
    fn default() -> Self {
        PatternSet::all()
    }
}

// ---------------------------------------------------------------------------
// Static cut computation
// ---------------------------------------------------------------------------

/// Local parameter-to-return flow: for each variable, the set of parameter
/// slots whose values it can only ever hold.
///
/// Seeds are never-redefined parameters; a variable joins when all of its
/// defining statements are plain assignments from variables already in the
/// relation (null-assignments, casts, loads, news and call results block it).
pub fn param_return_flow(p: &Program, m: MethodId) -> BTreeMap<VarId, BTreeSet<u32>> {
    let def = p.method(m);
    let mut flow: BTreeMap<VarId, BTreeSet<u32>> = BTreeMap::new();
    for vi in 0..def.vars.len() as u32 {
        let v = VarId(vi);
        if p.is_unredefined_param(m, v) {
            flow.insert(v, BTreeSet::from([p.param_index(m, v).unwrap()]));
        }
    }
    loop {
        let mut changed = false;
        for vi in 0..def.vars.len() as u32 {
            let v = VarId(vi);
            let defs = p.def_statements(m, v);
            if defs.is_empty() {
                continue;
            }
            let mut union: BTreeSet<u32> = BTreeSet::new();
            let mut ok = true;
            for &d in &defs {
                match def.body[d as usize].kind {
                    StmtKind::Assign { rhs, .. } => match flow.get(&rhs) {
                        Some(ks) if rhs != v => union.extend(ks),
                        _ => {
                            ok = false;
                            break;
                        }
                    },
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && flow.get(&v) != Some(&union) {
                flow.insert(v, union);
                changed = true;
            }
        }
        if !changed {
            return flow;
        }
    }
}

/// Store statements whose base and value are both never-redefined parameters
/// of the enclosing method, plus the per-method slot descriptors
/// `(base slot, field, value slot)` used to lift temp-stores caller-wards.
pub fn cut_store_descriptors(
    p: &Program,
) -> (BTreeSet<(MethodId, u32)>, BTreeMap<MethodId, BTreeSet<(u32, FieldId, u32)>>) {
    let mut stores = BTreeSet::new();
    let mut descriptors: BTreeMap<MethodId, BTreeSet<(u32, FieldId, u32)>> = BTreeMap::new();
    for def in &p.methods {
        for (i, stmt) in def.body.iter().enumerate() {
            if let StmtKind::Store { base, field, rhs } = stmt.kind {
                if p.is_unredefined_param(def.id, base) && p.is_unredefined_param(def.id, rhs) {
                    stores.insert((def.id, i as u32));
                    descriptors.entry(def.id).or_default().insert((
                        p.param_index(def.id, base).unwrap(),
                        field,
                        p.param_index(def.id, rhs).unwrap(),
                    ));
                }
            }
        }
    }
    (stores, descriptors)
}

/// Field-load anchors: `(parameter slot, field)` pairs meaning "this method
/// returns `slot.field` of a never-redefined parameter".
///
/// Direct anchors come from loads into the return variable; anchors lift
/// through calls whose result is the caller's return variable and whose
/// argument in the anchored slot is itself a never-redefined parameter.
/// Possible callees are over-approximated by name and arity, which can only
/// over-cut; relay edges keep over-cutting precision-neutral.
pub fn load_anchor_closure(p: &Program) -> BTreeMap<MethodId, BTreeSet<(u32, FieldId)>> {
    let mut anchors: BTreeMap<MethodId, BTreeSet<(u32, FieldId)>> = BTreeMap::new();
    for def in &p.methods {
        let Some(ret) = def.ret_var else { continue };
        for stmt in &def.body {
            if let StmtKind::Load { lhs, base, field } = stmt.kind {
                if lhs == ret && p.is_unredefined_param(def.id, base) {
                    anchors
                        .entry(def.id)
                        .or_default()
                        .insert((p.param_index(def.id, base).unwrap(), field));
                }
            }
        }
    }
    loop {
        let mut changed = false;
        for def in &p.methods {
            let Some(ret) = def.ret_var else { continue };
            for (i, stmt) in def.body.iter().enumerate() {
                let StmtKind::Invoke(inv) = &stmt.kind else { continue };
                if inv.lhs != Some(ret) {
                    continue;
                }
                let callees = match &inv.recv {
                    crate::ir::Receiver::Virtual(_) => {
                        p.all_virtual_targets(&inv.method, inv.args.len())
                    }
                    crate::ir::Receiver::Static(c) => p
                        .resolve_static(*c, &inv.method, inv.args.len())
                        .into_iter()
                        .collect(),
                };
                let site = CallSite { method: def.id, stmt: i as u32 };
                for callee in callees {
                    for (k, f) in anchors.get(&callee).cloned().unwrap_or_default() {
                        let Some(arg) = p.arg_var(site, k) else { continue };
                        if p.is_unredefined_param(def.id, arg) {
                            let k2 = p.param_index(def.id, arg).unwrap();
                            changed |= anchors.entry(def.id).or_default().insert((k2, f));
                        }
                    }
                }
            }
        }
        if !changed {
            return anchors;
        }
    }
}

// ---------------------------------------------------------------------------
// The policy
// ---------------------------------------------------------------------------

pub struct CutShortcutPolicy<'p> {
    program: &'p Program,
    patterns: PatternSet,
    model_warnings: Vec<String>,

    // --- fixed before propagation ---
    cut_stores: BTreeSet<(MethodId, u32)>,
    cut_return_tags: BTreeMap<MethodId, BTreeSet<&'static str>>,
    /// Methods cut by the field-load pattern (relay applies to these only).
    fieldload_cut: BTreeSet<MethodId>,
    local_flow: BTreeMap<MethodId, BTreeMap<VarId, BTreeSet<u32>>>,
    entrances: BTreeMap<MethodId, Vec<(u32, Category)>>,
    exits: BTreeMap<MethodId, Vec<Category>>,
    transfers: BTreeSet<MethodId>,
    roots: BTreeSet<crate::ir::ClassId>,

    // --- dynamic field-store machinery ---
    /// Per method: `(base slot, field, value slot)` store descriptors; seeded
    /// from cut stores, grown by lifted temp-stores.
    lift_descriptors: BTreeMap<MethodId, BTreeSet<(u32, FieldId, u32)>>,
    seen_triples: BTreeSet<(Pointer, FieldId, Pointer)>,
    /// Finalised temp-stores: when `pt(base)` grows, emit `from -> o.f`.
    store_watches: BTreeMap<Pointer, BTreeSet<(FieldId, Pointer)>>,

    // --- dynamic field-load machinery ---
    /// Per method: `(slot, field)` load anchors; seeded statically, grown as
    /// temp-loads lift.
    load_anchors: BTreeMap<MethodId, BTreeSet<(u32, FieldId)>>,
    /// Active temp-loads: when `pt(base)` grows, emit `o.f -> to`; the flag
    /// marks the emitted edges as return-load edges (exempt from relay).
    load_watches: BTreeMap<Pointer, BTreeSet<(FieldId, Pointer, bool)>>,
    return_load_edges: BTreeSet<(Pointer, Pointer)>,
    /// Non-return-load sources flowing into a cut method's return variable.
    relay_in: BTreeMap<MethodId, BTreeSet<Pointer>>,
    /// Result variables of call sites targeting a cut method.
    relay_out: BTreeMap<MethodId, BTreeSet<Pointer>>,

    // --- dynamic container machinery ---
    hosts: BTreeMap<Pointer, BTreeSet<SiteId>>,
    host_succs: BTreeMap<Pointer, BTreeSet<Pointer>>,
    entrance_watches: BTreeMap<Pointer, BTreeSet<(CallSite, MethodId)>>,
    exit_watches: BTreeMap<Pointer, BTreeSet<(CallSite, MethodId)>>,
    src_rel: BTreeMap<(SiteId, Category), BTreeSet<Pointer>>,
    tgt_rel: BTreeMap<(SiteId, Category), BTreeSet<Pointer>>,

    /// Call edges seen so far, indexed by callee (for descriptor replay).
    call_edges_to: BTreeMap<MethodId, BTreeSet<CallSite>>,
}

fn shortcut(src: Pointer, tgt: Pointer, rule: &'static str) -> PolicyAction {
    PolicyAction::AddShortcut { src, tgt, rule }
}

impl<'p> CutShortcutPolicy<'p> {
    /// Build the policy: resolve the container model (if the container
    /// pattern is on) and fix every cut set.  Model errors are fatal.
    pub fn new(
        program: &'p Program,
        patterns: PatternSet,
        model: Option<&ContainerModel>,
    ) -> Result<Self, Vec<String>> {
        let mut model_warnings = Vec::new();
        let resolved = if patterns.container {
            match model {
                Some(m) => {
                    let res = resolve_model(program, m);
                    if !res.errors.is_empty() {
                        return Err(res.errors);
                    }
                    model_warnings = res.warnings;
                    res.model
                }
                None => ResolvedModel::default(),
            }
        } else {
            ResolvedModel::default()
        };

        let (cut_stores, lift_descriptors) = if patterns.field {
            cut_store_descriptors(program)
        } else {
            Default::default()
        };

        let load_anchors = if patterns.field && patterns.load_handling {
            load_anchor_closure(program)
        } else {
            BTreeMap::new()
        };
        let fieldload_cut: BTreeSet<MethodId> = load_anchors.keys().copied().collect();

        let local_flow: BTreeMap<MethodId, BTreeMap<VarId, BTreeSet<u32>>> = if patterns.local {
            (0..program.methods.len() as u32)
                .map(|m| (MethodId(m), param_return_flow(program, MethodId(m))))
                .collect()
        } else {
            BTreeMap::new()
        };

        let mut cut_return_tags: BTreeMap<MethodId, BTreeSet<&'static str>> = BTreeMap::new();
        for &m in &fieldload_cut {
            cut_return_tags.entry(m).or_default().insert("fieldLoad");
        }
        for (&m, flow) in &local_flow {
            if let Some(ret) = program.method(m).ret_var {
                if flow.contains_key(&ret) {
                    cut_return_tags.entry(m).or_default().insert("localFlow");
                }
            }
        }
        for &m in resolved.exits.keys() {
            cut_return_tags.entry(m).or_default().insert("container");
        }

        Ok(CutShortcutPolicy {
            program,
            patterns,
            model_warnings,
            cut_stores,
            cut_return_tags,
            fieldload_cut,
            local_flow,
            entrances: resolved.entrances,
            exits: resolved.exits,
            transfers: resolved.transfers,
            roots: resolved.roots,
            lift_descriptors,
            seen_triples: BTreeSet::new(),
            store_watches: BTreeMap::new(),
            load_anchors,
            load_watches: BTreeMap::new(),
            return_load_edges: BTreeSet::new(),
            relay_in: BTreeMap::new(),
            relay_out: BTreeMap::new(),
            hosts: BTreeMap::new(),
            host_succs: BTreeMap::new(),
            entrance_watches: BTreeMap::new(),
            exit_watches: BTreeMap::new(),
            src_rel: BTreeMap::new(),
            tgt_rel: BTreeMap::new(),
            call_edges_to: BTreeMap::new(),
        })
    }

    /// Warnings produced while resolving the container model.
    pub fn warnings(&self) -> &[String] {
        &self.model_warnings
    }

    fn invoke_lhs(&self, site: CallSite) -> Option<Pointer> {
        match &self.program.method(site.method).body[site.stmt as usize].kind {
            StmtKind::Invoke(inv) => inv.lhs.map(|l| Pointer::Var(site.method, l)),
            _ => None,
        }
    }

    /// A temp-store triple reached a new scope: lift it if both endpoints are
    /// still never-redefined parameters, otherwise finalise it into a watch
    /// on the base's points-to set.
    fn add_triple(
        &mut self,
        pfg: &Pfg,
        base: Pointer,
        field: FieldId,
        from: Pointer,
        out: &mut Vec<PolicyAction>,
    ) {
        if !self.seen_triples.insert((base, field, from)) {
            return;
        }
        let (Pointer::Var(m, bv), Pointer::Var(_, fv)) = (base, from) else { return };
        let liftable = self.program.is_unredefined_param(m, bv)
            && self.program.is_unredefined_param(m, fv);
        if liftable {
            let k1 = self.program.param_index(m, bv).unwrap();
            let k2 = self.program.param_index(m, fv).unwrap();
            if self.lift_descriptors.entry(m).or_default().insert((k1, field, k2)) {
                for site in self.call_edges_to.get(&m).cloned().unwrap_or_default() {
                    if let (Some(b), Some(f)) =
                        (self.program.arg_var(site, k1), self.program.arg_var(site, k2))
                    {
                        self.add_triple(
                            pfg,
                            Pointer::Var(site.method, b),
                            field,
                            Pointer::Var(site.method, f),
                            out,
                        );
                    }
                }
            }
        } else if self.store_watches.entry(base).or_default().insert((field, from)) {
            for &o in pfg.pt(base) {
                out.push(shortcut(from, Pointer::ObjField(o, field), "fieldStore"));
            }
        }
    }

    /// A call edge reached a method with a load anchor `(k, field)`: spawn
    /// the caller-side temp-load, lifting the anchor further if the call
    /// result is the caller's return variable bound to an unredefined
    /// parameter slot.
    fn spawn_temp_load(
        &mut self,
        pfg: &Pfg,
        site: CallSite,
        k: u32,
        field: FieldId,
        out: &mut Vec<PolicyAction>,
    ) {
        let caller = site.method;
        let Some(to) = self.invoke_lhs(site) else { return };
        let Some(arg) = self.program.arg_var(site, k) else { return };
        let base = Pointer::Var(caller, arg);
        let Pointer::Var(_, lhs_var) = to else { return };

        let lifts = self.program.method(caller).ret_var == Some(lhs_var)
            && self.program.is_unredefined_param(caller, arg);
        if lifts {
            let k2 = self.program.param_index(caller, arg).unwrap();
            if self.load_anchors.entry(caller).or_default().insert((k2, field)) {
                debug_assert!(self.fieldload_cut.contains(&caller));
                for caller_site in self.call_edges_to.get(&caller).cloned().unwrap_or_default() {
                    self.spawn_temp_load(pfg, caller_site, k2, field, out);
                }
            }
        }
        if self.load_watches.entry(base).or_default().insert((field, to, lifts)) {
            for &o in pfg.pt(base) {
                let src = Pointer::ObjField(o, field);
                if lifts {
                    self.return_load_edges.insert((src, to));
                }
                out.push(shortcut(src, to, "fieldLoad"));
            }
        }
    }

    fn register_sources(
        &mut self,
        site: CallSite,
        callee: MethodId,
        hosts: &BTreeSet<SiteId>,
        out: &mut Vec<PolicyAction>,
    ) {
        for (k, cat) in self.entrances.get(&callee).cloned().unwrap_or_default() {
            let Some(arg) = self.program.arg_var(site, k) else { continue };
            let s = Pointer::Var(site.method, arg);
            for &h in hosts {
                if self.src_rel.entry((h, cat)).or_default().insert(s) {
                    for t in self.tgt_rel.get(&(h, cat)).cloned().unwrap_or_default() {
                        out.push(shortcut(s, t, "container"));
                    }
                }
            }
        }
    }

    fn register_targets(
        &mut self,
        site: CallSite,
        callee: MethodId,
        hosts: &BTreeSet<SiteId>,
        out: &mut Vec<PolicyAction>,
    ) {
        let Some(t) = self.invoke_lhs(site) else { return };
        for cat in self.exits.get(&callee).cloned().unwrap_or_default() {
            for &h in hosts {
                if self.tgt_rel.entry((h, cat)).or_default().insert(t) {
                    for s in self.src_rel.get(&(h, cat)).cloned().unwrap_or_default() {
                        out.push(shortcut(s, t, "container"));
                    }
                }
            }
        }
    }

    /// Merge new hosts into `pt_H(ptr)` and propagate.
    fn host_delta(&mut self, ptr: Pointer, delta: BTreeSet<SiteId>, out: &mut Vec<PolicyAction>) {
        let known = self.hosts.entry(ptr).or_default();
        let new: BTreeSet<SiteId> = delta.difference(known).copied().collect();
        if new.is_empty() {
            return;
        }
        known.extend(&new);
        for (site, callee) in self.entrance_watches.get(&ptr).cloned().unwrap_or_default() {
            self.register_sources(site, callee, &new, out);
        }
        for (site, callee) in self.exit_watches.get(&ptr).cloned().unwrap_or_default() {
            self.register_targets(site, callee, &new, out);
        }
        for succ in self.host_succs.get(&ptr).cloned().unwrap_or_default() {
            self.host_delta(succ, new.clone(), out);
        }
    }

    fn add_host_edge(&mut self, src: Pointer, tgt: Pointer, out: &mut Vec<PolicyAction>) {
        if self.host_succs.entry(src).or_default().insert(tgt) {
            let cur = self.hosts.get(&src).cloned().unwrap_or_default();
            if !cur.is_empty() {
                self.host_delta(tgt, cur, out);
            }
        }
    }

    fn on_call_edge(
        &mut self,
        pfg: &Pfg,
        site: CallSite,
        callee: MethodId,
        out: &mut Vec<PolicyAction>,
    ) {
        self.call_edges_to.entry(callee).or_default().insert(site);
        let lhs = self.invoke_lhs(site);

        if self.patterns.local {
            if let (Some(lhs), Some(ret)) = (lhs, self.program.method(callee).ret_var) {
                if let Some(slots) =
                    self.local_flow.get(&callee).and_then(|flow| flow.get(&ret)).cloned()
                {
                    for k in slots {
                        if let Some(arg) = self.program.arg_var(site, k) {
                            out.push(shortcut(Pointer::Var(site.method, arg), lhs, "localFlow"));
                        }
                    }
                }
            }
        }

        if self.patterns.field {
            for (k1, field, k2) in self.lift_descriptors.get(&callee).cloned().unwrap_or_default()
            {
                if let (Some(b), Some(f)) =
                    (self.program.arg_var(site, k1), self.program.arg_var(site, k2))
                {
                    self.add_triple(
                        pfg,
                        Pointer::Var(site.method, b),
                        field,
                        Pointer::Var(site.method, f),
                        out,
                    );
                }
            }
            if self.patterns.load_handling {
                for (k, field) in self.load_anchors.get(&callee).cloned().unwrap_or_default() {
                    self.spawn_temp_load(pfg, site, k, field, out);
                }
                if self.fieldload_cut.contains(&callee) {
                    if let Some(lhs) = lhs {
                        if self.relay_out.entry(callee).or_default().insert(lhs) {
                            for n in self.relay_in.get(&callee).cloned().unwrap_or_default() {
                                out.push(shortcut(n, lhs, "relay"));
                            }
                        }
                    }
                }
            }
        }

        if self.patterns.container {
            if let Some(recv) = self.program.arg_var(site, 0) {
                let recv_ptr = Pointer::Var(site.method, recv);
                if self.entrances.contains_key(&callee)
                    && self.entrance_watches.entry(recv_ptr).or_default().insert((site, callee))
                {
                    let hs = self.hosts.get(&recv_ptr).cloned().unwrap_or_default();
                    self.register_sources(site, callee, &hs, out);
                }
                if self.exits.contains_key(&callee)
                    && lhs.is_some()
                    && self.exit_watches.entry(recv_ptr).or_default().insert((site, callee))
                {
                    let hs = self.hosts.get(&recv_ptr).cloned().unwrap_or_default();
                    self.register_targets(site, callee, &hs, out);
                }
                if self.transfers.contains(&callee) {
                    if let Some(lhs) = lhs {
                        self.add_host_edge(recv_ptr, lhs, out);
                    }
                }
            }
        }
    }

    fn on_pt_delta(&mut self, ptr: Pointer, new: &BTreeSet<SiteId>, out: &mut Vec<PolicyAction>) {
        if self.patterns.field {
            for (field, from) in self.store_watches.get(&ptr).cloned().unwrap_or_default() {
                for &o in new {
                    out.push(shortcut(from, Pointer::ObjField(o, field), "fieldStore"));
                }
            }
            if self.patterns.load_handling {
                for (field, to, rle) in self.load_watches.get(&ptr).cloned().unwrap_or_default() {
                    for &o in new {
                        let src = Pointer::ObjField(o, field);
                        if rle {
                            self.return_load_edges.insert((src, to));
                        }
                        out.push(shortcut(src, to, "fieldLoad"));
                    }
                }
            }
        }
        if self.patterns.container && !self.roots.is_empty() {
            let host_objs: BTreeSet<SiteId> = new
                .iter()
                .copied()
                .filter(|&o| {
                    let ty = self.program.site(o).ty;
                    self.roots.iter().any(|&r| self.program.subtype_of(ty, r))
                })
                .collect();
            if !host_objs.is_empty() {
                self.host_delta(ptr, host_objs, out);
            }
        }
    }

    fn on_edge_added(
        &mut self,
        src: Pointer,
        tgt: Pointer,
        kind: EdgeKind,
        prov: Provenance,
        out: &mut Vec<PolicyAction>,
    ) {
        // Relay: any non-return-load flow into a field-load-cut method's
        // return variable must reach every call-site result directly.
        if self.patterns.field && self.patterns.load_handling {
            if let Pointer::Var(m, v) = tgt {
                if self.fieldload_cut.contains(&m) && self.program.method(m).ret_var == Some(v) {
                    let mut is_rle = self.return_load_edges.contains(&(src, tgt));
                    if !is_rle && kind == EdgeKind::Load {
                        // A direct anchored load into the return variable is
                        // covered by the callers' temp-loads.
                        if let Provenance::Stmt(sm, si) = prov {
                            if let StmtKind::Load { lhs, base, .. } =
                                self.program.method(sm).body[si as usize].kind
                            {
                                if sm == m
                                    && lhs == v
                                    && self.program.is_unredefined_param(sm, base)
                                {
                                    self.return_load_edges.insert((src, tgt));
                                    is_rle = true;
                                }
                            }
                        }
                    }
                    if !is_rle && self.relay_in.entry(m).or_default().insert(src) {
                        for r in self.relay_out.get(&m).cloned().unwrap_or_default() {
                            out.push(shortcut(src, r, "relay"));
                        }
                    }
                }
            }
        }

        // Host propagation along every PFG edge except transfer returns.
        if self.patterns.container {
            let transfer_return = kind == EdgeKind::Return
                && matches!(prov, Provenance::Call { callee, .. } if self.transfers.contains(&callee));
            if !transfer_return {
                self.add_host_edge(src, tgt, out);
            }
        }
    }
}

impl<'p> EdgePolicy for CutShortcutPolicy<'p> {
    fn cut_stores(&self) -> BTreeSet<(MethodId, u32)> {
        self.cut_stores.clone()
    }

    fn cut_returns(&self) -> BTreeMap<MethodId, String> {
        self.cut_return_tags
            .iter()
            .map(|(&m, tags)| (m, tags.iter().copied().collect::<Vec<_>>().join("+")))
            .collect()
    }

    fn on_event(&mut self, pfg: &Pfg, event: &Event, out: &mut Vec<PolicyAction>) {
        match event {
            Event::Reachable(_) => {}
            Event::CallEdge { site, callee } => self.on_call_edge(pfg, *site, *callee, out),
            Event::PtDelta { ptr, new } => self.on_pt_delta(*ptr, new, out),
            Event::EdgeAdded { src, tgt, kind, prov } => {
                self.on_edge_added(*src, *tgt, *kind, *prov, out)
            }
        }
    }

    fn finish(&mut self, result: &mut AnalysisResult) {
        // Model resolution warnings stay on [`Self::warnings`]: the report's
        // diagnostics only carry analysis facts, so equally precise runs
        // render identical reports regardless of model configuration.
        for (ptr, hs) in std::mem::take(&mut self.hosts) {
            if !hs.is_empty() {
                result.hosts.insert(ptr, hs);
            }
        }
    }
}
