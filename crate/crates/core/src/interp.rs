//! Bounded exhaustive concrete interpreter.
//!
//! Runs a program under every resolution of its nondeterministic `if *`
//! branches (within budget), recording the dynamic facts an analysis must
//! over-approximate: reachable methods, call edges, variable and field
//! points-to (with object identities projected to allocation sites) and
//! cast outcomes.  A null dereference or failing cast ends that path only.
//!
//! Exploration is a breadth-first walk over branch-decision prefixes: each
//! queued prefix is replayed from the start, extra branches default to
//! fall-through, and the taken alternative is queued.  The walk is fully
//! deterministic, so the merged facts are too.

use crate::ir::{MethodId, Program, Receiver, SiteId, StmtKind, VarId};
use crate::solver::{AnalysisResult, Pointer};
use serde_json::{json, Map, Value as Json};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Exploration limits.  Exhaustion sets a flag on the facts; it is not an
/// error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_steps_per_path: u64,
    pub max_paths: u64,
    /// Call-stack depth bound; keeps recursive programs off the host stack.
    pub max_call_depth: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_steps_per_path: 10_000, max_paths: 256, max_call_depth: 64 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CastOutcome {
    /// Every explored execution of the cast succeeded.
    AlwaysOk,
    /// Some explored execution failed the cast.
    MayFail,
}

/// Union of facts over all explored executions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DynamicFacts {
    pub reach_methods: BTreeSet<MethodId>,
    pub call_edges: BTreeSet<(crate::ir::CallSite, MethodId)>,
    pub var_points_to: BTreeMap<(MethodId, VarId), BTreeSet<SiteId>>,
    pub field_points_to: BTreeMap<(SiteId, crate::ir::FieldId), BTreeSet<SiteId>>,
    /// Keyed by cast statement label.
    pub cast_outcomes: BTreeMap<String, CastOutcome>,
    /// True when any budget was hit, i.e. the facts may be incomplete.
    pub exhausted: bool,
}

/// A concrete heap object: its allocation site and field values (absent
/// fields read as null).
struct Obj {
    site: SiteId,
    fields: BTreeMap<crate::ir::FieldId, Option<usize>>,
}

/// The path ended early (null dereference, failed cast, missing dispatch
/// target, or step budget).
struct Halt;

struct Path<'p> {
    program: &'p Program,
    budget: Budget,
    heap: Vec<Obj>,
    steps: u64,
    depth: u32,
    /// Branch decisions fixed for this path; extra branches fall through.
    prefix: Vec<bool>,
    /// Decisions actually taken so far.
    history: Vec<bool>,
    /// Alternatives discovered at branches beyond the prefix.
    pending: VecDeque<Vec<bool>>,
    facts: DynamicFacts,
}

impl<'p> Path<'p> {
    fn decide(&mut self) -> bool {
        let i = self.history.len();
        let d = match self.prefix.get(i) {
            Some(&d) => d,
            None => {
                let mut alt = self.history.clone();
                alt.push(true);
                self.pending.push_back(alt);
                false
            }
        };
        self.history.push(d);
        d
    }

    fn record_var(&mut self, m: MethodId, v: VarId, val: Option<usize>) {
        if let Some(obj) = val {
            let site = self.heap[obj].site;
            self.facts.var_points_to.entry((m, v)).or_default().insert(site);
        }
    }

    fn step(&mut self) -> Result<(), Halt> {
        self.steps += 1;
        if self.steps > self.budget.max_steps_per_path {
            self.facts.exhausted = true;
            return Err(Halt);
        }
        Ok(())
    }

    /// Execute `m` with `args` bound to `this` (if any) and the parameters
    /// in order; returns the value of the first executed `return`.
    fn run(&mut self, m: MethodId, args: &[Option<usize>]) -> Result<Option<usize>, Halt> {
        if self.depth >= self.budget.max_call_depth {
            self.facts.exhausted = true;
            return Err(Halt);
        }
        self.depth += 1;
        let out = self.run_frame(m, args);
        self.depth -= 1;
        out
    }

    fn run_frame(&mut self, m: MethodId, args: &[Option<usize>]) -> Result<Option<usize>, Halt> {
        let def = self.program.method(m);
        let mut locals: Vec<Option<usize>> = vec![None; def.vars.len()];
        let mut slot = 0usize;
        for (vi, var) in def.vars.iter().enumerate() {
            if matches!(var.kind, crate::ir::VarKind::This | crate::ir::VarKind::Param(_)) {
                let val = args.get(slot).copied().flatten();
                locals[vi] = val;
                self.record_var(m, VarId(vi as u32), val);
                slot += 1;
            }
        }

        let mut pc = 0usize;
        while pc < def.body.len() {
            self.step()?;
            match &def.body[pc].kind {
                StmtKind::New { lhs, site, .. } => {
                    let obj = self.heap.len();
                    self.heap.push(Obj { site: *site, fields: BTreeMap::new() });
                    locals[lhs.0 as usize] = Some(obj);
                    self.record_var(m, *lhs, Some(obj));
                }
                StmtKind::Assign { lhs, rhs } => {
                    let val = locals[rhs.0 as usize];
                    locals[lhs.0 as usize] = val;
                    self.record_var(m, *lhs, val);
                }
                StmtKind::AssignNull { lhs } => {
                    locals[lhs.0 as usize] = None;
                }
                StmtKind::Cast { lhs, ty, rhs } => {
                    let val = locals[rhs.0 as usize];
                    let label = self.program.stmt_label(m, pc as u32);
                    let ok = match val {
                        None => true,
                        Some(obj) => {
                            let rt = self.program.site(self.heap[obj].site).ty;
                            self.program.subtype_of(rt, *ty)
                        }
                    };
                    if ok {
                        self.facts.cast_outcomes.entry(label).or_insert(CastOutcome::AlwaysOk);
                        locals[lhs.0 as usize] = val;
                        self.record_var(m, *lhs, val);
                    } else {
                        self.facts.cast_outcomes.insert(label, CastOutcome::MayFail);
                        return Err(Halt);
                    }
                }
                StmtKind::Store { base, field, rhs } => {
                    let Some(obj) = locals[base.0 as usize] else { return Err(Halt) };
                    let val = locals[rhs.0 as usize];
                    self.heap[obj].fields.insert(*field, val);
                    if let Some(v) = val {
                        let (bs, vs) = (self.heap[obj].site, self.heap[v].site);
                        self.facts.field_points_to.entry((bs, *field)).or_default().insert(vs);
                    }
                }
                StmtKind::Load { lhs, base, field } => {
                    let Some(obj) = locals[base.0 as usize] else { return Err(Halt) };
                    let val = self.heap[obj].fields.get(field).copied().flatten();
                    locals[lhs.0 as usize] = val;
                    self.record_var(m, *lhs, val);
                }
                StmtKind::Invoke(inv) => {
                    let site = crate::ir::CallSite { method: m, stmt: pc as u32 };
                    let (callee, mut call_args) = match &inv.recv {
                        Receiver::Virtual(recv) => {
                            let Some(obj) = locals[recv.0 as usize] else { return Err(Halt) };
                            let ty = self.program.site(self.heap[obj].site).ty;
                            let Some(callee) =
                                self.program.dispatch(ty, &inv.method, inv.args.len())
                            else {
                                return Err(Halt);
                            };
                            (callee, vec![Some(obj)])
                        }
                        Receiver::Static(class) => {
                            let Some(callee) =
                                self.program.resolve_static(*class, &inv.method, inv.args.len())
                            else {
                                return Err(Halt);
                            };
                            (callee, Vec::new())
                        }
                    };
                    for a in &inv.args {
                        call_args.push(locals[a.0 as usize]);
                    }
                    self.facts.reach_methods.insert(callee);
                    self.facts.call_edges.insert((site, callee));
                    let ret = self.run(callee, &call_args)?;
                    if let Some(lhs) = inv.lhs {
                        locals[lhs.0 as usize] = ret;
                        self.record_var(m, lhs, ret);
                    }
                }
                StmtKind::Return { var } => return Ok(locals[var.0 as usize]),
                StmtKind::Branch { target } => {
                    if self.decide() {
                        pc = *target as usize;
                        continue;
                    }
                }
                StmtKind::Goto { target } => {
                    pc = *target as usize;
                    continue;
                }
                StmtKind::Nop => {}
            }
            pc += 1;
        }
        Ok(None)
    }
}

/// Explore every bounded execution of `entry` and merge the observed facts.
pub fn explore(program: &Program, entry: MethodId, budget: Budget) -> DynamicFacts {
    let mut facts = DynamicFacts::default();
    facts.reach_methods.insert(entry);
    let mut queue: VecDeque<Vec<bool>> = VecDeque::from([Vec::new()]);
    let mut paths_run = 0u64;
    while let Some(prefix) = queue.pop_front() {
        if paths_run >= budget.max_paths {
            facts.exhausted = true;
            break;
        }
        paths_run += 1;
        let mut path = Path {
            program,
            budget,
            heap: Vec::new(),
            steps: 0,
            depth: 0,
            prefix,
            history: Vec::new(),
            pending: VecDeque::new(),
            facts,
        };
        let _ = path.run(entry, &[]);
        facts = path.facts;
        queue.extend(path.pending);
    }
    facts
}

/// Every dynamic fact not over-approximated by `result`, rendered as one
/// message per violation, sorted.  Empty means 100% recall.
pub fn check_recall(program: &Program, facts: &DynamicFacts, result: &AnalysisResult) -> Vec<String> {
    let mut violations = BTreeSet::new();
    for &m in &facts.reach_methods {
        if !result.reachable.contains(&m) {
            violations.insert(format!(
                "dynamically reachable method `{}` not reported reachable",
                program.qualified_name(m)
            ));
        }
    }
    for &(site, callee) in &facts.call_edges {
        if !result.call_edges.contains(&(site, callee)) {
            violations.insert(format!(
                "missing call edge `{} -> {}`",
                program.call_site_label(site),
                program.qualified_name(callee)
            ));
        }
    }
    for (&(m, v), sites) in &facts.var_points_to {
        let ptr = Pointer::Var(m, v);
        let pt = result.pt_of(ptr);
        for &s in sites {
            if !pt.contains(&s) {
                violations.insert(format!(
                    "missing points-to fact: pt({}) should contain {}",
                    ptr.render(program),
                    program.site(s).label
                ));
            }
        }
    }
    for (&(base, field), sites) in &facts.field_points_to {
        let ptr = Pointer::ObjField(base, field);
        let pt = result.pt_of(ptr);
        for &s in sites {
            if !pt.contains(&s) {
                violations.insert(format!(
                    "missing points-to fact: pt({}) should contain {}",
                    ptr.render(program),
                    program.site(s).label
                ));
            }
        }
    }
    violations.into_iter().collect()
}

/// Sorted-JSON rendering of the facts (stable across runs).
pub fn render_facts(program: &Program, facts: &DynamicFacts) -> String {
    let reach: Vec<String> = {
        let mut v: Vec<String> =
            facts.reach_methods.iter().map(|&m| program.qualified_name(m)).collect();
        v.sort();
        v
    };
    let mut call_edges: Vec<(String, String)> = facts
        .call_edges
        .iter()
        .map(|&(site, callee)| (program.call_site_label(site), program.qualified_name(callee)))
        .collect();
    call_edges.sort();
    let call_edges: Vec<Json> = call_edges
        .into_iter()
        .map(|(site, callee)| json!({ "callee": callee, "site": site }))
        .collect();

    let mut var_pt = Map::new();
    for (&(m, v), sites) in &facts.var_points_to {
        let mut labels: Vec<String> =
            sites.iter().map(|&s| program.site(s).label.clone()).collect();
        labels.sort();
        var_pt.insert(Pointer::Var(m, v).render(program), json!(labels));
    }
    let mut field_pt = Map::new();
    for (&(base, field), sites) in &facts.field_points_to {
        let mut labels: Vec<String> =
            sites.iter().map(|&s| program.site(s).label.clone()).collect();
        labels.sort();
        field_pt.insert(Pointer::ObjField(base, field).render(program), json!(labels));
    }
    let casts: Map<String, Json> = facts
        .cast_outcomes
        .iter()
        .map(|(label, outcome)| {
            let s = match outcome {
                CastOutcome::AlwaysOk => "alwaysOk",
                CastOutcome::MayFail => "mayFail",
            };
            (label.clone(), json!(s))
        })
        .collect();

    let doc = json!({
        "callEdges": call_edges,
        "castOutcomes": casts,
        "exhausted": facts.exhausted,
        "fieldPointsTo": field_pt,
        "reachMethods": reach,
        "varPointsTo": var_pt,
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("facts serialize");
    out.push('\n');
    out
}
