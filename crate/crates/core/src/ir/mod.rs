//! IR types and queries for the mini object-oriented language.
//!
//! A [`Program`] is a set of classes with fields and methods; method bodies
//! are flat statement lists with nondeterministic branches.  All names are
//! resolved at parse time into dense ids (`ClassId`, `MethodId`, …) so the
//! analyses can use plain ordered collections throughout.

mod check;
mod parse;
mod print;

pub use check::{check_program, Diagnostic, Severity};
pub use parse::{parse_program, ParseError};

use std::collections::BTreeMap;
use std::fmt;

/// Index of a class in [`Program::classes`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub u32);

/// Index of a method in [`Program::methods`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodId(pub u32);

/// Index of an interned field name in [`Program::fields`].
///
/// Fields are identified by name alone: an abstract object `o` has one slot
/// per field name, which matches the untyped store semantics of the IR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldId(pub u32);

/// Index of a variable in its method's [`MethodDef::vars`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

/// Index of an allocation site in [`Program::sites`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteId(pub u32);

/// A call site: the enclosing method plus the statement index of the invoke.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CallSite {
    pub method: MethodId,
    pub stmt: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassDef {
    pub name: String,
    pub superclass: Option<ClassId>,
    /// Fields declared directly on this class, with their declared types.
    pub fields: Vec<(FieldId, ClassId)>,
    pub methods: Vec<MethodId>,
    pub line: u32,
}

/// How a variable was introduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// The implicit receiver; parameter index 0.
    This,
    /// A declared parameter; the payload is its 1-based parameter index.
    Param(u32),
    Local,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarDecl {
    pub name: String,
    /// Declared type; `None` only for `this`, whose type is the class.
    pub ty: Option<ClassId>,
    pub kind: VarKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodDef {
    pub id: MethodId,
    pub class: ClassId,
    pub name: String,
    pub is_static: bool,
    /// Receiver (instance methods only), then declared parameters, then locals.
    pub vars: Vec<VarDecl>,
    /// Number of declared parameters, excluding the receiver.
    pub arity: u32,
    pub ret_type: Option<ClassId>,
    /// The single normalized return variable, if any `return` exists.
    pub ret_var: Option<VarId>,
    pub body: Vec<Stmt>,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AllocSite {
    /// The explicit source label, e.g. `o15`.
    pub label: String,
    pub ty: ClassId,
    pub method: MethodId,
    pub stmt: u32,
}

/// Whether a call names a receiver variable or a class (static call).
#[derive(Clone, Debug, PartialEq)]
pub enum Receiver {
    Virtual(VarId),
    Static(ClassId),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvokeStmt {
    pub lhs: Option<VarId>,
    pub recv: Receiver,
    pub method: String,
    /// Declared arguments; the receiver is not included.
    pub args: Vec<VarId>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    New { lhs: VarId, ty: ClassId, site: SiteId },
    Assign { lhs: VarId, rhs: VarId },
    AssignNull { lhs: VarId },
    Cast { lhs: VarId, ty: ClassId, rhs: VarId },
    Store { base: VarId, field: FieldId, rhs: VarId },
    Load { lhs: VarId, base: VarId, field: FieldId },
    Invoke(InvokeStmt),
    Return { var: VarId },
    /// `if * goto L;` — nondeterministic branch to a statement index.
    Branch { target: u32 },
    Goto { target: u32 },
    Nop,
}

#[derive(Clone, Debug)]
pub struct Stmt {
    pub kind: StmtKind,
    pub label: Option<String>,
    pub line: u32,
}

/// Statements compare structurally; source positions are not significant.
impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.label == other.label
    }
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub classes: Vec<ClassDef>,
    pub methods: Vec<MethodDef>,
    pub sites: Vec<AllocSite>,
    /// Interned field names.
    pub fields: Vec<String>,
    class_by_name: BTreeMap<String, ClassId>,
    field_by_name: BTreeMap<String, FieldId>,
    site_by_label: BTreeMap<String, SiteId>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.classes == other.classes
            && self.methods == other.methods
            && self.sites == other.sites
            && self.fields == other.fields
    }
}

impl Program {
    pub fn class(&self, id: ClassId) -> &ClassDef {
        &self.classes[id.0 as usize]
    }

    pub fn method(&self, id: MethodId) -> &MethodDef {
        &self.methods[id.0 as usize]
    }

    pub fn site(&self, id: SiteId) -> &AllocSite {
        &self.sites[id.0 as usize]
    }

    pub fn field_name(&self, id: FieldId) -> &str {
        &self.fields[id.0 as usize]
    }

    pub fn class_id(&self, name: &str) -> Option<ClassId> {
        self.class_by_name.get(name).copied()
    }

    pub fn field_id(&self, name: &str) -> Option<FieldId> {
        self.field_by_name.get(name).copied()
    }

    pub fn site_id(&self, label: &str) -> Option<SiteId> {
        self.site_by_label.get(label).copied()
    }

    /// `Class.method` name of a method.
    pub fn qualified_name(&self, m: MethodId) -> String {
        let def = self.method(m);
        format!("{}.{}", self.class(def.class).name, def.name)
    }

    /// Stable program-wide label of a statement, `Class.method/idx`.
    pub fn stmt_label(&self, m: MethodId, stmt: u32) -> String {
        format!("{}/{}", self.qualified_name(m), stmt)
    }

    pub fn call_site_label(&self, site: CallSite) -> String {
        self.stmt_label(site.method, site.stmt)
    }

    /// Reflexive, cycle-safe subtype test along `extends` edges.
    pub fn subtype_of(&self, a: ClassId, b: ClassId) -> bool {
        let mut cur = Some(a);
        let mut steps = 0usize;
        while let Some(c) = cur {
            if c == b {
                return true;
            }
            steps += 1;
            if steps > self.classes.len() {
                return false; // inheritance cycle; reported by check_program
            }
            cur = self.class(c).superclass;
        }
        false
    }

    /// Virtual dispatch: walk the chain from `recv_ty` for an instance
    /// method named `name` with the given declared-argument count.
    pub fn dispatch(&self, recv_ty: ClassId, name: &str, arity: usize) -> Option<MethodId> {
        self.lookup(recv_ty, name, arity, false)
    }

    /// Static call resolution in `class` (and its superclasses).
    pub fn resolve_static(&self, class: ClassId, name: &str, arity: usize) -> Option<MethodId> {
        self.lookup(class, name, arity, true)
    }

    fn lookup(&self, start: ClassId, name: &str, arity: usize, want_static: bool) -> Option<MethodId> {
        let mut cur = Some(start);
        let mut steps = 0usize;
        while let Some(c) = cur {
            for &m in &self.class(c).methods {
                let def = self.method(m);
                if def.name == name && def.arity as usize == arity && def.is_static == want_static {
                    return Some(m);
                }
            }
            steps += 1;
            if steps > self.classes.len() {
                return None;
            }
            cur = self.class(c).superclass;
        }
        None
    }

    /// Every method some receiver type could dispatch `name/arity` to.
    ///
    /// This deliberately ignores declared types: the IR performs no type
    /// filtering, so any allocated class is a possible receiver type.
    pub fn all_virtual_targets(&self, name: &str, arity: usize) -> Vec<MethodId> {
        let mut out = Vec::new();
        for c in 0..self.classes.len() as u32 {
            if let Some(m) = self.dispatch(ClassId(c), name, arity) {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        out.sort();
        out
    }

    /// Statement indices in `m` that define `v` (New, Assign, AssignNull,
    /// Cast, Load, and Invoke results).  Stores, returns and branches never
    /// define a variable, and parameter binding does not count.
    pub fn def_statements(&self, m: MethodId, v: VarId) -> Vec<u32> {
        let mut out = Vec::new();
        for (i, stmt) in self.method(m).body.iter().enumerate() {
            let def = match &stmt.kind {
                StmtKind::New { lhs, .. }
                | StmtKind::Assign { lhs, .. }
                | StmtKind::AssignNull { lhs }
                | StmtKind::Cast { lhs, .. }
                | StmtKind::Load { lhs, .. } => Some(*lhs),
                StmtKind::Invoke(inv) => inv.lhs,
                _ => None,
            };
            if def == Some(v) {
                out.push(i as u32);
            }
        }
        out
    }

    /// The spec-style parameter slot of a variable: 0 for the receiver,
    /// 1..=arity for declared parameters, `None` for locals.
    pub fn param_index(&self, m: MethodId, v: VarId) -> Option<u32> {
        match self.method(m).vars[v.0 as usize].kind {
            VarKind::This => Some(0),
            VarKind::Param(k) => Some(k),
            VarKind::Local => None,
        }
    }

    /// The variable occupying parameter slot `k` of `m`, if any.
    pub fn param_var(&self, m: MethodId, k: u32) -> Option<VarId> {
        let def = self.method(m);
        def.vars.iter().position(|vd| match vd.kind {
            VarKind::This => k == 0,
            VarKind::Param(i) => i == k,
            VarKind::Local => false,
        })
        .map(|i| VarId(i as u32))
    }

    /// A parameter that is never redefined inside its method keeps exactly
    /// the values passed at call sites; several patterns key on this.
    pub fn is_unredefined_param(&self, m: MethodId, v: VarId) -> bool {
        self.param_index(m, v).is_some() && self.def_statements(m, v).is_empty()
    }

    /// The argument variable at spec slot `k` of a call site: slot 0 is the
    /// receiver (virtual calls only), slot `k >= 1` the k-th declared argument.
    pub fn arg_var(&self, site: CallSite, k: u32) -> Option<VarId> {
        match &self.method(site.method).body[site.stmt as usize].kind {
            StmtKind::Invoke(inv) => {
                if k == 0 {
                    match inv.recv {
                        Receiver::Virtual(v) => Some(v),
                        Receiver::Static(_) => None,
                    }
                } else {
                    inv.args.get(k as usize - 1).copied()
                }
            }
            _ => None,
        }
    }

    pub fn var_name(&self, m: MethodId, v: VarId) -> &str {
        &self.method(m).vars[v.0 as usize].name
    }

    pub fn var_id(&self, m: MethodId, name: &str) -> Option<VarId> {
        self.method(m)
            .vars
            .iter()
            .position(|vd| vd.name == name)
            .map(|i| VarId(i as u32))
    }

    /// Look up methods by `Class.method` (any arity, any staticness).
    pub fn methods_by_qualified_name(&self, qualified: &str) -> Vec<MethodId> {
        let Some((class, name)) = qualified.split_once('.') else {
            return Vec::new();
        };
        let Some(cid) = self.class_id(class) else {
            return Vec::new();
        };
        self.class(cid)
            .methods
            .iter()
            .copied()
            .filter(|&m| self.method(m).name == name)
            .collect()
    }

    /// Resolve an entry point given as `Class.method`; it must exist and
    /// take no declared arguments.
    pub fn resolve_entry(&self, qualified: &str) -> Result<MethodId, String> {
        let candidates = self.methods_by_qualified_name(qualified);
        if candidates.is_empty() {
            return Err(format!("entry method `{qualified}` not found"));
        }
        match candidates.iter().find(|&&m| self.method(m).arity == 0) {
            Some(&m) => Ok(m),
            None => Err(format!("entry method `{qualified}` must take no arguments")),
        }
    }

    pub(crate) fn register_class(&mut self, def: ClassDef) -> ClassId {
        let id = ClassId(self.classes.len() as u32);
        self.class_by_name.insert(def.name.clone(), id);
        self.classes.push(def);
        id
    }

    pub(crate) fn intern_field(&mut self, name: &str) -> FieldId {
        if let Some(&id) = self.field_by_name.get(name) {
            return id;
        }
        let id = FieldId(self.fields.len() as u32);
        self.fields.push(name.to_string());
        self.field_by_name.insert(name.to_string(), id);
        id
    }

    pub(crate) fn register_site(&mut self, site: AllocSite) -> Option<SiteId> {
        if self.site_by_label.contains_key(&site.label) {
            return None;
        }
        let id = SiteId(self.sites.len() as u32);
        self.site_by_label.insert(site.label.clone(), id);
        self.sites.push(site);
        Some(id)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print_program(self))
    }
}

/// Canonical source form; `parse_program(print_program(p))` re-parses to an
/// equal program.
pub fn print_program(p: &Program) -> String {
    print::print_program(p)
}
