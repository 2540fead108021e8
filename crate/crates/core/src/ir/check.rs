//! Whole-program well-formedness diagnostics.
//!
//! `check_program` never fails early: it returns every diagnostic at once so
//! a caller can render them in one pass.  Parse-time resolution already
//! guarantees that names exist; the checks here are the semantic ones that
//! need the whole class table.

use super::{ClassId, Program, Receiver, StmtKind, VarKind};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: u32,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "line {}: {}: {}", self.line, sev, self.message)
    }
}

pub fn check_program(p: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_cycles(p, &mut out);
    check_duplicate_methods(p, &mut out);
    check_field_shadowing(p, &mut out);
    check_bodies(p, &mut out);
    out.sort_by(|a, b| (a.line, &a.message).cmp(&(b.line, &b.message)));
    out
}

fn error(out: &mut Vec<Diagnostic>, line: u32, message: String) {
    out.push(Diagnostic { severity: Severity::Error, line, message });
}

fn check_cycles(p: &Program, out: &mut Vec<Diagnostic>) {
    let mut reported: BTreeSet<BTreeSet<ClassId>> = BTreeSet::new();
    for start in 0..p.classes.len() as u32 {
        let mut seen = Vec::new();
        let mut cur = Some(ClassId(start));
        while let Some(c) = cur {
            if let Some(pos) = seen.iter().position(|&s| s == c) {
                let cycle: BTreeSet<ClassId> = seen[pos..].iter().copied().collect();
                if reported.insert(cycle.clone()) {
                    let names: Vec<&str> =
                        cycle.iter().map(|&c| p.class(c).name.as_str()).collect();
                    error(
                        out,
                        p.class(c).line,
                        format!("inheritance cycle involving {}", names.join(", ")),
                    );
                }
                break;
            }
            seen.push(c);
            cur = p.class(c).superclass;
        }
    }
}

fn check_duplicate_methods(p: &Program, out: &mut Vec<Diagnostic>) {
    for class in &p.classes {
        for (i, &a) in class.methods.iter().enumerate() {
            for &b in &class.methods[i + 1..] {
                let (da, db) = (p.method(a), p.method(b));
                if da.name == db.name && da.arity == db.arity && da.is_static == db.is_static {
                    error(
                        out,
                        db.line,
                        format!(
                            "duplicate method `{}.{}` with {} parameter(s)",
                            class.name, db.name, db.arity
                        ),
                    );
                }
            }
        }
    }
}

fn check_field_shadowing(p: &Program, out: &mut Vec<Diagnostic>) {
    for class in &p.classes {
        let mut sup = class.superclass;
        let mut steps = 0usize;
        while let Some(s) = sup {
            for &(f, _) in &class.fields {
                if p.class(s).fields.iter().any(|&(sf, _)| sf == f) {
                    error(
                        out,
                        class.line,
                        format!(
                            "field `{}` in class `{}` shadows a field of `{}`",
                            p.field_name(f),
                            class.name,
                            p.class(s).name
                        ),
                    );
                }
            }
            steps += 1;
            if steps > p.classes.len() {
                break; // cycle, reported separately
            }
            sup = p.class(s).superclass;
        }
    }
}

/// Declared type of a variable; `this` has the enclosing class type.
fn declared_type(p: &Program, m: super::MethodId, v: super::VarId) -> ClassId {
    let def = p.method(m);
    match def.vars[v.0 as usize].kind {
        VarKind::This => def.class,
        _ => def.vars[v.0 as usize].ty.expect("non-this variables carry a type"),
    }
}

/// Does the chain starting at `c` declare field `f`?
fn chain_declares_field(p: &Program, c: ClassId, f: super::FieldId) -> bool {
    let mut cur = Some(c);
    let mut steps = 0usize;
    while let Some(cl) = cur {
        if p.class(cl).fields.iter().any(|&(cf, _)| cf == f) {
            return true;
        }
        steps += 1;
        if steps > p.classes.len() {
            return false;
        }
        cur = p.class(cl).superclass;
    }
    false
}

/// Does any class declare a method `name` (any arity/staticness)?
fn name_exists_somewhere(p: &Program, name: &str) -> bool {
    p.methods.iter().any(|m| m.name == name)
}

fn check_bodies(p: &Program, out: &mut Vec<Diagnostic>) {
    for def in &p.methods {
        for stmt in &def.body {
            match &stmt.kind {
                StmtKind::Store { base, field, .. } | StmtKind::Load { base, field, .. } => {
                    let ty = declared_type(p, def.id, *base);
                    if !chain_declares_field(p, ty, *field) {
                        error(
                            out,
                            stmt.line,
                            format!(
                                "field `{}` is not declared on `{}` or its superclasses",
                                p.field_name(*field),
                                p.class(ty).name
                            ),
                        );
                    }
                }
                StmtKind::Invoke(inv) => {
                    let arity = inv.args.len();
                    let (resolved, scope_name) = match &inv.recv {
                        Receiver::Virtual(v) => {
                            let ty = declared_type(p, def.id, *v);
                            (p.dispatch(ty, &inv.method, arity), p.class(ty).name.clone())
                        }
                        Receiver::Static(c) => {
                            (p.resolve_static(*c, &inv.method, arity), p.class(*c).name.clone())
                        }
                    };
                    if resolved.is_none() {
                        if name_exists_somewhere(p, &inv.method) {
                            error(
                                out,
                                stmt.line,
                                format!(
                                    "no method `{}.{}` accepts {} argument(s)",
                                    scope_name, inv.method, arity
                                ),
                            );
                        } else {
                            error(
                                out,
                                stmt.line,
                                format!("call to missing method `{}.{}`", scope_name, inv.method),
                            );
                        }
                    }
                }
                _ => {}
            }
        }
    }
}
