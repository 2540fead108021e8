//! Canonical printer; the output re-parses to an equal program.

use super::{Program, Receiver, StmtKind, VarKind};
use std::fmt::Write;

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for (ci, class) in p.classes.iter().enumerate() {
        if ci > 0 {
            out.push('\n');
        }
        match class.superclass {
            Some(s) => {
                let _ = writeln!(out, "class {} extends {} {{", class.name, p.class(s).name);
            }
            None => {
                let _ = writeln!(out, "class {} {{", class.name);
            }
        }
        let mut first_member = true;
        for &(f, ty) in &class.fields {
            let _ = writeln!(out, "  field {}: {};", p.field_name(f), p.class(ty).name);
            first_member = false;
        }
        for &m in &class.methods {
            if !first_member {
                out.push('\n');
            }
            first_member = false;
            print_method(p, m, &mut out);
        }
        out.push_str("}\n");
    }
    out
}

fn print_method(p: &Program, m: super::MethodId, out: &mut String) {
    let def = p.method(m);
    let mut sig = String::new();
    if !def.is_static {
        sig.push_str("this");
    }
    for v in &def.vars {
        if let VarKind::Param(_) = v.kind {
            if !sig.is_empty() {
                sig.push_str(", ");
            }
            let _ = write!(sig, "{}: {}", v.name, p.class(v.ty.unwrap()).name);
        }
    }
    match def.ret_type {
        Some(t) => {
            let _ = writeln!(out, "  method {}({}): {} {{", def.name, sig, p.class(t).name);
        }
        None => {
            let _ = writeln!(out, "  method {}({}) {{", def.name, sig);
        }
    }
    for v in &def.vars {
        if v.kind == VarKind::Local {
            let _ = writeln!(out, "    local {}: {};", v.name, p.class(v.ty.unwrap()).name);
        }
    }
    for stmt in &def.body {
        out.push_str("    ");
        if let Some(l) = &stmt.label {
            let _ = write!(out, "{l}: ");
        }
        let name = |v| p.var_name(m, v);
        match &stmt.kind {
            StmtKind::New { lhs, ty, site } => {
                let _ = writeln!(
                    out,
                    "{} = new {} @{};",
                    name(*lhs),
                    p.class(*ty).name,
                    p.site(*site).label
                );
            }
            StmtKind::Assign { lhs, rhs } => {
                let _ = writeln!(out, "{} = {};", name(*lhs), name(*rhs));
            }
            StmtKind::AssignNull { lhs } => {
                let _ = writeln!(out, "{} = null;", name(*lhs));
            }
            StmtKind::Cast { lhs, ty, rhs } => {
                let _ = writeln!(out, "{} = ({}) {};", name(*lhs), p.class(*ty).name, name(*rhs));
            }
            StmtKind::Store { base, field, rhs } => {
                let _ = writeln!(out, "{}.{} = {};", name(*base), p.field_name(*field), name(*rhs));
            }
            StmtKind::Load { lhs, base, field } => {
                let _ = writeln!(out, "{} = {}.{};", name(*lhs), name(*base), p.field_name(*field));
            }
            StmtKind::Invoke(inv) => {
                if let Some(l) = inv.lhs {
                    let _ = write!(out, "{} = ", name(l));
                }
                let base = match &inv.recv {
                    Receiver::Virtual(v) => name(*v).to_string(),
                    Receiver::Static(c) => p.class(*c).name.clone(),
                };
                let args: Vec<&str> = inv.args.iter().map(|&a| name(a)).collect();
                let _ = writeln!(out, "{}.{}({});", base, inv.method, args.join(", "));
            }
            StmtKind::Return { var } => {
                let _ = writeln!(out, "return {};", name(*var));
            }
            StmtKind::Branch { target } => {
                let _ = writeln!(out, "if * goto {};", target_label(p, m, *target));
            }
            StmtKind::Goto { target } => {
                let _ = writeln!(out, "goto {};", target_label(p, m, *target));
            }
            StmtKind::Nop => {
                out.push_str(";\n");
            }
        }
    }
    out.push_str("  }\n");
}

fn target_label(p: &Program, m: super::MethodId, target: u32) -> String {
    p.method(m).body[target as usize]
        .label
        .clone()
        .expect("branch target must carry a label")
}
