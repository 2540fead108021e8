//! Lexer and recursive-descent parser for the IR surface syntax.
//!
//! Parsing is two-phase: a raw AST keyed by names, then resolution into the
//! dense-id [`Program`] arenas.  Return statements are normalized during
//! resolution so every method has at most one return variable: the first
//! `return x` fixes the return variable, and any later `return y` with a
//! different variable is rewritten into the synthetic copy `x = y; return x`.

use super::{
    AllocSite, ClassDef, ClassId, InvokeStmt, MethodDef, MethodId, Program, Receiver, Stmt,
    StmtKind, VarDecl, VarId, VarKind,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: u32, col: u32, message: String },
    #[error("line {line}: {message}")]
    Resolve { line: u32, message: String },
}

impl ParseError {
    fn syntax(line: u32, col: u32, message: impl Into<String>) -> Self {
        ParseError::Syntax { line, col, message: message.into() }
    }

    fn resolve(line: u32, message: impl Into<String>) -> Self {
        ParseError::Resolve { line, message: message.into() }
    }
}

/// Parse IR source text into a resolved [`Program`].
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let tokens = lex(src)?;
    let raw = Parser { tokens, pos: 0 }.parse_raw()?;
    resolve(raw)
}

// ---------------------------------------------------------------------------
// Lexing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

const PUNCT: &str = "{}():;,=.@*";

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '/' {
            // Only `//` line comments exist.
            chars.next();
            if chars.peek() == Some(&'/') {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
                line += 1;
                col = 1;
            } else {
                return Err(ParseError::syntax(line, col, "expected `//` comment"));
            }
        } else if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let start_col = col;
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
                    ident.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(ident), line, col: start_col });
        } else if PUNCT.contains(c) {
            out.push(Token { tok: Tok::Punct(c), line, col });
            chars.next();
            col += 1;
        } else {
            return Err(ParseError::syntax(line, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Raw AST
// ---------------------------------------------------------------------------

struct RawProgram {
    classes: Vec<RawClass>,
}

struct RawClass {
    name: String,
    superclass: Option<String>,
    fields: Vec<RawField>,
    methods: Vec<RawMethod>,
    line: u32,
}

struct RawField {
    name: String,
    ty: String,
    line: u32,
}

struct RawMethod {
    name: String,
    has_this: bool,
    params: Vec<(String, String, u32)>,
    ret_ty: Option<String>,
    locals: Vec<(String, String, u32)>,
    body: Vec<RawStmt>,
    line: u32,
}

struct RawStmt {
    label: Option<String>,
    kind: RawKind,
    line: u32,
}

enum RawKind {
    New { lhs: String, ty: String, site: String },
    Assign { lhs: String, rhs: String },
    AssignNull { lhs: String },
    Cast { lhs: String, ty: String, rhs: String },
    Store { base: String, field: String, rhs: String },
    Load { lhs: String, base: String, field: String },
    Invoke { lhs: Option<String>, base: String, method: String, args: Vec<String> },
    Return { var: String },
    Branch { target: String },
    Goto { target: String },
    Nop,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek2(&self) -> Option<&Token> {
        self.tokens.get(self.pos + 1)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (u32, u32) {
        match self.peek() {
            Some(t) => (t.line, t.col),
            None => self
                .tokens
                .last()
                .map(|t| (t.line, t.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::syntax(line, col, message))
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, u32), ParseError> {
        match self.next() {
            Some(Token { tok: Tok::Ident(s), line, .. }) => Ok((s, line)),
            Some(Token { tok, line, col }) => {
                Err(ParseError::syntax(line, col, format!("expected {what}, found `{}`", show(&tok))))
            }
            None => self.err(format!("expected {what}, found end of input")),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<u32, ParseError> {
        let (s, line) = self.expect_ident(&format!("`{kw}`"))?;
        if s == kw {
            Ok(line)
        } else {
            Err(ParseError::resolve(line, format!("expected `{kw}`, found `{s}`")))
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        match self.next() {
            Some(Token { tok: Tok::Punct(p), .. }) if p == c => Ok(()),
            Some(Token { tok, line, col }) => {
                Err(ParseError::syntax(line, col, format!("expected `{c}`, found `{}`", show(&tok))))
            }
            None => self.err(format!("expected `{c}`, found end of input")),
        }
    }

    fn at_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Punct(p), .. }) if *p == c)
    }

    fn at_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(i), .. }) if i == s)
    }

    fn parse_raw(mut self) -> Result<RawProgram, ParseError> {
        let mut classes = Vec::new();
        while self.peek().is_some() {
            classes.push(self.parse_class()?);
        }
        Ok(RawProgram { classes })
    }

    fn parse_class(&mut self) -> Result<RawClass, ParseError> {
        let line = self.expect_keyword("class")?;
        let (name, _) = self.expect_ident("class name")?;
        let superclass = if self.at_ident("extends") {
            self.next();
            Some(self.expect_ident("superclass name")?.0)
        } else {
            None
        };
        self.expect_punct('{')?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        while !self.at_punct('}') {
            if self.at_ident("field") {
                fields.push(self.parse_field()?);
            } else if self.at_ident("method") {
                methods.push(self.parse_method()?);
            } else {
                return self.err("expected `field`, `method` or `}`");
            }
        }
        self.expect_punct('}')?;
        Ok(RawClass { name, superclass, fields, methods, line })
    }

    fn parse_field(&mut self) -> Result<RawField, ParseError> {
        self.expect_keyword("field")?;
        let (name, line) = self.expect_ident("field name")?;
        self.expect_punct(':')?;
        let (ty, _) = self.expect_ident("field type")?;
        self.expect_punct(';')?;
        Ok(RawField { name, ty, line })
    }

    fn parse_method(&mut self) -> Result<RawMethod, ParseError> {
        let line = self.expect_keyword("method")?;
        let (name, _) = self.expect_ident("method name")?;
        self.expect_punct('(')?;
        let mut has_this = false;
        let mut params = Vec::new();
        if !self.at_punct(')') {
            if self.at_ident("this") {
                self.next();
                has_this = true;
            } else {
                params.push(self.parse_param()?);
            }
            while self.at_punct(',') {
                self.next();
                if self.at_ident("this") {
                    return self.err("`this` is only allowed as the first parameter");
                }
                params.push(self.parse_param()?);
            }
        }
        self.expect_punct(')')?;
        let ret_ty = if self.at_punct(':') {
            self.next();
            Some(self.expect_ident("return type")?.0)
        } else {
            None
        };
        self.expect_punct('{')?;
        let mut locals = Vec::new();
        while self.at_ident("local") {
            self.next();
            let (name, line) = self.expect_ident("local name")?;
            self.expect_punct(':')?;
            let (ty, _) = self.expect_ident("local type")?;
            self.expect_punct(';')?;
            locals.push((name, ty, line));
        }
        let mut body = Vec::new();
        while !self.at_punct('}') {
            body.push(self.parse_stmt()?);
        }
        self.expect_punct('}')?;
        Ok(RawMethod { name, has_this, params, ret_ty, locals, body, line })
    }

    fn parse_param(&mut self) -> Result<(String, String, u32), ParseError> {
        let (name, line) = self.expect_ident("parameter name")?;
        self.expect_punct(':')?;
        let (ty, _) = self.expect_ident("parameter type")?;
        Ok((name, ty, line))
    }

    fn parse_stmt(&mut self) -> Result<RawStmt, ParseError> {
        // Optional `L:` label prefix — an identifier followed by `:`.
        let mut label = None;
        if let (Some(Token { tok: Tok::Ident(l), .. }), Some(Token { tok: Tok::Punct(':'), .. })) =
            (self.peek(), self.peek2())
        {
            if l != "local" {
                label = Some(l.clone());
                self.next();
                self.next();
            }
        }
        let (line, _) = self.here();
        if self.at_punct(';') {
            self.next();
            return Ok(RawStmt { label, kind: RawKind::Nop, line });
        }
        if self.at_ident("if") {
            self.next();
            self.expect_punct('*')?;
            self.expect_keyword("goto")?;
            let (target, _) = self.expect_ident("branch target label")?;
            self.expect_punct(';')?;
            return Ok(RawStmt { label, kind: RawKind::Branch { target }, line });
        }
        if self.at_ident("goto") {
            self.next();
            let (target, _) = self.expect_ident("branch target label")?;
            self.expect_punct(';')?;
            return Ok(RawStmt { label, kind: RawKind::Goto { target }, line });
        }
        if self.at_ident("return") {
            self.next();
            let (var, _) = self.expect_ident("return variable")?;
            self.expect_punct(';')?;
            return Ok(RawStmt { label, kind: RawKind::Return { var }, line });
        }

        let (first, _) = self.expect_ident("statement")?;
        if self.at_punct('.') {
            self.next();
            let (member, _) = self.expect_ident("member name")?;
            if self.at_punct('(') {
                // y.m(a);  — invoke without result
                let args = self.parse_args()?;
                self.expect_punct(';')?;
                return Ok(RawStmt {
                    label,
                    kind: RawKind::Invoke { lhs: None, base: first, method: member, args },
                    line,
                });
            }
            // x.f = y;
            self.expect_punct('=')?;
            let (rhs, _) = self.expect_ident("store value")?;
            self.expect_punct(';')?;
            return Ok(RawStmt {
                label,
                kind: RawKind::Store { base: first, field: member, rhs },
                line,
            });
        }

        self.expect_punct('=')?;
        let kind = if self.at_ident("new") {
            self.next();
            let (ty, _) = self.expect_ident("class name")?;
            self.expect_punct('@')?;
            let (site, _) = self.expect_ident("allocation label")?;
            RawKind::New { lhs: first, ty, site }
        } else if self.at_ident("null") {
            self.next();
            RawKind::AssignNull { lhs: first }
        } else if self.at_punct('(') {
            self.next();
            let (ty, _) = self.expect_ident("cast type")?;
            self.expect_punct(')')?;
            let (rhs, _) = self.expect_ident("cast operand")?;
            RawKind::Cast { lhs: first, ty, rhs }
        } else {
            let (base, _) = self.expect_ident("expression")?;
            if self.at_punct('.') {
                self.next();
                let (member, _) = self.expect_ident("member name")?;
                if self.at_punct('(') {
                    let args = self.parse_args()?;
                    RawKind::Invoke { lhs: Some(first), base, method: member, args }
                } else {
                    RawKind::Load { lhs: first, base, field: member }
                }
            } else {
                RawKind::Assign { lhs: first, rhs: base }
            }
        };
        self.expect_punct(';')?;
        Ok(RawStmt { label, kind, line })
    }

    fn parse_args(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect_punct('(')?;
        let mut args = Vec::new();
        if !self.at_punct(')') {
            args.push(self.expect_ident("argument")?.0);
            while self.at_punct(',') {
                self.next();
                args.push(self.expect_ident("argument")?.0);
            }
        }
        self.expect_punct(')')?;
        Ok(args)
    }
}

fn show(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => s.clone(),
        Tok::Punct(c) => c.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

fn resolve(raw: RawProgram) -> Result<Program, ParseError> {
    let mut program = Program::default();

    // 1. Register class names.
    for rc in &raw.classes {
        if program.class_id(&rc.name).is_some() {
            return Err(ParseError::resolve(rc.line, format!("duplicate class `{}`", rc.name)));
        }
        program.register_class(ClassDef {
            name: rc.name.clone(),
            superclass: None,
            fields: Vec::new(),
            methods: Vec::new(),
            line: rc.line,
        });
    }

    // 2. Superclasses and fields.
    for (i, rc) in raw.classes.iter().enumerate() {
        let superclass = match &rc.superclass {
            Some(s) => Some(class_ref(&program, s, rc.line)?),
            None => None,
        };
        let mut fields = Vec::new();
        for rf in &rc.fields {
            let ty = class_ref(&program, &rf.ty, rf.line)?;
            let id = program.intern_field(&rf.name);
            if fields.iter().any(|&(f, _)| f == id) {
                return Err(ParseError::resolve(
                    rf.line,
                    format!("duplicate field `{}` in class `{}`", rf.name, rc.name),
                ));
            }
            fields.push((id, ty));
        }
        program.classes[i].superclass = superclass;
        program.classes[i].fields = fields;
    }

    // 3. Method shells (ids, parameters, locals).
    let mut shells: Vec<(usize, &RawMethod)> = Vec::new();
    for (ci, rc) in raw.classes.iter().enumerate() {
        for rm in &rc.methods {
            let id = MethodId(program.methods.len() as u32);
            let mut vars: Vec<VarDecl> = Vec::new();
            if rm.has_this {
                vars.push(VarDecl { name: "this".into(), ty: None, kind: VarKind::This });
            }
            for (k, (name, ty, line)) in rm.params.iter().enumerate() {
                let ty = class_ref(&program, ty, *line)?;
                push_var(&mut vars, name, Some(ty), VarKind::Param(k as u32 + 1), *line)?;
            }
            for (name, ty, line) in &rm.locals {
                let ty = class_ref(&program, ty, *line)?;
                push_var(&mut vars, name, Some(ty), VarKind::Local, *line)?;
            }
            let ret_type = match &rm.ret_ty {
                Some(t) => Some(class_ref(&program, t, rm.line)?),
                None => None,
            };
            program.methods.push(MethodDef {
                id,
                class: ClassId(ci as u32),
                name: rm.name.clone(),
                is_static: !rm.has_this,
                vars,
                arity: rm.params.len() as u32,
                ret_type,
                ret_var: None,
                body: Vec::new(),
                line: rm.line,
            });
            program.classes[ci].methods.push(id);
            shells.push((program.methods.len() - 1, rm));
        }
    }

    // 4. Bodies: normalize returns, then resolve names and branch targets.
    for (mi, rm) in shells {
        let mid = MethodId(mi as u32);
        let stmts = normalize_returns(&rm.body);
        let (body, ret_var) = resolve_body(&mut program, mid, &stmts)?;
        program.methods[mi].body = body;
        program.methods[mi].ret_var = ret_var;
    }

    Ok(program)
}

fn class_ref(p: &Program, name: &str, line: u32) -> Result<ClassId, ParseError> {
    p.class_id(name)
        .ok_or_else(|| ParseError::resolve(line, format!("unknown class `{name}`")))
}

fn push_var(
    vars: &mut Vec<VarDecl>,
    name: &str,
    ty: Option<ClassId>,
    kind: VarKind,
    line: u32,
) -> Result<(), ParseError> {
    if name == "this" || vars.iter().any(|v| v.name == name) {
        return Err(ParseError::resolve(line, format!("duplicate variable `{name}`")));
    }
    vars.push(VarDecl { name: name.into(), ty, kind });
    Ok(())
}

/// Rewrite `return y` into `x = y; return x` whenever `y` differs from the
/// variable named by the first return statement.
fn normalize_returns(body: &[RawStmt]) -> Vec<RawStmt> {
    let Some(ret_name) = body.iter().find_map(|s| match &s.kind {
        RawKind::Return { var } => Some(var.clone()),
        _ => None,
    }) else {
        return body.iter().map(clone_raw).collect();
    };
    let mut out = Vec::new();
    for stmt in body {
        match &stmt.kind {
            RawKind::Return { var } if *var != ret_name => {
                out.push(RawStmt {
                    label: stmt.label.clone(),
                    kind: RawKind::Assign { lhs: ret_name.clone(), rhs: var.clone() },
                    line: stmt.line,
                });
                out.push(RawStmt {
                    label: None,
                    kind: RawKind::Return { var: ret_name.clone() },
                    line: stmt.line,
                });
            }
            _ => out.push(clone_raw(stmt)),
        }
    }
    out
}

fn clone_raw(s: &RawStmt) -> RawStmt {
    RawStmt {
        label: s.label.clone(),
        kind: match &s.kind {
            RawKind::New { lhs, ty, site } => {
                RawKind::New { lhs: lhs.clone(), ty: ty.clone(), site: site.clone() }
            }
            RawKind::Assign { lhs, rhs } => RawKind::Assign { lhs: lhs.clone(), rhs: rhs.clone() },
            RawKind::AssignNull { lhs } => RawKind::AssignNull { lhs: lhs.clone() },
            RawKind::Cast { lhs, ty, rhs } => {
                RawKind::Cast { lhs: lhs.clone(), ty: ty.clone(), rhs: rhs.clone() }
            }
            RawKind::Store { base, field, rhs } => {
                RawKind::Store { base: base.clone(), field: field.clone(), rhs: rhs.clone() }
            }
            RawKind::Load { lhs, base, field } => {
                RawKind::Load { lhs: lhs.clone(), base: base.clone(), field: field.clone() }
            }
            RawKind::Invoke { lhs, base, method, args } => RawKind::Invoke {
                lhs: lhs.clone(),
                base: base.clone(),
                method: method.clone(),
                args: args.clone(),
            },
            RawKind::Return { var } => RawKind::Return { var: var.clone() },
            RawKind::Branch { target } => RawKind::Branch { target: target.clone() },
            RawKind::Goto { target } => RawKind::Goto { target: target.clone() },
            RawKind::Nop => RawKind::Nop,
        },
        line: s.line,
    }
}

fn resolve_body(
    program: &mut Program,
    mid: MethodId,
    stmts: &[RawStmt],
) -> Result<(Vec<Stmt>, Option<VarId>), ParseError> {
    // Branch target labels, then statements.
    let mut labels: BTreeMap<&str, u32> = BTreeMap::new();
    for (i, s) in stmts.iter().enumerate() {
        if let Some(l) = &s.label {
            if labels.insert(l, i as u32).is_some() {
                return Err(ParseError::resolve(s.line, format!("duplicate label `{l}`")));
            }
        }
    }

    let var = |program: &Program, name: &str, line: u32| -> Result<VarId, ParseError> {
        program
            .var_id(mid, name)
            .ok_or_else(|| ParseError::resolve(line, format!("unknown variable `{name}`")))
    };
    let target = |labels: &BTreeMap<&str, u32>, name: &str, line: u32| -> Result<u32, ParseError> {
        labels
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::resolve(line, format!("unknown label `{name}`")))
    };

    let mut body = Vec::new();
    let mut ret_var = None;
    for (i, s) in stmts.iter().enumerate() {
        let kind = match &s.kind {
            RawKind::Nop => StmtKind::Nop,
            RawKind::New { lhs, ty, site } => {
                let lhs = var(program, lhs, s.line)?;
                let ty = class_ref(program, ty, s.line)?;
                let site = program
                    .register_site(AllocSite {
                        label: site.clone(),
                        ty,
                        method: mid,
                        stmt: i as u32,
                    })
                    .ok_or_else(|| {
                        ParseError::resolve(s.line, format!("duplicate allocation label `{site}`"))
                    })?;
                StmtKind::New { lhs, ty, site }
            }
            RawKind::Assign { lhs, rhs } => StmtKind::Assign {
                lhs: var(program, lhs, s.line)?,
                rhs: var(program, rhs, s.line)?,
            },
            RawKind::AssignNull { lhs } => StmtKind::AssignNull { lhs: var(program, lhs, s.line)? },
            RawKind::Cast { lhs, ty, rhs } => StmtKind::Cast {
                lhs: var(program, lhs, s.line)?,
                ty: class_ref(program, ty, s.line)?,
                rhs: var(program, rhs, s.line)?,
            },
            RawKind::Store { base, field, rhs } => StmtKind::Store {
                base: var(program, base, s.line)?,
                field: program.intern_field(field),
                rhs: var(program, rhs, s.line)?,
            },
            RawKind::Load { lhs, base, field } => StmtKind::Load {
                lhs: var(program, lhs, s.line)?,
                base: var(program, base, s.line)?,
                field: program.intern_field(field),
            },
            RawKind::Invoke { lhs, base, method, args } => {
                let lhs = match lhs {
                    Some(l) => Some(var(program, l, s.line)?),
                    None => None,
                };
                // A variable shadows a class of the same name.
                let recv = match program.var_id(mid, base) {
                    Some(v) => Receiver::Virtual(v),
                    None => match program.class_id(base) {
                        Some(c) => Receiver::Static(c),
                        None => {
                            return Err(ParseError::resolve(
                                s.line,
                                format!("unknown variable or class `{base}`"),
                            ))
                        }
                    },
                };
                let args = args
                    .iter()
                    .map(|a| var(program, a, s.line))
                    .collect::<Result<Vec<_>, _>>()?;
                StmtKind::Invoke(InvokeStmt { lhs, recv, method: method.clone(), args })
            }
            RawKind::Return { var: v } => {
                let v = var(program, v, s.line)?;
                // normalize_returns guarantees a single return variable.
                ret_var = Some(v);
                StmtKind::Return { var: v }
            }
            RawKind::Branch { target: t } => StmtKind::Branch { target: target(&labels, t, s.line)? },
            RawKind::Goto { target: t } => StmtKind::Goto { target: target(&labels, t, s.line)? },
        };
        body.push(Stmt { kind, label: s.label.clone(), line: s.line });
    }
    Ok((body, ret_var))
}
