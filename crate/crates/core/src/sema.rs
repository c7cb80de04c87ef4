//! Name resolution, definition tracking, type checking and directive state.
//!
//! Names live in a stack of scopes. The parameters, the return variable and
//! the top-level body share the function scope (they share one block in the
//! generated C++); every `if` arm and `for` body pushes a fresh scope.

use std::collections::HashMap;

use crate::ast::*;
use crate::diag::{sort_diagnostics, DiagCode, Diagnostic};
use crate::typed::*;

pub const BUILTINS: [&str; 4] = ["rows", "columns", "error", "createArray"];

pub fn is_builtin(name: &str) -> bool {
    BUILTINS.contains(&name)
}

/// Every directive occurrence in source order, prologue first.
pub fn directive_lines(p: &Program) -> Vec<(String, Span)> {
    fn walk(stmts: &[Stmt], out: &mut Vec<(String, Span)>) {
        for s in stmts {
            match &s.kind {
                StmtKind::Directive(name) => out.push((name.clone(), s.span)),
                StmtKind::If { then_body, else_body, .. } => {
                    walk(then_body, out);
                    if let Some(e) = else_body {
                        walk(e, out);
                    }
                }
                StmtKind::For { body, .. } => walk(body, out),
                _ => {}
            }
        }
    }
    let mut out = p.directives_prologue.clone();
    walk(&p.function.body, &mut out);
    out
}

/// The directive flags in force at `line`: every directive on an earlier line
/// switches its flag on. Unknown names are ignored here.
pub fn directive_state_at(p: &Program, line: u32) -> DirectiveState {
    state_from(&directive_lines(p), line)
}

fn state_from(directives: &[(String, Span)], line: u32) -> DirectiveState {
    let mut state = DirectiveState::default();
    for (name, span) in directives {
        if span.line < line {
            state.enable(name);
        }
    }
    state
}

/// Analyzes a parsed program. On success the returned program carries any
/// warnings; on failure every diagnostic (errors and warnings) is returned,
/// ordered by position.
pub fn analyze(p: &Program) -> Result<TypedProgram, Vec<Diagnostic>> {
    let directives = directive_lines(p);
    let mut cx = Analyzer {
        directives: &directives,
        scopes: vec![HashMap::new()],
        symbols: Vec::new(),
        diags: Vec::new(),
        state: DirectiveState::default(),
        line: p.function.span.line,
    };

    for (name, span) in &directives {
        if !DirectiveState::KNOWN.contains(&name.as_str()) {
            cx.error(
                DiagCode::UnknownDirective,
                *span,
                format!(
                    "unknown directive '{name}' (expected one of {})",
                    DirectiveState::KNOWN.join(", ")
                ),
            );
        }
    }

    let f = &p.function;
    let header_line = f.span.line;
    let header_state = state_from(&directives, header_line);
    cx.state = header_state;

    let mut params = Vec::new();
    for param in &f.params {
        if let Some(id) = cx.declare(&param.name, param.ty, SymbolKind::Parameter, param.span) {
            cx.symbols[id].def_line = Some(header_line);
            params.push(id);
        }
    }
    let return_var = cx
        .declare(&f.return_var, f.return_type, SymbolKind::ReturnVar, f.span)
        .unwrap_or_else(|| {
            // Keep going with a detached entry so later uses still resolve.
            cx.symbols.push(SymbolEntry {
                name: f.return_var.clone(),
                ty: f.return_type,
                decl_line: header_line,
                def_line: None,
                kind: SymbolKind::ReturnVar,
                uninit: header_state.no_init_vars,
            });
            cx.symbols.len() - 1
        });

    let body = cx.block(&f.body, false);

    let mut diags = cx.diags;
    sort_diagnostics(&mut diags);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    Ok(TypedProgram {
        name: f.name.clone(),
        params,
        return_var,
        body,
        symbols: cx.symbols,
        header_state,
        header_line,
        warnings: diags,
    })
}

struct Analyzer<'a> {
    directives: &'a [(String, Span)],
    scopes: Vec<HashMap<String, VarId>>,
    symbols: Vec<SymbolEntry>,
    diags: Vec<Diagnostic>,
    /// Directive state of the statement being analyzed.
    state: DirectiveState,
    line: u32,
}

/// Marker for an expression that failed to type; the diagnostic is already
/// recorded.
struct Poisoned;

type TR<T> = Result<T, Poisoned>;

impl<'a> Analyzer<'a> {
    fn error(&mut self, code: DiagCode, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span.line, span.col, msg));
    }

    fn warn(&mut self, code: DiagCode, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::warning(code, span.line, span.col, msg));
    }

    fn fail<T>(&mut self, code: DiagCode, span: Span, msg: impl Into<String>) -> TR<T> {
        self.error(code, span, msg);
        Err(Poisoned)
    }

    fn lookup(&self, name: &str) -> Option<VarId> {
        self.scopes.iter().rev().find_map(|s| s.get(name).copied())
    }

    fn declare(&mut self, name: &str, ty: TymType, kind: SymbolKind, span: Span) -> Option<VarId> {
        if is_builtin(name) {
            self.error(DiagCode::ShadowsBuiltin, span, format!("`{name}` is a builtin and cannot be redeclared"));
            return None;
        }
        if let Some(&prev) = self.scopes.last().unwrap().get(name) {
            let prev_line = self.symbols[prev].decl_line;
            self.error(
                DiagCode::Redeclaration,
                span,
                format!("`{name}` is already declared in this scope (line {prev_line})"),
            );
            return None;
        }
        self.symbols.push(SymbolEntry {
            name: name.to_string(),
            ty,
            decl_line: span.line,
            def_line: None,
            kind,
            uninit: self.state.no_init_vars,
        });
        let id = self.symbols.len() - 1;
        self.scopes.last_mut().unwrap().insert(name.to_string(), id);
        Some(id)
    }

    fn define(&mut self, id: VarId) {
        let sym = &mut self.symbols[id];
        if sym.def_line.is_none() {
            sym.def_line = Some(self.line);
        }
    }

    /// Resolves a variable read, reporting undeclared or undefined uses.
    fn use_var(&mut self, name: &str, span: Span) -> TR<VarId> {
        let Some(id) = self.lookup(name) else {
            let msg = if is_builtin(name) {
                format!("builtin `{name}` must be called with arguments")
            } else {
                format!("`{name}` is used before it is declared")
            };
            return self.fail(DiagCode::UseBeforeDecl, span, msg);
        };
        if self.symbols[id].def_line.is_none() {
            let msg = format!("`{name}` is used before it is defined");
            if self.state.no_init_vars {
                self.error(DiagCode::UseBeforeDef, span, msg);
            } else {
                self.warn(DiagCode::UseBeforeDef, span, format!("{msg}; it reads as zero"));
            }
        }
        Ok(id)
    }

    fn block(&mut self, stmts: &[Stmt], push: bool) -> Vec<TStmt> {
        if push {
            self.scopes.push(HashMap::new());
        }
        let out = stmts.iter().filter_map(|s| self.stmt(s)).collect();
        if push {
            self.scopes.pop();
        }
        out
    }

    fn stmt(&mut self, s: &Stmt) -> Option<TStmt> {
        self.line = s.span.line;
        self.state = state_from(self.directives, s.span.line);
        let state = self.state;
        let kind = self.stmt_kind(s).ok()?;
        Some(TStmt { kind, line: s.span.line, state })
    }

    fn stmt_kind(&mut self, s: &Stmt) -> TR<TStmtKind> {
        let span = s.span;
        match &s.kind {
            StmtKind::Directive(name) => Ok(TStmtKind::Directive(name.clone())),
            StmtKind::VarDecl { ty, name, init } => {
                let init = match init {
                    Some(e) => {
                        let v = self.expr(e)?;
                        self.check_store(*ty, &v, e.span)?;
                        Some(v)
                    }
                    None => None,
                };
                let var = self.declare(name, *ty, SymbolKind::Local, span).ok_or(Poisoned)?;
                if init.is_some() {
                    self.define(var);
                }
                Ok(TStmtKind::Decl { var, init })
            }
            StmtKind::Assign { name, value } => {
                let v = self.expr(value)?;
                let var = self.lookup_for_store(name, span)?;
                self.check_store(self.symbols[var].ty, &v, value.span)?;
                self.define(var);
                Ok(TStmtKind::Assign { var, value: v })
            }
            StmtKind::IndexedAssign { name, args, value } => {
                let v = self.expr(value)?;
                let array = self.use_var(name, span)?;
                let ty = self.symbols[array].ty;
                if !ty.is_array() {
                    return self.fail(DiagCode::NotIndexable, span, format!("`{name}` has scalar type {ty}"));
                }
                self.check_index_count(name, args.len(), span)?;
                if args.iter().all(|a| matches!(a, IndexArg::Scalar(_))) {
                    let indices = self.scalar_indices(args)?;
                    self.check_store(ty.element(), &v, value.span)?;
                    Ok(TStmtKind::ElemStore { array, indices, value: v })
                } else {
                    let sels = self.selectors(args)?;
                    if v.ty.is_array() {
                        if v.ty != ty {
                            return self.fail(
                                DiagCode::TypeMismatch,
                                value.span,
                                format!("cannot assign {} into a slice of {ty} `{name}`", v.ty),
                            );
                        }
                    } else {
                        self.check_store(ty.element(), &v, value.span)?;
                    }
                    Ok(TStmtKind::SliceAssign { array, sels, value: v })
                }
            }
            StmtKind::If { cond, then_body, else_body } => {
                let c = self.expr(cond)?;
                self.require_scalar(&c, cond.span, "if condition")?;
                let then_body = self.block(then_body, true);
                let else_body = else_body.as_ref().map(|b| self.block(b, true));
                Ok(TStmtKind::If { cond: c, then_body, else_body })
            }
            StmtKind::For { var, range, body } => {
                let start = self.int_expr(&range.start, "loop bound")?;
                let step = match &range.step {
                    Some(e) => Some(self.int_expr(e, "loop step")?),
                    None => None,
                };
                let stop = self.int_expr(&range.stop, "loop bound")?;
                let id = self.lookup_for_store(var, span)?;
                if self.symbols[id].ty != TymType::Int {
                    return self.fail(
                        DiagCode::TypeMismatch,
                        span,
                        format!("loop variable `{var}` must be int, found {}", self.symbols[id].ty),
                    );
                }
                let const_step = step.as_ref().map_or(Some(1), TExpr::const_int);
                if const_step == Some(0) {
                    return self.fail(DiagCode::InvalidRange, span, "loop step is zero");
                }
                let descending = matches!(const_step, Some(s) if s < 0);
                self.define(id);
                let body = self.block(body, true);
                Ok(TStmtKind::For { var: id, start, step, stop, descending, body })
            }
            StmtKind::ExprStmt(e) => self.call_stmt(e),
        }
    }

    fn lookup_for_store(&mut self, name: &str, span: Span) -> TR<VarId> {
        match self.lookup(name) {
            Some(id) => Ok(id),
            None => self.fail(
                DiagCode::UseBeforeDecl,
                span,
                format!("`{name}` is assigned before it is declared"),
            ),
        }
    }

    fn call_stmt(&mut self, e: &Expr) -> TR<TStmtKind> {
        let ExprKind::Apply(name, args) = &e.kind else {
            return self.fail(DiagCode::NotAStatement, e.span, "expression statement has no effect");
        };
        match name.as_str() {
            "error" => match args.as_slice() {
                [IndexArg::Scalar(Expr { kind: ExprKind::StringLit(msg), .. })] => {
                    Ok(TStmtKind::Error { message: msg.clone() })
                }
                [_] => self.fail(DiagCode::TypeMismatch, e.span, "error expects a string literal"),
                _ => self.fail(
                    DiagCode::ArityMismatch,
                    e.span,
                    format!("error expects 1 argument, found {}", args.len()),
                ),
            },
            "createArray" => {
                if !(2..=3).contains(&args.len()) {
                    return self.fail(
                        DiagCode::ArityMismatch,
                        e.span,
                        format!("createArray expects an array and 1 or 2 dimensions, found {} arguments", args.len()),
                    );
                }
                let IndexArg::Scalar(Expr { kind: ExprKind::Var(target), span: tspan }) = &args[0] else {
                    return self.fail(
                        DiagCode::TypeMismatch,
                        e.span,
                        "createArray expects an array variable as its first argument",
                    );
                };
                let var = self.lookup_for_store(target, *tspan)?;
                let ty = self.symbols[var].ty;
                if !ty.is_array() {
                    return self.fail(
                        DiagCode::TypeMismatch,
                        *tspan,
                        format!("createArray target `{target}` must be an array, found {ty}"),
                    );
                }
                let mut dims = Vec::new();
                for arg in &args[1..] {
                    match arg {
                        IndexArg::Scalar(d) => dims.push(self.int_expr(d, "array dimension")?),
                        _ => return self.fail(DiagCode::TypeMismatch, e.span, "array dimensions must be int expressions"),
                    }
                }
                self.define(var);
                Ok(TStmtKind::CreateArray { var, dims })
            }
            "rows" | "columns" => self.fail(
                DiagCode::NotAStatement,
                e.span,
                format!("the result of `{name}` is unused"),
            ),
            _ => {
                self.expr(e)?;
                self.fail(DiagCode::NotAStatement, e.span, "indexing expression has no effect")
            }
        }
    }

    fn check_index_count(&mut self, name: &str, n: usize, span: Span) -> TR<()> {
        if n == 0 || n > 2 {
            return self.fail(
                DiagCode::ArityMismatch,
                span,
                format!("`{name}` takes 1 or 2 indices, found {n}"),
            );
        }
        Ok(())
    }

    /// Checks that a value of `v.ty` may be stored into a slot of type `target`.
    fn check_store(&mut self, target: TymType, v: &TExpr, span: Span) -> TR<()> {
        use TymType::*;
        match (target, v.ty) {
            (a, b) if a == b => Ok(()),
            (Int, Real | Float) => {
                self.warn(
                    DiagCode::TruncatingConversion,
                    span,
                    format!("{} value stored as int is truncated toward zero and saturated", v.ty),
                );
                Ok(())
            }
            (Real | Float, Int | Real | Float) => Ok(()),
            _ => self.fail(DiagCode::TypeMismatch, span, format!("cannot store {} into {target}", v.ty)),
        }
    }

    fn require_scalar(&mut self, v: &TExpr, span: Span, what: &str) -> TR<()> {
        if v.ty.is_array() {
            return self.fail(DiagCode::TypeMismatch, span, format!("{what} must be a scalar, found {}", v.ty));
        }
        Ok(())
    }

    fn int_expr(&mut self, e: &Expr, what: &str) -> TR<TExpr> {
        let v = self.expr(e)?;
        if v.ty != TymType::Int {
            return self.fail(DiagCode::TypeMismatch, e.span, format!("{what} must be int, found {}", v.ty));
        }
        Ok(v)
    }

    fn scalar_indices(&mut self, args: &[IndexArg]) -> TR<Vec<TExpr>> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            let IndexArg::Scalar(e) = a else { unreachable!("caller checked for scalar indices") };
            out.push(self.int_expr(e, "index")?);
        }
        Ok(out)
    }

    fn selectors(&mut self, args: &[IndexArg]) -> TR<Vec<TSel>> {
        let mut out = Vec::new();
        for a in args {
            out.push(match a {
                IndexArg::Colon => TSel::Colon,
                IndexArg::Scalar(e) => TSel::Scalar(self.int_expr(e, "index")?),
                IndexArg::Slice(r) => {
                    let start = self.int_expr(&r.start, "slice bound")?;
                    let step = match &r.step {
                        Some(s) => {
                            let st = self.int_expr(s, "slice step")?;
                            if matches!(st.const_int(), Some(v) if v <= 0) {
                                return self.fail(DiagCode::InvalidRange, s.span, "slice step must be positive");
                            }
                            Some(st)
                        }
                        None => None,
                    };
                    let stop = self.int_expr(&r.stop, "slice bound")?;
                    TSel::Range { start, step, stop }
                }
            });
        }
        Ok(out)
    }

    fn expr(&mut self, e: &Expr) -> TR<TExpr> {
        match &e.kind {
            ExprKind::IntLit(v) => Ok(TExpr { ty: TymType::Int, kind: TExprKind::Int(*v) }),
            ExprKind::RealLit(v) => Ok(TExpr { ty: TymType::Real, kind: TExprKind::Real(*v) }),
            ExprKind::StringLit(_) => {
                self.fail(DiagCode::TypeMismatch, e.span, "string literals are only allowed as the argument of error")
            }
            ExprKind::Var(name) => {
                let id = self.use_var(name, e.span)?;
                Ok(TExpr { ty: self.symbols[id].ty, kind: TExprKind::Var(id) })
            }
            ExprKind::Neg(inner) => {
                let v = self.expr(inner)?;
                Ok(TExpr { ty: v.ty, kind: TExprKind::Neg(Box::new(v)) })
            }
            ExprKind::Binary(op, l, r) => {
                let lv = self.expr(l);
                let rv = self.expr(r);
                let (lv, rv) = (lv?, rv?);
                let ty = self.binary_type(*op, lv.ty, rv.ty, e.span)?;
                Ok(TExpr { ty, kind: TExprKind::Binary(*op, Box::new(lv), Box::new(rv)) })
            }
            ExprKind::Apply(name, args) => self.apply(name, args, e.span),
        }
    }

    fn binary_type(&mut self, op: BinOp, l: TymType, r: TymType, span: Span) -> TR<TymType> {
        use TymType::*;
        if !op.is_arithmetic() {
            if l.is_array() || r.is_array() {
                return self.fail(
                    DiagCode::TypeMismatch,
                    span,
                    format!("`{}` needs scalar operands, found {l} and {r}", op.symbol()),
                );
            }
            return Ok(Int);
        }
        let scalar = |a: TymType, b: TymType| match (a, b) {
            (Int, Int) => Int,
            (Real, _) | (_, Real) => Real,
            _ => Float,
        };
        match (l.is_array(), r.is_array()) {
            (false, false) => Ok(scalar(l, r)),
            (true, true) => {
                if !matches!(op, BinOp::Add | BinOp::Sub) {
                    return self.fail(
                        DiagCode::TypeMismatch,
                        span,
                        format!("`{}` between two arrays is not supported; only elementwise + and -", op.symbol()),
                    );
                }
                if l != r {
                    return self.fail(DiagCode::TypeMismatch, span, format!("cannot combine {l} and {r}"));
                }
                Ok(l)
            }
            (la, _) => {
                if op == BinOp::Div && !la {
                    return self.fail(DiagCode::TypeMismatch, span, "cannot divide a scalar by an array");
                }
                let (arr, sc) = if la { (l, r) } else { (r, l) };
                match scalar(arr.element(), sc) {
                    Int => Ok(IntArray),
                    Real => Ok(RealArray),
                    _ => self.fail(
                        DiagCode::TypeMismatch,
                        span,
                        format!("float cannot be combined with {arr}; there are no float arrays"),
                    ),
                }
            }
        }
    }

    fn apply(&mut self, name: &str, args: &[IndexArg], span: Span) -> TR<TExpr> {
        if is_builtin(name) {
            return match name {
                "rows" | "columns" => {
                    let [IndexArg::Scalar(arg)] = args else {
                        return self.fail(
                            DiagCode::ArityMismatch,
                            span,
                            format!("{name} expects 1 argument, found {}", args.len()),
                        );
                    };
                    let v = self.expr(arg)?;
                    if !v.ty.is_array() {
                        return self.fail(DiagCode::TypeMismatch, arg.span, format!("{name} expects an array, found {}", v.ty));
                    }
                    let kind = if name == "rows" {
                        TExprKind::Rows(Box::new(v))
                    } else {
                        TExprKind::Columns(Box::new(v))
                    };
                    Ok(TExpr { ty: TymType::Int, kind })
                }
                _ => self.fail(DiagCode::TypeMismatch, span, format!("`{name}` does not produce a value")),
            };
        }
        let array = self.use_var(name, span)?;
        let ty = self.symbols[array].ty;
        if !ty.is_array() {
            return self.fail(
                DiagCode::NotIndexable,
                span,
                format!("`{name}` has scalar type {ty} and is not a function"),
            );
        }
        self.check_index_count(name, args.len(), span)?;
        if args.iter().all(|a| matches!(a, IndexArg::Scalar(_))) {
            let indices = self.scalar_indices(args)?;
            Ok(TExpr { ty: ty.element(), kind: TExprKind::ElemLoad { array, indices } })
        } else {
            let sels = self.selectors(args)?;
            Ok(TExpr { ty, kind: TExprKind::Slice { array, sels } })
        }
    }
}
