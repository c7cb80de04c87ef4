//! C++ generation from a [`TypedProgram`].
//!
//! One lowering core serves two targets. `octave` spells everything with the
//! Octave library API (`DEFUN_DLD`, `int32NDArray`, `idx_vector`) and is
//! checked as text. `standalone` spells the same constructs against the
//! bundled `tym_runtime.hpp` and adds a `main` so the result can be built
//! and executed.

use std::fmt::Write as _;

use crate::ast::{BinOp, TymType};
use crate::typed::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmitTarget {
    Octave,
    Standalone,
}

impl EmitTarget {
    pub fn name(self) -> &'static str {
        match self {
            EmitTarget::Octave => "octave",
            EmitTarget::Standalone => "standalone",
        }
    }
}

/// How the octave target lowers `error('...')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorStyle {
    /// `error("msg"); return retval;`
    #[default]
    Call,
    /// `std::cout<<"error"<<"msg"<<"\n";return retval;`
    Stream,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmitOptions {
    pub target: EmitTarget,
    pub octave_error: ErrorStyle,
}

impl EmitOptions {
    pub fn new(target: EmitTarget) -> Self {
        EmitOptions { target, octave_error: ErrorStyle::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoweredModule {
    pub source_text: String,
    pub function_name: String,
    pub target: EmitTarget,
}

/// How an element access is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    /// Left-hand side of an assignment.
    Store,
    /// Plain read.
    Load,
    /// Read feeding integer arithmetic or an integer comparison; intArray
    /// elements are unwrapped with `.value()`.
    Operand,
}

/// Lowers `tp` for `target` with default options.
pub fn emit_module(tp: &TypedProgram, target: EmitTarget) -> LoweredModule {
    emit_module_with(tp, &EmitOptions::new(target))
}

pub fn emit_module_with(tp: &TypedProgram, opts: &EmitOptions) -> LoweredModule {
    let lw = Lowerer::new(tp, *opts);
    LoweredModule {
        source_text: lw.module(),
        function_name: tp.name.clone(),
        target: opts.target,
    }
}

/// Collapses whitespace for golden comparisons: runs of whitespace between
/// two word characters become one space, all other whitespace disappears.
pub fn normalize_whitespace(text: &str) -> String {
    let word = |c: char| c.is_alphanumeric() || c == '_';
    let mut out = String::with_capacity(text.len());
    let mut pending = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending = true;
            continue;
        }
        if pending && out.chars().last().is_some_and(word) && word(c) {
            out.push(' ');
        }
        pending = false;
        out.push(c);
    }
    out
}

const CXX_RESERVED: &[&str] = &[
    "alignas", "alignof", "and", "and_eq", "asm", "auto", "bitand", "bitor", "bool", "break", "case",
    "catch", "char", "class", "compl", "const", "constexpr", "const_cast", "continue", "decltype",
    "default", "delete", "do", "double", "dynamic_cast", "else", "enum", "explicit", "export", "extern",
    "false", "float", "for", "friend", "goto", "if", "inline", "int", "long", "mutable", "namespace",
    "new", "noexcept", "not", "not_eq", "nullptr", "operator", "or", "or_eq", "private", "protected",
    "public", "register", "reinterpret_cast", "return", "short", "signed", "sizeof", "static",
    "static_assert", "static_cast", "struct", "switch", "template", "this", "throw", "true", "try",
    "typedef", "typeid", "typename", "union", "unsigned", "using", "virtual", "void", "volatile",
    "wchar_t", "while", "xor", "xor_eq", "main", "std", "tym", "retval", "args", "nargout", "error",
    "dim_vector", "idx_vector", "octave_value_list", "NDArray", "int32NDArray", "int64_t", "errno",
    "assert", "NULL", "EOF",
];

/// C++ spelling of a tym identifier. Names that clash with C++ or with the
/// generated scaffolding get a `_tym` suffix, as do names already ending in
/// it, which keeps the mapping injective.
pub fn cxx_name(name: &str) -> String {
    if CXX_RESERVED.contains(&name) || name.ends_with("_tym") || name.starts_with("__") {
        format!("{name}_tym")
    } else {
        name.to_string()
    }
}

fn c_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\{:03o}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Shortest round-tripping C++ double literal.
fn real_literal(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains(['.', 'e', 'E']) {
        s
    } else {
        format!("{s}.0")
    }
}

/// C++ binding strength; larger binds tighter.
fn cxx_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Ne => 3,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
        BinOp::Add | BinOp::Sub => 5,
        BinOp::Mul | BinOp::Div => 6,
    }
}

const PREC_UNARY: u8 = 7;
const PREC_ATOM: u8 = 8;

fn cxx_op(op: BinOp) -> &'static str {
    match op {
        BinOp::Ne => "!=",
        other => other.symbol(),
    }
}

fn expr_prec(e: &TExpr) -> u8 {
    match &e.kind {
        TExprKind::Binary(op, ..) => cxx_prec(*op),
        TExprKind::Neg(_) => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

/// Lowering context for one program and target.
pub struct Lowerer<'a> {
    tp: &'a TypedProgram,
    opts: EmitOptions,
}

impl<'a> Lowerer<'a> {
    pub fn new(tp: &'a TypedProgram, opts: EmitOptions) -> Self {
        Lowerer { tp, opts }
    }

    fn octave(&self) -> bool {
        self.opts.target == EmitTarget::Octave
    }

    fn ns(&self) -> &'static str {
        if self.octave() {
            ""
        } else {
            "tym::"
        }
    }

    pub fn cxx_type(&self, ty: TymType) -> &'static str {
        match (self.opts.target, ty) {
            (_, TymType::Real) => "double",
            (_, TymType::Float) => "float",
            (EmitTarget::Octave, TymType::Int) => "int",
            (EmitTarget::Octave, TymType::IntArray) => "int32NDArray",
            (EmitTarget::Octave, TymType::RealArray) => "NDArray",
            (EmitTarget::Standalone, TymType::Int) => "tym::Int",
            (EmitTarget::Standalone, TymType::IntArray) => "tym::IntArray",
            (EmitTarget::Standalone, TymType::RealArray) => "tym::RealArray",
        }
    }

    fn var(&self, id: VarId) -> String {
        cxx_name(&self.tp.symbol(id).name)
    }

    // ---- expressions ----

    /// Lowers `e` under the directive state of its statement.
    pub fn expr_at(&self, e: &TExpr, state: DirectiveState) -> String {
        self.lower(e, state, Access::Load)
    }

    fn lower(&self, e: &TExpr, state: DirectiveState, access: Access) -> String {
        match &e.kind {
            TExprKind::Int(v) => v.to_string(),
            TExprKind::Real(v) => real_literal(*v),
            TExprKind::Var(id) => self.var(*id),
            TExprKind::ElemLoad { array, indices } => {
                let access = if access == Access::Operand { Access::Operand } else { Access::Load };
                self.element_access(*array, indices, state, access)
            }
            TExprKind::Slice { array, sels } => self.slice_expr(*array, sels, state),
            TExprKind::Rows(inner) => format!("{}.rows()", self.postfix_operand(inner, state)),
            TExprKind::Columns(inner) => format!("{}.columns()", self.postfix_operand(inner, state)),
            TExprKind::Neg(inner) => {
                let a = if e.ty == TymType::Int { Access::Operand } else { Access::Load };
                let text = self.lower(inner, state, a);
                if matches!(inner.kind, TExprKind::Binary(..) | TExprKind::Neg(_)) {
                    format!("-({text})")
                } else {
                    format!("-{text}")
                }
            }
            TExprKind::Binary(op, l, r) => self.binary(*op, l, r, e.ty, state),
        }
    }

    fn postfix_operand(&self, e: &TExpr, state: DirectiveState) -> String {
        let text = self.lower(e, state, Access::Load);
        if expr_prec(e) < PREC_ATOM {
            format!("({text})")
        } else {
            text
        }
    }

    fn binary(&self, op: BinOp, l: &TExpr, r: &TExpr, ty: TymType, state: DirectiveState) -> String {
        let int_operands = (op.is_arithmetic() && ty == TymType::Int)
            || (op.is_comparison() && l.ty == TymType::Int && r.ty == TymType::Int);
        let access = if int_operands { Access::Operand } else { Access::Load };

        if !self.octave() && op == BinOp::Div && ty == TymType::Int {
            return format!("tym::idiv({}, {})", self.lower(l, state, access), self.lower(r, state, access));
        }

        let p = cxx_prec(op);
        let side = |e: &TExpr, right: bool| {
            let text = self.lower(e, state, access);
            let cp = expr_prec(e);
            let nested_cmp = op.is_comparison()
                && matches!(&e.kind, TExprKind::Binary(inner, ..) if inner.is_comparison());
            let text = if cp < p || (right && cp == p) || nested_cmp { format!("({text})") } else { text };
            // The runtime overloads array arithmetic for exact scalar types;
            // pin the scalar side so overload resolution is unambiguous.
            if !self.octave() && ty.is_array() && e.ty.is_scalar() {
                let cast = if ty == TymType::IntArray { "int64_t" } else { "double" };
                format!("{cast}({})", self.lower(e, state, access))
            } else {
                text
            }
        };
        format!("{} {} {}", side(l, false), cxx_op(op), side(r, true))
    }

    fn index_text(&self, e: &TExpr, state: DirectiveState) -> String {
        let text = self.lower(e, state, Access::Load);
        if state.zero_based_arrays {
            text
        } else {
            format!("({text}) - 1")
        }
    }

    /// `name.xelem(...)` or `name.checkelem(...)` with one-based indices
    /// shifted down.
    pub fn element_access(&self, array: VarId, indices: &[TExpr], state: DirectiveState, access: Access) -> String {
        let method = if state.no_check_ranges { "xelem" } else { "checkelem" };
        let idx: Vec<String> = indices.iter().map(|e| self.index_text(e, state)).collect();
        let mut out = format!("{}.{method}({})", self.var(array), idx.join(", "));
        if access == Access::Operand && self.tp.symbol(array).ty == TymType::IntArray {
            out.push_str(".value()");
        }
        out
    }

    fn bound(&self, e: &TExpr, state: DirectiveState) -> String {
        let text = self.lower(e, state, Access::Load);
        if e.is_atomic() {
            text
        } else {
            format!("({text})")
        }
    }

    /// One `idx_vector` per selector. Ranges become half-open intervals.
    pub fn selector(&self, sel: &TSel, state: DirectiveState) -> String {
        let iv = format!("{}idx_vector", self.ns());
        match sel {
            TSel::Colon => format!("{iv}::colon"),
            TSel::Scalar(e) => {
                let b = self.bound(e, state);
                if state.zero_based_arrays {
                    format!("{iv}({b})")
                } else {
                    format!("{iv}({b}-1)")
                }
            }
            TSel::Range { start, step, stop } => {
                let a = self.bound(start, state);
                let b = self.bound(stop, state);
                let s = step.as_ref().map_or_else(|| "1".to_string(), |s| self.bound(s, state));
                if state.zero_based_arrays {
                    format!("{iv}({a}, {b}+1, {s})")
                } else {
                    format!("{iv}({a}-1, {b}-1+1, {s})")
                }
            }
        }
    }

    fn selectors(&self, sels: &[TSel], state: DirectiveState) -> String {
        sels.iter().map(|s| self.selector(s, state)).collect::<Vec<_>>().join(", ")
    }

    /// `((T)name.index(sel, ...))`.
    pub fn slice_expr(&self, array: VarId, sels: &[TSel], state: DirectiveState) -> String {
        let ty = self.cxx_type(self.tp.symbol(array).ty);
        format!("(({ty}){}.index({}))", self.var(array), self.selectors(sels, state))
    }

    fn dims(&self, dims: &[TExpr], state: DirectiveState) -> String {
        let d: Vec<String> = dims.iter().map(|d| self.lower(d, state, Access::Load)).collect();
        let (r, c) = match d.as_slice() {
            [n] => (n.clone(), n.clone()),
            [r, c] => (r.clone(), c.clone()),
            _ => unreachable!("sema allows one or two dimensions"),
        };
        format!("{}dim_vector({r}, {c})", self.ns())
    }

    /// Constructor arguments for a fresh array: zero fill for real arrays
    /// in the default mode. Integer arrays are zeroed by their element type.
    fn alloc_args(&self, ty: TymType, dims: &[TExpr], state: DirectiveState) -> String {
        let dv = self.dims(dims, state);
        if ty == TymType::RealArray && !state.no_init_vars {
            format!("{dv}, 0.0")
        } else {
            dv
        }
    }

    // ---- statements ----

    /// An element store or slice assignment, without indentation.
    pub fn indexed_assign(&self, s: &TStmt) -> String {
        match &s.kind {
            TStmtKind::ElemStore { array, indices, value } => format!(
                "{} = {};",
                self.element_access(*array, indices, s.state, Access::Store),
                self.lower(value, s.state, Access::Load)
            ),
            TStmtKind::SliceAssign { array, sels, value } => {
                let ty = self.tp.symbol(*array).ty;
                let rhs = self.lower(value, s.state, Access::Load);
                let rhs = if value.ty.is_array() {
                    rhs
                } else {
                    format!("{}({}dim_vector(1, 1), {rhs})", self.cxx_type(ty), self.ns())
                };
                format!("{}.assign({}, {rhs});", self.var(*array), self.selectors(sels, s.state))
            }
            _ => panic!("indexed_assign expects an element store or slice assignment"),
        }
    }

    /// The loop header `for (v = (a); v <= (b); v += (s)) {`.
    pub fn for_header(&self, s: &TStmt) -> String {
        let TStmtKind::For { var, start, step, stop, descending, .. } = &s.kind else {
            panic!("for_header expects a for statement");
        };
        let v = self.var(*var);
        let st = s.state;
        let step = step.as_ref().map_or_else(|| "1".to_string(), |e| self.lower(e, st, Access::Load));
        let cmp = if *descending { ">=" } else { "<=" };
        format!(
            "for ({v} = ({}); {v} {cmp} ({}); {v} += ({step})) {{",
            self.lower(start, st, Access::Load),
            self.lower(stop, st, Access::Load)
        )
    }

    /// A complete `for` statement including its body.
    pub fn lower_for(&self, s: &TStmt) -> String {
        let mut out = Out::new();
        self.stmt(&mut out, s, false);
        out.text
    }

    fn error_lines(&self, message: &str) -> Vec<String> {
        let msg = c_string(message);
        match (self.opts.target, self.opts.octave_error) {
            (EmitTarget::Octave, ErrorStyle::Stream) => {
                vec![format!("std::cout<<\"error\"<<{msg}<<\"\\n\";return retval;")]
            }
            (EmitTarget::Octave, ErrorStyle::Call) => vec![format!("error({msg});"), "return retval;".into()],
            (EmitTarget::Standalone, _) => vec![format!("tym::error({msg});"), "return retval;".into()],
        }
    }

    fn block(&self, out: &mut Out, stmts: &[TStmt]) {
        out.depth += 1;
        for s in stmts {
            self.stmt(out, s, false);
        }
        out.depth -= 1;
    }

    fn stmt(&self, out: &mut Out, s: &TStmt, top_level: bool) {
        let st = s.state;
        match &s.kind {
            TStmtKind::Directive(_) => {}
            TStmtKind::Decl { var, init } => {
                let ty = self.tp.symbol(*var).ty;
                let t = self.cxx_type(ty);
                let v = self.var(*var);
                match init {
                    Some(e) => out.line(format!("{t} {v} = {};", self.lower(e, st, Access::Load))),
                    None if ty.is_scalar() && !st.no_init_vars => out.line(format!("{t} {v} = 0;")),
                    None => out.line(format!("{t} {v};")),
                }
            }
            TStmtKind::Assign { var, value } => {
                out.line(format!("{} = {};", self.var(*var), self.lower(value, st, Access::Load)))
            }
            TStmtKind::ElemStore { .. } | TStmtKind::SliceAssign { .. } => out.line(self.indexed_assign(s)),
            TStmtKind::CreateArray { var, dims } => {
                let ty = self.tp.symbol(*var).ty;
                let t = self.cxx_type(ty);
                let args = self.alloc_args(ty, dims, st);
                if top_level && self.fused_return_decl() == Some(s as *const TStmt) {
                    out.line(format!("{t} {}({args});", self.var(*var)));
                } else {
                    out.line(format!("{} = {t}({args});", self.var(*var)));
                }
            }
            TStmtKind::Error { message } => {
                for l in self.error_lines(message) {
                    out.line(l);
                }
            }
            TStmtKind::If { cond, then_body, else_body } => {
                out.line(format!("if (({})) {{", self.lower(cond, st, Access::Load)));
                self.block(out, then_body);
                if let Some(e) = else_body {
                    out.line("} else {".into());
                    self.block(out, e);
                }
                out.line("}".into());
            }
            TStmtKind::For { body, .. } => {
                out.line(self.for_header(s));
                self.block(out, body);
                out.line("}".into());
            }
        }
    }

    /// The top-level `createArray` that declares an array return variable,
    /// when it is the variable's first mention.
    fn fused_return_decl(&self) -> Option<*const TStmt> {
        let ret = self.tp.return_var;
        if !self.tp.return_type().is_array() {
            return None;
        }
        for s in &self.tp.body {
            if let TStmtKind::CreateArray { var, dims } = &s.kind {
                if *var == ret && !dims.iter().any(|d| mentions_expr(d, ret)) {
                    return Some(s as *const TStmt);
                }
            }
            if mentions_stmt(s, ret) {
                return None;
            }
        }
        None
    }

    fn params(&self, out: &mut Out) {
        for (n, &p) in self.tp.params.iter().enumerate() {
            let ty = self.tp.symbol(p).ty;
            let getter = match ty {
                TymType::RealArray => format!("args({n}).array_value()"),
                TymType::IntArray => format!("args({n}).int32_array_value()"),
                TymType::Int => format!("args({n}).int32_array_value()(0)"),
                TymType::Real => format!("args({n}).array_value()(0)"),
                TymType::Float => format!("args({n}).float_array_value()(0)"),
            };
            out.line(format!("{} {}={getter};", self.cxx_type(ty), self.var(p)));
        }
    }

    fn return_decl(&self, out: &mut Out) {
        let ret = self.tp.return_var;
        let ty = self.tp.return_type();
        let t = self.cxx_type(ty);
        let v = self.var(ret);
        if ty.is_array() {
            if self.fused_return_decl().is_none() {
                out.line(format!("{t} {v};"));
            }
        } else if self.tp.header_state.no_init_vars {
            out.line(format!("{t} {v};"));
        } else {
            out.line(format!("{t} {v} = 0;"));
        }
    }

    fn body(&self, out: &mut Out) {
        self.params(out);
        self.return_decl(out);
        for s in &self.tp.body {
            self.stmt(out, s, true);
        }
        out.line(format!("retval(0) = {};", self.var(self.tp.return_var)));
        out.line("return retval;".into());
    }

    /// The complete translation unit.
    pub fn module(&self) -> String {
        let mut out = Out::new();
        let name = &self.tp.name;
        match self.opts.target {
            EmitTarget::Octave => {
                out.raw("#include <octave/oct.h>\n#include <iostream>\n#include <cstdlib>\n");
                out.raw(&format!("DEFUN_DLD ({name}, args, nargout, \"\") {{\n"));
                out.depth = 1;
                out.line("octave_value_list retval;".into());
                out.raw("\n");
                self.body(&mut out);
                out.depth = 0;
                out.raw("}\n");
            }
            EmitTarget::Standalone => {
                let n = self.tp.params.len();
                out.raw("#include \"tym_runtime.hpp\"\n\n");
                out.raw(&format!(
                    "static tym::value_list tym_{name}(const tym::value_list& args) {{\n"
                ));
                out.depth = 1;
                out.line("tym::value_list retval;".into());
                out.line(format!("if (args.length() != {n}) {{"));
                out.depth += 1;
                for l in self.error_lines(&format!("{name}: expected {n} argument{}", if n == 1 { "" } else { "s" })) {
                    out.line(l);
                }
                out.depth -= 1;
                out.line("}".into());
                self.body(&mut out);
                out.depth = 0;
                out.raw("}\n\n");
                let sig: String = self.tp.param_types().iter().map(|&t| signature_code(t)).collect();
                out.raw(&format!(
                    "int main(int argc, char** argv) {{\n    return tym::run_main(argc, argv, {}, \"{sig}\", &tym_{name});\n}}\n",
                    c_string(name)
                ));
            }
        }
        out.text
    }
}

/// One-letter parameter kind used by the standalone harness to validate the
/// args file: `i` int, `r` real, `f` float, `I` intArray, `R` realArray.
pub fn signature_code(ty: TymType) -> char {
    match ty {
        TymType::Int => 'i',
        TymType::Real => 'r',
        TymType::Float => 'f',
        TymType::IntArray => 'I',
        TymType::RealArray => 'R',
    }
}

fn mentions_expr(e: &TExpr, id: VarId) -> bool {
    match &e.kind {
        TExprKind::Int(_) | TExprKind::Real(_) => false,
        TExprKind::Var(v) => *v == id,
        TExprKind::Binary(_, l, r) => mentions_expr(l, id) || mentions_expr(r, id),
        TExprKind::Neg(x) | TExprKind::Rows(x) | TExprKind::Columns(x) => mentions_expr(x, id),
        TExprKind::ElemLoad { array, indices } => *array == id || indices.iter().any(|i| mentions_expr(i, id)),
        TExprKind::Slice { array, sels } => *array == id || sels.iter().any(|s| mentions_sel(s, id)),
    }
}

fn mentions_sel(s: &TSel, id: VarId) -> bool {
    match s {
        TSel::Colon => false,
        TSel::Scalar(e) => mentions_expr(e, id),
        TSel::Range { start, step, stop } => {
            mentions_expr(start, id) || mentions_expr(stop, id) || step.as_ref().is_some_and(|s| mentions_expr(s, id))
        }
    }
}

fn mentions_stmt(s: &TStmt, id: VarId) -> bool {
    let any = |b: &[TStmt]| b.iter().any(|s| mentions_stmt(s, id));
    match &s.kind {
        TStmtKind::Directive(_) | TStmtKind::Error { .. } => false,
        TStmtKind::Decl { var, init } => *var == id || init.as_ref().is_some_and(|e| mentions_expr(e, id)),
        TStmtKind::Assign { var, value } => *var == id || mentions_expr(value, id),
        TStmtKind::ElemStore { array, indices, value } => {
            *array == id || indices.iter().any(|e| mentions_expr(e, id)) || mentions_expr(value, id)
        }
        TStmtKind::SliceAssign { array, sels, value } => {
            *array == id || sels.iter().any(|s| mentions_sel(s, id)) || mentions_expr(value, id)
        }
        TStmtKind::CreateArray { var, dims } => *var == id || dims.iter().any(|d| mentions_expr(d, id)),
        TStmtKind::If { cond, then_body, else_body } => {
            mentions_expr(cond, id) || any(then_body) || else_body.as_deref().is_some_and(any)
        }
        TStmtKind::For { var, start, step, stop, body, .. } => {
            *var == id
                || mentions_expr(start, id)
                || mentions_expr(stop, id)
                || step.as_ref().is_some_and(|s| mentions_expr(s, id))
                || any(body)
        }
    }
}

struct Out {
    text: String,
    depth: usize,
}

impl Out {
    fn new() -> Self {
        Out { text: String::new(), depth: 0 }
    }

    fn line(&mut self, l: String) {
        for _ in 0..self.depth {
            self.text.push_str("    ");
        }
        self.text.push_str(&l);
        self.text.push('\n');
    }

    fn raw(&mut self, s: &str) {
        self.text.push_str(s);
    }
}
