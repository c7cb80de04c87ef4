//! The analyzed form of a program: every expression carries a type, every
//! `name(...)` application is resolved, and every statement records the
//! directive state in force at its line.

use crate::ast::{BinOp, TymType};
use crate::diag::Diagnostic;

/// Index into [`TypedProgram::symbols`].
pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct DirectiveState {
    pub zero_based_arrays: bool,
    pub no_init_vars: bool,
    pub no_check_ranges: bool,
}

impl DirectiveState {
    pub const KNOWN: [&'static str; 3] = ["zero_based_arrays", "no_init_vars", "no_check_ranges"];

    /// Turns on the named flag. Returns false for unknown names.
    pub fn enable(&mut self, name: &str) -> bool {
        match name {
            "zero_based_arrays" => self.zero_based_arrays = true,
            "no_init_vars" => self.no_init_vars = true,
            "no_check_ranges" => self.no_check_ranges = true,
            _ => return false,
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Parameter,
    Local,
    ReturnVar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolEntry {
    pub name: String,
    pub ty: TymType,
    pub decl_line: u32,
    pub def_line: Option<u32>,
    pub kind: SymbolKind,
    /// `no_init_vars` was in force where the variable was declared.
    pub uninit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedProgram {
    pub name: String,
    pub params: Vec<VarId>,
    pub return_var: VarId,
    pub body: Vec<TStmt>,
    pub symbols: Vec<SymbolEntry>,
    /// Directive state at the `function` header line.
    pub header_state: DirectiveState,
    pub header_line: u32,
    pub warnings: Vec<Diagnostic>,
}

impl TypedProgram {
    pub fn symbol(&self, id: VarId) -> &SymbolEntry {
        &self.symbols[id]
    }

    pub fn param_types(&self) -> Vec<TymType> {
        self.params.iter().map(|&p| self.symbols[p].ty).collect()
    }

    pub fn return_type(&self) -> TymType {
        self.symbols[self.return_var].ty
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TStmt {
    pub kind: TStmtKind,
    pub line: u32,
    pub state: DirectiveState,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TStmtKind {
    Decl { var: VarId, init: Option<TExpr> },
    Assign { var: VarId, value: TExpr },
    /// Store of a scalar into one element, all indices integer.
    ElemStore { array: VarId, indices: Vec<TExpr>, value: TExpr },
    /// Store through selectors where at least one is a range or colon.
    SliceAssign { array: VarId, sels: Vec<TSel>, value: TExpr },
    /// `createArray(var, rows, cols)`; a single dimension means square.
    CreateArray { var: VarId, dims: Vec<TExpr> },
    Error { message: String },
    If { cond: TExpr, then_body: Vec<TStmt>, else_body: Option<Vec<TStmt>> },
    For {
        var: VarId,
        start: TExpr,
        step: Option<TExpr>,
        stop: TExpr,
        /// Constant negative step: the loop test is `>=` instead of `<=`.
        descending: bool,
        body: Vec<TStmt>,
    },
    Directive(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TSel {
    Scalar(TExpr),
    Range { start: TExpr, step: Option<TExpr>, stop: TExpr },
    Colon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TExpr {
    pub ty: TymType,
    pub kind: TExprKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TExprKind {
    Int(i64),
    Real(f64),
    Var(VarId),
    Binary(BinOp, Box<TExpr>, Box<TExpr>),
    Neg(Box<TExpr>),
    ElemLoad { array: VarId, indices: Vec<TExpr> },
    Slice { array: VarId, sels: Vec<TSel> },
    Rows(Box<TExpr>),
    Columns(Box<TExpr>),
}

impl TExpr {
    /// Literals, variables, element loads and builtin calls print without
    /// surrounding parentheses.
    pub fn is_atomic(&self) -> bool {
        matches!(
            self.kind,
            TExprKind::Int(_)
                | TExprKind::Real(_)
                | TExprKind::Var(_)
                | TExprKind::ElemLoad { .. }
                | TExprKind::Rows(_)
                | TExprKind::Columns(_)
        )
    }

    /// Folds integer constant expressions built from literals, negation and
    /// `+ - *`.
    pub fn const_int(&self) -> Option<i64> {
        match &self.kind {
            TExprKind::Int(v) => Some(*v),
            TExprKind::Neg(e) => e.const_int()?.checked_neg(),
            TExprKind::Binary(op, l, r) => {
                let (a, b) = (l.const_int()?, r.const_int()?);
                match op {
                    BinOp::Add => a.checked_add(b),
                    BinOp::Sub => a.checked_sub(b),
                    BinOp::Mul => a.checked_mul(b),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}
