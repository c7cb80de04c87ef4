//! Untyped syntax tree for a single tym function.

use std::fmt;

/// Source position of a node.
///
/// Positions never take part in equality: two trees compare equal when they
/// are structurally identical, wherever they came from.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

/// The five declarable types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TymType {
    Int,
    Real,
    Float,
    IntArray,
    RealArray,
}

impl TymType {
    pub fn is_array(self) -> bool {
        matches!(self, TymType::IntArray | TymType::RealArray)
    }

    pub fn is_scalar(self) -> bool {
        !self.is_array()
    }

    /// Element type of an array, or the type itself for scalars.
    pub fn element(self) -> TymType {
        match self {
            TymType::IntArray => TymType::Int,
            TymType::RealArray => TymType::Real,
            other => other,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            TymType::Int => "int",
            TymType::Real => "real",
            TymType::Float => "float",
            TymType::IntArray => "intArray",
            TymType::RealArray => "realArray",
        }
    }
}

impl fmt::Display for TymType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub directives_prologue: Vec<(String, Span)>,
    pub function: FunctionDef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub return_type: TymType,
    pub return_var: String,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: TymType,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    VarDecl {
        ty: TymType,
        name: String,
        init: Option<Expr>,
    },
    Assign {
        name: String,
        value: Expr,
    },
    IndexedAssign {
        name: String,
        args: Vec<IndexArg>,
        value: Expr,
    },
    If {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Option<Vec<Stmt>>,
    },
    For {
        var: String,
        range: Range,
        body: Vec<Stmt>,
    },
    /// A call statement such as `createArray(z, 3, 3)` or `error('...')`.
    ExprStmt(Expr),
    Directive(String),
}

/// `start:stop` or `start:step:stop`.
#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub start: Box<Expr>,
    pub step: Option<Box<Expr>>,
    pub stop: Box<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexArg {
    Scalar(Expr),
    Slice(Range),
    Colon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    pub fn is_arithmetic(self) -> bool {
        self.precedence() >= 4
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
            BinOp::Ne => "~=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    IntLit(i64),
    RealLit(f64),
    StringLit(String),
    Var(String),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// `name(args)`: array indexing or a builtin call, decided by sema.
    Apply(String, Vec<IndexArg>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }
}
