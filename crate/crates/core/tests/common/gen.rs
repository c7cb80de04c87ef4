//! Random syntax trees for round-trip properties.
//!
//! Literals are nonnegative: `-3` parses as a negation, so negative values
//! appear only through `Neg`.

use proptest::prelude::*;
use tymc::ast::*;

const KEYWORDS: [&str; 8] = ["function", "end", "if", "else", "for", "int", "real", "float"];

fn sp() -> Span {
    Span::default()
}

pub fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,5}".prop_filter("keyword", |s| !KEYWORDS.contains(&s.as_str()))
}

pub fn ty() -> impl Strategy<Value = TymType> {
    prop_oneof![
        Just(TymType::Int),
        Just(TymType::Real),
        Just(TymType::Float),
        Just(TymType::IntArray),
        Just(TymType::RealArray),
    ]
}

fn binop() -> impl Strategy<Value = BinOp> {
    use BinOp::*;
    proptest::sample::select(vec![Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or])
}

fn real_lit() -> impl Strategy<Value = f64> {
    prop_oneof![
        (0u32..10_000).prop_map(|v| v as f64 / 8.0),
        (0.0f64..1e300),
        Just(1e-7),
        Just(0.1),
    ]
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i64..=i32::MAX as i64).prop_map(|v| Expr::new(ExprKind::IntLit(v), sp())),
        real_lit().prop_map(|v| Expr::new(ExprKind::RealLit(v), sp())),
        ident().prop_map(|v| Expr::new(ExprKind::Var(v), sp())),
    ]
}

fn range_of(e: BoxedStrategy<Expr>) -> impl Strategy<Value = Range> {
    (e.clone(), proptest::option::of(e.clone()), e).prop_map(|(a, s, b)| Range {
        start: Box::new(a),
        step: s.map(Box::new),
        stop: Box::new(b),
    })
}

fn index_arg(e: BoxedStrategy<Expr>) -> impl Strategy<Value = IndexArg> {
    prop_oneof![
        3 => e.clone().prop_map(IndexArg::Scalar),
        1 => range_of(e).prop_map(IndexArg::Slice),
        1 => Just(IndexArg::Colon),
    ]
}

pub fn expr() -> BoxedStrategy<Expr> {
    leaf()
        .prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (binop(), inner.clone(), inner.clone())
                    .prop_map(|(op, l, r)| Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)), sp())),
                inner.clone().prop_map(|e| Expr::new(ExprKind::Neg(Box::new(e)), sp())),
                (ident(), prop::collection::vec(index_arg(inner), 0..3))
                    .prop_map(|(n, a)| Expr::new(ExprKind::Apply(n, a), sp())),
            ]
        })
        .boxed()
}

fn directive_name() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("zero_based_arrays".to_string()),
        Just("no_init_vars".to_string()),
        Just("no_check_ranges".to_string()),
        "[a-z' _]{1,8}",
    ]
}

fn simple_stmt() -> impl Strategy<Value = Stmt> {
    let kind = prop_oneof![
        (ty(), ident(), proptest::option::of(expr())).prop_map(|(ty, name, init)| StmtKind::VarDecl { ty, name, init }),
        (ident(), expr()).prop_map(|(name, value)| StmtKind::Assign { name, value }),
        (ident(), prop::collection::vec(index_arg(expr()), 1..3), expr())
            .prop_map(|(name, args, value)| StmtKind::IndexedAssign { name, args, value }),
        "[a-zA-Z0-9 ,.'x]{0,12}".prop_map(|msg| StmtKind::ExprStmt(Expr::new(
            ExprKind::Apply("error".into(), vec![IndexArg::Scalar(Expr::new(ExprKind::StringLit(msg), sp()))]),
            sp(),
        ))),
        (ident(), prop::collection::vec(expr(), 1..3)).prop_map(|(n, a)| StmtKind::ExprStmt(Expr::new(
            ExprKind::Apply(n, a.into_iter().map(IndexArg::Scalar).collect()),
            sp(),
        ))),
        directive_name().prop_map(StmtKind::Directive),
    ];
    kind.prop_map(|kind| Stmt { kind, span: sp() })
}

pub fn stmt() -> BoxedStrategy<Stmt> {
    simple_stmt()
        .prop_recursive(3, 20, 4, |inner| {
            let block = prop::collection::vec(inner, 0..4);
            prop_oneof![
                (expr(), block.clone(), proptest::option::of(block.clone())).prop_map(|(cond, t, e)| Stmt {
                    kind: StmtKind::If { cond, then_body: t, else_body: e },
                    span: sp(),
                }),
                (ident(), range_of(expr()), block).prop_map(|(var, range, body)| Stmt {
                    kind: StmtKind::For { var, range, body },
                    span: sp(),
                }),
            ]
        })
        .boxed()
}

pub fn program() -> impl Strategy<Value = Program> {
    let params = prop::collection::vec((ty(), ident()).prop_map(|(ty, name)| Param { ty, name, span: sp() }), 0..4);
    (
        prop::collection::vec(directive_name().prop_map(|d| (d, sp())), 0..3),
        ty(),
        ident(),
        ident(),
        params,
        prop::collection::vec(stmt(), 0..6),
    )
        .prop_map(|(directives_prologue, return_type, return_var, name, params, body)| Program {
            directives_prologue,
            function: FunctionDef { return_type, return_var, name, params, body, span: sp() },
        })
}

/// Integer expression text over the variables in scope of
/// [`wf_program`]'s loop body. Division only by nonzero literals.
fn int_expr(vars: &'static [&'static str]) -> BoxedStrategy<String> {
    let leaf = prop_oneof![
        (0i32..1000).prop_map(|v| v.to_string()),
        proptest::sample::select(vars).prop_map(str::to_string),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), proptest::sample::select(vec!["+", "-", "*", "<", "==", "~="]), inner.clone())
                .prop_map(|(a, op, b)| format!("({a} {op} {b})")),
            (inner.clone(), 1i32..9).prop_map(|(a, d)| format!("({a} / {d})")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
    .boxed()
}

/// A well-formed program over `intArray a` and `int n`: every access is in
/// bounds and every variable is written before it is read.
pub fn wf_program() -> impl Strategy<Value = String> {
    const BODY: &[&str] = &["t", "n", "i", "j", "a(i, j)", "z(i, j)"];
    const TOP: &[&str] = &["t", "n", "rows(a)", "columns(a)"];
    (int_expr(&["n", "rows(a)"]), int_expr(BODY), int_expr(BODY), int_expr(TOP), int_expr(TOP), any::<bool>())
        .prop_map(|(e0, e1, e2, e3, e4, real)| {
            let tail = if real { format!("z = z + {e4}") } else { format!("z = z - {e4}") };
            format!(
                "function intArray z = f(intArray a, int n)
  int i
  int j
  int t = {e0}
  z = a
  for i=1:rows(a)
    for j=1:columns(a)
      t = {e1}
      z(i, j) = {e2}
    end
  end
  if ({e3})
    {tail}
  end
end
"
            )
        })
}

/// Args text for [`wf_program`]: an array of at most 4x4 and a scalar.
pub fn wf_args() -> impl Strategy<Value = String> {
    (1usize..5, 1usize..5, -50i32..50)
        .prop_flat_map(|(r, c, n)| (Just((r, c, n)), prop::collection::vec(-1000i32..1000, r * c)))
        .prop_map(|((r, c, n), v)| {
            let rows: Vec<String> =
                v.chunks(c).map(|row| row.iter().map(i32::to_string).collect::<Vec<_>>().join(" ")).collect();
            format!("intarray {r} {c}\n{}\nint {n}\n", rows.join("\n"))
        })
}
