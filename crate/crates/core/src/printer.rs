//! Canonical source printer. `parse(tokenize(print_ast(p)))` is structurally
//! equal to `p` for every well-formed program.

use std::fmt::Write;

use crate::ast::*;

pub fn print_ast(p: &Program) -> String {
    let mut out = String::new();
    for (name, _) in &p.directives_prologue {
        writeln!(out, "$ {}", quote(name)).unwrap();
    }
    let f = &p.function;
    let params: Vec<String> = f.params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
    writeln!(
        out,
        "function {} {} = {}({})",
        f.return_type,
        f.return_var,
        f.name,
        params.join(", ")
    )
    .unwrap();
    print_block(&mut out, &f.body, 1);
    out.push_str("end\n");
    out
}

fn print_block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for stmt in stmts {
        print_stmt(out, stmt, depth);
    }
}

fn print_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    let pad = "  ".repeat(depth);
    match &stmt.kind {
        StmtKind::VarDecl { ty, name, init } => match init {
            Some(e) => writeln!(out, "{pad}{ty} {name} = {}", expr(e)),
            None => writeln!(out, "{pad}{ty} {name}"),
        },
        StmtKind::Assign { name, value } => writeln!(out, "{pad}{name} = {}", expr(value)),
        StmtKind::IndexedAssign { name, args, value } => {
            writeln!(out, "{pad}{name}({}) = {}", index_args(args), expr(value))
        }
        StmtKind::If { cond, then_body, else_body } => {
            writeln!(out, "{pad}if ({})", expr(cond)).unwrap();
            print_block(out, then_body, depth + 1);
            if let Some(else_body) = else_body {
                writeln!(out, "{pad}else").unwrap();
                print_block(out, else_body, depth + 1);
            }
            writeln!(out, "{pad}end")
        }
        StmtKind::For { var, range: r, body } => {
            writeln!(out, "{pad}for {var}={}", range(r)).unwrap();
            print_block(out, body, depth + 1);
            writeln!(out, "{pad}end")
        }
        StmtKind::ExprStmt(e) => writeln!(out, "{pad}{}", expr(e)),
        StmtKind::Directive(name) => writeln!(out, "{pad}$ {}", quote(name)),
    }
    .unwrap();
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Renders an expression with the minimum parentheses needed to re-parse it
/// to the same tree.
pub fn expr(e: &Expr) -> String {
    render(e, false)
}

fn range(r: &Range) -> String {
    match &r.step {
        Some(step) => format!("{}:{}:{}", render(&r.start, true), render(step, true), render(&r.stop, true)),
        None => format!("{}:{}", render(&r.start, true), render(&r.stop, true)),
    }
}

fn index_args(args: &[IndexArg]) -> String {
    args.iter()
        .map(|a| match a {
            IndexArg::Scalar(e) => render(e, true),
            IndexArg::Slice(r) => range(r),
            IndexArg::Colon => ":".to_string(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn real_literal(v: f64) -> String {
    if !v.is_finite() {
        return "1.0e999".to_string();
    }
    let s = format!("{v:?}");
    match s.split_once('e') {
        Some((mant, exp)) if !mant.contains('.') => format!("{mant}.0e{exp}"),
        Some(_) => s,
        None if s.contains('.') => s,
        None => format!("{s}.0"),
    }
}

/// `compact` drops the spaces around binary operators, the style used inside
/// ranges and index lists (`x(i+1, j)`, `0:n-1`).
fn render(e: &Expr, compact: bool) -> String {
    match &e.kind {
        ExprKind::IntLit(v) => v.to_string(),
        ExprKind::RealLit(v) => real_literal(*v),
        ExprKind::StringLit(s) => quote(s),
        ExprKind::Var(name) => name.clone(),
        ExprKind::Apply(name, args) => format!("{name}({})", index_args(args)),
        ExprKind::Neg(inner) => {
            let s = render(inner, compact);
            if matches!(inner.kind, ExprKind::Binary(..)) {
                format!("-({s})")
            } else {
                format!("-{s}")
            }
        }
        ExprKind::Binary(op, l, r) => {
            let p = op.precedence();
            let wrap = |child: &Expr, right: bool| {
                let s = render(child, compact);
                match &child.kind {
                    ExprKind::Binary(cop, ..)
                        if cop.precedence() < p || (right && cop.precedence() == p) =>
                    {
                        format!("({s})")
                    }
                    _ => s,
                }
            };
            let (ls, rs) = (wrap(l, false), wrap(r, true));
            if compact {
                format!("{ls}{}{rs}", op.symbol())
            } else {
                format!("{ls} {} {rs}", op.symbol())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;
    use crate::parser::parse;

    fn reparse(src: &str) -> (Program, Program, String) {
        let p = parse(&tokenize(src).unwrap()).unwrap();
        let text = print_ast(&p);
        let q = parse(&tokenize(&text).unwrap()).unwrap();
        (p, q, text)
    }

    #[test]
    fn empty_body_canonical_form() {
        let (_, _, text) = reparse("function int z = f()\nend");
        assert_eq!(text, "function int z = f()\nend\n");
    }

    #[test]
    fn loop_header_is_compact() {
        let (p, q, text) = reparse(
            "function int z = f(int d1x)\nint i\nfor i = 0 : d1x - 1\n z = z + i\nend\nend\n",
        );
        assert_eq!(p, q);
        assert!(text.contains("for i=0:d1x-1"), "{text}");
    }

    #[test]
    fn parenthesization_survives() {
        let (p, q, text) = reparse(
            "function int z = f(int a, int b)\nz = (a - (b - 1)) * -(a + b) / (a < (b == 1))\nend\n",
        );
        assert_eq!(p, q, "{text}");
    }

    #[test]
    fn real_literal_forms() {
        assert_eq!(real_literal(1.0), "1.0");
        assert_eq!(real_literal(1e-7), "1.0e-7");
        assert_eq!(real_literal(2.5e300), "2.5e300");
        for v in [0.1, 123456.789, 1e16, 5e-324] {
            let t = tokenize(&real_literal(v)).unwrap();
            assert_eq!(t[0].kind, crate::lexer::TokenKind::RealLit(v));
        }
    }
}
