//! Recursive-descent parser producing a [`Program`].

use thiserror::Error;

use crate::ast::*;
use crate::lexer::{Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{col}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub found: String,
}

type PResult<T> = Result<T, ParseError>;

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

/// Parses the token stream of one source file. The stream must end with
/// [`TokenKind::EndOfFile`], as produced by [`crate::lexer::tokenize`].
pub fn parse(tokens: &[Token]) -> Result<Program, ParseError> {
    assert!(
        matches!(tokens.last(), Some(Token { kind: TokenKind::EndOfFile, .. })),
        "token stream must end with EndOfFile"
    );
    Parser { tokens, pos: 0 }.program()
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos]
    }

    fn peek_kind(&self) -> &'t TokenKind {
        &self.peek().kind
    }

    fn peek_kind_at(&self, ahead: usize) -> &'t TokenKind {
        let idx = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[idx].kind
    }

    fn span(&self) -> Span {
        let t = self.peek();
        Span::new(t.line, t.col)
    }

    fn advance(&mut self) -> &'t Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(ParseError {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.kind.describe(),
        })
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<&'t Token> {
        if *self.peek_kind() == kind {
            Ok(self.advance())
        } else {
            self.error(&[&kind.describe()])
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        match self.peek_kind() {
            TokenKind::Ident(name) => {
                self.advance();
                Ok(name.clone())
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn type_keyword(&self) -> Option<TymType> {
        Some(match self.peek_kind() {
            TokenKind::Int => TymType::Int,
            TokenKind::Real => TymType::Real,
            TokenKind::Float => TymType::Float,
            TokenKind::IntArray => TymType::IntArray,
            TokenKind::RealArray => TymType::RealArray,
            _ => return None,
        })
    }

    fn expect_type(&mut self) -> PResult<TymType> {
        match self.type_keyword() {
            Some(ty) => {
                self.advance();
                Ok(ty)
            }
            None => self.error(&["type name"]),
        }
    }

    fn skip_newlines(&mut self) {
        while self.eat(&TokenKind::Newline) {}
    }

    fn terminator(&mut self) -> PResult<()> {
        match self.peek_kind() {
            TokenKind::Newline => {
                self.advance();
                Ok(())
            }
            TokenKind::EndOfFile => Ok(()),
            _ => self.error(&["end of line"]),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        self.skip_newlines();
        let mut directives_prologue = Vec::new();
        while let TokenKind::Directive(name) = self.peek_kind() {
            let span = self.span();
            self.advance();
            directives_prologue.push((name.clone(), span));
            self.terminator()?;
            self.skip_newlines();
        }
        let function = self.function()?;
        self.skip_newlines();
        if *self.peek_kind() != TokenKind::EndOfFile {
            return self.error(&["end of file"]);
        }
        Ok(Program { directives_prologue, function })
    }

    fn function(&mut self) -> PResult<FunctionDef> {
        let span = self.span();
        self.expect(TokenKind::Function)?;
        let return_type = self.expect_type()?;
        let return_var = self.expect_ident()?;
        self.expect(TokenKind::Assign)?;
        let name = self.expect_ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if *self.peek_kind() != TokenKind::RParen {
            loop {
                let pspan = self.span();
                let ty = self.expect_type()?;
                let pname = self.expect_ident()?;
                params.push(Param { ty, name: pname, span: pspan });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        self.terminator()?;
        let body = self.block()?;
        self.expect(TokenKind::End)?;
        self.terminator()?;
        Ok(FunctionDef { return_type, return_var, name, params, body, span })
    }

    /// Statements up to (not including) a closing `end` or `else`.
    fn block(&mut self) -> PResult<Vec<Stmt>> {
        let mut stmts = Vec::new();
        loop {
            self.skip_newlines();
            match self.peek_kind() {
                TokenKind::End | TokenKind::Else => return Ok(stmts),
                TokenKind::EndOfFile => return self.error(&["`end`"]),
                _ => stmts.push(self.statement()?),
            }
        }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let kind = match self.peek_kind() {
            TokenKind::Directive(name) => {
                self.advance();
                StmtKind::Directive(name.clone())
            }
            TokenKind::If => return self.if_stmt(),
            TokenKind::For => return self.for_stmt(),
            TokenKind::Ident(name) => {
                self.advance();
                match self.peek_kind() {
                    TokenKind::Assign => {
                        self.advance();
                        StmtKind::Assign { name: name.clone(), value: self.expr()? }
                    }
                    TokenKind::LParen => {
                        let args = self.call_args()?;
                        if self.eat(&TokenKind::Assign) {
                            StmtKind::IndexedAssign {
                                name: name.clone(),
                                args,
                                value: self.expr()?,
                            }
                        } else {
                            StmtKind::ExprStmt(Expr::new(ExprKind::Apply(name.clone(), args), span))
                        }
                    }
                    _ => return self.error(&["`=`", "`(`"]),
                }
            }
            _ => match self.type_keyword() {
                Some(ty) => {
                    self.advance();
                    let name = self.expect_ident()?;
                    let init = if self.eat(&TokenKind::Assign) { Some(self.expr()?) } else { None };
                    StmtKind::VarDecl { ty, name, init }
                }
                None => return self.error(&["statement"]),
            },
        };
        self.terminator()?;
        Ok(Stmt { kind, span })
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        self.expect(TokenKind::If)?;
        self.expect(TokenKind::LParen)?;
        let cond = self.expr()?;
        self.expect(TokenKind::RParen)?;
        self.terminator()?;
        let then_body = self.block()?;
        let else_body = if self.eat(&TokenKind::Else) {
            self.terminator()?;
            Some(self.block()?)
        } else {
            None
        };
        self.expect(TokenKind::End)?;
        self.terminator()?;
        Ok(Stmt { kind: StmtKind::If { cond, then_body, else_body }, span })
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        self.expect(TokenKind::For)?;
        let var = self.expect_ident()?;
        self.expect(TokenKind::Assign)?;
        let first = self.expr()?;
        if *self.peek_kind() != TokenKind::Colon {
            return self.error(&["`:`"]);
        }
        let range = self.range_tail(first)?;
        self.terminator()?;
        let body = self.block()?;
        self.expect(TokenKind::End)?;
        self.terminator()?;
        Ok(Stmt { kind: StmtKind::For { var, range, body }, span })
    }

    /// Having parsed `start`, parses `:stop` or `:step:stop`.
    fn range_tail(&mut self, start: Expr) -> PResult<Range> {
        self.expect(TokenKind::Colon)?;
        let second = self.expr()?;
        if self.eat(&TokenKind::Colon) {
            let stop = self.expr()?;
            Ok(Range {
                start: Box::new(start),
                step: Some(Box::new(second)),
                stop: Box::new(stop),
            })
        } else {
            Ok(Range { start: Box::new(start), step: None, stop: Box::new(second) })
        }
    }

    fn call_args(&mut self) -> PResult<Vec<IndexArg>> {
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.index_arg()?);
            if self.eat(&TokenKind::Comma) {
                continue;
            }
            self.expect(TokenKind::RParen)?;
            return Ok(args);
        }
    }

    fn index_arg(&mut self) -> PResult<IndexArg> {
        if *self.peek_kind() == TokenKind::Colon
            && matches!(self.peek_kind_at(1), TokenKind::Comma | TokenKind::RParen)
        {
            self.advance();
            return Ok(IndexArg::Colon);
        }
        let first = self.expr()?;
        if *self.peek_kind() == TokenKind::Colon {
            Ok(IndexArg::Slice(self.range_tail(first)?))
        } else {
            Ok(IndexArg::Scalar(first))
        }
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinOp> {
        Some(match self.peek_kind() {
            TokenKind::Plus => BinOp::Add,
            TokenKind::Minus => BinOp::Sub,
            TokenKind::Star => BinOp::Mul,
            TokenKind::Slash => BinOp::Div,
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::NotEq => BinOp::Ne,
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            TokenKind::AndAnd => BinOp::And,
            TokenKind::OrOr => BinOp::Or,
            _ => return None,
        })
    }

    /// Precedence climbing; every binary operator is left associative.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            if op.precedence() < min_prec {
                break;
            }
            self.advance();
            let rhs = self.binary(op.precedence() + 1)?;
            let span = lhs.span;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek_kind() == TokenKind::Minus {
            let span = self.span();
            self.advance();
            let operand = self.unary()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(operand)), span));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.peek_kind() {
            TokenKind::IntLit(v) => {
                self.advance();
                ExprKind::IntLit(*v)
            }
            TokenKind::RealLit(v) => {
                self.advance();
                ExprKind::RealLit(*v)
            }
            TokenKind::StringLit(s) => {
                self.advance();
                ExprKind::StringLit(s.clone())
            }
            TokenKind::Ident(name) => {
                self.advance();
                if *self.peek_kind() == TokenKind::LParen {
                    ExprKind::Apply(name.clone(), self.call_args()?)
                } else {
                    ExprKind::Var(name.clone())
                }
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(inner);
            }
            _ => return self.error(&["expression"]),
        };
        Ok(Expr::new(kind, span))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;

    fn parse_src(src: &str) -> PResult<Program> {
        parse(&tokenize(src).unwrap())
    }

    fn body_of(stmts: &str) -> Vec<Stmt> {
        let src = format!("function int z = f(intArray x, intArray y)\n{stmts}\nend\n");
        parse_src(&src).unwrap().function.body
    }

    fn var(name: &str) -> Expr {
        Expr::new(ExprKind::Var(name.into()), Span::default())
    }

    fn int(v: i64) -> Expr {
        Expr::new(ExprKind::IntLit(v), Span::default())
    }

    fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)), Span::default())
    }

    fn slice(a: i64, b: i64) -> IndexArg {
        IndexArg::Slice(Range { start: Box::new(int(a)), step: None, stop: Box::new(int(b)) })
    }

    #[test]
    fn var_decl_with_builtin_init() {
        let body = body_of("int d1x = rows(x)");
        assert_eq!(
            body[0].kind,
            StmtKind::VarDecl {
                ty: TymType::Int,
                name: "d1x".into(),
                init: Some(Expr::new(
                    ExprKind::Apply("rows".into(), vec![IndexArg::Scalar(var("x"))]),
                    Span::default()
                )),
            }
        );
        assert_eq!(body[0].span.line, 2);
    }

    #[test]
    fn slice_addition() {
        let body = body_of("z = x(1:2, 1:2) + y(2:3, 2:3)");
        let apply = |n: &str, a, b, c, d| {
            Expr::new(ExprKind::Apply(n.into(), vec![slice(a, b), slice(c, d)]), Span::default())
        };
        assert_eq!(
            body[0].kind,
            StmtKind::Assign {
                name: "z".into(),
                value: bin(BinOp::Add, apply("x", 1, 2, 1, 2), apply("y", 2, 3, 2, 3)),
            }
        );
    }

    #[test]
    fn missing_end() {
        let err = parse_src("function int z = f()\n").unwrap_err();
        assert_eq!(err.expected, vec!["`end`".to_string()]);
    }

    #[test]
    fn missing_function_header() {
        let err = parse_src("int a = 1\n").unwrap_err();
        assert!(err.expected.iter().any(|e| e.contains("function")));
    }

    #[test]
    fn range_binds_looser_than_arithmetic() {
        let body = body_of("int i\nfor i=0:d1x-1\nend");
        let StmtKind::For { range, .. } = &body[1].kind else { panic!() };
        assert_eq!(*range.start, int(0));
        assert_eq!(*range.stop, bin(BinOp::Sub, var("d1x"), int(1)));
        assert!(range.step.is_none());
    }

    #[test]
    fn precedence_and_associativity() {
        let body = body_of("a = 1 - 2 - 3 * -4 < 5 && b || c");
        let StmtKind::Assign { value, .. } = &body[0].kind else { panic!() };
        let neg4 = Expr::new(ExprKind::Neg(Box::new(int(4))), Span::default());
        let arith = bin(BinOp::Sub, bin(BinOp::Sub, int(1), int(2)), bin(BinOp::Mul, int(3), neg4));
        let expected = bin(
            BinOp::Or,
            bin(BinOp::And, bin(BinOp::Lt, arith, int(5)), var("b")),
            var("c"),
        );
        assert_eq!(*value, expected);
    }

    #[test]
    fn colon_argument_and_stepped_slice() {
        let body = body_of("a(1:2:5, :) = b");
        let StmtKind::IndexedAssign { args, .. } = &body[0].kind else { panic!() };
        assert_eq!(args[1], IndexArg::Colon);
        let IndexArg::Slice(r) = &args[0] else { panic!() };
        assert_eq!(r.step.as_deref(), Some(&int(2)));
    }

    #[test]
    fn directives_in_prologue_and_body() {
        let p = parse_src("$ 'a'\n$ 'b'\nfunction int z = f()\n$ 'c'\nend\n").unwrap();
        let names: Vec<_> = p.directives_prologue.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["a", "b"]);
        assert_eq!(p.function.body[0].kind, StmtKind::Directive("c".into()));
        assert_eq!(p.function.body[0].span.line, 4);
    }

    #[test]
    fn directive_with_trailing_tokens_is_rejected() {
        assert!(parse_src("$ 'a' x\nfunction int z = f()\nend\n").is_err());
    }

    #[test]
    fn if_else() {
        let body = body_of("if (a < 1)\n b = 1\nelse\n b = 2\nend");
        let StmtKind::If { then_body, else_body, .. } = &body[0].kind else { panic!() };
        assert_eq!(then_body.len(), 1);
        assert_eq!(else_body.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn malformed_range() {
        assert!(parse_src("function int z = f()\nfor i=0\nend\nend\n").is_err());
        assert!(parse_src("function int z = f()\nz = x(1:)\nend\n").is_err());
    }
}
