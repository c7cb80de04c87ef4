//! Argument files for `interp` and `run`.
//!
//! One block per argument, read as whitespace separated tokens:
//!
//! ```text
//! int 3
//! real 2.5
//! float 0.5
//! intarray 2 2
//! 1 2
//! 3 4
//! realarray 1 3
//! 0.5 1 1.5
//! ```
//!
//! Array elements are listed row by row.

use thiserror::Error;

use crate::array::NumArray;
use crate::ast::TymType;
use crate::interp::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArgsError {
    #[error("args file ended early, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("unknown argument kind `{0}`")]
    UnknownKind(String),
    #[error("bad {what} `{token}`")]
    BadNumber { what: &'static str, token: String },
    #[error("{name} expects {expected} arguments, the args file has {found}")]
    Count { name: String, expected: usize, found: usize },
    #[error("argument {index} of {name} must be {expected}, the args file has {found}")]
    Type { name: String, index: usize, expected: TymType, found: TymType },
}

struct Reader<'a> {
    tokens: std::str::SplitWhitespace<'a>,
}

impl<'a> Reader<'a> {
    fn token(&mut self, what: &'static str) -> Result<&'a str, ArgsError> {
        self.tokens.next().ok_or(ArgsError::UnexpectedEnd(what))
    }

    fn int32(&mut self, what: &'static str) -> Result<i32, ArgsError> {
        let t = self.token(what)?;
        t.parse().map_err(|_| ArgsError::BadNumber { what, token: t.to_string() })
    }

    fn dim(&mut self, what: &'static str) -> Result<usize, ArgsError> {
        let t = self.token(what)?;
        t.parse().map_err(|_| ArgsError::BadNumber { what, token: t.to_string() })
    }

    fn real(&mut self, what: &'static str) -> Result<f64, ArgsError> {
        let t = self.token(what)?;
        t.parse().map_err(|_| ArgsError::BadNumber { what, token: t.to_string() })
    }

    fn rows<T: Copy + Default>(
        &mut self,
        mut elem: impl FnMut(&mut Self) -> Result<T, ArgsError>,
    ) -> Result<NumArray<T>, ArgsError> {
        let r = self.dim("row count")?;
        let c = self.dim("column count")?;
        let mut rows = Vec::with_capacity(r);
        for _ in 0..r {
            let mut row = Vec::with_capacity(c);
            for _ in 0..c {
                row.push(elem(self)?);
            }
            rows.push(row);
        }
        Ok(if r == 0 || c == 0 { NumArray::zeros(r, c) } else { NumArray::from_rows(&rows) })
    }
}

/// Parses every argument block in `text`.
pub fn parse_args(text: &str) -> Result<Vec<Value>, ArgsError> {
    let mut rd = Reader { tokens: text.split_whitespace() };
    let mut out = Vec::new();
    while let Some(kind) = rd.tokens.next() {
        out.push(match kind {
            "int" => Value::Int(rd.int32("int")?),
            "real" => Value::Real(rd.real("real")?),
            "float" => Value::Float(rd.real("float")? as f32),
            "intarray" => Value::IntArray(rd.rows(|r| r.int32("element"))?),
            "realarray" => Value::RealArray(rd.rows(|r| r.real("element"))?),
            other => return Err(ArgsError::UnknownKind(other.to_string())),
        });
    }
    Ok(out)
}

/// Renders values in the args file format; `parse_args` reads it back.
pub fn write_args(values: &[Value]) -> String {
    fn block<T: Copy + Default>(out: &mut String, kind: &str, a: &NumArray<T>, f: impl Fn(T) -> String) {
        out.push_str(&format!("{kind} {} {}\n", a.rows(), a.cols()));
        for row in a.to_rows() {
            out.push_str(&row.into_iter().map(&f).collect::<Vec<_>>().join(" "));
            out.push('\n');
        }
    }
    let real = |v: f64| format!("{v:?}");
    let mut out = String::new();
    for v in values {
        match v {
            Value::Int(i) => out.push_str(&format!("int {i}\n")),
            Value::Real(r) => out.push_str(&format!("real {}\n", real(*r))),
            Value::Float(f) => out.push_str(&format!("float {:?}\n", f)),
            Value::IntArray(a) => block(&mut out, "intarray", a, |x| x.to_string()),
            Value::RealArray(a) => block(&mut out, "realarray", a, real),
        }
    }
    out
}

/// Whether `v` may be passed for a parameter of type `ty`. Scalars also
/// accept a 1x1 array of the matching kind, and float accepts a real.
pub fn accepts(ty: TymType, v: &Value) -> bool {
    match (ty, v) {
        (TymType::Int, Value::IntArray(a)) => a.len() == 1,
        (TymType::Real | TymType::Float, Value::RealArray(a)) => a.len() == 1,
        (TymType::Float, Value::Real(_)) => true,
        (ty, v) => v.ty() == ty,
    }
}

/// Checks argument count and types against a signature.
pub fn validate(name: &str, params: &[TymType], args: &[Value]) -> Result<(), ArgsError> {
    if params.len() != args.len() {
        return Err(ArgsError::Count { name: name.to_string(), expected: params.len(), found: args.len() });
    }
    for (k, (&ty, v)) in params.iter().zip(args).enumerate() {
        if !accepts(ty, v) {
            return Err(ArgsError::Type { name: name.to_string(), index: k + 1, expected: ty, found: v.ty() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_kinds() {
        let v = parse_args("int 3\nreal 2.5\nfloat 0.5\nintarray 2 2\n1 2\n3 4\nrealarray 1 2\n0.5 -1e3\n").unwrap();
        assert_eq!(v[0], Value::Int(3));
        assert_eq!(v[1], Value::Real(2.5));
        assert_eq!(v[2], Value::Float(0.5));
        assert_eq!(v[3], Value::IntArray(NumArray::from_rows(&[vec![1, 2], vec![3, 4]])));
        assert_eq!(v[4], Value::RealArray(NumArray::from_rows(&[vec![0.5, -1000.0]])));
    }

    #[test]
    fn empty_arrays() {
        let v = parse_args("intarray 0 3").unwrap();
        let Value::IntArray(a) = &v[0] else { panic!() };
        assert_eq!((a.rows(), a.cols()), (0, 3));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_args("int"), Err(ArgsError::UnexpectedEnd("int")));
        assert!(matches!(parse_args("int 4294967296"), Err(ArgsError::BadNumber { .. })));
        assert!(matches!(parse_args("cell 1"), Err(ArgsError::UnknownKind(_))));
        assert!(matches!(parse_args("intarray 2 2\n1 2 3"), Err(ArgsError::UnexpectedEnd(_))));
    }

    #[test]
    fn write_then_parse() {
        let vals = vec![
            Value::Int(-7),
            Value::Real(0.1),
            Value::RealArray(NumArray::from_rows(&[vec![1.0 / 3.0, 2.0], vec![1e-300, -0.0]])),
            Value::IntArray(NumArray::from_rows(&[vec![i32::MIN, i32::MAX]])),
        ];
        assert_eq!(parse_args(&write_args(&vals)).unwrap(), vals);
    }

    #[test]
    fn validation() {
        use TymType::*;
        let one = Value::IntArray(NumArray::filled(1, 1, 5));
        assert!(validate("f", &[Int], std::slice::from_ref(&one)).is_ok());
        assert!(validate("f", &[Int, Int], std::slice::from_ref(&one)).is_err());
        assert!(validate("f", &[RealArray], &[one]).is_err());
        assert!(validate("f", &[Float], &[Value::Real(1.0)]).is_ok());
    }
}
