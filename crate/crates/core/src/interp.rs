//! Reference interpreter over [`TypedProgram`]s.
//!
//! Semantics follow the standalone C++ lowering exactly: integer arithmetic
//! runs on 64-bit intermediates and saturates to int32 when stored, real
//! values stored as int truncate toward zero and saturate, `for` loops
//! re-evaluate their bound and step on every iteration like the emitted C
//! loop. Unlike compiled code, every access is bound checked; an access that
//! would fail while `no_check_ranges` is in force is reported as
//! [`RuntimeError::UndefinedBehavior`].

use thiserror::Error;

use crate::array::{saturate_f64, saturate_i64, ArrayError, IdxSel, NumArray};
use crate::ast::{BinOp, TymType};
use crate::typed::*;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i32),
    Real(f64),
    Float(f32),
    IntArray(NumArray<i32>),
    RealArray(NumArray<f64>),
}

impl Value {
    pub fn ty(&self) -> TymType {
        match self {
            Value::Int(_) => TymType::Int,
            Value::Real(_) => TymType::Real,
            Value::Float(_) => TymType::Float,
            Value::IntArray(_) => TymType::IntArray,
            Value::RealArray(_) => TymType::RealArray,
        }
    }

    fn zero(ty: TymType) -> Value {
        match ty {
            TymType::Int => Value::Int(0),
            TymType::Real => Value::Real(0.0),
            TymType::Float => Value::Float(0.0),
            TymType::IntArray => Value::IntArray(NumArray::zeros(0, 0)),
            TymType::RealArray => Value::RealArray(NumArray::zeros(0, 0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("index out of bounds: {0}")]
    Bounds(String),
    #[error("nonconformant arguments: {0}")]
    ShapeMismatch(String),
    #[error("out-of-bounds access with range checks disabled: {0}")]
    UndefinedBehavior(String),
    #[error("integer division by zero")]
    DivisionByZero,
    #[error("integer overflow in intermediate result")]
    IntegerOverflow,
    #[error("`{0}` is read before it is written")]
    UninitializedRead(String),
    #[error("slice step must be positive, found {0}")]
    InvalidStep(i64),
    #[error("negative array dimension {0}")]
    NegativeDimension(i64),
    #[error("bad arguments: {0}")]
    ArgumentMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Normal,
    ErrorReturn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecResult {
    pub return_values: Vec<Value>,
    pub diagnostics: Vec<String>,
    pub exit: Exit,
}

/// Intermediate result of evaluating an expression. Integers are kept at
/// 64 bits until they are stored.
#[derive(Debug, Clone)]
enum EVal {
    Int(i64),
    Real(f64),
    Float(f32),
    IntArray(NumArray<i32>),
    RealArray(NumArray<f64>),
}

impl EVal {
    fn as_i64(&self) -> i64 {
        match self {
            EVal::Int(v) => *v,
            other => unreachable!("sema guarantees an int here, found {other:?}"),
        }
    }

    fn as_f64(&self) -> f64 {
        match self {
            EVal::Int(v) => *v as f64,
            EVal::Real(v) => *v,
            EVal::Float(v) => f64::from(*v),
            _ => unreachable!("scalar expected"),
        }
    }

    fn as_f32(&self) -> f32 {
        match self {
            EVal::Int(v) => *v as f32,
            EVal::Real(v) => *v as f32,
            EVal::Float(v) => *v,
            _ => unreachable!("scalar expected"),
        }
    }

    fn truthy(&self) -> bool {
        match self {
            EVal::Int(v) => *v != 0,
            EVal::Real(v) => *v != 0.0,
            EVal::Float(v) => *v != 0.0,
            _ => unreachable!("scalar condition expected"),
        }
    }

    /// Converts to the storage form of `ty`.
    fn store_as(self, ty: TymType) -> Value {
        match (ty, self) {
            (TymType::Int, EVal::Int(v)) => Value::Int(saturate_i64(v)),
            (TymType::Int, EVal::Real(v)) => Value::Int(saturate_f64(v)),
            (TymType::Int, EVal::Float(v)) => Value::Int(saturate_f64(f64::from(v))),
            (TymType::Real, v) => Value::Real(v.as_f64()),
            (TymType::Float, v) => Value::Float(v.as_f32()),
            (TymType::IntArray, EVal::IntArray(a)) => Value::IntArray(a),
            (TymType::RealArray, EVal::RealArray(a)) => Value::RealArray(a),
            (ty, v) => unreachable!("sema rejects storing {v:?} as {ty}"),
        }
    }
}

impl From<Value> for EVal {
    fn from(v: Value) -> Self {
        match v {
            Value::Int(i) => EVal::Int(i64::from(i)),
            Value::Real(r) => EVal::Real(r),
            Value::Float(f) => EVal::Float(f),
            Value::IntArray(a) => EVal::IntArray(a),
            Value::RealArray(a) => EVal::RealArray(a),
        }
    }
}

enum Flow {
    Normal,
    ErrorReturn,
}

type RResult<T> = Result<T, RuntimeError>;

/// Runs `tp` on `args`. Scalar parameters also accept 1x1 arrays of the
/// matching element kind.
pub fn run(tp: &TypedProgram, args: &[Value]) -> RResult<ExecResult> {
    let args = bind_args(tp, args)?;
    let mut m = Machine { tp, env: vec![None; tp.symbols.len()], diagnostics: Vec::new() };
    for (&id, v) in tp.params.iter().zip(args) {
        m.env[id] = Some(v);
    }
    let ret = tp.return_var;
    m.env[ret] = (!tp.header_state.no_init_vars).then(|| Value::zero(tp.return_type()));

    match m.block(&tp.body)? {
        Flow::ErrorReturn => Ok(ExecResult {
            return_values: Vec::new(),
            diagnostics: m.diagnostics,
            exit: Exit::ErrorReturn,
        }),
        Flow::Normal => {
            let v = m.env[ret]
                .clone()
                .ok_or_else(|| RuntimeError::UninitializedRead(tp.symbol(ret).name.clone()))?;
            Ok(ExecResult { return_values: vec![v], diagnostics: m.diagnostics, exit: Exit::Normal })
        }
    }
}

fn bind_args(tp: &TypedProgram, args: &[Value]) -> RResult<Vec<Value>> {
    let types = tp.param_types();
    if types.len() != args.len() {
        return Err(RuntimeError::ArgumentMismatch(format!(
            "{} expects {} arguments, got {}",
            tp.name,
            types.len(),
            args.len()
        )));
    }
    types
        .iter()
        .zip(args)
        .enumerate()
        .map(|(n, (&ty, arg))| {
            let unwrapped = match (ty, arg) {
                (TymType::Int, Value::IntArray(a)) if a.len() == 1 => Some(Value::Int(a.data()[0])),
                (TymType::Real, Value::RealArray(a)) if a.len() == 1 => Some(Value::Real(a.data()[0])),
                (TymType::Float, Value::RealArray(a)) if a.len() == 1 => {
                    Some(Value::Float(a.data()[0] as f32))
                }
                (TymType::Float, Value::Real(r)) => Some(Value::Float(*r as f32)),
                (ty, v) if v.ty() == ty => Some(v.clone()),
                _ => None,
            };
            unwrapped.ok_or_else(|| {
                RuntimeError::ArgumentMismatch(format!(
                    "argument {} of {} must be {ty}, got {}",
                    n + 1,
                    tp.name,
                    arg.ty()
                ))
            })
        })
        .collect()
}

struct Machine<'p> {
    tp: &'p TypedProgram,
    env: Vec<Option<Value>>,
    diagnostics: Vec<String>,
}

fn access_error(e: ArrayError, state: DirectiveState) -> RuntimeError {
    match e {
        ArrayError::OutOfBounds { .. } if state.no_check_ranges => {
            RuntimeError::UndefinedBehavior(e.to_string())
        }
        ArrayError::OutOfBounds { .. } => RuntimeError::Bounds(e.to_string()),
        ArrayError::ShapeMismatch(..) => RuntimeError::ShapeMismatch(e.to_string()),
        ArrayError::InvalidStep(s) => RuntimeError::InvalidStep(s),
    }
}

/// Slice selectors are always checked, like the runtime's `index`/`assign`.
fn slice_error(e: ArrayError) -> RuntimeError {
    access_error(e, DirectiveState::default())
}

impl From<ArrayError> for RuntimeError {
    fn from(e: ArrayError) -> Self {
        slice_error(e)
    }
}

impl<'p> Machine<'p> {
    fn read(&self, id: VarId) -> RResult<&Value> {
        self.env[id]
            .as_ref()
            .ok_or_else(|| RuntimeError::UninitializedRead(self.tp.symbol(id).name.clone()))
    }

    fn block(&mut self, stmts: &[TStmt]) -> RResult<Flow> {
        for s in stmts {
            if let Flow::ErrorReturn = self.stmt(s)? {
                return Ok(Flow::ErrorReturn);
            }
        }
        Ok(Flow::Normal)
    }

    fn shift(v: i64, state: DirectiveState) -> RResult<i64> {
        if state.zero_based_arrays {
            Ok(v)
        } else {
            v.checked_sub(1).ok_or(RuntimeError::IntegerOverflow)
        }
    }

    fn indices(&mut self, exprs: &[TExpr], state: DirectiveState) -> RResult<Vec<i64>> {
        exprs.iter().map(|e| Self::shift(self.expr(e, state)?.as_i64(), state)).collect()
    }

    fn selectors(&mut self, sels: &[TSel], state: DirectiveState) -> RResult<Vec<IdxSel>> {
        let mut out = Vec::with_capacity(sels.len());
        for sel in sels {
            out.push(match sel {
                TSel::Colon => IdxSel::Colon,
                TSel::Scalar(e) => IdxSel::Scalar(Self::shift(self.expr(e, state)?.as_i64(), state)?),
                TSel::Range { start, step, stop } => {
                    let a = self.expr(start, state)?.as_i64();
                    let s = match step {
                        Some(e) => self.expr(e, state)?.as_i64(),
                        None => 1,
                    };
                    let b = self.expr(stop, state)?.as_i64();
                    // One based a:b selects [a-1, b); zero based a:b selects [a, b+1).
                    let (lo, hi) = if state.zero_based_arrays {
                        (a, b.checked_add(1).ok_or(RuntimeError::IntegerOverflow)?)
                    } else {
                        (a.checked_sub(1).ok_or(RuntimeError::IntegerOverflow)?, b)
                    };
                    IdxSel::Range { start: lo, stop: hi, step: s }
                }
            });
        }
        Ok(out)
    }

    fn stmt(&mut self, s: &TStmt) -> RResult<Flow> {
        let state = s.state;
        match &s.kind {
            TStmtKind::Directive(_) => {}
            TStmtKind::Decl { var, init } => {
                let ty = self.tp.symbol(*var).ty;
                self.env[*var] = match init {
                    Some(e) => Some(self.expr(e, state)?.store_as(ty)),
                    None if state.no_init_vars => None,
                    None => Some(Value::zero(ty)),
                };
            }
            TStmtKind::Assign { var, value } => {
                let v = self.expr(value, state)?.store_as(self.tp.symbol(*var).ty);
                self.env[*var] = Some(v);
            }
            TStmtKind::ElemStore { array, indices, value } => {
                let v = self.expr(value, state)?;
                let idx = self.indices(indices, state)?;
                let name = &self.tp.symbol(*array).name;
                let slot = self.env[*array]
                    .as_mut()
                    .ok_or_else(|| RuntimeError::UninitializedRead(name.clone()))?;
                match slot {
                    Value::IntArray(a) => {
                        let Value::Int(x) = v.store_as(TymType::Int) else { unreachable!() };
                        a.set(&idx, x).map_err(|e| access_error(e, state))?;
                    }
                    Value::RealArray(a) => {
                        a.set(&idx, v.as_f64()).map_err(|e| access_error(e, state))?;
                    }
                    _ => unreachable!("sema checked the target is an array"),
                }
            }
            TStmtKind::SliceAssign { array, sels, value } => {
                let v = self.expr(value, state)?;
                let sels = self.selectors(sels, state)?;
                let name = &self.tp.symbol(*array).name;
                let slot = self.env[*array]
                    .as_mut()
                    .ok_or_else(|| RuntimeError::UninitializedRead(name.clone()))?;
                match (slot, v) {
                    (Value::IntArray(a), EVal::IntArray(src)) => a.assign(&sels, &src)?,
                    (Value::RealArray(a), EVal::RealArray(src)) => a.assign(&sels, &src)?,
                    (Value::IntArray(a), scalar) => {
                        let Value::Int(x) = scalar.store_as(TymType::Int) else { unreachable!() };
                        a.assign(&sels, &NumArray::filled(1, 1, x))?
                    }
                    (Value::RealArray(a), scalar) => {
                        a.assign(&sels, &NumArray::filled(1, 1, scalar.as_f64()))?
                    }
                    _ => unreachable!("sema checked slice assignment types"),
                }
            }
            TStmtKind::CreateArray { var, dims } => {
                let mut ds = Vec::with_capacity(2);
                for d in dims {
                    let n = self.expr(d, state)?.as_i64();
                    if n < 0 {
                        return Err(RuntimeError::NegativeDimension(n));
                    }
                    ds.push(n as usize);
                }
                let (r, c) = if ds.len() == 1 { (ds[0], ds[0]) } else { (ds[0], ds[1]) };
                // Allocation without zero fill is still deterministic here.
                self.env[*var] = Some(match self.tp.symbol(*var).ty {
                    TymType::IntArray => Value::IntArray(NumArray::zeros(r, c)),
                    _ => Value::RealArray(NumArray::zeros(r, c)),
                });
            }
            TStmtKind::Error { message } => {
                self.diagnostics.push(format!("error: {message}"));
                return Ok(Flow::ErrorReturn);
            }
            TStmtKind::If { cond, then_body, else_body } => {
                if self.expr(cond, state)?.truthy() {
                    return self.block(then_body);
                } else if let Some(else_body) = else_body {
                    return self.block(else_body);
                }
            }
            TStmtKind::For { var, start, step, stop, descending, body } => {
                let first = self.expr(start, state)?.store_as(TymType::Int);
                self.env[*var] = Some(first);
                loop {
                    let Value::Int(cur) = self.read(*var)?.clone() else { unreachable!() };
                    let bound = self.expr(stop, state)?.as_i64();
                    let go = if *descending { i64::from(cur) >= bound } else { i64::from(cur) <= bound };
                    if !go {
                        break;
                    }
                    if let Flow::ErrorReturn = self.block(body)? {
                        return Ok(Flow::ErrorReturn);
                    }
                    let inc = match step {
                        Some(e) => self.expr(e, state)?.as_i64(),
                        None => 1,
                    };
                    let Value::Int(cur) = self.read(*var)?.clone() else { unreachable!() };
                    let next = i64::from(cur).checked_add(inc).ok_or(RuntimeError::IntegerOverflow)?;
                    self.env[*var] = Some(Value::Int(saturate_i64(next)));
                }
            }
        }
        Ok(Flow::Normal)
    }

    fn expr(&mut self, e: &TExpr, state: DirectiveState) -> RResult<EVal> {
        Ok(match &e.kind {
            TExprKind::Int(v) => EVal::Int(*v),
            TExprKind::Real(v) => EVal::Real(*v),
            TExprKind::Var(id) => self.read(*id)?.clone().into(),
            TExprKind::Rows(inner) => match self.expr(inner, state)? {
                EVal::IntArray(a) => EVal::Int(a.rows() as i64),
                EVal::RealArray(a) => EVal::Int(a.rows() as i64),
                _ => unreachable!(),
            },
            TExprKind::Columns(inner) => match self.expr(inner, state)? {
                EVal::IntArray(a) => EVal::Int(a.cols() as i64),
                EVal::RealArray(a) => EVal::Int(a.cols() as i64),
                _ => unreachable!(),
            },
            TExprKind::ElemLoad { array, indices } => {
                let idx = self.indices(indices, state)?;
                match self.read(*array)? {
                    Value::IntArray(a) => EVal::Int(i64::from(a.get(&idx).map_err(|e| access_error(e, state))?)),
                    Value::RealArray(a) => EVal::Real(a.get(&idx).map_err(|e| access_error(e, state))?),
                    _ => unreachable!(),
                }
            }
            TExprKind::Slice { array, sels } => {
                let sels = self.selectors(sels, state)?;
                match self.read(*array)? {
                    Value::IntArray(a) => EVal::IntArray(a.index(&sels)?),
                    Value::RealArray(a) => EVal::RealArray(a.index(&sels)?),
                    _ => unreachable!(),
                }
            }
            TExprKind::Neg(inner) => match self.expr(inner, state)? {
                EVal::Int(v) => EVal::Int(v.checked_neg().ok_or(RuntimeError::IntegerOverflow)?),
                EVal::Real(v) => EVal::Real(-v),
                EVal::Float(v) => EVal::Float(-v),
                EVal::IntArray(a) => EVal::IntArray(a.map(|x| saturate_i64(-i64::from(x)))),
                EVal::RealArray(a) => EVal::RealArray(a.map(|x| -x)),
            },
            TExprKind::Binary(op, l, r) => self.binary(*op, l, r, state)?,
        })
    }

    fn binary(&mut self, op: BinOp, l: &TExpr, r: &TExpr, state: DirectiveState) -> RResult<EVal> {
        match op {
            BinOp::And => {
                let v = self.expr(l, state)?.truthy() && self.expr(r, state)?.truthy();
                return Ok(EVal::Int(i64::from(v)));
            }
            BinOp::Or => {
                let v = self.expr(l, state)?.truthy() || self.expr(r, state)?.truthy();
                return Ok(EVal::Int(i64::from(v)));
            }
            _ => {}
        }
        let a = self.expr(l, state)?;
        let b = self.expr(r, state)?;
        if op.is_comparison() {
            return Ok(EVal::Int(i64::from(compare(op, &a, &b))));
        }
        arith(op, a, b)
    }
}

fn cmp<T: PartialOrd>(op: BinOp, a: T, b: T) -> bool {
    match op {
        BinOp::Eq => a == b,
        BinOp::Ne => a != b,
        BinOp::Lt => a < b,
        BinOp::Le => a <= b,
        BinOp::Gt => a > b,
        BinOp::Ge => a >= b,
        _ => unreachable!(),
    }
}

/// Compares under C's usual arithmetic conversions.
fn compare(op: BinOp, a: &EVal, b: &EVal) -> bool {
    match (a, b) {
        (EVal::Int(x), EVal::Int(y)) => cmp(op, x, y),
        (EVal::Real(_), _) | (_, EVal::Real(_)) => cmp(op, a.as_f64(), b.as_f64()),
        _ => cmp(op, a.as_f32(), b.as_f32()),
    }
}

fn int_op(op: BinOp, x: i64, y: i64) -> RResult<i64> {
    match op {
        BinOp::Add => x.checked_add(y),
        BinOp::Sub => x.checked_sub(y),
        BinOp::Mul => x.checked_mul(y),
        BinOp::Div => {
            if y == 0 {
                return Err(RuntimeError::DivisionByZero);
            }
            x.checked_div(y)
        }
        _ => unreachable!(),
    }
    .ok_or(RuntimeError::IntegerOverflow)
}

fn real_op(op: BinOp, x: f64, y: f64) -> f64 {
    match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div => x / y,
        _ => unreachable!(),
    }
}

fn float_op(op: BinOp, x: f32, y: f32) -> f32 {
    match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div => x / y,
        _ => unreachable!(),
    }
}

fn arith(op: BinOp, a: EVal, b: EVal) -> RResult<EVal> {
    use EVal::*;
    let sat = |v: RResult<i64>| v.map(saturate_i64);
    Ok(match (a, b) {
        (Int(x), Int(y)) => Int(int_op(op, x, y)?),
        (a @ Real(_), b) | (a, b @ Real(_)) if !is_array(&a) && !is_array(&b) => {
            Real(real_op(op, a.as_f64(), b.as_f64()))
        }
        (a @ (Float(_) | Int(_)), b @ (Float(_) | Int(_))) => Float(float_op(op, a.as_f32(), b.as_f32())),

        (IntArray(x), IntArray(y)) => {
            IntArray(x.zip_with(&y, |p, q| sat(int_op(op, i64::from(p), i64::from(q))))?)
        }
        (RealArray(x), RealArray(y)) => RealArray(x.zip_with(&y, |p, q| Ok::<_, RuntimeError>(real_op(op, p, q)))?),

        (IntArray(x), Int(s)) => IntArray(x.try_map(|p| sat(int_op(op, i64::from(p), s)))?),
        (Int(s), IntArray(x)) => IntArray(x.try_map(|p| sat(int_op(op, s, i64::from(p))))?),
        (IntArray(x), s @ Real(_)) => {
            let s = s.as_f64();
            RealArray(x.map(|p| real_op(op, f64::from(p), s)))
        }
        (s @ Real(_), IntArray(x)) => {
            let s = s.as_f64();
            RealArray(x.map(|p| real_op(op, s, f64::from(p))))
        }
        (RealArray(x), s) => {
            let s = s.as_f64();
            RealArray(x.map(|p| real_op(op, p, s)))
        }
        (s, RealArray(x)) => {
            let s = s.as_f64();
            RealArray(x.map(|p| real_op(op, s, p)))
        }
        (a, b) => unreachable!("sema rejects {a:?} {} {b:?}", op.symbol()),
    })
}

fn is_array(v: &EVal) -> bool {
    matches!(v, EVal::IntArray(_) | EVal::RealArray(_))
}
