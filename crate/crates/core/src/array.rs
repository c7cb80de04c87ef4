//! Column-major numeric arrays with shared, copy-on-write storage, selector
//! based slicing, and the saturating int32 element semantics used by both the
//! interpreter and the generated code.

use std::rc::Rc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrayError {
    #[error("index {index} out of bound {bound}")]
    OutOfBounds { index: i64, bound: usize },
    #[error("nonconformant arguments ({0}x{1} vs {2}x{3})")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("invalid range selector with step {0}")]
    InvalidStep(i64),
}

/// Clamps a 64-bit integer into the int32 range.
pub fn saturate_i64(v: i64) -> i32 {
    v.clamp(i32::MIN as i64, i32::MAX as i64) as i32
}

/// Truncates toward zero, then clamps into the int32 range. NaN maps to 0.
pub fn saturate_f64(v: f64) -> i32 {
    // `as` on floats truncates, saturates and maps NaN to zero.
    v as i32
}

/// A single selector: one index, a half-open stepped range or the full
/// extent of a dimension. All positions are zero based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdxSel {
    Scalar(i64),
    /// `{start, start + step, ...}` strictly below `stop`; `step` must be positive.
    Range { start: i64, stop: i64, step: i64 },
    Colon,
}

impl IdxSel {
    /// Expands the selector against a dimension of `extent` elements,
    /// checking every position.
    pub fn positions(&self, extent: usize) -> Result<Vec<usize>, ArrayError> {
        let check = |i: i64| {
            if i < 0 || i as u64 >= extent as u64 {
                Err(ArrayError::OutOfBounds { index: i + 1, bound: extent })
            } else {
                Ok(i as usize)
            }
        };
        match *self {
            IdxSel::Scalar(i) => Ok(vec![check(i)?]),
            IdxSel::Colon => Ok((0..extent).collect()),
            IdxSel::Range { start, stop, step } => {
                if step <= 0 {
                    return Err(ArrayError::InvalidStep(step));
                }
                let mut out = Vec::new();
                let mut i = start;
                while i < stop {
                    out.push(check(i)?);
                    i = match i.checked_add(step) {
                        Some(n) => n,
                        None => break,
                    };
                }
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumArray<T> {
    rows: usize,
    cols: usize,
    data: Rc<Vec<T>>,
}

impl<T: Copy + Default> NumArray<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        NumArray { rows, cols, data: Rc::new(vec![T::default(); rows * cols]) }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        NumArray { rows, cols, data: Rc::new(vec![value; rows * cols]) }
    }

    /// Builds an array from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows * cols");
        NumArray { rows, cols, data: Rc::new(data) }
    }

    /// Builds an array from a list of rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for j in 0..c {
            for row in rows {
                assert_eq!(row.len(), c, "ragged rows");
                data.push(row[j]);
            }
        }
        NumArray { rows: r, cols: c, data: Rc::new(data) }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Number of handles sharing this array's storage.
    pub fn share_count(&self) -> usize {
        Rc::strong_count(&self.data)
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.data[i + j * self.rows]).collect()).collect()
    }

    fn offset(&self, i: i64, j: i64) -> Result<usize, ArrayError> {
        if i < 0 || i as u64 >= self.rows as u64 {
            return Err(ArrayError::OutOfBounds { index: i + 1, bound: self.rows });
        }
        if j < 0 || j as u64 >= self.cols as u64 {
            return Err(ArrayError::OutOfBounds { index: j + 1, bound: self.cols });
        }
        Ok(i as usize + j as usize * self.rows)
    }

    fn linear(&self, k: i64) -> Result<usize, ArrayError> {
        if k < 0 || k as u64 >= self.len() as u64 {
            return Err(ArrayError::OutOfBounds { index: k + 1, bound: self.len() });
        }
        Ok(k as usize)
    }

    /// Checked element read; one index is linear (column-major), two are
    /// `(row, column)`.
    pub fn get(&self, idx: &[i64]) -> Result<T, ArrayError> {
        let off = match *idx {
            [k] => self.linear(k)?,
            [i, j] => self.offset(i, j)?,
            _ => panic!("1 or 2 indices expected"),
        };
        Ok(self.data[off])
    }

    /// Checked element write. Storage shared with other handles is copied
    /// first.
    pub fn set(&mut self, idx: &[i64], value: T) -> Result<(), ArrayError> {
        let off = match *idx {
            [k] => self.linear(k)?,
            [i, j] => self.offset(i, j)?,
            _ => panic!("1 or 2 indices expected"),
        };
        Rc::make_mut(&mut self.data)[off] = value;
        Ok(())
    }

    /// Shape produced by a single linear selector: column vectors keep their
    /// orientation, everything else yields a row.
    fn linear_shape(&self, sel: &IdxSel, n: usize) -> (usize, usize) {
        let column = matches!(sel, IdxSel::Colon) || (self.cols == 1 && self.rows != 1);
        if column {
            (n, 1)
        } else {
            (1, n)
        }
    }

    /// Gathers the selected elements into a fresh array.
    pub fn index(&self, sels: &[IdxSel]) -> Result<NumArray<T>, ArrayError> {
        match sels {
            [sel] => {
                let pos = sel.positions(self.len())?;
                let (r, c) = self.linear_shape(sel, pos.len());
                Ok(NumArray::from_col_major(r, c, pos.iter().map(|&k| self.data[k]).collect()))
            }
            [rs, cs] => {
                let ri = rs.positions(self.rows)?;
                let ci = cs.positions(self.cols)?;
                let mut data = Vec::with_capacity(ri.len() * ci.len());
                for &j in &ci {
                    for &i in &ri {
                        data.push(self.data[i + j * self.rows]);
                    }
                }
                Ok(NumArray::from_col_major(ri.len(), ci.len(), data))
            }
            _ => panic!("1 or 2 selectors expected"),
        }
    }

    /// Overwrites the selected positions with `src`. A 1x1 source is
    /// broadcast over the selection.
    pub fn assign(&mut self, sels: &[IdxSel], src: &NumArray<T>) -> Result<(), ArrayError> {
        let targets: Vec<usize> = match sels {
            [sel] => {
                let pos = sel.positions(self.len())?;
                if src.len() != 1 && src.len() != pos.len() {
                    let (r, c) = self.linear_shape(sel, pos.len());
                    return Err(ArrayError::ShapeMismatch(r, c, src.rows, src.cols));
                }
                pos
            }
            [rs, cs] => {
                let ri = rs.positions(self.rows)?;
                let ci = cs.positions(self.cols)?;
                if src.len() != 1 && (src.rows, src.cols) != (ri.len(), ci.len()) {
                    return Err(ArrayError::ShapeMismatch(ri.len(), ci.len(), src.rows, src.cols));
                }
                let rows = self.rows;
                ci.iter().flat_map(|&j| ri.iter().map(move |&i| i + j * rows)).collect()
            }
            _ => panic!("1 or 2 selectors expected"),
        };
        let data = Rc::make_mut(&mut self.data);
        for (n, &k) in targets.iter().enumerate() {
            data[k] = if src.len() == 1 { src.data[0] } else { src.data[n] };
        }
        Ok(())
    }

    pub fn map<U: Copy + Default>(&self, f: impl Fn(T) -> U) -> NumArray<U> {
        NumArray::from_col_major(self.rows, self.cols, self.data.iter().map(|&x| f(x)).collect())
    }

    pub fn try_map<U: Copy + Default, E>(&self, f: impl Fn(T) -> Result<U, E>) -> Result<NumArray<U>, E> {
        let data = self.data.iter().map(|&x| f(x)).collect::<Result<Vec<_>, E>>()?;
        Ok(NumArray::from_col_major(self.rows, self.cols, data))
    }

    /// Elementwise combination of two equally shaped arrays; a 1x1 operand
    /// broadcasts.
    pub fn zip_with<U: Copy + Default, R: Copy + Default, E: From<ArrayError>>(
        &self,
        other: &NumArray<U>,
        f: impl Fn(T, U) -> Result<R, E>,
    ) -> Result<NumArray<R>, E> {
        let shape = if (self.rows, self.cols) == (other.rows, other.cols) || other.len() == 1 {
            (self.rows, self.cols)
        } else if self.len() == 1 {
            (other.rows, other.cols)
        } else {
            return Err(ArrayError::ShapeMismatch(self.rows, self.cols, other.rows, other.cols).into());
        };
        let n = shape.0 * shape.1;
        let mut data = Vec::with_capacity(n);
        for k in 0..n {
            let a = if self.len() == 1 { self.data[0] } else { self.data[k] };
            let b = if other.len() == 1 { other.data[0] } else { other.data[k] };
            data.push(f(a, b)?);
        }
        Ok(NumArray::from_col_major(shape.0, shape.1, data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_to_nine() -> NumArray<i32> {
        NumArray::from_col_major(3, 3, (1..=9).collect())
    }

    /// Offset oracle for column-major storage.
    fn naive(a: &NumArray<i32>, i: usize, j: usize) -> i32 {
        a.data()[i + j * a.rows()]
    }

    #[test]
    fn element_offsets() {
        let a = one_to_nine();
        assert_eq!(a.get(&[1, 1]), Ok(naive(&a, 1, 1)));
        assert_eq!(a.get(&[1, 1]), Ok(5));
        assert!(matches!(a.get(&[3, 0]), Err(ArrayError::OutOfBounds { .. })));
        assert_eq!(a.get(&[7]), Ok(8));
    }

    #[test]
    fn zero_sized() {
        let a: NumArray<i32> = NumArray::zeros(0, 5);
        assert_eq!(a.len(), 0);
        assert!(a.get(&[0, 0]).is_err());
    }

    #[test]
    fn slicing() {
        let a = one_to_nine();
        let r = IdxSel::Range { start: 0, stop: 2, step: 1 };
        assert_eq!(a.index(&[r, r]).unwrap().to_rows(), vec![vec![1, 4], vec![2, 5]]);
        let col = a.index(&[IdxSel::Colon, IdxSel::Scalar(0)]).unwrap();
        assert_eq!((col.rows(), col.cols()), (3, 1));
        let big: NumArray<i32> = NumArray::zeros(5, 7);
        let block = big
            .index(&[IdxSel::Range { start: 0, stop: 4, step: 1 }, IdxSel::Range { start: 1, stop: 6, step: 1 }])
            .unwrap();
        assert_eq!((block.rows(), block.cols()), (4, 5));
    }

    #[test]
    fn copy_on_write() {
        let a = one_to_nine();
        let mut b = a.clone();
        assert_eq!(a.share_count(), 2);
        b.set(&[0, 0], 100).unwrap();
        assert_eq!(a.get(&[0, 0]), Ok(1));
        assert_eq!(b.get(&[0, 0]), Ok(100));
        assert_eq!(a.share_count(), 1);
        assert_eq!(b.share_count(), 1);
    }

    #[test]
    fn assign_block_then_sum() {
        let mut z: NumArray<i32> = NumArray::zeros(3, 3);
        let r = IdxSel::Range { start: 0, stop: 2, step: 1 };
        z.assign(&[r, r], &NumArray::filled(2, 2, 1)).unwrap();
        assert_eq!(z.data().iter().sum::<i32>(), 4);
        assert!(matches!(
            z.assign(&[r, r], &NumArray::filled(3, 2, 1)),
            Err(ArrayError::ShapeMismatch(..))
        ));
    }

    #[test]
    fn saturation() {
        assert_eq!(saturate_i64(1 << 31), i32::MAX);
        assert_eq!(saturate_i64(-(1 << 40)), i32::MIN);
        assert_eq!(saturate_f64(-2.9), -2);
        assert_eq!(saturate_f64(1e20), i32::MAX);
        assert_eq!(saturate_f64(f64::NAN), 0);
    }
}
