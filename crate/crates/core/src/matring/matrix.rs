use std::fmt;
use std::ops;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galois::{Elem, Embedding, FieldRef};

/// Dense row-major matrix over a finite field.
///
/// Vectors acted on by a matrix are columns, so `A · x` multiplies on the
/// left. Square matrices double as elements of `M_ℓ(K)`.
#[derive(Clone)]
pub struct Matrix {
    field: FieldRef,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn new(field: &FieldRef, rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(bad) = data.iter().find(|e| !field.contains(**e)) {
            return Err(Error::NotInField(bad.0));
        }
        Ok(Self { field: field.clone(), rows, cols, data })
    }

    pub fn from_rows(field: &FieldRef, rows: &[Vec<Elem>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(field, rows.len(), cols, rows.concat())
    }

    /// Convenience constructor from raw encodings.
    pub fn from_u32(field: &FieldRef, rows: &[&[u32]]) -> Result<Self> {
        let rows: Vec<Vec<Elem>> = rows.iter().map(|r| r.iter().map(|&x| Elem(x)).collect()).collect();
        Self::from_rows(field, &rows)
    }

    pub fn zeros(field: &FieldRef, rows: usize, cols: usize) -> Self {
        Self { field: field.clone(), rows, cols, data: vec![Elem::ZERO; rows * cols] }
    }

    pub fn identity(field: &FieldRef, n: usize) -> Self {
        Self::scalar(field, n, Elem::ONE)
    }

    pub fn scalar(field: &FieldRef, n: usize, c: Elem) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|r| (0..self.cols).all(|c| self.get(r, c) == if r == c { Elem::ONE } else { Elem::ZERO }))
    }

    fn same_field(&self, other: &Matrix) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = f.add(*o, f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.neg(a)).collect(),
        }
    }

    pub fn scale(&self, c: Elem) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// `self · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).fold(Elem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect())
    }

    /// Row vector times matrix: `x · self`.
    pub fn vec_mul(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![Elem::ZERO; self.cols];
        for (r, &a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(a, b));
            }
        }
        Ok(out)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", self.rows, self.cols)))
        }
    }

    /// `self^e`; negative exponents require an invertible matrix.
    pub fn pow(&self, e: i64) -> Result<Matrix> {
        self.require_square()?;
        let mut base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Reduced row echelon form (pivots scaled to one).
    pub fn rref(&self) -> Echelon {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in c..self.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Nonzero rows of the reduced echelon form: a canonical basis of the
    /// row space.
    pub fn row_space(&self) -> Matrix {
        let e = self.rref();
        let k = e.pivots.len();
        Matrix { field: self.field.clone(), rows: k, cols: self.cols, data: e.matrix.data[..k * self.cols].to_vec() }
    }

    /// Basis (as rows) of the right kernel `{x : self · x = 0}`.
    pub fn nullspace(&self) -> Matrix {
        let f = &self.field;
        let e = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        let mut out = Self::zeros(f, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, Elem::ONE);
            for (r, &pc) in e.pivots.iter().enumerate() {
                out.set(k, pc, f.neg(e.matrix.get(r, fc)));
            }
        }
        out
    }

    /// Some solution of `self · x = b`, if one exists.
    pub fn solve(&self, b: &[Elem]) -> Result<Option<Vec<Elem>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch("right-hand side length".into()));
        }
        let mut aug = Self::zeros(&self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let e = aug.rref();
        if e.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Elem::ZERO; self.cols];
        for (r, &pc) in e.pivots.iter().enumerate() {
            x[pc] = e.matrix.get(r, self.cols);
        }
        Ok(Some(x))
    }

    pub fn det(&self) -> Result<Elem> {
        self.require_square()?;
        let f = &self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Elem::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(Elem::ZERO);
            };
            if p != c {
                m.swap_rows(p, c);
                det = f.neg(det);
            }
            let pv = m.get(c, c);
            det = f.mul(det, pv);
            let inv = f.inv(pv).unwrap();
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.require_square()?;
        let n = self.rows;
        let mut aug = Self::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, Elem::ONE);
        }
        let e = aug.rref();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut out = Self::zeros(&self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, e.matrix.get(r, n + c));
            }
        }
        Ok(out)
    }

    /// Columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> Matrix {
        let mut out = Self::zeros(&self.field, self.rows, end - start);
        for r in 0..self.rows {
            for c in start..end {
                out.set(r, c - start, self.get(r, c));
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Self::zeros(&self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                out.set(r, k, self.get(r, c));
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.same_field(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::DimensionMismatch("column counts differ".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { field: self.field.clone(), rows: self.rows + other.rows, cols, data })
    }

    /// Entry-wise image under an embedding.
    pub fn embed(&self, emb: &Embedding) -> Result<Matrix> {
        if **emb.source() != *self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(Matrix {
            field: emb.target().clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| emb.apply(a)).collect(),
        })
    }
}

impl ops::Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix addition")
    }
}

impl ops::Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix subtraction")
    }
}

impl ops::Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix multiplication")
    }
}

impl ops::Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::Field;
    use proptest::prelude::*;

    fn random_matrix(f: &FieldRef, rows: usize, cols: usize, seed: &[u32]) -> Matrix {
        let o = f.order();
        let data = (0..rows * cols).map(|i| Elem(seed[i % seed.len()].wrapping_mul(i as u32 + 7) % o)).collect();
        Matrix::new(f, rows, cols, data).unwrap()
    }

    #[test]
    fn identity_determinant_and_inverse() {
        let f = Field::gf(5, 2).unwrap();
        let i3 = Matrix::identity(&f, 3);
        assert_eq!(i3.det().unwrap(), Elem::ONE);
        assert_eq!(i3.inverse().unwrap(), i3);
        assert!(i3.is_identity());
        let sing = Matrix::zeros(&f, 3, 3);
        assert_eq!(sing.inverse().unwrap_err(), Error::Singular);
        assert_eq!(sing.det().unwrap(), Elem::ZERO);
    }

    #[test]
    fn shape_errors() {
        let f = Field::gf(2, 2).unwrap();
        let a = Matrix::zeros(&f, 2, 3);
        assert!(matches!(a.det(), Err(Error::DimensionMismatch(_))));
        assert!(matches!(a.try_mul(&a), Err(Error::DimensionMismatch(_))));
        let g = Field::gf(2, 3).unwrap();
        assert_eq!(a.try_add(&Matrix::zeros(&g, 2, 3)).unwrap_err(), Error::FieldMismatch);
    }

    #[test]
    fn determinant_by_cofactor_oracle() {
        let f = Field::gf(7, 1).unwrap();
        let m = Matrix::from_u32(&f, &[&[1, 2, 3], &[4, 5, 6], &[0, 1, 5]]).unwrap();
        // 1(25-6) - 2(20-0) + 3(4-0) = 19 - 40 + 12 = -9 ≡ 5 (mod 7)
        assert_eq!(m.det().unwrap(), Elem(5));
    }

    #[test]
    fn nullspace_and_solve() {
        let f = Field::gf(2, 2).unwrap();
        let m = Matrix::from_u32(&f, &[&[1, 2, 3, 0], &[0, 1, 1, 1]]).unwrap();
        let ns = m.nullspace();
        assert_eq!(ns.rows(), 2);
        for r in 0..ns.rows() {
            assert!(m.mul_vec(ns.row(r)).unwrap().iter().all(|e| e.is_zero()));
        }
        let b = vec![Elem(1), Elem(3)];
        let x = m.solve(&b).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), b);
        let z = Matrix::from_u32(&f, &[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(z.solve(&[Elem(1), Elem(2)]).unwrap(), None);
    }

    proptest! {
        #[test]
        fn inverse_and_rank_consistent(seed in proptest::collection::vec(any::<u32>(), 9)) {
            let f = Field::gf(2, 2).unwrap();
            let m = random_matrix(&f, 3, 3, &seed);
            let det = m.det().unwrap();
            prop_assert_eq!(det.is_zero(), m.rank() < 3);
            if let Ok(inv) = m.inverse() {
                prop_assert!((&m * &inv).is_identity());
                prop_assert!((&inv * &m).is_identity());
                prop_assert_eq!(m.pow(-2).unwrap(), inv.pow(2).unwrap());
            }
        }

        #[test]
        fn determinant_is_multiplicative(a in proptest::collection::vec(any::<u32>(), 9),
                                         b in proptest::collection::vec(any::<u32>(), 9)) {
            let f = Field::gf(5, 2).unwrap();
            let (ma, mb) = (random_matrix(&f, 3, 3, &a), random_matrix(&f, 3, 3, &b));
            prop_assert_eq!((&ma * &mb).det().unwrap(), f.mul(ma.det().unwrap(), mb.det().unwrap()));
        }

        #[test]
        fn rank_plus_nullity(seed in proptest::collection::vec(any::<u32>(), 5), rows in 1usize..5, cols in 1usize..7) {
            let f = Field::gf(3, 1).unwrap();
            let m = random_matrix(&f, rows, cols, &seed);
            prop_assert_eq!(m.rank() + m.nullspace().rows(), cols);
            prop_assert_eq!(m.transpose().rank(), m.rank());
        }
    }
}
