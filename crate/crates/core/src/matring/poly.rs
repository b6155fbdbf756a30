use crate::error::{Error, Result};
use crate::galois::{Elem, FieldRef};

use super::Matrix;

/// Polynomial in `X` with `ℓ×ℓ` matrix coefficients, little-endian.
///
/// Trailing zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixPolynomial {
    field: FieldRef,
    size: usize,
    coeffs: Vec<Matrix>,
}

/// Polynomial in `X` with coefficients in `K^ℓ` (column vectors).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorPolynomial {
    field: FieldRef,
    len: usize,
    coeffs: Vec<Vec<Elem>>,
}

impl MatrixPolynomial {
    pub fn new(field: &FieldRef, size: usize, coeffs: Vec<Matrix>) -> Result<Self> {
        for c in &coeffs {
            if c.rows() != size || c.cols() != size {
                return Err(Error::DimensionMismatch(format!(
                    "{}x{} coefficient in a polynomial over M_{size}",
                    c.rows(),
                    c.cols()
                )));
            }
            if **c.field() != **field {
                return Err(Error::FieldMismatch);
            }
        }
        let mut p = Self { field: field.clone(), size, coeffs };
        p.trim();
        Ok(p)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Matrix::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero(field: &FieldRef, size: usize) -> Self {
        Self { field: field.clone(), size, coeffs: Vec::new() }
    }

    pub fn one(field: &FieldRef, size: usize) -> Self {
        Self::constant(Matrix::identity(field, size))
    }

    pub fn constant(m: Matrix) -> Self {
        Self::monomial(m, 0)
    }

    /// `m · X^deg`.
    pub fn monomial(m: Matrix, deg: usize) -> Self {
        assert!(m.is_square(), "matrix polynomial coefficients must be square");
        let field = m.field().clone();
        let size = m.rows();
        let mut coeffs = vec![Matrix::zeros(&field, size, size); deg];
        coeffs.push(m);
        let mut p = Self { field, size, coeffs };
        p.trim();
        p
    }

    /// `1 − B·X`.
    pub fn one_minus_bx(b: &Matrix) -> Self {
        let field = b.field().clone();
        let one = Matrix::identity(&field, b.rows());
        Self { field, size: b.rows(), coeffs: vec![one, b.neg()] }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        self.trim();
        self
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Matrix {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Matrix::zeros(&self.field, self.size, self.size))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        if self.size != other.size {
            return Err(Error::DimensionMismatch(format!("matrix sizes {} and {}", self.size, other.size)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect();
        Ok(Self { field: self.field.clone(), size: self.size, coeffs }.trimmed())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect();
        Ok(Self { field: self.field.clone(), size: self.size, coeffs }.trimmed())
    }

    /// Noncommutative product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field, self.size));
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![Matrix::zeros(&self.field, self.size, self.size); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Ok(Self { field: self.field.clone(), size: self.size, coeffs }.trimmed())
    }

    /// Left multiplication of every coefficient by `m`.
    pub fn left_scale(&self, m: &Matrix) -> Self {
        let coeffs = self.coeffs.iter().map(|c| m * c).collect();
        Self { field: self.field.clone(), size: self.size, coeffs }.trimmed()
    }

    /// Reduction modulo `X^n`.
    pub fn truncate(&self, n: usize) -> Self {
        let coeffs = self.coeffs.iter().take(n).cloned().collect();
        Self { field: self.field.clone(), size: self.size, coeffs }.trimmed()
    }

    /// Folds coefficient `i` onto `i mod m`.
    pub fn mod_xm_minus_1(&self, m: usize) -> Self {
        assert!(m > 0, "modulus degree must be positive");
        let mut coeffs = vec![Matrix::zeros(&self.field, self.size, self.size); m.min(self.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = i % m;
            coeffs[k] = &coeffs[k] + c;
        }
        Self { field: self.field.clone(), size: self.size, coeffs }.trimmed()
    }

    /// `Σ fᵢ Bⁱ`, substituting on the right.
    pub fn eval_at_matrix(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows() != self.size || b.cols() != self.size {
            return Err(Error::DimensionMismatch("evaluation point size".into()));
        }
        if **b.field() != *self.field {
            return Err(Error::FieldMismatch);
        }
        // Horner from the top: acc = acc·B + f_i.
        let mut acc = Matrix::zeros(&self.field, self.size, self.size);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * b) + c;
        }
        Ok(acc)
    }

    /// `Σ f_{d−i} Xⁱ` where `d` is the degree.
    pub fn reciprocal(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self { field: self.field.clone(), size: self.size, coeffs }.trimmed()
    }

    pub fn transpose_coeffs(&self) -> Self {
        let coeffs = self.coeffs.iter().map(Matrix::transpose).collect();
        Self { field: self.field.clone(), size: self.size, coeffs }
    }

    /// Inverse modulo `X^n` by the coefficient recurrence
    /// `g_k = −f₀⁻¹ Σ_{j=1..k} f_j g_{k−j}`.
    pub fn series_inverse(&self, n: usize) -> Result<Self> {
        let f0 = self.coeff(0);
        let f0_inv = f0.inverse()?;
        let mut g: Vec<Matrix> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                g.push(f0_inv.clone());
                continue;
            }
            let mut acc = Matrix::zeros(&self.field, self.size, self.size);
            for j in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                acc = &acc + &(&self.coeffs[j] * &g[k - j]);
            }
            g.push((&f0_inv * &acc).neg());
        }
        Ok(Self { field: self.field.clone(), size: self.size, coeffs: g }.trimmed())
    }
}

impl VectorPolynomial {
    pub fn new(field: &FieldRef, len: usize, coeffs: Vec<Vec<Elem>>) -> Result<Self> {
        for c in &coeffs {
            if c.len() != len {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient of length {} in a polynomial over K^{len}",
                    c.len()
                )));
            }
            if let Some(bad) = c.iter().find(|e| !field.contains(**e)) {
                return Err(Error::NotInField(bad.0));
            }
        }
        Ok(Self { field: field.clone(), len, coeffs }.trimmed())
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|v| v.iter().all(|e| e.is_zero())) {
            self.coeffs.pop();
        }
        self
    }

    pub fn zero(field: &FieldRef, len: usize) -> Self {
        Self { field: field.clone(), len, coeffs: Vec::new() }
    }

    pub fn constant(field: &FieldRef, v: Vec<Elem>) -> Self {
        let len = v.len();
        Self { field: field.clone(), len, coeffs: vec![v] }.trimmed()
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn coeffs(&self) -> &[Vec<Elem>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Vec<Elem> {
        self.coeffs.get(i).cloned().unwrap_or_else(|| vec![Elem::ZERO; self.len])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        if self.len != other.len {
            return Err(Error::DimensionMismatch("vector lengths differ".into()));
        }
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs =
            (0..n).map(|i| self.coeff(i).iter().zip(other.coeff(i)).map(|(&a, b)| f.add(a, b)).collect()).collect();
        Ok(Self { field: f.clone(), len: self.len, coeffs }.trimmed())
    }

    pub fn truncate(&self, n: usize) -> Self {
        let coeffs = self.coeffs.iter().take(n).cloned().collect();
        Self { field: self.field.clone(), len: self.len, coeffs }.trimmed()
    }

    /// `Σ Bⁱ Lᵢ`.
    pub fn eval_at_matrix(&self, b: &Matrix) -> Result<Vec<Elem>> {
        if b.rows() != self.len || b.cols() != self.len {
            return Err(Error::DimensionMismatch("evaluation point size".into()));
        }
        let mut acc = vec![Elem::ZERO; self.len];
        for c in self.coeffs.iter().rev() {
            acc = b.mul_vec(&acc)?;
            for (a, &x) in acc.iter_mut().zip(c) {
                *a = self.field.add(*a, x);
            }
        }
        Ok(acc)
    }
}

/// `f ⋄ g`: coefficient `k` is `Σ_{i+j=k} f_j · g_i`.
pub fn diamond(f: &MatrixPolynomial, g: &VectorPolynomial) -> Result<VectorPolynomial> {
    if *f.field != *g.field {
        return Err(Error::FieldMismatch);
    }
    if f.size != g.len {
        return Err(Error::DimensionMismatch(format!("{}x{} coefficients acting on K^{}", f.size, f.size, g.len)));
    }
    if f.is_zero() || g.is_zero() {
        return Ok(VectorPolynomial::zero(&f.field, g.len));
    }
    let fld = &f.field;
    let n = f.coeffs.len() + g.coeffs.len() - 1;
    let mut coeffs = vec![vec![Elem::ZERO; g.len]; n];
    for (j, fj) in f.coeffs.iter().enumerate() {
        for (i, gi) in g.coeffs.iter().enumerate() {
            let v = fj.mul_vec(gi)?;
            for (a, x) in coeffs[i + j].iter_mut().zip(v) {
                *a = fld.add(*a, x);
            }
        }
    }
    Ok(VectorPolynomial { field: fld.clone(), len: g.len, coeffs }.trimmed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::Field;
    use proptest::prelude::*;

    fn mat(f: &FieldRef, l: usize, seed: &[u32], salt: u32) -> Matrix {
        let o = f.order();
        let data = (0..l * l)
            .map(|i| Elem(seed[(i + salt as usize) % seed.len()].wrapping_add(salt.wrapping_mul(31)) % o))
            .collect();
        Matrix::new(f, l, l, data).unwrap()
    }

    fn poly(f: &FieldRef, l: usize, deg: usize, seed: &[u32], salt: u32) -> MatrixPolynomial {
        let coeffs = (0..=deg).map(|d| mat(f, l, seed, salt + 7 * d as u32)).collect();
        MatrixPolynomial::new(f, l, coeffs).unwrap()
    }

    #[test]
    fn geometric_series_inverts_one_minus_bx() {
        let f = Field::gf(2, 2).unwrap();
        let b = Matrix::from_u32(&f, &[&[0, 1, 2], &[3, 1, 0], &[1, 1, 1]]).unwrap();
        let n = 8;
        let geo = MatrixPolynomial::new(&f, 3, (0..n).map(|j| b.pow(j as i64).unwrap()).collect()).unwrap();
        let one_minus = MatrixPolynomial::one_minus_bx(&b);
        let one = MatrixPolynomial::one(&f, 3);
        assert_eq!(one_minus.mul(&geo).unwrap().truncate(n), one);
        assert_eq!(geo.mul(&one_minus).unwrap().truncate(n), one);
        assert_eq!(one_minus.series_inverse(n).unwrap(), geo);
        assert_eq!(one.series_inverse(5).unwrap(), one);
    }

    #[test]
    fn reciprocal_and_folding() {
        let f = Field::gf(3, 1).unwrap();
        let p = poly(&f, 2, 4, &[1, 2, 0, 1, 2], 1);
        assert!(!p.coeff(0).is_zero());
        assert_eq!(p.reciprocal().reciprocal(), p);
        let folded = p.mod_xm_minus_1(3);
        assert_eq!(folded.coeff(0), &p.coeff(0) + &p.coeff(3));
        assert_eq!(folded.coeff(1), &p.coeff(1) + &p.coeff(4));
        assert_eq!(folded.coeff(2), p.coeff(2));
    }

    #[test]
    fn diamond_basics() {
        let f = Field::gf(5, 1).unwrap();
        let b = Matrix::from_u32(&f, &[&[1, 2], &[3, 4]]).unwrap();
        let v = vec![Elem(1), Elem(1)];
        let g = VectorPolynomial::constant(&f, v.clone());
        assert_eq!(diamond(&MatrixPolynomial::one(&f, 2), &g).unwrap(), g);
        let bx = MatrixPolynomial::monomial(b.clone(), 1);
        let out = diamond(&bx, &g).unwrap();
        assert_eq!(out.degree(), Some(1));
        assert!(out.coeff(0).iter().all(|e| e.is_zero()));
        assert_eq!(out.coeff(1), b.mul_vec(&v).unwrap());
        let bad = VectorPolynomial::constant(&f, vec![Elem(1); 3]);
        assert!(matches!(diamond(&bx, &bad), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn singular_constant_has_no_inverse() {
        let f = Field::gf(2, 1).unwrap();
        let p = MatrixPolynomial::constant(Matrix::zeros(&f, 2, 2))
            .add(&MatrixPolynomial::monomial(Matrix::identity(&f, 2), 1))
            .unwrap();
        assert_eq!(p.series_inverse(4).unwrap_err(), Error::Singular);
    }

    proptest! {
        #[test]
        fn product_is_associative(seed in proptest::collection::vec(any::<u32>(), 16), l in 1usize..4,
                                  da in 0usize..5, db in 0usize..5, dc in 0usize..5) {
            let f = Field::gf(2, 2).unwrap();
            let (a, b, c) = (poly(&f, l, da, &seed, 1), poly(&f, l, db, &seed, 2), poly(&f, l, dc, &seed, 3));
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn diamond_is_compatible_with_constants(seed in proptest::collection::vec(any::<u32>(), 12), deg in 0usize..4) {
            let f = Field::gf(3, 2).unwrap();
            let fp = poly(&f, 3, deg, &seed, 5);
            let h = MatrixPolynomial::constant(mat(&f, 3, &seed, 11));
            let g = VectorPolynomial::new(&f, 3, (0..3).map(|i| (0..3).map(|j| Elem(seed[(i * 3 + j) % seed.len()] % 9)).collect()).collect()).unwrap();
            prop_assert_eq!(diamond(&fp.mul(&h).unwrap(), &g).unwrap(), diamond(&fp, &diamond(&h, &g).unwrap()).unwrap());
        }

        #[test]
        fn evaluation_is_multiplicative_on_commuting_coefficients(seed in proptest::collection::vec(0u32..4, 24)) {
            // Coefficients drawn from F_q[A] commute with A.
            let f = Field::gf(2, 2).unwrap();
            let a = Matrix::from_u32(&f, &[&[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]).unwrap();
            let powers: Vec<Matrix> = (0..3).map(|i| a.pow(i).unwrap()).collect();
            let in_fa = |s: &[u32]| powers.iter().zip(s).fold(Matrix::zeros(&f, 3, 3), |acc, (p, &c)| &acc + &p.scale(Elem(c)));
            let p1 = MatrixPolynomial::new(&f, 3, seed[..12].chunks(3).map(in_fa).collect()).unwrap();
            let p2 = MatrixPolynomial::new(&f, 3, seed[12..].chunks(3).map(in_fa).collect()).unwrap();
            let lhs = p1.mul(&p2).unwrap().eval_at_matrix(&a).unwrap();
            prop_assert_eq!(lhs, &p1.eval_at_matrix(&a).unwrap() * &p2.eval_at_matrix(&a).unwrap());
        }

        #[test]
        fn series_inverse_truncates_consistently(seed in proptest::collection::vec(any::<u32>(), 8), n in 1usize..10, k in 0usize..10) {
            let f = Field::gf(5, 1).unwrap();
            let mut coeffs = vec![Matrix::identity(&f, 2)];
            coeffs.extend((0..3).map(|i| mat(&f, 2, &seed, i)));
            let p = MatrixPolynomial::new(&f, 2, coeffs).unwrap();
            let inv = p.series_inverse(n).unwrap();
            prop_assert_eq!(p.mul(&inv).unwrap().truncate(n), MatrixPolynomial::one(&f, 2));
            prop_assert_eq!(inv.mul(&p).unwrap().truncate(n), MatrixPolynomial::one(&f, 2));
            let k = k.min(n);
            prop_assert_eq!(inv.truncate(k), p.series_inverse(k).unwrap());
        }
    }
}
