//! Quasi-cyclic codes: shifts, folding, block rank, generator polynomials
//! and duals.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::galois::{Elem, Embedding, Field, FieldRef};
use crate::matring::{Matrix, MatrixPolynomial};

/// Left cyclic shift by `steps` positions; negative steps shift right.
pub fn shift(x: &[Elem], steps: isize) -> Vec<Elem> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let s = steps.rem_euclid(n as isize) as usize;
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&x[s..]);
    out.extend_from_slice(&x[..s]);
    out
}

/// Index of the first nonzero block of length `l`, if any.
pub fn first_index(x: &[Elem], l: usize) -> Option<usize> {
    x.chunks(l).position(|b| b.iter().any(|e| !e.is_zero()))
}

/// A linear code with a block structure `n = m·ℓ`.
///
/// The generator is kept in reduced row echelon form, so two codes compare
/// equal exactly when their row spaces agree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearCode {
    m: usize,
    l: usize,
    generator: Matrix,
    pivots: Vec<usize>,
}

impl LinearCode {
    /// Code spanned by the rows of `generator`; dependent rows are dropped.
    pub fn new(generator: &Matrix, m: usize, l: usize) -> Result<Self> {
        if l == 0 || m == 0 || generator.cols() != m * l {
            return Err(Error::DimensionMismatch(format!("length {} is not {m}·{l}", generator.cols())));
        }
        let e = generator.rref();
        let k = e.pivots.len();
        let g = e.matrix.row_vecs().into_iter().take(k).collect::<Vec<_>>();
        let generator =
            if k == 0 { Matrix::zeros(generator.field(), 0, m * l) } else { Matrix::from_rows(generator.field(), &g)? };
        Ok(Self { m, l, generator, pivots: e.pivots })
    }

    pub fn from_rows(field: &FieldRef, rows: &[Vec<Elem>], m: usize, l: usize) -> Result<Self> {
        if rows.is_empty() {
            return Ok(Self::zero(field, m, l));
        }
        Self::new(&Matrix::from_rows(field, rows)?, m, l)
    }

    pub fn zero(field: &FieldRef, m: usize, l: usize) -> Self {
        Self { m, l, generator: Matrix::zeros(field, 0, m * l), pivots: Vec::new() }
    }

    pub fn full(field: &FieldRef, m: usize, l: usize) -> Self {
        Self { m, l, generator: Matrix::identity(field, m * l), pivots: (0..m * l).collect() }
    }

    pub fn field(&self) -> &FieldRef {
        self.generator.field()
    }

    pub fn length(&self) -> usize {
        self.m * self.l
    }

    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    /// Number of blocks `m`.
    pub fn blocks(&self) -> usize {
        self.m
    }

    /// Block length `ℓ`.
    pub fn block_length(&self) -> usize {
        self.l
    }

    /// Generator matrix in reduced row echelon form.
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `x` against the echelon basis; the result is zero iff `x ∈ C`.
    pub fn reduce(&self, x: &[Elem]) -> Vec<Elem> {
        let f = self.field();
        let mut v = x.to_vec();
        for (r, &pc) in self.pivots.iter().enumerate() {
            let c = v[pc];
            if c.is_zero() {
                continue;
            }
            for (a, &g) in v.iter_mut().zip(self.generator.row(r)).skip(pc) {
                *a = f.sub(*a, f.mul(c, g));
            }
        }
        v
    }

    pub fn contains(&self, x: &[Elem]) -> bool {
        x.len() == self.length() && self.reduce(x).iter().all(|e| e.is_zero())
    }

    /// `msg · G` for a message of length `k`.
    pub fn encode(&self, msg: &[Elem]) -> Result<Vec<Elem>> {
        self.generator.vec_mul(msg)
    }

    /// Stability of the row space under `T^ℓ`.
    pub fn is_quasi_cyclic(&self) -> bool {
        (0..self.dimension()).all(|r| self.contains(&shift(self.generator.row(r), self.l as isize)))
    }

    /// Common rank of the `m` column blocks of the generator matrix.
    pub fn block_rank(&self) -> Result<usize> {
        if self.dimension() == 0 {
            return Ok(0);
        }
        let ranks: Vec<usize> =
            (0..self.m).map(|i| self.generator.columns(i * self.l, (i + 1) * self.l).rank()).collect();
        if ranks.iter().any(|&r| r != ranks[0]) {
            return Err(Error::BlockRankMismatch(ranks));
        }
        Ok(ranks[0])
    }

    /// `C^⊥` with the same block structure.
    pub fn dual(&self) -> LinearCode {
        let n = self.length();
        if self.dimension() == 0 {
            return Self::full(self.field(), self.m, self.l);
        }
        let ns = self.generator.nullspace();
        if ns.rows() == 0 {
            return Self::zero(self.field(), self.m, self.l);
        }
        debug_assert_eq!(ns.cols(), n);
        Self::new(&ns, self.m, self.l).expect("nullspace has the right width")
    }

    /// A parity-check matrix: the generator of the dual.
    pub fn parity_check(&self) -> Matrix {
        self.dual().generator
    }

    /// Same code viewed with a different block length.
    pub fn with_blocks(&self, m: usize, l: usize) -> Result<Self> {
        if m * l != self.length() {
            return Err(Error::DimensionMismatch(format!("{m}·{l} != {}", self.length())));
        }
        Ok(Self { m, l, ..self.clone() })
    }
}

/// Identification of `F_q^ℓ` with `F_{q^ℓ}` through a basis `1, α, …, α^{ℓ−1}`.
#[derive(Clone, Debug)]
pub struct FoldingSpec {
    embedding: Embedding,
    alpha: Elem,
    l: usize,
    powers: Vec<Elem>,
    coords: HashMap<u32, Vec<Elem>>,
}

impl FoldingSpec {
    pub fn new(embedding: Embedding, alpha: Elem, l: usize) -> Result<Self> {
        let base = embedding.source().clone();
        let ext = embedding.target().clone();
        if !ext.contains(alpha) {
            return Err(Error::NotInField(alpha.0));
        }
        let q = base.order() as u64;
        if q.checked_pow(l as u32) != Some(ext.order() as u64) {
            return Err(Error::InvalidParameters(format!("|{:?}| is not {}^{l}", ext, base.order())));
        }
        let mut powers = Vec::with_capacity(l);
        let mut acc = Elem::ONE;
        for _ in 0..l {
            powers.push(acc);
            acc = ext.mul(acc, alpha);
        }
        let mut coords = HashMap::with_capacity(ext.order() as usize);
        let mut digits = vec![Elem::ZERO; l];
        loop {
            let v =
                digits.iter().zip(&powers).fold(Elem::ZERO, |s, (&d, &p)| ext.add(s, ext.mul(embedding.apply(d), p)));
            if coords.insert(v.0, digits.clone()).is_some() {
                return Err(Error::InvalidParameters(format!(
                    "powers of {alpha} are not independent over the base field"
                )));
            }
            // Odometer over base-field digits.
            let mut i = 0;
            while i < l {
                digits[i] = Elem((digits[i].0 + 1) % base.order());
                if !digits[i].is_zero() {
                    break;
                }
                i += 1;
            }
            if i == l {
                break;
            }
        }
        Ok(Self { embedding, alpha, l, powers, coords })
    }

    /// `F_q ⊂ F_{q^ℓ}` with `α` the generator of the extension.
    pub fn standard(base: &FieldRef, l: usize) -> Result<Self> {
        let ext = Field::gf(base.characteristic(), base.degree() * l as u32)?;
        let emb = Embedding::canonical(base, &ext)?;
        let alpha = ext.generator();
        Self::new(emb, alpha, l)
    }

    pub fn base(&self) -> &FieldRef {
        self.embedding.source()
    }

    pub fn extension(&self) -> &FieldRef {
        self.embedding.target()
    }

    pub fn alpha(&self) -> Elem {
        self.alpha
    }

    pub fn fold(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() % self.l != 0 {
            return Err(Error::DimensionMismatch(format!("length {} not divisible by {}", x.len(), self.l)));
        }
        let ext = self.extension();
        Ok(x.chunks(self.l)
            .map(|b| {
                b.iter()
                    .zip(&self.powers)
                    .fold(Elem::ZERO, |s, (&d, &p)| ext.add(s, ext.mul(self.embedding.apply(d), p)))
            })
            .collect())
    }

    pub fn unfold(&self, y: &[Elem]) -> Result<Vec<Elem>> {
        let mut out = Vec::with_capacity(y.len() * self.l);
        for v in y {
            out.extend_from_slice(self.coords.get(&v.0).ok_or(Error::NotInField(v.0))?);
        }
        Ok(out)
    }
}

/// `r` generators and the shifts that Algorithm 1 keeps.
#[derive(Clone, Debug)]
pub struct GeneratorPolynomialResult {
    /// The generators, in echelon row order.
    pub generators: Vec<Vec<Elem>>,
    /// First index of each generator.
    pub first_indices: Vec<usize>,
    /// Basis element `t` is `T^{sℓ}(generators[i])` for `schedule[t] = (i, s)`,
    /// ordered by shift and then generator.
    pub schedule: Vec<(usize, usize)>,
    /// The basis rows, following `schedule`.
    pub basis: Vec<Vec<Elem>>,
    pub nu: usize,
    pub polynomial: MatrixPolynomial,
}

impl GeneratorPolynomialResult {
    pub fn block_rank(&self) -> usize {
        self.generators.len()
    }
}

fn projection(x: &[Elem], l: usize) -> Vec<Elem> {
    match first_index(x, l) {
        Some(i) => x[i * l..(i + 1) * l].to_vec(),
        None => vec![Elem::ZERO; l],
    }
}

/// Basis from `r` rows of an echelon form and their `T^ℓ` shifts.
///
/// Within a bucket of rows sharing a first index, rows are tried from the
/// bottom of the echelon form upwards.
pub fn algorithm1_basis(generator: &Matrix, m: usize, l: usize) -> Result<GeneratorPolynomialResult> {
    let code = LinearCode::new(generator, m, l)?;
    if !code.is_quasi_cyclic() {
        return Err(Error::NotQuasiCyclic(format!("row space is not stable under T^{l}")));
    }
    let field = code.field().clone();
    let rows = code.generator().row_vecs();
    let k = rows.len();
    if k == 0 {
        return Ok(GeneratorPolynomialResult {
            generators: Vec::new(),
            first_indices: Vec::new(),
            schedule: Vec::new(),
            basis: Vec::new(),
            nu: 0,
            polynomial: MatrixPolynomial::zero(&field, l),
        });
    }
    let firsts: Vec<usize> = rows.iter().map(|r| first_index(r, l).unwrap()).collect();
    let top = *firsts.iter().max().unwrap();

    // Members of B'_j as (echelon row, shift count).
    let mut carried: Vec<(usize, usize)> = Vec::new();
    let mut kept: Vec<(usize, usize)> = Vec::new();
    for j in (0..=top).rev() {
        for c in &mut carried {
            c.1 += 1;
        }
        let mut proj: Vec<Vec<Elem>> =
            carried.iter().map(|&(g, s)| projection(&shift(&rows[g], (s * l) as isize), l)).collect();
        for x in (0..k).rev().filter(|&i| firsts[i] == j) {
            let p = projection(&rows[x], l);
            let mut trial = proj.clone();
            trial.push(p.clone());
            if Matrix::from_rows(&field, &trial)?.rank() == trial.len() {
                proj.push(p);
                carried.push((x, 0));
            }
        }
        kept.extend_from_slice(&carried);
    }
    if kept.len() != k {
        return Err(Error::NotQuasiCyclic(format!("shift schedule spans {} of {k} dimensions", kept.len())));
    }

    let mut gens: Vec<usize> = kept.iter().map(|&(g, _)| g).collect();
    gens.sort_unstable();
    gens.dedup();
    let slot = |g: usize| gens.iter().position(|&x| x == g).unwrap();
    let mut schedule: Vec<(usize, usize)> = kept.iter().map(|&(g, s)| (slot(g), s)).collect();
    schedule.sort_by_key(|&(g, s)| (s, g));
    let generators: Vec<Vec<Elem>> = gens.iter().map(|&g| rows[g].clone()).collect();
    let first_indices: Vec<usize> = gens.iter().map(|&g| firsts[g]).collect();
    let basis = schedule.iter().map(|&(g, s)| shift(&generators[g], (s * l) as isize)).collect();

    let nu = *first_indices.iter().min().unwrap();
    let coeffs = (nu..m)
        .map(|i| {
            let mut c = Matrix::zeros(&field, l, l);
            for (t, g) in generators.iter().enumerate() {
                for j in 0..l {
                    c.set(t, j, g[i * l + j]);
                }
            }
            c
        })
        .collect();
    let polynomial = MatrixPolynomial::new(&field, l, coeffs)?;
    Ok(GeneratorPolynomialResult { generators, first_indices, schedule, basis, nu, polynomial })
}

/// Generator polynomial of a quasi-cyclic code.
pub fn generator_polynomial(code: &LinearCode) -> Result<MatrixPolynomial> {
    Ok(algorithm1_basis(code.generator(), code.blocks(), code.block_length())?.polynomial)
}

/// Code spanned by the rows of `Xᵏ g(X) mod X^m − 1`, `0 ≤ k < m`, where the
/// coefficient of `Xⁱ` occupies block `i`.
pub fn code_from_generator(g: &MatrixPolynomial, m: usize) -> Result<LinearCode> {
    let field = g.field().clone();
    let l = g.size();
    if m == 0 {
        return Err(Error::InvalidParameters("m must be positive".into()));
    }
    let folded = g.mod_xm_minus_1(m);
    let mut rows = Vec::with_capacity(m * l);
    for t in 0..l {
        let mut base = vec![Elem::ZERO; m * l];
        for (i, c) in folded.coeffs().iter().enumerate() {
            base[i * l..(i + 1) * l].copy_from_slice(c.row(t));
        }
        if base.iter().all(|e| e.is_zero()) {
            continue;
        }
        for s in 0..m {
            rows.push(shift(&base, -((s * l) as isize)));
        }
    }
    LinearCode::from_rows(&field, &rows, m, l)
}

/// Whether `P · ᵗQ* ≡ 0 mod X^m − 1`.
pub fn check_dual_identity(p: &MatrixPolynomial, q: &MatrixPolynomial, m: usize) -> Result<bool> {
    let tq = q.reciprocal().transpose_coeffs();
    Ok(p.mul(&tq)?.mod_xm_minus_1(m).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_poly(f: &FieldRef, l: usize, deg: usize, seed: &[u32]) -> MatrixPolynomial {
        let o = f.order();
        let coeffs = (0..=deg)
            .map(|d| {
                let data = (0..l * l).map(|i| Elem(seed[(d * l * l + i) % seed.len()] % o)).collect();
                Matrix::new(f, l, l, data).unwrap()
            })
            .collect();
        MatrixPolynomial::new(f, l, coeffs).unwrap()
    }

    #[test]
    fn shifts() {
        let x: Vec<Elem> = (1..=4).map(Elem).collect();
        assert_eq!(shift(&x, 1), vec![Elem(2), Elem(3), Elem(4), Elem(1)]);
        assert_eq!(shift(&x, 4), x);
        assert_eq!(shift(&shift(&x, 3), 2), shift(&x, 5));
        assert_eq!(shift(&shift(&x, -1), 1), x);
    }

    #[test]
    fn cyclic_code_staircase() {
        // x^3 + x + 1 generates the [7,4] Hamming code.
        let f = Field::gf(2, 1).unwrap();
        let g = MatrixPolynomial::new(&f, 1, [1, 1, 0, 1].iter().map(|&c| Matrix::scalar(&f, 1, Elem(c))).collect())
            .unwrap();
        let code = code_from_generator(&g, 7).unwrap();
        assert_eq!(code.dimension(), 4);
        assert_eq!(code.block_rank().unwrap(), 1);
        let res = algorithm1_basis(code.generator(), 7, 1).unwrap();
        assert_eq!(res.block_rank(), 1);
        assert_eq!(res.schedule, (0..4).map(|s| (0, s)).collect::<Vec<_>>());
        // The staircase starts at the bottom echelon row, x^3 g up to a shift.
        let rebuilt = code_from_generator(&res.polynomial, 7).unwrap();
        assert_eq!(rebuilt, code);
        assert_eq!(res.polynomial.degree(), Some(3));
    }

    #[test]
    fn full_and_zero_codes() {
        let f = Field::gf(2, 2).unwrap();
        let full = LinearCode::full(&f, 3, 2);
        assert_eq!(full.block_rank().unwrap(), 2);
        let res = algorithm1_basis(full.generator(), 3, 2).unwrap();
        assert_eq!(res.generators.len(), 2);
        let mut basis = res.basis.clone();
        basis.sort();
        basis.reverse();
        assert_eq!(basis, full.generator().row_vecs());
        assert_eq!(res.polynomial, MatrixPolynomial::one(&f, 2));
        assert_eq!(code_from_generator(&MatrixPolynomial::one(&f, 2), 3).unwrap(), full);
        let zero = full.dual();
        assert_eq!(zero.dimension(), 0);
        assert_eq!(zero.block_rank().unwrap(), 0);
        assert_eq!(zero.dual(), full);
        assert!(check_dual_identity(&MatrixPolynomial::zero(&f, 2), &res.polynomial, 3).unwrap());
    }

    #[test]
    fn non_quasi_cyclic_rejected() {
        let f = Field::gf(2, 1).unwrap();
        let g = Matrix::from_u32(&f, &[&[1, 0, 0, 0, 0, 0]]).unwrap();
        assert!(matches!(algorithm1_basis(&g, 3, 2), Err(Error::NotQuasiCyclic(_))));
        let code = LinearCode::new(&g, 3, 2).unwrap();
        assert!(matches!(code.block_rank(), Err(Error::BlockRankMismatch(_))));
    }

    #[test]
    fn folding_round_trip_and_validation() {
        let f = Field::gf(2, 1).unwrap();
        let spec = FoldingSpec::standard(&f, 3).unwrap();
        let x: Vec<Elem> = [1, 0, 1, 0, 0, 0, 1, 1, 1].iter().map(|&c| Elem(c)).collect();
        let y = spec.fold(&x).unwrap();
        assert_eq!(y.len(), 3);
        assert_eq!(y[1], Elem::ZERO);
        assert_eq!(spec.unfold(&y).unwrap(), x);
        assert!(spec.fold(&x[..4]).is_err());
        let emb = Embedding::canonical(&f, spec.extension()).unwrap();
        assert!(FoldingSpec::new(emb, Elem::ONE, 3).is_err());
    }

    proptest! {
        #[test]
        fn correspondence_round_trip(seed in proptest::collection::vec(any::<u32>(), 40),
                                     m in 2usize..8, l in 1usize..4, deg in 0usize..4, q in 0usize..2) {
            let f = Field::gf(2, 1 + q as u32).unwrap();
            let g = random_poly(&f, l, deg, &seed);
            let code = code_from_generator(&g, m).unwrap();
            prop_assert!(code.is_quasi_cyclic());
            let res = algorithm1_basis(code.generator(), m, l).unwrap();
            let r = code.block_rank().unwrap();
            prop_assert_eq!(res.block_rank(), r);
            prop_assert_eq!(res.basis.len(), code.dimension());
            prop_assert!(code.dimension() <= r * m);
            for b in &res.basis {
                prop_assert!(code.contains(b));
            }
            if !res.basis.is_empty() {
                prop_assert_eq!(Matrix::from_rows(&f, &res.basis).unwrap().rank(), res.basis.len());
                prop_assert_eq!(res.basis.iter().filter(|b| first_index(b, l) == Some(0)).count(), r);
            }
            prop_assert_eq!(code_from_generator(&res.polynomial, m).unwrap(), code.clone());

            let dual = code.dual();
            prop_assert_eq!(dual.dimension() + code.dimension(), m * l);
            prop_assert!(dual.is_quasi_cyclic());
            prop_assert_eq!(dual.dual(), code.clone());
            let q_poly = generator_polynomial(&dual).unwrap();
            prop_assert!(check_dual_identity(&res.polynomial, &q_poly, m).unwrap());
        }

        #[test]
        fn folding_is_invertible(seed in proptest::collection::vec(0u32..4, 12)) {
            let f = Field::gf(2, 2).unwrap();
            let spec = FoldingSpec::standard(&f, 3).unwrap();
            let x: Vec<Elem> = seed.iter().map(|&c| Elem(c)).collect();
            prop_assert_eq!(spec.unfold(&spec.fold(&x).unwrap()).unwrap(), x);
        }

        #[test]
        fn block_rank_ignores_row_operations(seed in proptest::collection::vec(any::<u32>(), 30), mix in proptest::collection::vec(0u32..4, 64)) {
            let f = Field::gf(2, 2).unwrap();
            let code = code_from_generator(&random_poly(&f, 3, 2, &seed), 5).unwrap();
            let k = code.dimension();
            prop_assume!(k > 0);
            let mut s = Matrix::zeros(&f, k, k);
            for i in 0..k { for j in 0..k { s.set(i, j, Elem(mix[(i * k + j) % mix.len()])); } }
            prop_assume!(s.rank() == k);
            let scrambled = &s * code.generator();
            let other = LinearCode { m: 5, l: 3, generator: scrambled.clone(), pivots: Vec::new() };
            prop_assert_eq!(other.block_rank().unwrap(), code.block_rank().unwrap());
            prop_assert_eq!(LinearCode::new(&scrambled, 5, 3).unwrap(), code);
        }
    }
}
