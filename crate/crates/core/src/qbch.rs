//! Matrix primitive roots of unity and quasi-BCH codes.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::galois::{minimal_polynomial, prime_factors, Elem, Embedding, Field, FieldRef, RelativeBasis};
use crate::matring::Matrix;
use crate::qccore::LinearCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Companion,
    Verbatim,
    Search,
}

/// Why a matrix fails to be a primitive `m`-th root of unity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootViolation {
    NotSquare,
    /// `A^m ≠ I`.
    WrongOrder,
    /// `A^i = I` for some `0 < i < m`.
    EarlyIdentity(usize),
    /// `A^i − A^j` is singular.
    SingularDifference(usize, usize),
}

impl fmt::Display for RootViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootViolation::NotSquare => write!(f, "matrix is not square"),
            RootViolation::WrongOrder => write!(f, "A^m is not the identity"),
            RootViolation::EarlyIdentity(i) => write!(f, "A^{i} is already the identity"),
            RootViolation::SingularDifference(i, j) => write!(f, "det(A^{i} - A^{j}) = 0"),
        }
    }
}

/// Checks `A^m = I`, `A^i ≠ I` for `0 < i < m` and `det(A^i − A^j) ≠ 0`
/// for every pair `0 ≤ i < j < m`.
pub fn verify_primitive_root(a: &Matrix, m: usize) -> std::result::Result<(), RootViolation> {
    if !a.is_square() {
        return Err(RootViolation::NotSquare);
    }
    let powers = powers_of(a, m + 1);
    if !powers[m].is_identity() {
        return Err(RootViolation::WrongOrder);
    }
    if let Some(i) = (1..m).find(|&i| powers[i].is_identity()) {
        return Err(RootViolation::EarlyIdentity(i));
    }
    for i in 0..m {
        for j in i + 1..m {
            if (&powers[i] - &powers[j]).det().expect("square").is_zero() {
                return Err(RootViolation::SingularDifference(i, j));
            }
        }
    }
    Ok(())
}

fn powers_of(a: &Matrix, count: usize) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(count);
    let mut acc = Matrix::identity(a.field(), a.rows());
    for _ in 0..count {
        let next = &acc * a;
        out.push(acc);
        acc = next;
    }
    out
}

/// A verified primitive `m`-th root of unity in `M_ℓ(F_{q^s})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveRoot {
    matrix: Matrix,
    order: usize,
    provenance: Provenance,
}

impl PrimitiveRoot {
    pub fn new(matrix: Matrix, m: usize, provenance: Provenance) -> Result<Self> {
        verify_primitive_root(&matrix, m).map_err(|v| Error::NotPrimitiveRoot { m, reason: v.to_string() })?;
        Ok(Self { matrix, order: m, provenance })
    }

    pub fn verbatim(matrix: Matrix, m: usize) -> Result<Self> {
        Self::new(matrix, m, Provenance::Verbatim)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn field(&self) -> &FieldRef {
        self.matrix.field()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

fn multiplicative_order(base: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    let b = base % m;
    let mut acc = b;
    for k in 1..=m {
        if acc == 1 {
            return Some(k);
        }
        acc = acc * b % m;
    }
    None
}

/// Companion matrix of the minimal polynomial over `F_{q^s}` of an element
/// of order `m` in `F_{q^{sℓ}}`.
pub fn primitive_root_companion(q: u32, s: u32, l: usize, m: usize) -> Result<PrimitiveRoot> {
    let (p, a) =
        crate::galois::prime_power(q).ok_or_else(|| Error::InvalidParameters(format!("{q} is not a prime power")))?;
    if l == 0 || m == 0 || s == 0 {
        return Err(Error::InvalidParameters("q, s, l and m must be positive".into()));
    }
    let small = Field::gf(p, a * s)?;
    let big = Field::gf(p, a * s * l as u32)?;
    let units = big.order() as u64 - 1;
    if units % m as u64 != 0 {
        return Err(Error::InvalidParameters(format!("{m} does not divide {units}")));
    }
    if multiplicative_order(small.order() as u64, m as u64) != Some(l as u64) {
        return Err(Error::InvalidParameters(format!("the order of {} modulo {m} is not {l}", small.order())));
    }
    let emb = Embedding::canonical(&small, &big)?;
    let alpha = big.exp((units / m as u64) as i64);
    let f = minimal_polynomial(alpha, &emb)?;
    if f.degree() != Some(l) {
        return Err(Error::InvalidParameters(format!("minimal polynomial has degree {:?}, expected {l}", f.degree())));
    }
    let mut c = Matrix::zeros(&small, l, l);
    for i in 1..l {
        c.set(i, i - 1, Elem::ONE);
    }
    for i in 0..l {
        c.set(i, l - 1, small.neg(f.coeff(i)));
    }
    PrimitiveRoot::new(c, m, Provenance::Companion)
}

/// Largest matrix space the exhaustive scan will enumerate.
pub const SCAN_LIMIT: u64 = 1 << 24;

/// The `index`-th matrix of `M_ℓ(K)` in little-endian base-`|K|` order of
/// its row-major entries.
pub fn matrix_from_index(field: &FieldRef, l: usize, mut index: u64) -> Matrix {
    let q = field.order() as u64;
    let mut m = Matrix::zeros(field, l, l);
    for i in 0..l * l {
        m.set(i / l, i % l, Elem((index % q) as u32));
        index /= q;
    }
    m
}

/// Every primitive `m`-th root of unity in `M_ℓ(K)`, in index order.
pub fn scan_primitive_roots(field: &FieldRef, l: usize, m: usize) -> Result<Vec<PrimitiveRoot>> {
    let total = (field.order() as u64).checked_pow((l * l) as u32).filter(|&t| t < SCAN_LIMIT).ok_or_else(|| {
        Error::BudgetExceeded {
            needed: (field.order() as u128).saturating_pow((l * l) as u32),
            budget: SCAN_LIMIT as u128,
        }
    })?;
    let cofactors: Vec<usize> = prime_factors(m as u64).into_iter().map(|p| m / p as usize).collect();
    let found: Vec<PrimitiveRoot> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let a = matrix_from_index(field, l, idx);
            if !a.pow(m as i64).ok()?.is_identity() {
                return None;
            }
            if cofactors.iter().any(|&c| a.pow(c as i64).unwrap().is_identity()) {
                return None;
            }
            PrimitiveRoot::new(a, m, Provenance::Search).ok()
        })
        .collect();
    Ok(found)
}

/// Parameters `(q, m, ℓ, s, δ, A)` of a quasi-BCH code.
#[derive(Clone, Debug)]
pub struct QbchSpec {
    base: FieldRef,
    basis: RelativeBasis,
    delta: usize,
    root: PrimitiveRoot,
    powers: Vec<Matrix>,
}

impl QbchSpec {
    /// `base` is `F_q`; the root lives over `F_{q^s}`, which must contain it.
    pub fn new(base: &FieldRef, root: PrimitiveRoot, delta: usize) -> Result<Self> {
        let m = root.order();
        if delta == 0 || delta > m {
            return Err(Error::InvalidParameters(format!("designed distance {delta} not in 1..={m}")));
        }
        let emb = Embedding::canonical(base, root.field())?;
        let basis = RelativeBasis::new(emb)?;
        let powers = powers_of(root.matrix(), m);
        Ok(Self { base: base.clone(), basis, delta, root, powers })
    }

    pub fn base(&self) -> &FieldRef {
        &self.base
    }

    /// `F_{q^s}`.
    pub fn extension(&self) -> &FieldRef {
        self.root.field()
    }

    pub fn embedding(&self) -> &Embedding {
        self.basis.embedding()
    }

    /// Coordinates of `F_{q^s}` over `F_q`.
    pub fn relative_basis(&self) -> &RelativeBasis {
        &self.basis
    }

    pub fn q(&self) -> u32 {
        self.base.order()
    }

    pub fn m(&self) -> usize {
        self.root.order()
    }

    pub fn l(&self) -> usize {
        self.root.size()
    }

    pub fn s(&self) -> usize {
        self.basis.dim()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn root(&self) -> &PrimitiveRoot {
        &self.root
    }

    /// `A^e` for any integer `e`.
    pub fn power(&self, e: i64) -> &Matrix {
        &self.powers[e.rem_euclid(self.m() as i64) as usize]
    }

    /// Decoding radius `⌊(δ−1)/2⌋`.
    pub fn radius(&self) -> usize {
        (self.delta - 1) / 2
    }

    /// `(m − s(δ−1))ℓ`, clamped at zero.
    pub fn dimension_bound(&self) -> usize {
        self.m().saturating_sub(self.s() * (self.delta - 1)) * self.l()
    }

    /// `H` over `F_{q^s}`: block `(i, j)` is `A^{ij}` for `1 ≤ i < δ`.
    pub fn parity_check_matrix(&self) -> Matrix {
        let (m, l) = (self.m(), self.l());
        let mut h = Matrix::zeros(self.extension(), (self.delta - 1) * l, m * l);
        for i in 1..self.delta {
            for j in 0..m {
                let blk = self.power((i * j) as i64);
                for r in 0..l {
                    for c in 0..l {
                        h.set((i - 1) * l + r, j * l + c, blk.get(r, c));
                    }
                }
            }
        }
        h
    }

    /// `H` with every entry replaced by its `s` coordinates over `F_q`.
    pub fn expanded_parity_check(&self) -> Matrix {
        let h = self.parity_check_matrix();
        let s = self.s();
        let mut out = Matrix::zeros(&self.base, h.rows() * s, h.cols());
        for r in 0..h.rows() {
            for c in 0..h.cols() {
                for (t, &x) in self.basis.coords(h.get(r, c)).iter().enumerate() {
                    out.set(r * s + t, c, x);
                }
            }
        }
        out
    }
}

/// The `F_q`-kernel of the quasi-BCH parity checks.
pub fn qbch_build(spec: &QbchSpec) -> Result<LinearCode> {
    let (m, l) = (spec.m(), spec.l());
    if spec.delta() == 1 {
        return Ok(LinearCode::full(spec.base(), m, l));
    }
    let h = spec.expanded_parity_check();
    let ns = h.nullspace();
    let code = if ns.rows() == 0 { LinearCode::zero(spec.base(), m, l) } else { LinearCode::new(&ns, m, l)? };
    if code.dimension() < spec.dimension_bound() {
        return Err(Error::InvalidParameters(format!(
            "dimension {} below the bound {}",
            code.dimension(),
            spec.dimension_bound()
        )));
    }
    if !code.is_quasi_cyclic() {
        return Err(Error::NotQuasiCyclic("quasi-BCH kernel".into()));
    }
    Ok(code)
}

/// `S_1, …, S_N` with `S_i = Σ_j A^{ij} y_j`, as column vectors over `F_{q^s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndromeSequence {
    pub values: Vec<Vec<Elem>>,
}

impl SyndromeSequence {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|e| e.is_zero()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The `δ − 1` syndromes of `y`.
pub fn syndrome(y: &[Elem], spec: &QbchSpec) -> Result<SyndromeSequence> {
    syndromes_to(y, spec, spec.delta() - 1)
}

/// `S_1, …, S_count` of `y` over `F_q`.
pub fn syndromes_to(y: &[Elem], spec: &QbchSpec, count: usize) -> Result<SyndromeSequence> {
    let (m, l) = (spec.m(), spec.l());
    if y.len() != m * l {
        return Err(Error::DimensionMismatch(format!("word of length {} for n = {}", y.len(), m * l)));
    }
    let emb = spec.embedding();
    let lifted: Vec<Elem> = y.iter().map(|&x| emb.apply(x)).collect();
    syndromes_lifted(&lifted, spec, count)
}

/// Syndromes of a word already over `F_{q^s}`.
pub fn syndromes_lifted(y: &[Elem], spec: &QbchSpec, count: usize) -> Result<SyndromeSequence> {
    let (m, l) = (spec.m(), spec.l());
    if y.len() != m * l {
        return Err(Error::DimensionMismatch(format!("word of length {} for n = {}", y.len(), m * l)));
    }
    let f = spec.extension();
    let blocks: Vec<(usize, &[Elem])> =
        y.chunks(l).enumerate().filter(|(_, b)| b.iter().any(|e| !e.is_zero())).collect();
    let values = (1..=count)
        .map(|i| {
            let mut acc = vec![Elem::ZERO; l];
            for &(j, b) in &blocks {
                let v = spec.power((i * j) as i64).mul_vec(b).expect("block length");
                for (a, x) in acc.iter_mut().zip(v) {
                    *a = f.add(*a, x);
                }
            }
            acc
        })
        .collect();
    Ok(SyndromeSequence { values })
}
