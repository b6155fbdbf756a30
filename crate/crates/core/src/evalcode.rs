//! Quasi-cyclic evaluation codes `C_{A,k,π}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::galois::{Elem, FieldRef};
use crate::matring::Matrix;
use crate::qbch::PrimitiveRoot;
use crate::qccore::LinearCode;

/// An `F_q`-linear map `F_q[A] → F_q^ℓ`. Indices are 0-based internally and
/// 1-based in the text form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Projection {
    Row(usize),
    Col(usize),
    Coords(Vec<(usize, usize)>),
    /// Coordinates in the basis `I, A, …, A^{ℓ−1}`.
    Psi,
    /// `ψ(B) · Π`.
    PsiPi(Matrix),
}

impl Projection {
    /// Whether the blockwise map is injective for every `A` (row, column and
    /// `ψ` projections; `ψΠ` with invertible `Π`).
    pub fn is_injective_kind(&self) -> bool {
        match self {
            Projection::Row(_) | Projection::Col(_) | Projection::Psi => true,
            Projection::PsiPi(p) => p.det().map(|d| !d.is_zero()).unwrap_or(false),
            Projection::Coords(_) => false,
        }
    }

    fn validate(&self, l: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        match self {
            Projection::Row(i) | Projection::Col(i) if *i >= l => bad(format!("index {} outside 1..={l}", i + 1)),
            Projection::Coords(c) => {
                if c.len() != l {
                    return bad(format!("{} positions for l = {l}", c.len()));
                }
                if c.iter().any(|&(r, s)| r >= l || s >= l) {
                    return bad("position outside the matrix".into());
                }
                let mut sorted = c.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != l {
                    return bad("positions must be distinct".into());
                }
                Ok(())
            }
            Projection::PsiPi(p) if p.rows() != l || p.cols() != l => bad(format!("Π must be {l}x{l}")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Row(i) => write!(f, "row:{}", i + 1),
            Projection::Col(j) => write!(f, "col:{}", j + 1),
            Projection::Coords(c) => {
                let parts: Vec<String> = c.iter().map(|(r, s)| format!("{}{}", r + 1, s + 1)).collect();
                write!(f, "coords:{}", parts.join(","))
            }
            Projection::Psi => write!(f, "psi"),
            Projection::PsiPi(_) => write!(f, "psiPi"),
        }
    }
}

impl FromStr for Projection {
    type Err = Error;

    /// `row:i`, `col:j`, `coords:r1c1,r2c2,…` (or `(r,c),(r,c)`), `psi`.
    /// `psiPi` needs a matrix and is built with [`Projection::PsiPi`].
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameters(format!("cannot parse projection {s:?}"));
        let index = |t: &str| -> Result<usize> {
            let v: usize = t.trim().parse().map_err(|_| bad())?;
            v.checked_sub(1).ok_or_else(bad)
        };
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "row" => Ok(Projection::Row(index(arg)?)),
            "col" => Ok(Projection::Col(index(arg)?)),
            "psi" if arg.is_empty() => Ok(Projection::Psi),
            "coords" => {
                let arg = arg.trim();
                let pairs: Vec<(usize, usize)> = if arg.contains('(') {
                    arg.split(')')
                        .map(|p| p.trim_start_matches([',', ' ', '(']))
                        .filter(|p| !p.is_empty())
                        .map(|p| {
                            let (r, c) = p.split_once(',').ok_or_else(bad)?;
                            Ok((index(r)?, index(c)?))
                        })
                        .collect::<Result<_>>()?
                } else {
                    arg.split(',')
                        .map(|p| {
                            let p = p.trim();
                            if let Some((r, c)) = p.split_once('.') {
                                return Ok((index(r)?, index(c)?));
                            }
                            if p.len() != 2 {
                                return Err(bad());
                            }
                            Ok((index(&p[..1])?, index(&p[1..])?))
                        })
                        .collect::<Result<_>>()?
                };
                Ok(Projection::Coords(pairs))
            }
            _ => Err(bad()),
        }
    }
}

/// Parameters of `C_{A,k,π}` evaluated at the powers `A^e`, `e ∈ points`.
#[derive(Clone, Debug)]
pub struct EvalSpec {
    root: PrimitiveRoot,
    k: usize,
    points: Vec<usize>,
    projection: Projection,
    /// `π(A^e)` for `0 ≤ e < m`.
    table: Vec<Vec<Elem>>,
}

fn flatten(m: &Matrix) -> Vec<Elem> {
    m.data().to_vec()
}

impl EvalSpec {
    /// Full-point spec: all `m = q^ℓ − 1` powers of `A`.
    pub fn new(root: PrimitiveRoot, k: usize, projection: Projection) -> Result<Self> {
        let m = root.order();
        Self::with_points(root, k, (0..m).collect(), projection)
    }

    /// Evaluation at the first `count` powers `A^0 … A^{count−1}`.
    pub fn prefix(root: PrimitiveRoot, k: usize, count: usize, projection: Projection) -> Result<Self> {
        Self::with_points(root, k, (0..count).collect(), projection)
    }

    /// Evaluation at the last `count` powers `A^{m−count} … A^{m−1}`.
    pub fn suffix(root: PrimitiveRoot, k: usize, count: usize, projection: Projection) -> Result<Self> {
        let m = root.order();
        if count > m {
            return Err(Error::InvalidParameters(format!("{count} points exceed m = {m}")));
        }
        Self::with_points(root, k, (m - count..m).collect(), projection)
    }

    pub fn with_points(root: PrimitiveRoot, k: usize, points: Vec<usize>, projection: Projection) -> Result<Self> {
        let f = root.field().clone();
        let l = root.size();
        let m = root.order();
        let full = (f.order() as u64).checked_pow(l as u32).map(|v| v - 1);
        if full != Some(m as u64) {
            return Err(Error::InvalidParameters(format!("root order {m} is not {}^{l} - 1", f.order())));
        }
        if k == 0 || k > points.len() {
            return Err(Error::InvalidParameters(format!("k = {k} must lie in 1..={}", points.len())));
        }
        if points.iter().any(|&p| p >= m) {
            return Err(Error::InvalidParameters("evaluation exponent out of range".into()));
        }
        projection.validate(l)?;

        let a = root.matrix();
        let mut powers = Vec::with_capacity(m);
        let mut acc = Matrix::identity(&f, l);
        for _ in 0..m {
            let next = &acc * a;
            powers.push(acc);
            acc = next;
        }
        // F_q[A] has F_q-basis I, A, …, A^{ℓ−1} exactly when these are independent.
        let span = Matrix::from_rows(&f, &powers[..l].iter().map(flatten).collect::<Vec<_>>())?;
        if span.rank() != l {
            return Err(Error::InvalidParameters("F_q[A] is not a degree-l extension".into()));
        }
        let span_t = span.transpose();
        let psi =
            |b: &Matrix| -> Vec<Elem> { span_t.solve(&flatten(b)).expect("shape").expect("powers of A lie in F_q[A]") };
        let table = powers
            .iter()
            .map(|b| match &projection {
                Projection::Row(i) => b.row(*i).to_vec(),
                Projection::Col(j) => b.column(*j),
                Projection::Coords(c) => c.iter().map(|&(r, s)| b.get(r, s)).collect(),
                Projection::Psi => psi(b),
                Projection::PsiPi(p) => p.vec_mul(&psi(b)).expect("shape"),
            })
            .collect();
        Ok(Self { root, k, points, projection, table })
    }

    pub fn field(&self) -> &FieldRef {
        self.root.field()
    }

    pub fn root(&self) -> &PrimitiveRoot {
        &self.root
    }

    pub fn l(&self) -> usize {
        self.root.size()
    }

    pub fn m(&self) -> usize {
        self.root.order()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    /// Evaluation at every power of `A`, in order.
    pub fn is_full(&self) -> bool {
        self.points.len() == self.m() && self.points.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `dim_{F_q} ker π` on `F_q[A]`.
    pub fn projection_kernel_dim(&self) -> usize {
        let l = self.l();
        let rows: Vec<Vec<Elem>> = self.table[..l].to_vec();
        l - Matrix::from_rows(self.field(), &rows).expect("rows").rank()
    }

    /// `kℓ − dim ker π^{×m′}`, clamped at zero.
    pub fn dimension_bound(&self) -> usize {
        (self.k * self.l()).saturating_sub(self.points.len() * self.projection_kernel_dim())
    }

    /// `π(A^e)`.
    pub fn project_power(&self, e: usize) -> &[Elem] {
        &self.table[e % self.m()]
    }
}

/// Encodes `P(X) = Σ P_i X^i` with coefficients `P_i ∈ F_q[A]`.
pub fn eval_encode(coeffs: &[Matrix], spec: &EvalSpec) -> Result<Vec<Elem>> {
    if coeffs.len() > spec.k() {
        return Err(Error::InvalidParameters(format!("{} coefficients for degree bound {}", coeffs.len(), spec.k())));
    }
    let f = spec.field();
    let l = spec.l();
    let m = spec.m();
    let a = spec.root().matrix();
    let mut basis_rows = Vec::with_capacity(l);
    let mut acc = Matrix::identity(f, l);
    for _ in 0..l {
        basis_rows.push(flatten(&acc));
        acc = &acc * a;
    }
    let basis_t = Matrix::from_rows(f, &basis_rows)?.transpose();
    // P_i = Σ_j p_{ij} A^j, so π(P(A^t)) = Σ_{i,j} p_{ij} π(A^{j + it}).
    let mut digits = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        if c.rows() != l || c.cols() != l {
            return Err(Error::DimensionMismatch(format!("coefficient is {}x{}", c.rows(), c.cols())));
        }
        let d =
            basis_t.solve(&flatten(c))?.ok_or_else(|| Error::InvalidParameters("coefficient outside F_q[A]".into()))?;
        digits.push(d);
    }
    let mut out = Vec::with_capacity(spec.points().len() * l);
    for &t in spec.points() {
        let mut block = vec![Elem::ZERO; l];
        for (i, d) in digits.iter().enumerate() {
            for (j, &p) in d.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let v = spec.project_power((j + i * t) % m);
                for (b, &x) in block.iter_mut().zip(v) {
                    *b = f.add(*b, f.mul(p, x));
                }
            }
        }
        out.extend(block);
    }
    Ok(out)
}

/// An evaluation code and whether it is known to be quasi-cyclic.
#[derive(Clone, Debug)]
pub struct EvalCode {
    pub code: LinearCode,
    pub quasi_cyclic: bool,
    /// Rows before echelon reduction, indexed by `(i, j)` for the monomial
    /// `A^j X^i`.
    pub monomial_rows: Matrix,
}

/// Generator from the images of the monomials `A^j X^i`, `(i, j)` in
/// lexicographic order.
pub fn eval_code_build(spec: &EvalSpec) -> Result<EvalCode> {
    let f = spec.field();
    let l = spec.l();
    let n = spec.points().len() * l;
    let mut rows = Vec::with_capacity(spec.k() * l);
    for i in 0..spec.k() {
        for j in 0..l {
            let mut row = Vec::with_capacity(n);
            for &t in spec.points() {
                row.extend_from_slice(spec.project_power(j + i * t));
            }
            rows.push(row);
        }
    }
    let monomial_rows = Matrix::from_rows(f, &rows)?;
    let code = LinearCode::new(&monomial_rows, spec.points().len(), l)?;
    let quasi_cyclic = spec.is_full();
    if quasi_cyclic && !code.is_quasi_cyclic() {
        return Err(Error::NotQuasiCyclic("full-point evaluation code".into()));
    }
    Ok(EvalCode { code, quasi_cyclic, monomial_rows })
}

/// `C_{A,k,π}` at the first `points` powers of `A`.
pub fn eval_code_shortened(spec: &EvalSpec, points: usize) -> Result<EvalCode> {
    let short = EvalSpec::prefix(spec.root().clone(), spec.k(), points, spec.projection().clone())?;
    eval_code_build(&short)
}

/// Whether the block distance of `code` reaches `m′ − k + 1`.
pub fn mds_like_bound_check(block_distance: usize, spec: &EvalSpec) -> bool {
    block_distance + spec.k() > spec.points().len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::Field;
    use crate::qbch::primitive_root_companion;

    fn small_root() -> PrimitiveRoot {
        // q = 2, ℓ = 2, m = 3.
        primitive_root_companion(2, 1, 2, 3).unwrap()
    }

    #[test]
    fn projection_text_round_trip() {
        for s in ["row:1", "col:3", "coords:21,12,23", "psi"] {
            assert_eq!(s.parse::<Projection>().unwrap().to_string(), s);
        }
        assert_eq!(
            "coords:(2,1),(1,2),(2,3)".parse::<Projection>().unwrap(),
            Projection::Coords(vec![(1, 0), (0, 1), (1, 2)])
        );
        assert_eq!("coords:2.1,1.2".parse::<Projection>().unwrap(), Projection::Coords(vec![(1, 0), (0, 1)]));
        for bad in ["row:0", "row", "diag:1", "coords:123", "psi:2"] {
            assert!(bad.parse::<Projection>().is_err(), "{bad}");
        }
    }

    #[test]
    fn constant_identity_under_first_row() {
        let spec = EvalSpec::new(small_root(), 2, Projection::Row(0)).unwrap();
        let f = spec.field().clone();
        let word = eval_encode(&[Matrix::identity(&f, 2)], &spec).unwrap();
        assert_eq!(word, [1, 0, 1, 0, 1, 0].map(Elem).to_vec());
        assert!(eval_encode(&[], &spec).unwrap().iter().all(|e| e.is_zero()));
        let over = vec![Matrix::identity(&f, 2); 3];
        assert!(eval_encode(&over, &spec).is_err());
        let outside = Matrix::from_u32(&f, &[&[1, 0], &[0, 0]]).unwrap();
        assert!(eval_encode(&[outside], &spec).is_err());
    }

    #[test]
    fn injective_projections_give_full_dimension() {
        for proj in [Projection::Row(1), Projection::Col(0), Projection::Psi] {
            for k in 1..=3 {
                let spec = EvalSpec::new(small_root(), k, proj.clone()).unwrap();
                let built = eval_code_build(&spec).unwrap();
                assert_eq!(built.code.dimension(), 2 * k, "{proj} k={k}");
                assert!(built.quasi_cyclic);
                assert_eq!(spec.projection_kernel_dim(), 0);
            }
        }
    }

    #[test]
    fn encoding_matches_generator_rows() {
        let spec = EvalSpec::new(small_root(), 2, Projection::Psi).unwrap();
        let built = eval_code_build(&spec).unwrap();
        let f = spec.field().clone();
        let a = spec.root().matrix().clone();
        // P(X) = A X: the monomial (i, j) = (1, 1).
        let zero = Matrix::zeros(&f, 2, 2);
        let word = eval_encode(&[zero, a], &spec).unwrap();
        assert_eq!(word, built.monomial_rows.row(3));
        assert!(built.code.contains(&word));
    }

    #[test]
    fn rejects_invalid_specs() {
        let root = small_root();
        assert!(EvalSpec::new(root.clone(), 4, Projection::Psi).is_err());
        assert!(EvalSpec::new(root.clone(), 1, Projection::Row(2)).is_err());
        assert!(EvalSpec::new(root.clone(), 1, Projection::Coords(vec![(0, 0), (0, 0)])).is_err());
        assert!(EvalSpec::prefix(root.clone(), 3, 2, Projection::Psi).is_err());
        // A root of order 7 in M_3(F_2) is fine; one of order 21 over F_4 is not q^l - 1.
        let r21 = primitive_root_companion(2, 2, 3, 21).unwrap();
        assert!(EvalSpec::new(r21, 2, Projection::Psi).is_err());
        let f2 = Field::gf(2, 1).unwrap();
        let r7 = primitive_root_companion(2, 1, 3, 7).unwrap();
        assert_eq!(r7.field(), &f2);
        assert!(EvalSpec::new(r7, 2, Projection::Psi).is_ok());
    }

    #[test]
    fn prefix_and_suffix_shortenings() {
        let root = primitive_root_companion(2, 1, 3, 7).unwrap();
        let spec = EvalSpec::new(root.clone(), 2, Projection::Row(0)).unwrap();
        let full = eval_code_build(&spec).unwrap();
        let same = eval_code_shortened(&spec, 7).unwrap();
        assert_eq!(same.code, full.code);
        let short = eval_code_shortened(&spec, 5).unwrap();
        assert!(!short.quasi_cyclic);
        assert_eq!(short.code.length(), 15);
        let tail = eval_code_build(&EvalSpec::suffix(root, 2, 5, Projection::Row(0)).unwrap()).unwrap();
        assert_eq!(tail.code.dimension(), short.code.dimension());
    }
}
