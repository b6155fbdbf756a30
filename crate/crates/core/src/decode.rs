//! Key-equation decoding of quasi-BCH codes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::galois::Elem;
use crate::matring::{Matrix, MatrixPolynomial, VectorPolynomial};
use crate::qbch::{syndrome, syndromes_lifted, QbchSpec, SyndromeSequence};

/// A support `W` and the nonzero error blocks `e_i ∈ F_q^ℓ`, `i ∈ W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorHypothesis {
    pub support: Vec<usize>,
    pub blocks: Vec<Vec<Elem>>,
}

impl ErrorHypothesis {
    pub fn empty() -> Self {
        Self { support: Vec::new(), blocks: Vec::new() }
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    /// Blocks of a word with the given block length; zero blocks are skipped.
    pub fn from_word(e: &[Elem], l: usize) -> Self {
        let mut h = Self::empty();
        for (i, b) in e.chunks(l).enumerate() {
            if b.iter().any(|x| !x.is_zero()) {
                h.support.push(i);
                h.blocks.push(b.to_vec());
            }
        }
        h
    }

    pub fn to_word(&self, m: usize, l: usize) -> Vec<Elem> {
        let mut out = vec![Elem::ZERO; m * l];
        for (&i, b) in self.support.iter().zip(&self.blocks) {
            out[i * l..(i + 1) * l].copy_from_slice(b);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocatorEvaluatorPair {
    pub locator: MatrixPolynomial,
    pub evaluator: VectorPolynomial,
}

/// `Λ(X) = ∏_{i∈W} (I − A^i X)`.
pub fn locator_from_support(support: &[usize], spec: &QbchSpec) -> MatrixPolynomial {
    let f = spec.extension();
    let mut acc = MatrixPolynomial::one(f, spec.l());
    for &i in support {
        acc = acc.mul(&MatrixPolynomial::one_minus_bx(spec.power(i as i64))).expect("same ring");
    }
    acc
}

/// `L(X) = Σ_{i∈W} [A^i ∏_{j∈W∖{i}} (I − A^j X)] ⋄ e_i`.
pub fn evaluator_from_error(hyp: &ErrorHypothesis, spec: &QbchSpec) -> VectorPolynomial {
    let f = spec.extension();
    let emb = spec.embedding();
    let mut acc = VectorPolynomial::zero(f, spec.l());
    for (k, &i) in hyp.support.iter().enumerate() {
        let others: Vec<usize> = hyp.support.iter().copied().filter(|&j| j != i).collect();
        let factor = locator_from_support(&others, spec).left_scale(spec.power(i as i64));
        let e = VectorPolynomial::constant(f, hyp.blocks[k].iter().map(|&x| emb.apply(x)).collect());
        acc = acc.add(&crate::matring::diamond(&factor, &e).expect("sizes agree")).expect("same ring");
    }
    acc
}

/// `Σ_j S_{j+1} X^j`.
pub fn syndrome_series(s: &SyndromeSequence, spec: &QbchSpec) -> VectorPolynomial {
    VectorPolynomial::new(spec.extension(), spec.l(), s.values.clone()).expect("syndrome lengths")
}

/// Indices `i` with `Λ(A^{−i}) = 0`.
pub fn chien_search(locator: &MatrixPolynomial, spec: &QbchSpec) -> Vec<usize> {
    (0..spec.m()).filter(|&i| locator.eval_at_matrix(spec.power(-(i as i64))).expect("sizes agree").is_zero()).collect()
}

/// Error blocks from the support and the evaluator:
/// `e_i = A^{i(w−2)} ∏_{j∈W∖{i}} (A^i − A^j)^{−1} L(A^{−i})`.
pub fn error_values(support: &[usize], evaluator: &VectorPolynomial, spec: &QbchSpec) -> Result<Vec<Vec<Elem>>> {
    let w = support.len() as i64;
    let emb = spec.embedding();
    support
        .iter()
        .map(|&i| {
            let ii = i as i64;
            let mut coef = spec.power(ii * (w - 2)).clone();
            for &j in support.iter().filter(|&&j| j != i) {
                let diff = spec.power(ii) - spec.power(j as i64);
                coef = &coef * &diff.inverse()?;
            }
            let v = coef.mul_vec(&evaluator.eval_at_matrix(spec.power(-ii))?)?;
            v.iter()
                .map(|&x| {
                    emb.preimage(x).ok_or_else(|| {
                        Error::DecodingFailure(format!("error value at block {i} is not over the base field"))
                    })
                })
                .collect()
        })
        .collect()
}

/// Solves `Σ_{j∈W} A^{ij} e_j = S_i` with `e_j ∈ F_q^ℓ`; `None` when there is
/// no solution with every block nonzero.
pub fn solve_on_support(support: &[usize], s: &SyndromeSequence, spec: &QbchSpec) -> Option<Vec<Vec<Elem>>> {
    let l = spec.l();
    let sdim = spec.s();
    let rows = s.len() * l;
    let mut sys = Matrix::zeros(spec.base(), rows * sdim, support.len() * l + 1);
    let basis = spec.relative_basis();
    for (i, si) in s.values.iter().enumerate() {
        for (k, &j) in support.iter().enumerate() {
            let blk = spec.power(((i + 1) * j) as i64);
            for r in 0..l {
                for c in 0..l {
                    for (t, &x) in basis.coords(blk.get(r, c)).iter().enumerate() {
                        sys.set((i * l + r) * sdim + t, k * l + c, x);
                    }
                }
            }
        }
        for r in 0..l {
            for (t, &x) in basis.coords(si[r]).iter().enumerate() {
                sys.set((i * l + r) * sdim + t, support.len() * l, x);
            }
        }
    }
    let lhs = sys.columns(0, support.len() * l);
    let rhs = sys.column(support.len() * l);
    let x = lhs.solve(&rhs).ok()??;
    let blocks: Vec<Vec<Elem>> = x.chunks(l).map(<[Elem]>::to_vec).collect();
    if blocks.iter().any(|b| b.iter().all(|e| e.is_zero())) {
        return None;
    }
    Some(blocks)
}

/// All `k`-subsets of `0..m` in lexicographic order.
pub fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..k).rev().find(|&p| cur[p] < m - k + p) else {
            return out;
        };
        cur[pos] += 1;
        for p in pos + 1..k {
            cur[p] = cur[p - 1] + 1;
        }
    }
}

/// Every hypothesis of weight at most `t` explaining `s`; a sweep helper
/// for uniqueness checks.
pub fn all_hypotheses(s: &SyndromeSequence, spec: &QbchSpec) -> Vec<ErrorHypothesis> {
    let mut out = Vec::new();
    for w in 0..=spec.radius() {
        for support in combinations(spec.m(), w) {
            if let Some(blocks) = solve_on_support(&support, s, spec) {
                out.push(ErrorHypothesis { support, blocks });
            }
        }
    }
    out
}

/// Least support (by size, then lexicographically) admitting a solution.
pub fn solve_key_equation_support(s: &SyndromeSequence, spec: &QbchSpec) -> Result<ErrorHypothesis> {
    if s.is_zero() {
        return Ok(ErrorHypothesis::empty());
    }
    for w in 1..=spec.radius() {
        let supports = combinations(spec.m(), w);
        let hit = supports.par_iter().find_map_first(|sup| solve_on_support(sup, s, spec).map(|b| (sup.clone(), b)));
        if let Some((support, blocks)) = hit {
            return Ok(ErrorHypothesis { support, blocks });
        }
    }
    Err(Error::DecodingFailure(format!("no error of block weight at most {} matches the syndrome", spec.radius())))
}

/// Row system of the key equation: unknowns `(λ_0 … λ_t | l_0 … l_{t−1})`,
/// one equation per coefficient `k = 0..δ−2`.
fn key_equation_system(s: &SyndromeSequence, spec: &QbchSpec) -> Matrix {
    let (l, t) = (spec.l(), spec.radius());
    let f = spec.extension();
    let mut sys = Matrix::zeros(f, s.len(), l * (t + 1) + t);
    for k in 0..s.len() {
        for a in 0..=k.min(t) {
            let sv = &s.values[k - a];
            for c in 0..l {
                sys.set(k, a * l + c, sv[c]);
            }
        }
        if k < t {
            sys.set(k, l * (t + 1) + k, f.neg(Elem::ONE));
        }
    }
    sys
}

/// Intersects the solution space of the key-equation system with the
/// locators of supports of size at most `t`.
pub fn solve_key_equation_linear(
    s: &SyndromeSequence,
    spec: &QbchSpec,
) -> Result<(LocatorEvaluatorPair, ErrorHypothesis)> {
    let (l, t) = (spec.l(), spec.radius());
    let f = spec.extension().clone();
    let sys = key_equation_system(s, spec);
    let solutions = sys.nullspace();
    let in_space = |v: &[Elem]| -> bool {
        let mut probe = solutions.clone();
        if probe.rows() == 0 {
            return v.iter().all(|e| e.is_zero());
        }
        let before = probe.rank();
        probe = probe.vstack(&Matrix::new(&f, 1, v.len(), v.to_vec()).expect("row")).expect("widths");
        probe.rank() == before
    };

    let mut found: Vec<(LocatorEvaluatorPair, ErrorHypothesis)> = Vec::new();
    for w in 0..=t {
        for support in combinations(spec.m(), w) {
            let lam = locator_from_support(&support, spec);
            // Read L row by row from the first t equations.
            let mut evaluator_rows = vec![vec![Elem::ZERO; t]; l];
            let mut ok = true;
            for (r, ev_row) in evaluator_rows.iter_mut().enumerate() {
                let mut v = vec![Elem::ZERO; l * (t + 1) + t];
                for a in 0..=t {
                    let c = lam.coeff(a);
                    for j in 0..l {
                        v[a * l + j] = c.get(r, j);
                    }
                }
                for (k, slot) in ev_row.iter_mut().enumerate().take(s.len().min(t)) {
                    let mut acc = Elem::ZERO;
                    for a in 0..=k.min(t) {
                        for j in 0..l {
                            acc = f.add(acc, f.mul(v[a * l + j], s.values[k - a][j]));
                        }
                    }
                    *slot = acc;
                    v[l * (t + 1) + k] = acc;
                }
                if !in_space(&v) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let coeffs: Vec<Vec<Elem>> = (0..t).map(|k| (0..l).map(|r| evaluator_rows[r][k]).collect()).collect();
            let evaluator = VectorPolynomial::new(&f, l, coeffs)?;
            let Ok(blocks) = error_values(&support, &evaluator, spec) else {
                continue;
            };
            if blocks.iter().any(|b| b.iter().all(|e| e.is_zero())) {
                continue;
            }
            let hyp = ErrorHypothesis { support, blocks };
            let word = hyp.to_word(spec.m(), l);
            if syndrome(&word, spec)? != *s {
                continue;
            }
            found.push((LocatorEvaluatorPair { locator: lam, evaluator }, hyp));
        }
    }
    match found.len() {
        0 => Err(Error::DecodingFailure(format!("no locator of degree at most {t} solves the key equation"))),
        1 => Ok(found.pop().unwrap()),
        n => Err(Error::AmbiguousLocator(n)),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Support,
    Linear,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Support => "support",
            Strategy::Linear => "linear",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "support" => Ok(Strategy::Support),
            "linear" => Ok(Strategy::Linear),
            other => Err(Error::InvalidParameters(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub codeword: Vec<Elem>,
    pub error: ErrorHypothesis,
    pub strategy: Strategy,
    /// The output was checked to satisfy every parity condition.
    pub verified: bool,
}

/// Corrects up to `t` block errors in `y`.
pub fn decode(y: &[Elem], spec: &QbchSpec, strategy: Strategy) -> Result<DecodeOutcome> {
    let (m, l) = (spec.m(), spec.l());
    let s = syndrome(y, spec)?;
    let error = match strategy {
        Strategy::Support => solve_key_equation_support(&s, spec)?,
        Strategy::Linear => {
            let (pair, hyp) = solve_key_equation_linear(&s, spec)?;
            let support = chien_search(&pair.locator, spec);
            if support != hyp.support {
                return Err(Error::DecodingFailure("locator roots disagree with its support".into()));
            }
            match error_values(&support, &pair.evaluator, spec) {
                Ok(blocks) if blocks == hyp.blocks => hyp,
                _ => ErrorHypothesis {
                    blocks: solve_on_support(&support, &s, spec)
                        .ok_or_else(|| Error::DecodingFailure("no error values on the located support".into()))?,
                    support,
                },
            }
        }
    };
    let f = spec.base();
    let e = error.to_word(m, l);
    let codeword: Vec<Elem> = y.iter().zip(&e).map(|(&a, &b)| f.sub(a, b)).collect();
    if !syndrome(&codeword, spec)?.is_zero() {
        return Err(Error::DecodingFailure("corrected word fails the parity checks".into()));
    }
    Ok(DecodeOutcome { codeword, error, strategy, verified: true })
}

/// Checks `Λ ⋄ S ≡ L mod X^N` where `S` carries the first `N` syndromes of `e`.
pub fn key_equation_holds(hyp: &ErrorHypothesis, spec: &QbchSpec, precision: usize) -> Result<bool> {
    let emb = spec.embedding();
    let word: Vec<Elem> = hyp.to_word(spec.m(), spec.l()).iter().map(|&x| emb.apply(x)).collect();
    let s = syndromes_lifted(&word, spec, precision)?;
    let lam = locator_from_support(&hyp.support, spec);
    let lhs = crate::matring::diamond(&lam, &syndrome_series(&s, spec))?.truncate(precision);
    Ok(lhs == evaluator_from_error(hyp, spec).truncate(precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::Field;
    use crate::qbch::{primitive_root_companion, qbch_build};
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn small_spec(delta: usize) -> QbchSpec {
        // Order of 8 modulo 21 is 2, so a companion root exists in M_2(F_8).
        let f2 = Field::gf(2, 1).unwrap();
        let root = primitive_root_companion(2, 3, 2, 21).unwrap();
        QbchSpec::new(&f2, root, delta).unwrap()
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(63, 3).len(), 39711);
    }

    #[test]
    fn locator_roots_are_the_support() {
        let spec = small_spec(5);
        assert_eq!(locator_from_support(&[], &spec), MatrixPolynomial::one(spec.extension(), 2));
        for support in [vec![], vec![3], vec![0, 5], vec![1, 7, 20]] {
            let lam = locator_from_support(&support, &spec);
            assert_eq!(lam.degree().unwrap_or(0), support.len());
            assert_eq!(chien_search(&lam, &spec), support);
        }
    }

    #[test]
    fn evaluator_and_error_values_round_trip() {
        let spec = small_spec(5);
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        for _ in 0..50 {
            let w = rng.random_range(0..=2);
            let mut support: Vec<usize> = rand::seq::index::sample(&mut rng, spec.m(), w).into_vec();
            support.sort_unstable();
            let blocks = support
                .iter()
                .map(|_| loop {
                    let b: Vec<Elem> = (0..2).map(|_| Elem(rng.random_range(0..2))).collect();
                    if b.iter().any(|e| !e.is_zero()) {
                        break b;
                    }
                })
                .collect();
            let hyp = ErrorHypothesis { support: support.clone(), blocks };
            let ev = evaluator_from_error(&hyp, &spec);
            assert!(ev.degree().map_or(true, |d| d < w));
            assert_eq!(error_values(&support, &ev, &spec).unwrap(), hyp.blocks);
            assert!(key_equation_holds(&hyp, &spec, 5).unwrap());
            let s = syndrome(&hyp.to_word(21, 2), &spec).unwrap();
            assert_eq!(solve_key_equation_support(&s, &spec).unwrap(), hyp);
            assert_eq!(solve_key_equation_linear(&s, &spec).unwrap().1, hyp);
        }
    }

    #[test]
    fn single_block_evaluator_is_constant() {
        let spec = small_spec(5);
        let hyp = ErrorHypothesis { support: vec![4], blocks: vec![vec![Elem(1), Elem(0)]] };
        let ev = evaluator_from_error(&hyp, &spec);
        assert_eq!(ev.degree(), Some(0));
        assert_eq!(ev.coeff(0), spec.power(4).mul_vec(&[Elem(1), Elem(0)]).unwrap());
    }

    #[test]
    fn decoding_corrects_and_fails_cleanly() {
        let spec = small_spec(5);
        let code = qbch_build(&spec).unwrap();
        let f2 = spec.base().clone();
        let c = code.encode(&(0..code.dimension()).map(|i| Elem((i % 3 == 0) as u32)).collect::<Vec<_>>()).unwrap();
        let out = decode(&c, &spec, Strategy::Support).unwrap();
        assert_eq!(out.codeword, c);
        assert_eq!(out.error.weight(), 0);
        let mut y = c.clone();
        y[0] = f2.add(y[0], Elem::ONE);
        y[31] = f2.add(y[31], Elem::ONE);
        for strategy in [Strategy::Support, Strategy::Linear] {
            let out = decode(&y, &spec, strategy).unwrap();
            assert_eq!(out.codeword, c);
            assert_eq!(out.error.support, vec![0, 15]);
            assert!(out.verified);
            assert_eq!(decode(&out.codeword, &spec, strategy).unwrap().codeword, c);
        }
        assert!("bogus".parse::<Strategy>().is_err());
        assert_eq!("linear".parse::<Strategy>().unwrap(), Strategy::Linear);
    }
}
