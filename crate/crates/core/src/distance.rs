//! Exact minimum distance and block distance of small codes.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decode::combinations;
use crate::error::{Error, Result};
use crate::galois::{Elem, FieldRef};
use crate::matring::Matrix;
use crate::qccore::LinearCode;

/// Default cap on the number of codewords `min_distance_enum` visits.
pub const ENUM_BUDGET: u128 = 1 << 26;
/// Default cap on the number of supports the low-weight search visits.
pub const SUPPORT_BUDGET: u128 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Enumeration,
    LowWeight,
    BlockSupport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub n: usize,
    pub k: usize,
    pub q: u32,
    /// Every nonzero codeword has at least this weight.
    pub lower: usize,
    /// Weight of `witness`, when one was found.
    pub upper: Option<usize>,
    pub exact: bool,
    pub block_distance: Option<usize>,
    pub method: Method,
    pub witness: Option<Vec<u32>>,
    pub elapsed_ms: u128,
}

impl DistanceReport {
    /// The distance if it is known exactly.
    pub fn distance(&self) -> Option<usize> {
        self.exact.then_some(self.lower)
    }

    /// `[n,k,d]_q`, or `[n,k,≥d]_q` for a bound.
    pub fn parameters(&self) -> String {
        if self.exact {
            format!("[{},{},{}]_{}", self.n, self.k, self.lower, self.q)
        } else {
            format!("[{},{},>={}]_{}", self.n, self.k, self.lower, self.q)
        }
    }
}

fn hamming_weight(x: &[Elem]) -> usize {
    x.iter().filter(|e| !e.is_zero()).count()
}

pub fn block_weight(x: &[Elem], l: usize) -> usize {
    x.chunks(l).filter(|b| b.iter().any(|e| !e.is_zero())).count()
}

/// Best candidate within one partition of the message space.
#[derive(Clone, Debug)]
struct Best {
    weight: usize,
    witness: Vec<Elem>,
    block: usize,
}

impl Best {
    fn none(n: usize) -> Self {
        Self { weight: usize::MAX, witness: vec![Elem::ZERO; n], block: usize::MAX }
    }

    fn merge(mut self, other: Best) -> Best {
        if other.weight < self.weight || (other.weight == self.weight && other.witness < self.witness) {
            self.weight = other.weight;
            self.witness = other.witness;
        }
        self.block = self.block.min(other.block);
        self
    }
}

/// Index of the digit that changes between Gray words `t−1` and `t`: the
/// `p`-adic valuation of `t`.
#[inline]
fn gray_digit(mut t: u64, p: u64) -> usize {
    if p == 2 {
        return t.trailing_zeros() as usize;
    }
    let mut v = 0;
    while t % p == 0 {
        t /= p;
        v += 1;
    }
    v
}

/// Bit-plane packing of `F_{2^a}` vectors with whole blocks per word.
struct Packing {
    planes: usize,
    words: usize,
    per_word: usize,
    l: usize,
    block_starts: Vec<u64>,
}

impl Packing {
    fn new(n: usize, l: usize, planes: usize) -> Self {
        let per_word = (64 / l).max(1);
        let blocks = n / l;
        let words = blocks.div_ceil(per_word);
        let mut block_starts = vec![0u64; words];
        for b in 0..blocks {
            block_starts[b / per_word] |= 1u64 << ((b % per_word) * l);
        }
        Self { planes, words, per_word, l, block_starts }
    }

    fn pack(&self, x: &[Elem]) -> Vec<u64> {
        let mut out = vec![0u64; self.planes * self.words];
        for (pos, e) in x.iter().enumerate() {
            let (blk, j) = (pos / self.l, pos % self.l);
            let (w, bit) = (blk / self.per_word, (blk % self.per_word) * self.l + j);
            for pl in 0..self.planes {
                if (e.0 >> pl) & 1 == 1 {
                    out[pl * self.words + w] |= 1u64 << bit;
                }
            }
        }
        out
    }

    fn unpack(&self, v: &[u64], n: usize) -> Vec<Elem> {
        (0..n)
            .map(|pos| {
                let (blk, j) = (pos / self.l, pos % self.l);
                let (w, bit) = (blk / self.per_word, (blk % self.per_word) * self.l + j);
                let mut x = 0u32;
                for pl in 0..self.planes {
                    x |= (((v[pl * self.words + w] >> bit) & 1) as u32) << pl;
                }
                Elem(x)
            })
            .collect()
    }

    /// Hamming and block weight.
    #[inline]
    fn weights(&self, v: &[u64]) -> (usize, usize) {
        let mut hw = 0;
        let mut bw = 0;
        for w in 0..self.words {
            let mut any = 0u64;
            for pl in 0..self.planes {
                any |= v[pl * self.words + w];
            }
            hw += any.count_ones() as usize;
            let mut fold = any;
            for s in 1..self.l {
                fold |= any >> s;
            }
            bw += (fold & self.block_starts[w]).count_ones() as usize;
        }
        (hw, bw)
    }
}

/// Exact distance by visiting all `q^k − 1` nonzero codewords in Gray order.
pub fn min_distance_enum(code: &LinearCode, budget: u128) -> Result<DistanceReport> {
    let start = Instant::now();
    let f = code.field().clone();
    let (n, k, l) = (code.length(), code.dimension(), code.block_length());
    let q = f.order();
    let total = (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded { needed: total, budget });
    }
    if k == 0 {
        return Err(Error::InvalidParameters("the zero code has no minimum distance".into()));
    }
    let p = f.characteristic() as u64;
    let a = f.degree() as usize;
    // Digit d = i·a + b stands for the row multiple X^b · g_i.
    let g = code.generator();
    let digit_rows: Vec<Vec<Elem>> = (0..k)
        .flat_map(|i| (0..a).map(move |b| (i, b)))
        .map(|(i, b)| {
            let beta = Elem((p as u32).pow(b as u32));
            g.row(i).iter().map(|&x| f.mul(beta, x)).collect()
        })
        .collect();
    let digits = digit_rows.len();
    // Partition on the top digits so each worker walks one Gray sequence.
    let mut top = 0;
    while top < digits && (p as u128).pow(top as u32 + 1) <= 1024 && digits - top > 1 {
        top += 1;
    }
    let low = digits - top;
    let parts = p.pow(top as u32);
    let steps = p.pow(low as u32);

    let best = if p == 2 {
        let pk = Packing::new(n, l, a);
        let packed: Vec<Vec<u64>> = digit_rows.iter().map(|r| pk.pack(r)).collect();
        (0..parts)
            .into_par_iter()
            .map(|part| {
                let mut v = vec![0u64; pk.planes * pk.words];
                for d in 0..top {
                    if (part >> d) & 1 == 1 {
                        for (x, y) in v.iter_mut().zip(&packed[low + d]) {
                            *x ^= y;
                        }
                    }
                }
                let mut best = Best::none(n);
                for t in 0..steps {
                    if t > 0 {
                        let d = gray_digit(t, 2);
                        for (x, y) in v.iter_mut().zip(&packed[d]) {
                            *x ^= y;
                        }
                    }
                    let (hw, bw) = pk.weights(&v);
                    if hw == 0 {
                        continue;
                    }
                    best.block = best.block.min(bw);
                    if hw < best.weight {
                        best.weight = hw;
                        best.witness = pk.unpack(&v, n);
                    } else if hw == best.weight {
                        let w = pk.unpack(&v, n);
                        if w < best.witness {
                            best.witness = w;
                        }
                    }
                }
                best
            })
            .reduce(|| Best::none(n), Best::merge)
    } else {
        let sparse: Vec<Vec<(usize, Elem)>> = digit_rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(i, &e)| (i, e)).collect())
            .collect();
        (0..parts)
            .into_par_iter()
            .map(|part| {
                let mut v = vec![Elem::ZERO; n];
                let mut rest = part;
                for d in 0..top {
                    let mult = rest % p;
                    rest /= p;
                    for _ in 0..mult {
                        for &(i, e) in &sparse[low + d] {
                            v[i] = f.add(v[i], e);
                        }
                    }
                }
                let mut hw = hamming_weight(&v);
                let mut per_block: Vec<usize> = v.chunks(l).map(hamming_weight).collect();
                let mut bw = per_block.iter().filter(|&&c| c > 0).count();
                let mut best = Best::none(n);
                for t in 0..steps {
                    if t > 0 {
                        for &(i, e) in &sparse[gray_digit(t, p)] {
                            let old = v[i];
                            let new = f.add(old, e);
                            v[i] = new;
                            match (old.is_zero(), new.is_zero()) {
                                (true, false) => {
                                    hw += 1;
                                    per_block[i / l] += 1;
                                    if per_block[i / l] == 1 {
                                        bw += 1;
                                    }
                                }
                                (false, true) => {
                                    hw -= 1;
                                    per_block[i / l] -= 1;
                                    if per_block[i / l] == 0 {
                                        bw -= 1;
                                    }
                                }
                                _ => {}
                            }
                        }
                    }
                    if hw == 0 {
                        continue;
                    }
                    best.block = best.block.min(bw);
                    if hw < best.weight || (hw == best.weight && v < best.witness) {
                        best.weight = hw;
                        best.witness.clone_from(&v);
                    }
                }
                best
            })
            .reduce(|| Best::none(n), Best::merge)
    };

    Ok(DistanceReport {
        n,
        k,
        q,
        lower: best.weight,
        upper: Some(best.weight),
        exact: true,
        block_distance: Some(best.block),
        method: Method::Enumeration,
        witness: Some(best.witness.iter().map(|e| e.0).collect()),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of supports of size `w` the pruned search visits.
fn support_count(n: usize, w: usize, first_choices: usize) -> u128 {
    (0..first_choices).map(|f| binomial(n - f - 1, w - 1)).sum()
}

/// Columns of `H` over `F_2` as bit masks; `H` has at most 128 rows.
fn binary_columns(h: &Matrix) -> Vec<u128> {
    (0..h.cols()).map(|c| (0..h.rows()).filter(|&r| !h.get(r, c).is_zero()).fold(0u128, |v, r| v | 1 << r)).collect()
}

/// Depth-first search for `depth` more columns after `from` whose XOR with
/// `acc` is zero. The last column is found by binary search in `lookup`.
fn xor_dfs(
    cols: &[u128],
    lookup: &[(u128, usize)],
    acc: u128,
    from: usize,
    depth: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if depth == 1 {
        let i = lookup.partition_point(|&e| e < (acc, from));
        if let Some(&(c, j)) = lookup.get(i) {
            if c == acc {
                chosen.push(j);
                return true;
            }
        }
        return false;
    }
    for c in from..cols.len() {
        chosen.push(c);
        if xor_dfs(cols, lookup, acc ^ cols[c], c + 1, depth - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Echelon basis grown one column at a time.
struct Echelon {
    f: FieldRef,
    rows: Vec<(usize, Vec<Elem>)>,
}

impl Echelon {
    /// Reduces `v`; returns the reduced vector's pivot, or `None` if it
    /// reduces to zero.
    fn insert(&mut self, mut v: Vec<Elem>) -> Option<usize> {
        let f = &self.f;
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if !c.is_zero() {
                for (a, &b) in v.iter_mut().zip(row) {
                    *a = f.sub(*a, f.mul(c, b));
                }
            }
        }
        let piv = v.iter().position(|e| !e.is_zero())?;
        let inv = f.inv(v[piv]).unwrap();
        for a in v.iter_mut() {
            *a = f.mul(*a, inv);
        }
        self.rows.push((piv, v));
        Some(piv)
    }
}

fn generic_dfs(cols: &[Vec<Elem>], ech: &mut Echelon, from: usize, depth: usize, chosen: &mut Vec<usize>) -> bool {
    for c in from..cols.len() {
        chosen.push(c);
        match ech.insert(cols[c].clone()) {
            None if depth == 1 => return true,
            None => {}
            Some(_) => {
                if depth > 1 && generic_dfs(cols, ech, c + 1, depth - 1, chosen) {
                    return true;
                }
                ech.rows.pop();
            }
        }
        chosen.pop();
    }
    false
}

/// Codeword supported on `support` (its columns of `H` are dependent).
fn witness_on_support(code: &LinearCode, h: &Matrix, support: &[usize]) -> Option<Vec<Elem>> {
    let sub = h.select_columns(support);
    let ns = sub.nullspace();
    (0..ns.rows()).map(|r| ns.row(r)).find(|x| x.iter().all(|e| !e.is_zero())).map(|x| {
        let mut w = vec![Elem::ZERO; code.length()];
        for (&pos, &v) in support.iter().zip(x) {
            w[pos] = v;
        }
        w
    })
}

/// Distance by iterative deepening over supports of size `1..=w_max`.
///
/// For quasi-cyclic codes only supports whose least position lies in the
/// first block are visited, since shifting by whole blocks preserves weight.
pub fn min_distance_low_weight(code: &LinearCode, w_max: usize, budget: u128) -> Result<DistanceReport> {
    let start = Instant::now();
    let f = code.field().clone();
    let (n, k, l) = (code.length(), code.dimension(), code.block_length());
    if k == 0 {
        return Err(Error::InvalidParameters("the zero code has no minimum distance".into()));
    }
    let h = code.parity_check();
    let first_choices = if code.is_quasi_cyclic() { l.min(n) } else { n };
    let needed: u128 = (1..=w_max.min(n)).map(|w| support_count(n, w, first_choices)).sum();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let report = |lower: usize, witness: Option<Vec<Elem>>| DistanceReport {
        n,
        k,
        q: f.order(),
        lower,
        upper: witness.as_ref().map(|w| hamming_weight(w)),
        exact: witness.is_some(),
        block_distance: None,
        method: Method::LowWeight,
        witness: witness.map(|w| w.iter().map(|e| e.0).collect()),
        elapsed_ms: start.elapsed().as_millis(),
    };
    if h.rows() == 0 {
        // Full space: any unit vector.
        let mut w = vec![Elem::ZERO; n];
        w[n - 1] = Elem::ONE;
        return Ok(report(1, Some(w)));
    }

    let binary = f.order() == 2 && h.rows() <= 128;
    let bcols = if binary { binary_columns(&h) } else { Vec::new() };
    let gcols: Vec<Vec<Elem>> = if binary { Vec::new() } else { (0..n).map(|c| h.column(c)).collect() };
    let mut lookup: Vec<(u128, usize)> = bcols.iter().copied().zip(0..).collect();
    lookup.sort_unstable();

    for w in 1..=w_max.min(n) {
        // Partition by the first two support positions; the lexicographically
        // least support wins.
        let prefixes: Vec<Vec<usize>> = if w == 1 {
            (0..first_choices).map(|a| vec![a]).collect()
        } else {
            (0..first_choices).flat_map(|a| (a + 1..n).map(move |b| vec![a, b])).collect()
        };
        let hit = prefixes.par_iter().find_map_first(|pre| {
            let mut chosen = pre.clone();
            let found = if binary {
                let acc = pre.iter().fold(0u128, |a, &c| a ^ bcols[c]);
                if pre.len() == w {
                    acc == 0
                } else {
                    xor_dfs(&bcols, &lookup, acc, pre[pre.len() - 1] + 1, w - pre.len(), &mut chosen)
                }
            } else {
                let mut ech = Echelon { f: f.clone(), rows: Vec::new() };
                let mut dependent = false;
                for (i, &c) in pre.iter().enumerate() {
                    if ech.insert(gcols[c].clone()).is_none() {
                        dependent = i + 1 == w;
                        if !dependent {
                            return None;
                        }
                    }
                }
                if pre.len() == w {
                    dependent
                } else {
                    generic_dfs(&gcols, &mut ech, pre[pre.len() - 1] + 1, w - pre.len(), &mut chosen)
                }
            };
            found.then_some(chosen)
        });
        if let Some(support) = hit {
            let witness = witness_on_support(code, &h, &support)
                .ok_or_else(|| Error::InvalidParameters("dependent support without a full-weight word".into()))?;
            debug_assert!(code.contains(&witness));
            return Ok(report(w, Some(witness)));
        }
    }
    Ok(report(w_max.min(n) + 1, None))
}

/// Block distance by searching sets of blocks that carry a nonzero codeword.
pub fn block_min_distance(code: &LinearCode, budget: u128) -> Result<usize> {
    let (m, l) = (code.blocks(), code.block_length());
    if code.dimension() == 0 {
        return Err(Error::InvalidParameters("the zero code has no block distance".into()));
    }
    let h = code.parity_check();
    if h.rows() == 0 {
        return Ok(1);
    }
    let qc = code.is_quasi_cyclic();
    let mut visited: u128 = 0;
    for b in 1..=m {
        let sets: Vec<Vec<usize>> = if qc {
            combinations(m - 1, b - 1)
                .into_iter()
                .map(|rest| std::iter::once(0).chain(rest.into_iter().map(|x| x + 1)).collect())
                .collect()
        } else {
            combinations(m, b)
        };
        visited += sets.len() as u128;
        if visited > budget {
            return Err(Error::BudgetExceeded { needed: visited, budget });
        }
        let hit = sets.par_iter().any(|set| {
            let cols: Vec<usize> = set.iter().flat_map(|&blk| blk * l..(blk + 1) * l).collect();
            h.select_columns(&cols).rank() < cols.len()
        });
        if hit {
            return Ok(b);
        }
    }
    unreachable!("a nonzero code has a codeword on all blocks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::Field;
    use crate::matring::MatrixPolynomial;
    use crate::qccore::code_from_generator;
    use proptest::prelude::*;

    fn random_qc(q: u32, m: usize, l: usize, seed: &[u32]) -> LinearCode {
        let f = Field::of_order(q).unwrap();
        let coeffs = (0..2)
            .map(|d| {
                let data = (0..l * l).map(|i| Elem(seed[(d * l * l + i) % seed.len()] % q)).collect();
                Matrix::new(&f, l, l, data).unwrap()
            })
            .collect();
        code_from_generator(&MatrixPolynomial::new(&f, l, coeffs).unwrap(), m).unwrap()
    }

    fn brute(code: &LinearCode) -> (usize, usize) {
        let f = code.field().clone();
        let (k, q) = (code.dimension(), f.order() as u64);
        let mut best = (usize::MAX, usize::MAX);
        for idx in 1..q.pow(k as u32) {
            let msg: Vec<Elem> = (0..k).map(|i| Elem(((idx / q.pow(i as u32)) % q) as u32)).collect();
            let c = code.encode(&msg).unwrap();
            best.0 = best.0.min(hamming_weight(&c));
            best.1 = best.1.min(block_weight(&c, code.block_length()));
        }
        best
    }

    #[test]
    fn repetition_code() {
        let f = Field::gf(3, 1).unwrap();
        let code = LinearCode::from_rows(&f, &[vec![Elem(1); 6]], 3, 2).unwrap();
        let r = min_distance_enum(&code, ENUM_BUDGET).unwrap();
        assert_eq!(r.distance(), Some(6));
        assert_eq!(r.block_distance, Some(3));
        assert_eq!(r.witness, Some(vec![1; 6]));
        assert_eq!(r.parameters(), "[6,1,6]_3");
    }

    #[test]
    fn hamming_code_all_methods() {
        let f = Field::gf(2, 1).unwrap();
        let g = MatrixPolynomial::new(&f, 1, [1, 1, 0, 1].iter().map(|&c| Matrix::scalar(&f, 1, Elem(c))).collect())
            .unwrap();
        let code = code_from_generator(&g, 7).unwrap();
        let e = min_distance_enum(&code, ENUM_BUDGET).unwrap();
        let lw = min_distance_low_weight(&code, 5, SUPPORT_BUDGET).unwrap();
        assert_eq!(e.distance(), Some(3));
        assert_eq!(lw.distance(), Some(3));
        assert_eq!(block_min_distance(&code, SUPPORT_BUDGET).unwrap(), 3);
        let bound = min_distance_low_weight(&code, 2, SUPPORT_BUDGET).unwrap();
        assert!(!bound.exact);
        assert_eq!(bound.lower, 3);
        assert_eq!(bound.parameters(), "[7,4,>=3]_2");
    }

    #[test]
    fn planted_weight_two_word() {
        let f = Field::gf(2, 2).unwrap();
        let rows =
            vec![vec![Elem(1), Elem(0), Elem(0), Elem(3), Elem(0)], vec![Elem(0), Elem(1), Elem(1), Elem(1), Elem(2)]];
        let code = LinearCode::from_rows(&f, &rows, 5, 1).unwrap();
        let lw = min_distance_low_weight(&code, 4, SUPPORT_BUDGET).unwrap();
        assert_eq!(lw.distance(), Some(2));
        let w: Vec<Elem> = lw.witness.unwrap().into_iter().map(Elem).collect();
        assert!(code.contains(&w));
        assert_eq!(min_distance_enum(&code, ENUM_BUDGET).unwrap().distance(), Some(2));
    }

    #[test]
    fn budgets_are_enforced() {
        let f = Field::gf(2, 1).unwrap();
        let code = LinearCode::full(&f, 10, 3);
        assert!(matches!(min_distance_enum(&code, 1 << 20), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(min_distance_low_weight(&code, 3, 10), Err(Error::BudgetExceeded { .. })));
        assert_eq!(min_distance_low_weight(&code, 3, SUPPORT_BUDGET).unwrap().distance(), Some(1));
        assert!(min_distance_enum(&LinearCode::zero(&f, 2, 2), ENUM_BUDGET).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn methods_agree_with_brute_force(seed in proptest::collection::vec(any::<u32>(), 18),
                                          qi in 0usize..4, m in 2usize..6, l in 1usize..4) {
            let q = [2, 3, 4, 5][qi];
            let code = random_qc(q, m, l, &seed);
            prop_assume!(code.dimension() > 0 && (q as u64).pow(code.dimension() as u32) < 1 << 14);
            let (d, bd) = brute(&code);
            let e = min_distance_enum(&code, ENUM_BUDGET).unwrap();
            prop_assert_eq!(e.distance(), Some(d));
            prop_assert_eq!(e.block_distance, Some(bd));
            let w: Vec<Elem> = e.witness.clone().unwrap().into_iter().map(Elem).collect();
            prop_assert!(code.contains(&w));
            prop_assert_eq!(hamming_weight(&w), d);
            let lw = min_distance_low_weight(&code, code.length(), SUPPORT_BUDGET).unwrap();
            prop_assert_eq!(lw.distance(), Some(d));
            prop_assert_eq!(block_min_distance(&code, SUPPORT_BUDGET).unwrap(), bd);
            prop_assert!(bd <= d && d <= l * bd);
        }

        #[test]
        fn distance_ignores_row_operations(seed in proptest::collection::vec(any::<u32>(), 18), mix in 1u32..4) {
            let code = random_qc(4, 4, 2, &seed);
            let k = code.dimension();
            prop_assume!(k > 1);
            let f = code.field().clone();
            let mut rows = code.generator().row_vecs();
            let r1 = rows[1].clone();
            for (a, b) in rows[0].iter_mut().zip(r1) {
                *a = f.add(*a, f.mul(Elem(mix), b));
            }
            rows.swap(0, k - 1);
            let other = LinearCode::from_rows(&f, &rows, 4, 2).unwrap();
            let a = min_distance_enum(&code, ENUM_BUDGET).unwrap();
            let b = min_distance_enum(&other, ENUM_BUDGET).unwrap();
            prop_assert_eq!(a.distance(), b.distance());
            prop_assert_eq!(a.witness, b.witness);
        }
    }
}
