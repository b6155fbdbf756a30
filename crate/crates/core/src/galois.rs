//! Small finite fields `F_{p^d}` with table-driven arithmetic.
//!
//! Every field is built directly over its prime field; an element is stored as
//! the integer `Σ c_i p^i` of its little-endian coefficient vector with respect
//! to the residue class of `X` modulo the defining polynomial. Relations such
//! as `F_q ⊆ F_{q^s}` are expressed by [`Embedding`] values rather than by
//! nested representations, so every element has exactly one encoding.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Raw field element: the integer encoding of its coefficient vector.
///
/// An `Elem` carries no reference to its field; all arithmetic goes through a
/// [`Field`]. Use [`FieldElement`] when the owning field must travel along.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type FieldRef = Arc<Field>;

/// Largest field order we are willing to tabulate.
const MAX_ORDER: u64 = 1 << 20;
/// Fields up to this order get full addition and multiplication tables.
const TABLE_ORDER: u32 = 256;

/// Conway polynomials (little-endian, monic) for the fields we use most.
const DEFAULT_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
];

/// A finite field `F_{p^d}` given by a monic irreducible modulus over `F_p`.
pub struct Field {
    p: u32,
    degree: u32,
    order: u32,
    modulus: Vec<u32>,
    primitive: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add_table: Option<Vec<u32>>,
    mul_table: Option<Vec<u32>>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.degree, self.modulus)
    }
}

impl Field {
    /// Builds `F_{p^d}`. Without an explicit modulus the built-in Conway table
    /// is used, falling back to the smallest primitive polynomial.
    pub fn new(p: u32, degree: u32, modulus: Option<&[u32]>) -> Result<FieldRef> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degree == 0 {
            return Err(Error::BadModulus("degree must be positive".into()));
        }
        let order =
            (p as u64).checked_pow(degree).filter(|&o| o <= MAX_ORDER).ok_or(Error::FieldTooLarge { p, degree })?
                as u32;
        let modulus = match modulus {
            Some(m) => {
                validate_modulus(p, degree, m)?;
                m.to_vec()
            }
            None => default_modulus(p, degree),
        };
        Ok(Arc::new(Self::build(p, degree, order, modulus)))
    }

    /// Field with the default modulus.
    pub fn gf(p: u32, degree: u32) -> Result<FieldRef> {
        Self::new(p, degree, None)
    }

    /// Field of order `q`, which must be a prime power.
    pub fn of_order(q: u32) -> Result<FieldRef> {
        let (p, d) = prime_power(q).ok_or_else(|| Error::InvalidParameters(format!("{q} is not a prime power")))?;
        Self::gf(p, d)
    }

    fn build(p: u32, degree: u32, order: u32, modulus: Vec<u32>) -> Self {
        let d = degree as usize;
        let n = order - 1;
        let decode = |v: u32| to_digits(v, p, d);
        let encode = |c: &[u32]| from_digits(c, p);

        // Powers of a candidate; `None` unless it generates the unit group.
        let cycle = |g: u32| -> Option<Vec<u32>> {
            let gd = decode(g);
            let mut exp = Vec::with_capacity(n as usize);
            let mut cur = vec![0u32; d];
            cur[0] = 1;
            for i in 0..n {
                let v = encode(&cur);
                if i > 0 && v == 1 {
                    return None;
                }
                exp.push(v);
                cur = fp::mulmod(&cur, &gd, &modulus, p);
                cur.resize(d, 0);
            }
            (encode(&cur) == 1).then_some(exp)
        };

        let generator = if d == 1 { (p - modulus[0]) % p } else { p };
        let (primitive, exp) = std::iter::once(generator)
            .chain(1..order)
            .filter(|&g| g != 0)
            .find_map(|g| cycle(g).map(|e| (g, e)))
            .expect("irreducible modulus yields a cyclic unit group");

        let mut log = vec![0u32; order as usize];
        for (i, &v) in exp.iter().enumerate() {
            log[v as usize] = i as u32;
        }
        let neg = (0..order).map(|v| encode(&decode(v).iter().map(|&c| (p - c) % p).collect::<Vec<_>>())).collect();

        let mut field = Field {
            p,
            degree,
            order,
            modulus,
            primitive: Elem(primitive),
            exp,
            log,
            neg,
            add_table: None,
            mul_table: None,
        };
        if order <= TABLE_ORDER {
            let o = order as usize;
            let mut add = vec![0u32; o * o];
            let mut mul = vec![0u32; o * o];
            for a in 0..order {
                for b in 0..order {
                    add[a as usize * o + b as usize] = field.add_slow(a, b);
                    mul[a as usize * o + b as usize] = field.mul_slow(a, b);
                }
            }
            field.add_table = Some(add);
            field.mul_table = Some(mul);
        }
        field
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Defining polynomial over `F_p`, little-endian and monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Residue class of `X`: the canonical generator of the field over `F_p`.
    pub fn generator(&self) -> Elem {
        if self.degree == 1 {
            Elem((self.p - self.modulus[0]) % self.p)
        } else {
            Elem(self.p)
        }
    }

    /// Generator of the multiplicative group used for the log tables. Equals
    /// [`Field::generator`] whenever the modulus is primitive.
    pub fn primitive(&self) -> Elem {
        self.primitive
    }

    pub fn is_prime_field(&self) -> bool {
        self.degree == 1
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn coefficients(&self, a: Elem) -> Vec<u32> {
        to_digits(a.0, self.p, self.degree as usize)
    }

    pub fn from_coefficients(&self, c: &[u32]) -> Result<Elem> {
        if c.len() > self.degree as usize || c.iter().any(|&x| x >= self.p) {
            return Err(Error::InvalidParameters(format!(
                "coefficient vector {c:?} is not an element of GF({}^{})",
                self.p, self.degree
            )));
        }
        Ok(Elem(from_digits(c, self.p)))
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order - 1;
        self.exp[((self.log[a as usize] + self.log[b as usize]) % n) as usize]
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.add_table {
            Some(t) => Elem(t[a.index() * self.order as usize + b.index()]),
            None => Elem(self.add_slow(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.mul_table {
            Some(t) => Elem(t[a.index() * self.order as usize + b.index()]),
            None => Elem(self.mul_slow(a.0, b.0)),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.is_zero() {
            return None;
        }
        let n = self.order - 1;
        Some(Elem(self.exp[((n - self.log[a.index()]) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        let inv = self.inv(b).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(a, inv))
    }

    /// `a^e`; negative exponents go through the inverse.
    pub fn pow(&self, a: Elem, e: i64) -> Result<Elem> {
        if a.is_zero() {
            return match e {
                0 => Ok(Elem::ONE),
                e if e > 0 => Ok(Elem::ZERO),
                _ => Err(Error::DivisionByZero),
            };
        }
        let n = (self.order - 1) as i64;
        let l = self.log[a.index()] as i64;
        Ok(Elem(self.exp[(l * e.rem_euclid(n)).rem_euclid(n) as usize]))
    }

    /// Discrete log with respect to [`Field::primitive`].
    pub fn log(&self, a: Elem) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.index()])
    }

    /// `primitive^e`.
    pub fn exp(&self, e: i64) -> Elem {
        let n = (self.order - 1) as i64;
        Elem(self.exp[e.rem_euclid(n) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Elem) -> Result<u32> {
        let l = self.log(a).ok_or(Error::DivisionByZero)?;
        let n = self.order - 1;
        Ok(n / gcd(l, n))
    }

    /// All elements of exact multiplicative order `t`, in increasing encoding.
    pub fn elements_of_order(&self, t: u32) -> Vec<Elem> {
        self.elements().skip(1).filter(|&a| self.element_order(a).ok() == Some(t)).collect()
    }

    /// `GF p d c0 ... cd`
    pub fn spec_line(&self) -> String {
        let mut s = format!("GF {} {}", self.p, self.degree);
        for c in &self.modulus {
            s.push_str(&format!(" {c}"));
        }
        s
    }
}

/// Element bundled with its field, with checked arithmetic.
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: FieldRef,
    value: Elem,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.value == other.value
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn new(field: &FieldRef, value: Elem) -> Result<Self> {
        if !field.contains(value) {
            return Err(Error::NotInField(value.0));
        }
        Ok(Self { field: field.clone(), value })
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, value: Elem) -> Self {
        Self { field: self.field.clone(), value }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.div(self.value, other.value)?))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.with(self.field.inv(self.value).ok_or(Error::DivisionByZero)?))
    }

    pub fn neg(&self) -> Self {
        self.with(self.field.neg(self.value))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        Ok(self.with(self.field.pow(self.value, e)?))
    }

    pub fn order(&self) -> Result<u32> {
        self.field.element_order(self.value)
    }
}

/// Ring embedding `source → target` fixed by the image of the source
/// generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    source: FieldRef,
    target: FieldRef,
    image: Elem,
    map: Vec<Elem>,
    preimage: Vec<u32>,
}

impl Embedding {
    pub fn new(source: &FieldRef, target: &FieldRef, image: Elem) -> Result<Self> {
        if source.p != target.p {
            return Err(Error::BadEmbedding("characteristics differ".into()));
        }
        if target.degree % source.degree != 0 {
            return Err(Error::BadEmbedding(format!("degree {} does not divide {}", source.degree, target.degree)));
        }
        if !target.contains(image) {
            return Err(Error::NotInField(image.0));
        }
        // Evaluate the source modulus at the proposed image.
        let mut acc = Elem::ZERO;
        for &c in source.modulus.iter().rev() {
            acc = target.add(target.mul(acc, image), target.from_int(c as i64));
        }
        if !acc.is_zero() {
            return Err(Error::BadEmbedding(format!("{image} is not a root of the source modulus")));
        }
        let powers: Vec<Elem> = (0..source.degree)
            .scan(Elem::ONE, |cur, _| {
                let out = *cur;
                *cur = target.mul(*cur, image);
                Some(out)
            })
            .collect();
        let map: Vec<Elem> = source
            .elements()
            .map(|a| {
                source
                    .coefficients(a)
                    .iter()
                    .zip(&powers)
                    .fold(Elem::ZERO, |acc, (&c, &pw)| target.add(acc, target.mul(target.from_int(c as i64), pw)))
            })
            .collect();
        let mut preimage = vec![u32::MAX; target.order as usize];
        for (a, b) in map.iter().enumerate() {
            preimage[b.index()] = a as u32;
        }
        Ok(Self { source: source.clone(), target: target.clone(), image, map, preimage })
    }

    /// Canonical embedding. When both fields use primitive moduli the source
    /// generator goes to `β^{(|T|-1)/(|S|-1)}` (the Conway-compatible choice,
    /// which makes towers commute); otherwise to the root of the source
    /// modulus with the smallest encoding.
    pub fn canonical(source: &FieldRef, target: &FieldRef) -> Result<Self> {
        let is_root = |x: Elem| {
            let mut acc = Elem::ZERO;
            for &c in source.modulus.iter().rev() {
                acc = target.add(target.mul(acc, x), target.from_int(c as i64));
            }
            acc.is_zero()
        };
        if (target.order - 1) % (source.order - 1) == 0 && source.primitive == source.generator() {
            let e = (target.order - 1) / (source.order - 1);
            let x = target.exp(e as i64);
            if is_root(x) {
                return Self::new(source, target, x);
            }
        }
        let root = target
            .elements()
            .find(|&x| is_root(x))
            .ok_or_else(|| Error::BadEmbedding("source modulus has no root in target".into()))?;
        Self::new(source, target, root)
    }

    pub fn identity(field: &FieldRef) -> Self {
        Self::new(field, field, field.generator()).expect("identity embedding")
    }

    pub fn source(&self) -> &FieldRef {
        &self.source
    }

    pub fn target(&self) -> &FieldRef {
        &self.target
    }

    pub fn image_of_generator(&self) -> Elem {
        self.image
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.map[a.index()]
    }

    pub fn embed(&self, a: &FieldElement) -> Result<FieldElement> {
        if **a.field() != *self.source {
            return Err(Error::FieldMismatch);
        }
        FieldElement::new(&self.target, self.apply(a.value()))
    }

    /// Inverse image, if `b` lies in the embedded subfield.
    pub fn preimage(&self, b: Elem) -> Option<Elem> {
        self.preimage.get(b.index()).filter(|&&v| v != u32::MAX).map(|&v| Elem(v))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding> {
        if *self.target != *next.source {
            return Err(Error::FieldMismatch);
        }
        Embedding::new(&self.source, &next.target, next.apply(self.image))
    }
}

/// Coordinates of a target field over an embedded subfield, relative to the
/// power basis `1, β, …, β^{s-1}` of the target generator `β`.
#[derive(Clone, Debug)]
pub struct RelativeBasis {
    embedding: Embedding,
    dim: usize,
    basis: Vec<Elem>,
    coords: Vec<Elem>,
}

impl RelativeBasis {
    pub fn new(embedding: Embedding) -> Result<Self> {
        let src = embedding.source.clone();
        let tgt = embedding.target.clone();
        let dim = (tgt.degree / src.degree) as usize;
        let beta = tgt.generator();
        let basis: Vec<Elem> = (0..dim as i64).map(|i| tgt.pow(beta, i).unwrap()).collect();
        let q = src.order as usize;
        let mut coords = vec![Elem::ZERO; tgt.order as usize * dim];
        let mut seen = vec![false; tgt.order as usize];
        let mut digits = vec![0usize; dim];
        for _ in 0..tgt.order {
            let value = digits
                .iter()
                .zip(&basis)
                .fold(Elem::ZERO, |acc, (&c, &b)| tgt.add(acc, tgt.mul(embedding.apply(Elem(c as u32)), b)));
            if seen[value.index()] {
                return Err(Error::BadEmbedding("power basis is not independent".into()));
            }
            seen[value.index()] = true;
            for (k, &c) in digits.iter().enumerate() {
                coords[value.index() * dim + k] = Elem(c as u32);
            }
            for c in digits.iter_mut() {
                *c += 1;
                if *c < q {
                    break;
                }
                *c = 0;
            }
        }
        Ok(Self { embedding, dim, basis, coords })
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    /// Degree `s` of the extension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    #[inline]
    pub fn coords(&self, z: Elem) -> &[Elem] {
        &self.coords[z.index() * self.dim..(z.index() + 1) * self.dim]
    }

    pub fn from_coords(&self, c: &[Elem]) -> Elem {
        let tgt = &self.embedding.target;
        c.iter().zip(&self.basis).fold(Elem::ZERO, |acc, (&a, &b)| tgt.add(acc, tgt.mul(self.embedding.apply(a), b)))
    }
}

/// Univariate polynomial over a [`Field`], little-endian.
#[derive(Clone, Debug)]
pub struct Polynomial {
    field: FieldRef,
    coeffs: Vec<Elem>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn new(field: &FieldRef, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { field: field.clone(), coeffs }
    }

    pub fn zero(field: &FieldRef) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn constant(field: &FieldRef, c: Elem) -> Self {
        Self::new(field, vec![c])
    }

    pub fn x(field: &FieldRef) -> Self {
        Self::new(field, vec![Elem::ZERO, Elem::ONE])
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    fn check(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || self.field == other.field,
            "polynomials over different fields"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(f, (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(f, (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Self::zero(f);
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(f, out)
    }

    pub fn scale(&self, c: Elem) -> Self {
        let f = &self.field;
        Self::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check(divisor);
        let f = &self.field;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = f.inv(divisor.leading().unwrap()).unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Elem::ZERO; rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let top = rem.len() - 1;
            let c = f.mul(rem[top], lead_inv);
            let shift = top - dd;
            quot[shift] = c;
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = f.sub(rem[shift + i], f.mul(c, b));
            }
            rem.pop();
        }
        Ok((Self::new(f, quot), Self::new(f, rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// `self · g mod h`, reducing after every Horner step instead of once at
    /// the end.
    pub fn mul_mod(&self, g: &Self, h: &Self) -> Result<Self> {
        let a = self.rem(h)?;
        let mut acc = Self::zero(&self.field);
        for &c in g.coeffs.iter().rev() {
            acc = acc.mul(&Self::x(&self.field)).add(&a.scale(c)).rem(h)?;
        }
        Ok(acc)
    }

    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(self.field.inv(l).unwrap()),
            None => self.clone(),
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).unwrap();
            a = b;
            b = r;
        }
        a.monic()
    }
}

/// Minimal polynomial over `base.source()` of `a ∈ base.target()`, computed
/// as the product of `X − a^{Q^i}` over the Frobenius orbit of `a`.
pub fn minimal_polynomial(a: Elem, base: &Embedding) -> Result<Polynomial> {
    let tgt = base.target();
    let src = base.source();
    if !tgt.contains(a) {
        return Err(Error::NotInField(a.0));
    }
    let q = src.order() as i64;
    let mut orbit = vec![a];
    loop {
        let next = tgt.pow(*orbit.last().unwrap(), q)?;
        if next == a {
            break;
        }
        orbit.push(next);
    }
    let mut prod = Polynomial::constant(tgt, Elem::ONE);
    for &r in &orbit {
        prod = prod.mul(&Polynomial::new(tgt, vec![tgt.neg(r), Elem::ONE]));
    }
    let coeffs = prod
        .coeffs()
        .iter()
        .map(|&c| base.preimage(c).ok_or_else(|| Error::BadEmbedding("conjugate product left the subfield".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Polynomial::new(src, coeffs))
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `(p, d)` with `q = p^d`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut d = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        d += 1;
    }
    (r == 1).then_some((p, d))
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn to_digits(mut v: u32, p: u32, d: usize) -> Vec<u32> {
    let mut out = vec![0; d];
    for c in out.iter_mut() {
        *c = v % p;
        v /= p;
    }
    out
}

fn from_digits(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn validate_modulus(p: u32, degree: u32, m: &[u32]) -> Result<()> {
    if m.len() != degree as usize + 1 {
        return Err(Error::BadModulus(format!("expected {} coefficients, got {}", degree + 1, m.len())));
    }
    if m.iter().any(|&c| c >= p) {
        return Err(Error::BadModulus(format!("coefficients must lie in [0, {p})")));
    }
    if m[degree as usize] != 1 {
        return Err(Error::BadModulus("modulus is not monic".into()));
    }
    if !fp::is_irreducible(m, p) {
        return Err(Error::Reducible { p });
    }
    Ok(())
}

fn default_modulus(p: u32, degree: u32) -> Vec<u32> {
    if let Some((_, _, m)) = DEFAULT_MODULI.iter().find(|(pp, dd, _)| *pp == p && *dd == degree) {
        return m.to_vec();
    }
    // Smallest primitive polynomial by encoding of its lower coefficients.
    let d = degree as usize;
    let count = (p as u64).pow(degree);
    (0..count)
        .map(|v| {
            let mut c = to_digits(v as u32, p, d);
            c.push(1);
            c
        })
        .find(|c| c[0] != 0 && fp::is_irreducible(c, p) && fp::is_primitive(c, p))
        .expect("primitive polynomials exist in every degree")
}

/// Dense polynomial arithmetic over `F_p` on raw coefficient vectors, used to
/// validate moduli before any field tables exist.
mod fp {
    use super::prime_factors;

    fn trim(mut v: Vec<u32>) -> Vec<u32> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    fn inv(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    fn rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let f = trim(f.to_vec());
        let df = f.len() - 1;
        let li = inv(f[df], p) as u64;
        let mut r = trim(a.to_vec());
        while r.len() > df {
            let top = r.len() - 1;
            let c = r[top] as u64 * li % p as u64;
            for (i, &b) in f.iter().enumerate() {
                let idx = top - df + i;
                r[idx] = ((r[idx] as u64 + p as u64 - c * b as u64 % p as u64) % p as u64) as u32;
            }
            r = trim(r);
        }
        r
    }

    pub(super) fn mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut out = vec![0u64; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        rem(&out.iter().map(|&v| v as u32).collect::<Vec<_>>(), f, p)
    }

    fn powmod(base: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
        let mut r = vec![1];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(&r, &b, f, p);
            }
            b = mulmod(&b, &b, f, p);
            e >>= 1;
        }
        rem(&r, f, p)
    }

    fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| {
                    let x = a.get(i).copied().unwrap_or(0);
                    let y = b.get(i).copied().unwrap_or(0);
                    (x + p - y) % p
                })
                .collect(),
        )
    }

    fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test: `X^{p^d} ≡ X (mod f)` and `gcd(X^{p^{d/r}} − X, f) = 1`
    /// for every prime `r | d`.
    pub(super) fn is_irreducible(f: &[u32], p: u32) -> bool {
        let f = trim(f.to_vec());
        let d = f.len() - 1;
        if d <= 1 {
            return d == 1;
        }
        let x = vec![0, 1];
        let mut frob = vec![rem(&x, &f, p)];
        for _ in 0..d {
            let next = powmod(frob.last().unwrap(), p as u64, &f, p);
            frob.push(next);
        }
        if sub(&frob[d], &frob[0], p) != Vec::<u32>::new() {
            return false;
        }
        prime_factors(d as u64).into_iter().all(|r| {
            let g = gcd(&sub(&frob[d / r as usize], &x, p), &f, p);
            g.len() == 1
        })
    }

    /// `X` has order `p^d − 1` modulo an irreducible `f`.
    pub(super) fn is_primitive(f: &[u32], p: u32) -> bool {
        let d = f.len() - 1;
        let n = (p as u64).pow(d as u32) - 1;
        prime_factors(n).into_iter().all(|r| powmod(&[0, 1], n / r, f, p) != vec![1])
    }

    #[cfg(test)]
    pub(super) fn primitive(f: &[u32], p: u32) -> bool {
        is_irreducible(f, p) && is_primitive(f, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f4() -> FieldRef {
        Field::gf(2, 2).unwrap()
    }

    #[test]
    fn default_moduli_are_primitive() {
        for (p, d, m) in DEFAULT_MODULI {
            assert!(fp::primitive(m, *p), "GF({p}^{d})");
            let f = Field::gf(*p, *d).unwrap();
            assert_eq!(f.primitive(), f.generator());
        }
    }

    #[test]
    fn f4_default_and_arithmetic() {
        let f = f4();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let w = f.generator();
        assert_eq!(w, Elem(2));
        assert_eq!(f.mul(w, w), f.add(w, Elem::ONE));
        assert_eq!(f.element_order(w).unwrap(), 3);
    }

    #[test]
    fn prime_field_generator_is_one() {
        let f = Field::gf(2, 1).unwrap();
        assert_eq!(f.generator(), Elem::ONE);
        assert_eq!(f.add(Elem::ONE, Elem::ONE), Elem::ZERO);
    }

    #[test]
    fn f25_default_modulus_irreducible_by_root_scan() {
        // x^2 + 4x + 2 has no root in F_5
        assert!((0..5u32).all(|x| (x * x + 4 * x + 2) % 5 != 0));
        let f = Field::gf(5, 2).unwrap();
        let w = f.generator();
        // w^2 = w + 3
        assert_eq!(f.mul(w, w), f.add(w, Elem(3)));
        assert_eq!(f.pow(w, 24).unwrap(), Elem::ONE);
        assert_ne!(f.pow(w, 8).unwrap(), Elem::ONE);
        assert_ne!(f.pow(w, 12).unwrap(), Elem::ONE);
    }

    #[test]
    fn f64_generator_order() {
        let f = Field::gf(2, 6).unwrap();
        let g = f.generator();
        for t in [7, 9, 21] {
            assert_ne!(f.pow(g, t).unwrap(), Elem::ONE);
        }
        assert_eq!(f.pow(g, 63).unwrap(), Elem::ONE);
        assert_eq!(f.element_order(g).unwrap(), 63);
        assert_eq!(f.element_order(Elem::ONE).unwrap(), 1);
        assert!(f.element_order(Elem::ZERO).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(Field::gf(4, 1).unwrap_err(), Error::NotPrime(4));
        // x^2 + 1 = (x + 1)^2 over F_2
        assert_eq!(Field::new(2, 2, Some(&[1, 0, 1])).unwrap_err(), Error::Reducible { p: 2 });
        assert!(matches!(Field::new(2, 2, Some(&[1, 1, 0])), Err(Error::BadModulus(_))));
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 has no roots but is reducible
        assert_eq!(Field::new(2, 4, Some(&[1, 0, 1, 0, 1])).unwrap_err(), Error::Reducible { p: 2 });
    }

    #[test]
    fn non_primitive_modulus_still_works() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible but X has order 5
        let f = Field::new(2, 4, Some(&[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(f.element_order(f.generator()).unwrap(), 5);
        assert_eq!(f.element_order(f.primitive()).unwrap(), 15);
    }

    #[test]
    fn fallback_modulus_for_unlisted_field() {
        let f = Field::gf(3, 4).unwrap();
        assert_eq!(f.order(), 81);
        assert_eq!(f.element_order(f.generator()).unwrap(), 80);
    }

    #[test]
    fn checked_element_arithmetic() {
        let f = f4();
        let g = Field::gf(2, 3).unwrap();
        let a = FieldElement::new(&f, Elem(2)).unwrap();
        let b = FieldElement::new(&g, Elem(2)).unwrap();
        assert_eq!(a.add(&b).unwrap_err(), Error::FieldMismatch);
        let zero = FieldElement::new(&f, Elem::ZERO).unwrap();
        assert_eq!(a.div(&zero).unwrap_err(), Error::DivisionByZero);
        assert_eq!(zero.inv().unwrap_err(), Error::DivisionByZero);
        assert_eq!(a.pow(-1).unwrap(), a.inv().unwrap());
        assert_eq!(a.mul(&a).unwrap().value(), Elem(3));
        assert!(FieldElement::new(&f, Elem(4)).is_err());
    }

    #[test]
    fn f4_into_f64_canonical_image() {
        let f4 = f4();
        let f64 = Field::gf(2, 6).unwrap();
        // brute force: roots of x^2 + x + 1 among all 64 elements
        let roots: Vec<Elem> =
            f64.elements().filter(|&x| f64.add(f64.add(f64.mul(x, x), x), Elem::ONE).is_zero()).collect();
        assert_eq!(roots, vec![Elem(14), Elem(15)]);
        let emb = Embedding::canonical(&f4, &f64).unwrap();
        // β^3 + β^2 + β, also β^21
        assert_eq!(emb.image_of_generator(), Elem(14));
        assert_eq!(f64.pow(f64.generator(), 21).unwrap(), Elem(14));
        assert_eq!(emb.apply(Elem::ONE), Elem::ONE);
        assert_eq!(emb.apply(Elem::ZERO), Elem::ZERO);
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(emb.apply(f4.mul(a, b)), f64.mul(emb.apply(a), emb.apply(b)));
                assert_eq!(emb.apply(f4.add(a, b)), f64.add(emb.apply(a), emb.apply(b)));
            }
        }
        assert!(Embedding::new(&f4, &f64, Elem(26)).is_err());
    }

    #[test]
    fn embedding_rejects_foreign_elements() {
        let f4 = f4();
        let f16 = Field::gf(2, 4).unwrap();
        let emb = Embedding::canonical(&f4, &f16).unwrap();
        let x = FieldElement::new(&f16, Elem(3)).unwrap();
        assert_eq!(emb.embed(&x).unwrap_err(), Error::FieldMismatch);
        assert!(Embedding::canonical(&f4, &Field::gf(2, 3).unwrap()).is_err());
    }

    #[test]
    fn tower_composites_match_direct_embeddings() {
        for (p, a, s, l) in [(2, 1, 2, 3), (2, 2, 1, 3), (2, 2, 2, 2), (5, 1, 2, 3), (3, 1, 2, 2)] {
            let fq = Field::gf(p, a).unwrap();
            let fqs = Field::gf(p, a * s).unwrap();
            let big = Field::gf(p, a * s * l).unwrap();
            let e1 = Embedding::canonical(&fq, &fqs).unwrap();
            let e2 = Embedding::canonical(&fqs, &big).unwrap();
            let direct = Embedding::canonical(&fq, &big).unwrap();
            let comp = e1.then(&e2).unwrap();
            for x in fq.elements() {
                assert_eq!(comp.apply(x), direct.apply(x), "tower {p}^{a}:{s}:{l}");
            }
        }
    }

    #[test]
    fn relative_coordinates_round_trip() {
        let f4 = f4();
        let f64 = Field::gf(2, 6).unwrap();
        let rb = RelativeBasis::new(Embedding::canonical(&f4, &f64).unwrap()).unwrap();
        assert_eq!(rb.dim(), 3);
        for z in f64.elements() {
            assert_eq!(rb.from_coords(rb.coords(z)), z);
        }
    }

    #[test]
    fn minimal_polynomials() {
        let f4 = f4();
        let f64 = Field::gf(2, 6).unwrap();
        let emb = Embedding::canonical(&f4, &f64).unwrap();
        let one = minimal_polynomial(Elem::ONE, &emb).unwrap();
        assert_eq!(one.coeffs(), &[Elem::ONE, Elem::ONE]); // X - 1 = X + 1
        let a = f64.pow(f64.generator(), 3).unwrap();
        assert_eq!(f64.element_order(a).unwrap(), 21);
        let mp = minimal_polynomial(a, &emb).unwrap();
        assert_eq!(mp.degree(), Some(3));
        assert_eq!(mp.leading(), Some(Elem::ONE));
        let lifted = Polynomial::new(&f64, mp.coeffs().iter().map(|&c| emb.apply(c)).collect());
        assert!(lifted.eval(a).is_zero());
    }

    #[test]
    fn polynomial_division() {
        let f = Field::gf(5, 1).unwrap();
        let e = |v: &[u32]| Polynomial::new(&f, v.iter().map(|&x| Elem(x)).collect());
        let a = e(&[1, 2, 3, 4]);
        let b = e(&[2, 0, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
        assert_eq!(a.div_rem(&Polynomial::zero(&f)).unwrap_err(), Error::DivisionByZero);
    }

    fn field_strategy() -> impl Strategy<Value = FieldRef> {
        prop_oneof![Just((2, 2)), Just((2, 6)), Just((5, 2)), Just((3, 3)), Just((7, 1)), Just((5, 6))]
            .prop_map(|(p, d)| Field::gf(p, d).unwrap())
    }

    proptest! {
        #[test]
        fn fermat_little_theorem(f in field_strategy(), seed in any::<u32>()) {
            let a = Elem(1 + seed % (f.order() - 1));
            prop_assert_eq!(f.pow(a, (f.order() - 1) as i64).unwrap(), Elem::ONE);
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
            prop_assert_eq!(f.sub(a, a), Elem::ZERO);
        }

        #[test]
        fn distributivity(f in field_strategy(), x in any::<u32>(), y in any::<u32>(), z in any::<u32>()) {
            let o = f.order();
            let (a, b, c) = (Elem(x % o), Elem(y % o), Elem(z % o));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        }

        #[test]
        fn mul_mod_two_ways(
            a in proptest::collection::vec(0u32..4, 0..8),
            b in proptest::collection::vec(0u32..4, 0..8),
            h in proptest::collection::vec(0u32..4, 1..6),
        ) {
            let f = f4();
            let mk = |v: &[u32]| Polynomial::new(&f, v.iter().map(|&x| Elem(x)).collect());
            let (a, b, h) = (mk(&a), mk(&b), mk(&h));
            prop_assume!(!h.is_zero());
            prop_assert_eq!(a.mul(&b).rem(&h).unwrap(), a.mul_mod(&b, &h).unwrap());
        }

        #[test]
        fn embedding_is_homomorphism(x in 0u32..25, y in 0u32..25) {
            let f25 = Field::gf(5, 2).unwrap();
            let big = Field::gf(5, 6).unwrap();
            let emb = Embedding::canonical(&f25, &big).unwrap();
            let (a, b) = (Elem(x), Elem(y));
            prop_assert_eq!(emb.apply(f25.mul(a, b)), big.mul(emb.apply(a), emb.apply(b)));
            prop_assert_eq!(emb.apply(f25.add(a, b)), big.add(emb.apply(a), emb.apply(b)));
        }
    }
}
