//! Plain-text formats for fields, matrices, matrix polynomials, codes and
//! quasi-BCH parameter sets.
//!
//! ```text
//! GF 2 2 1 1 1
//! mat 3
//! 0 2 0
//! 2 3 3
//! 1 3 1
//! ```
//!
//! Elements are written as the integer `Σ cᵢ pⁱ` of their coefficients. Blank
//! lines and text after `#` are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::galois::{Elem, Field, FieldRef};
use crate::matring::{Matrix, MatrixPolynomial};
use crate::qbch::{PrimitiveRoot, Provenance, QbchSpec};
use crate::qccore::LinearCode;

/// Line-oriented tokenizer that remembers line numbers for error messages.
pub struct Reader<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        Self { lines, pos: 0 }
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.lines.len()
    }

    fn line_no(&self) -> usize {
        self.lines.get(self.pos).or(self.lines.last()).map_or(0, |l| l.0)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line_no(), msg: msg.into() }
    }

    pub fn peek_keyword(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|l| l.1[0])
    }

    fn next_line(&mut self) -> Result<(usize, Vec<&'a str>)> {
        let l = self.lines.get(self.pos).cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(l)
    }

    /// Next line, which must start with `keyword`; returns its arguments.
    fn expect(&mut self, keyword: &str) -> Result<Vec<&'a str>> {
        match self.peek_keyword() {
            Some(k) if k == keyword => Ok(self.next_line()?.1[1..].to_vec()),
            Some(k) => Err(self.err(format!("expected `{keyword}`, found `{k}`"))),
            None => Err(self.err(format!("expected `{keyword}`, found end of input"))),
        }
    }

    fn ints<T: std::str::FromStr>(&self, toks: &[&str], line: usize) -> Result<Vec<T>> {
        toks.iter().map(|t| t.parse().map_err(|_| Error::Parse { line, msg: format!("bad integer `{t}`") })).collect()
    }

    fn header<T: std::str::FromStr>(&mut self, keyword: &str, arity: &[usize]) -> Result<Vec<T>> {
        let line = self.lines.get(self.pos).map_or(0, |l| l.0);
        let args = self.expect(keyword)?;
        if !arity.contains(&args.len()) {
            return Err(Error::Parse { line, msg: format!("`{keyword}` takes {arity:?} arguments") });
        }
        self.ints(&args, line)
    }

    fn elements(&mut self, field: &FieldRef, count: usize) -> Result<Vec<Elem>> {
        let (line, toks) = self.next_line()?;
        if toks.len() != count {
            return Err(Error::Parse { line, msg: format!("expected {count} elements, found {}", toks.len()) });
        }
        let vals: Vec<u32> = self.ints(&toks, line)?;
        vals.into_iter()
            .map(|v| {
                let e = Elem(v);
                if field.contains(e) {
                    Ok(e)
                } else {
                    Err(Error::Parse { line, msg: format!("{v} is not an element of F_{}", field.order()) })
                }
            })
            .collect()
    }

    pub fn field(&mut self) -> Result<FieldRef> {
        let line = self.lines.get(self.pos).map_or(0, |l| l.0);
        let toks = self.expect("GF")?;
        let args: Vec<u32> = self.ints(&toks, line)?;
        if args.len() < 3 || args.len() != args[1] as usize + 3 {
            return Err(Error::Parse { line, msg: "expected `GF p d c0 ... cd`".into() });
        }
        Field::new(args[0], args[1], Some(&args[2..]))
    }

    /// A `GF` line if present, otherwise the default field of order `q`.
    fn field_or_default(&mut self, q: Option<u32>) -> Result<FieldRef> {
        match (self.peek_keyword(), q) {
            (Some("GF"), _) => self.field(),
            (_, Some(q)) => Field::of_order(q),
            _ => Err(self.err("missing `GF` line")),
        }
    }

    pub fn matrix(&mut self, field: &FieldRef) -> Result<Matrix> {
        let dims: Vec<usize> = self.header("mat", &[1, 2])?;
        let (r, c) = (dims[0], *dims.get(1).unwrap_or(&dims[0]));
        let mut data = Vec::with_capacity(r * c);
        for _ in 0..r {
            data.extend(self.elements(field, c)?);
        }
        Matrix::new(field, r, c, data)
    }

    pub fn matpoly(&mut self, field: &FieldRef) -> Result<MatrixPolynomial> {
        let line = self.lines.get(self.pos).map_or(0, |l| l.0);
        let deg: Vec<usize> = self.header("matpoly", &[1])?;
        let coeffs = (0..=deg[0]).map(|_| self.matrix(field)).collect::<Result<Vec<_>>>()?;
        let size = coeffs[0].rows();
        if coeffs.iter().any(|c| !c.is_square() || c.rows() != size) {
            return Err(Error::Parse { line, msg: "coefficients must be square of one size".into() });
        }
        MatrixPolynomial::new(field, size, coeffs)
    }

    /// `code q n k m l` then `k` rows; an optional `GF` line may precede it.
    pub fn code(&mut self) -> Result<LinearCode> {
        let field = if self.peek_keyword() == Some("GF") { Some(self.field()?) } else { None };
        let line = self.lines.get(self.pos).map_or(0, |l| l.0);
        let h: Vec<usize> = self.header("code", &[5])?;
        let (q, n, k, m, l) = (h[0], h[1], h[2], h[3], h[4]);
        let field = match field {
            Some(f) if f.order() as usize == q => f,
            Some(f) => {
                return Err(Error::Parse { line, msg: format!("field has order {}, header says {q}", f.order()) })
            }
            None => Field::of_order(q as u32)?,
        };
        if m * l != n {
            return Err(Error::Parse { line, msg: format!("n = {n} is not m·ℓ = {}", m * l) });
        }
        let rows = (0..k).map(|_| self.elements(&field, n)).collect::<Result<Vec<_>>>()?;
        let code = LinearCode::from_rows(&field, &rows, m, l)?;
        if code.dimension() != k {
            return Err(Error::Parse { line, msg: format!("rows have rank {}, header says {k}", code.dimension()) });
        }
        Ok(code)
    }

    /// `qbch q delta` then the root field and the root matrix. The order of
    /// the root is its multiplicative order.
    pub fn qbch_spec(&mut self) -> Result<QbchSpec> {
        let h: Vec<u32> = self.header("qbch", &[2])?;
        let base = Field::of_order(h[0])?;
        let (_, a) = self.root_parts(None)?;
        let m = matrix_order(&a).ok_or_else(|| self.err("root matrix is not invertible"))?;
        let root = PrimitiveRoot::new(a, m, Provenance::Verbatim).map_err(|e| self.err(e.to_string()))?;
        QbchSpec::new(&base, root, h[1] as usize)
    }

    /// Root file: optional `GF` line and a square `mat` block.
    pub fn root_parts(&mut self, q: Option<u32>) -> Result<(FieldRef, Matrix)> {
        let field = self.field_or_default(q)?;
        let a = self.matrix(&field)?;
        if !a.is_square() {
            return Err(self.err("root matrix must be square"));
        }
        Ok((field, a))
    }
}

/// Multiplicative order of an invertible matrix.
pub fn matrix_order(a: &Matrix) -> Option<usize> {
    if !a.is_square() || a.det().map_or(true, |d| d.is_zero()) {
        return None;
    }
    let mut p = a.clone();
    let mut i = 1;
    while !p.is_identity() {
        p = &p * a;
        i += 1;
    }
    Some(i)
}

pub fn format_field(f: &Field) -> String {
    f.spec_line() + "\n"
}

pub fn format_matrix(a: &Matrix) -> String {
    let mut s = if a.is_square() { format!("mat {}\n", a.rows()) } else { format!("mat {} {}\n", a.rows(), a.cols()) };
    for r in 0..a.rows() {
        push_row(&mut s, a.row(r));
    }
    s
}

fn push_row(s: &mut String, row: &[Elem]) {
    let mut first = true;
    for e in row {
        if !first {
            s.push(' ');
        }
        first = false;
        let _ = write!(s, "{}", e.0);
    }
    s.push('\n');
}

/// The zero polynomial is written as a single zero coefficient.
pub fn format_matpoly(g: &MatrixPolynomial) -> String {
    let zero = [Matrix::zeros(g.field(), g.size(), g.size())];
    let coeffs = if g.is_zero() { &zero[..] } else { g.coeffs() };
    let mut s = format!("matpoly {}\n", coeffs.len() - 1);
    for c in coeffs {
        s += &format_matrix(c);
    }
    s
}

/// A `GF` line is written only when the modulus is not the default one.
pub fn format_code(c: &LinearCode) -> String {
    let f = c.field();
    let mut s = String::new();
    if Field::of_order(f.order()).map(|d| *d != **f).unwrap_or(true) {
        s += &format_field(f);
    }
    let _ = writeln!(s, "code {} {} {} {} {}", f.order(), c.length(), c.dimension(), c.blocks(), c.block_length());
    for r in 0..c.dimension() {
        push_row(&mut s, c.generator().row(r));
    }
    s
}

pub fn format_root(a: &Matrix) -> String {
    format_field(a.field()) + &format_matrix(a)
}

pub fn format_qbch_spec(spec: &QbchSpec) -> String {
    format!("qbch {} {}\n", spec.q(), spec.delta()) + &format_root(spec.root().matrix())
}

pub fn parse_field(text: &str) -> Result<FieldRef> {
    whole(text, |r| r.field())
}

pub fn parse_matrix(text: &str, field: &FieldRef) -> Result<Matrix> {
    whole(text, |r| r.matrix(field))
}

pub fn parse_matpoly(text: &str, field: &FieldRef) -> Result<MatrixPolynomial> {
    whole(text, |r| r.matpoly(field))
}

pub fn parse_code(text: &str) -> Result<LinearCode> {
    whole(text, |r| r.code())
}

pub fn parse_root(text: &str, q: Option<u32>) -> Result<(FieldRef, Matrix)> {
    whole(text, |r| r.root_parts(q))
}

pub fn parse_qbch_spec(text: &str) -> Result<QbchSpec> {
    whole(text, |r| r.qbch_spec())
}

fn whole<T>(text: &str, f: impl FnOnce(&mut Reader) -> Result<T>) -> Result<T> {
    let mut r = Reader::new(text);
    let v = f(&mut r)?;
    if !r.is_done() {
        return Err(r.err("trailing input"));
    }
    Ok(v)
}

/// A word as integers separated by commas or spaces, or as `hex:` followed by
/// one hexadecimal digit per symbol.
pub fn parse_word(text: &str, field: &FieldRef) -> Result<Vec<Elem>> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let vals: Vec<u32> = if let Some(h) = text.trim().strip_prefix("hex:") {
        h.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_digit(16).ok_or_else(|| bad(format!("bad hex digit `{c}`"))))
            .collect::<Result<_>>()?
    } else {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| bad(format!("bad integer `{t}`"))))
            .collect::<Result<_>>()?
    };
    vals.into_iter()
        .map(
            |v| {
                if field.contains(Elem(v)) {
                    Ok(Elem(v))
                } else {
                    Err(bad(format!("{v} is not in F_{}", field.order())))
                }
            },
        )
        .collect()
}

pub fn format_word(w: &[Elem]) -> String {
    w.iter().map(|e| e.0.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbch::primitive_root_companion;
    use proptest::prelude::*;

    #[test]
    fn field_line() {
        let f = Field::gf(2, 6).unwrap();
        let g = parse_field(&format_field(&f)).unwrap();
        assert_eq!(*f, *g);
        assert!(matches!(parse_field("GF 2 2 1 1"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_field("GF 2 2 1 0 1").is_err());
    }

    #[test]
    fn comments_and_errors() {
        let f = Field::gf(2, 2).unwrap();
        let a = parse_matrix("# root\nmat 2\n1 0  # first\n\n0 3\n", &f).unwrap();
        assert_eq!(a, Matrix::from_u32(&f, &[&[1, 0], &[0, 3]]).unwrap());
        assert!(matches!(parse_matrix("mat 2\n1 0\n0 4\n", &f), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_matrix("mat 2\n1 0\n", &f), Err(Error::Parse { .. })));
        assert!(parse_matrix("mat 1\n1\nmat 1\n", &f).is_err());
    }

    #[test]
    fn qbch_spec_round_trip() {
        let root = primitive_root_companion(2, 3, 2, 21).unwrap();
        let spec = QbchSpec::new(&Field::gf(2, 1).unwrap(), root, 5).unwrap();
        let text = format_qbch_spec(&spec);
        let back = parse_qbch_spec(&text).unwrap();
        assert_eq!(back.m(), 21);
        assert_eq!(back.delta(), 5);
        assert_eq!(back.root().matrix(), spec.root().matrix());
        assert_eq!(format_qbch_spec(&back), text);
    }

    #[test]
    fn words() {
        let f = Field::gf(5, 1).unwrap();
        assert_eq!(parse_word("1, 2 0,4", &f).unwrap(), vec![Elem(1), Elem(2), Elem(0), Elem(4)]);
        assert_eq!(parse_word("hex:1204", &f).unwrap(), parse_word("1,2,0,4", &f).unwrap());
        assert!(parse_word("5", &f).is_err());
        let w = parse_word("3,0,1", &f).unwrap();
        assert_eq!(parse_word(&format_word(&w), &f).unwrap(), w);
    }

    proptest! {
        #[test]
        fn code_and_matpoly_round_trip(vals in proptest::collection::vec(0u32..9, 36), qi in 0usize..3) {
            let q = [2, 4, 9][qi];
            let f = Field::of_order(q).unwrap();
            let rows: Vec<Vec<Elem>> = vals.chunks(12).map(|r| r.iter().map(|&v| Elem(v % q)).collect()).collect();
            let code = LinearCode::from_rows(&f, &rows, 4, 3).unwrap();
            let back = parse_code(&format_code(&code)).unwrap();
            prop_assert_eq!(&back, &code);
            let coeffs: Vec<Matrix> = vals.chunks(9).map(|c| {
                Matrix::new(&f, 3, 3, c.iter().map(|&v| Elem(v % q)).collect()).unwrap()
            }).collect();
            let g = MatrixPolynomial::new(&f, 3, coeffs).unwrap();
            prop_assert_eq!(parse_matpoly(&format_matpoly(&g), &f).unwrap(), g);
        }
    }
}
