//! Text input for sparse polynomials and Laurent coefficients.
//!
//! ```text
//! poly    := term (('+'|'-') term)* ;
//! term    := coeff ('*' xpow)? | xpow ;
//! xpow    := 'x' ('^' uint)? ;
//! coeff   := latom | '(' laurent ')' ;
//! laurent := latom (('+'|'-') latom)* ;
//! latom   := felem ('*' tpow)? | tpow ;
//! tpow    := 'T' ('^' int)? ;
//! felem   := uint | 'g' ('^' uint)? | '[' int (',' int)* ']' ;
//! ```
//!
//! Over a ramified field `tpow` also accepts `T^(a/b)` when `b` divides `e`.

use crate::error::{Error, Result};
use crate::fields::FqElem;
use crate::laurent::{LaurentSeries, Precision, SeriesField};
use crate::poly::SparsePoly;

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Cursor {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn error_at(&self, pos: usize, msg: impl Into<String>) -> Error {
        let (line, col) = self.location(pos);
        Error::parse(line, col, msg)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        self.error_at(self.pos, msg)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let msg = match self.peek() {
                Some(d) => format!("expected '{c}', found '{d}'"),
                None => format!("expected '{c}', found end of input"),
            };
            Err(self.error(msg))
        }
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an unsigned integer"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<u64>()
            .map_err(|_| self.error_at(start, format!("integer {text} overflows")))
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let start = self.pos;
        let n = self.uint()?;
        let n = i64::try_from(n).map_err(|_| self.error_at(start, "integer overflows"))?;
        Ok(if neg { -n } else { n })
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }
}

struct Parser<'f> {
    cur: Cursor,
    sf: &'f SeriesField,
}

impl Parser<'_> {
    fn felem(&mut self) -> Result<FqElem> {
        let f = self.sf.residue();
        match self.cur.peek() {
            Some('g') => {
                self.cur.pos += 1;
                let e = if self.cur.eat('^') { self.cur.uint()? } else { 1 };
                Ok(f.pow(f.generator(), e))
            }
            Some('[') => {
                let start = self.cur.pos;
                self.cur.pos += 1;
                let mut v = vec![self.cur.int()?];
                while self.cur.eat(',') {
                    v.push(self.cur.int()?);
                }
                self.cur.expect(']')?;
                f.from_coeffs(&v).map_err(|e| self.cur.error_at(start, e.to_string()))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.cur.uint()?;
                Ok(f.from_int((n % f.p() as u64) as i64))
            }
            _ => Err(self.cur.error("expected a field element, 'T', 'x' or '('")),
        }
    }

    /// Exponent of `S` for `T^...`.
    fn tpow(&mut self) -> Result<i64> {
        self.cur.expect('T')?;
        let e = self.sf.e() as i64;
        if !self.cur.eat('^') {
            return Ok(e);
        }
        if self.cur.peek() == Some('(') {
            let start = self.cur.pos;
            self.cur.pos += 1;
            let num = self.cur.int()?;
            self.cur.expect('/')?;
            let den = self.cur.uint()? as i64;
            self.cur.expect(')')?;
            if den == 0 || e % den != 0 {
                return Err(self.cur.error_at(
                    start,
                    format!("T^({num}/{den}) is not in a field with T = S^{e}"),
                ));
            }
            return Ok(num * (e / den));
        }
        let start = self.cur.pos;
        let k = self.cur.int()?;
        k.checked_mul(e)
            .ok_or_else(|| self.cur.error_at(start, "exponent overflows"))
    }

    fn latom(&mut self) -> Result<(i64, FqElem)> {
        if self.cur.peek() == Some('T') {
            return Ok((self.tpow()?, FqElem::ONE));
        }
        let c = self.felem()?;
        let save = self.cur.pos;
        if self.cur.eat('*') {
            if self.cur.peek() == Some('T') {
                return Ok((self.tpow()?, c));
            }
            // the '*' belongs to the enclosing term
            self.cur.pos = save;
        }
        Ok((0, c))
    }

    fn laurent(&mut self) -> Result<LaurentSeries> {
        let f = self.sf.residue().clone();
        let mut terms = vec![self.latom()?];
        loop {
            let neg = match self.cur.peek() {
                Some('+') => false,
                Some('-') => true,
                _ => break,
            };
            self.cur.pos += 1;
            let (i, c) = self.latom()?;
            terms.push((i, if neg { f.neg(c) } else { c }));
        }
        Ok(self.sf.from_terms(terms, Precision::Exact))
    }

    fn xpow(&mut self) -> Result<u64> {
        self.cur.expect('x')?;
        if self.cur.eat('^') {
            self.cur.uint()
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<(u64, LaurentSeries)> {
        match self.cur.peek() {
            Some('x') => Ok((self.xpow()?, LaurentSeries::one())),
            Some('(') => {
                self.cur.pos += 1;
                let c = self.laurent()?;
                self.cur.expect(')')?;
                self.term_tail(c)
            }
            _ => {
                let (i, c) = self.latom()?;
                self.term_tail(LaurentSeries::monomial(c, i))
            }
        }
    }

    fn term_tail(&mut self, c: LaurentSeries) -> Result<(u64, LaurentSeries)> {
        if self.cur.eat('*') {
            Ok((self.xpow()?, c))
        } else {
            Ok((0, c))
        }
    }

    fn poly(&mut self) -> Result<Vec<(u64, LaurentSeries)>> {
        let mut out = Vec::new();
        let mut neg = self.cur.eat('-');
        loop {
            let (n, c) = self.term()?;
            out.push((n, if neg { self.sf.neg(&c) } else { c }));
            match self.cur.peek() {
                Some('+') => neg = false,
                Some('-') => neg = true,
                _ => break,
            }
            self.cur.pos += 1;
        }
        Ok(out)
    }
}

/// Parses a sparse polynomial in `x`; like powers are merged.
pub fn parse_poly(src: &str, field: &SeriesField) -> Result<SparsePoly> {
    let mut p = Parser {
        cur: Cursor::new(src),
        sf: field,
    };
    let terms = p.poly()?;
    p.cur.finish()?;
    SparsePoly::from_merged(field.clone(), terms)
}

/// Parses a Laurent polynomial in `T`, optionally wrapped in parentheses.
pub fn parse_series(src: &str, field: &SeriesField) -> Result<LaurentSeries> {
    let mut p = Parser {
        cur: Cursor::new(src),
        sf: field,
    };
    let neg = p.cur.eat('-');
    let s = if p.cur.peek() == Some('(') {
        p.cur.pos += 1;
        let s = p.laurent()?;
        p.cur.expect(')')?;
        s
    } else {
        p.laurent()?
    };
    p.cur.finish()?;
    Ok(if neg { field.neg(&s) } else { s })
}

/// Parses a comma-separated list of Laurent polynomials.
pub fn parse_series_list(src: &str, field: &SeriesField) -> Result<Vec<LaurentSeries>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in src.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(parse_series(&src[start..i], field)?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(parse_series(&src[start..], field)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::random_poly;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn e1_parses() {
        let k = SeriesField::base(2, 1).unwrap();
        let f = parse_poly("x^4 + (1+T+T^2)*x^2 + (T+T^2)*x", &k).unwrap();
        assert_eq!(f.k(), 2);
        assert_eq!(f.exponents(), vec![1, 2, 4]);
        let t = |i| LaurentSeries::monomial(FqElem::ONE, i);
        assert_eq!(f.terms()[0].1, k.add(&t(1), &t(2)));
    }

    #[test]
    fn minus_is_p_minus_one() {
        let k = SeriesField::base(3, 1).unwrap();
        assert_eq!(
            parse_poly("x^2 - x", &k).unwrap(),
            parse_poly("x^2 + 2*x", &k).unwrap()
        );
    }

    #[test]
    fn cancellation_and_errors() {
        let k = SeriesField::base(2, 1).unwrap();
        assert_eq!(parse_poly("x + x", &k), Err(Error::ZeroPolynomial));
        assert_eq!(parse_poly("2*x + 1", &k).unwrap(), parse_poly("1", &k).unwrap());
        match parse_poly("x^2 +\n  * x", &k) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_poly("x^99999999999999999999999", &k),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_poly("x^2 )", &k), Err(Error::Parse { .. })));
    }

    #[test]
    fn extension_and_ramified_atoms() {
        let k4 = SeriesField::base(2, 2).unwrap();
        let g = k4.residue().generator();
        let f = parse_poly("g^2*T^-1*x + [1,1] + g*x^3", &k4).unwrap();
        assert_eq!(f.terms()[0].1, k4.from_elem(k4.residue().add(FqElem::ONE, g)));
        assert_eq!(f.terms()[1].1, LaurentSeries::monomial(k4.residue().pow(g, 2), -1));
        let ke = k4.extension(1, 3).unwrap();
        let s = parse_series("T^(2/3) + T", &ke).unwrap();
        assert_eq!(s.terms().map(|t| t.0).collect::<Vec<_>>(), vec![2, 3]);
        assert!(parse_series("T^(1/2)", &ke).is_err());
        let list = parse_series_list("1, T, (1+T^-2)", &k4).unwrap();
        assert_eq!(list.len(), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn print_then_parse_is_identity(seed: u64, pm in prop::sample::select(vec![(2u64, 1u32), (2, 2), (3, 1), (3, 2)]), e in 1u32..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sf = SeriesField::base(pm.0, pm.1).unwrap().extension(1, e).unwrap();
            let f = random_poly(&sf, 3, 40, &mut rng);
            let text = f.format();
            prop_assert_eq!(parse_poly(&text, &sf).unwrap(), f.clone());
            let spaced = text.replace('+', " \n+ ").replace('*', " * ").replace('^', "^ ");
            prop_assert_eq!(parse_poly(&spaced, &sf).unwrap(), f);
        }
    }
}
