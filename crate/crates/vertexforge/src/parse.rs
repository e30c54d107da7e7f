//! Text syntax for series literals, generator descriptors, and module
//! vectors, shared by the CLI and the config files.
//!
//! Series literals are sums of `c*z^n` terms with rational or `a+bi`
//! coefficients, e.g. `"z^-1 + 3/2*z^2"` or `"(1+2i)*z^3 - i"`. Any single
//! alphabetic variable name is accepted, as long as it is used
//! consistently within one literal.

use crate::error::{VfError, VfResult};
use crate::scalar::Scalar;
use crate::series::LaurentSeries;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> VfResult<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(VfError::Parse(format!(
                "expected an integer at byte {start} of the literal"
            )));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

/// `num[/den]` with optional trailing `i`, or a bare `i`.
fn parse_coeff_atom(lx: &mut Lexer<'_>) -> VfResult<Scalar> {
    if lx.peek() == Some(b'i') {
        lx.bump();
        return Ok(Scalar::i());
    }
    let num = lx.integer()?;
    let den = if lx.eat(b'/') { lx.integer()? } else { BigInt::one() };
    if den.is_zero() {
        return Err(VfError::Parse("zero denominator in coefficient".into()));
    }
    let q = BigRational::new(num, den);
    if lx.eat(b'i') {
        Ok(Scalar::new(BigRational::zero(), q))
    } else {
        Ok(Scalar::new(q, BigRational::zero()))
    }
}

/// `(a+bi)`-style complex coefficient: a signed sum of coefficient atoms.
fn parse_paren_coeff(lx: &mut Lexer<'_>) -> VfResult<Scalar> {
    let mut total = Scalar::zero();
    loop {
        let neg = if lx.eat(b'-') {
            true
        } else {
            lx.eat(b'+');
            false
        };
        let atom = parse_coeff_atom(lx)?;
        total = if neg { &total - &atom } else { &total + &atom };
        match lx.peek() {
            Some(b')') => {
                lx.bump();
                return Ok(total);
            }
            Some(b'+') | Some(b'-') => continue,
            other => {
                return Err(VfError::Parse(format!(
                    "expected '+', '-' or ')' in complex coefficient, found {:?}",
                    other.map(|c| c as char)
                )))
            }
        }
    }
}

fn is_var_byte(c: u8) -> bool {
    c.is_ascii_alphabetic() && c != b'i'
}

/// One multiplicative factor of a series term.
enum SeriesFactor {
    Coeff(Scalar),
    Power(u8, i64),
}

fn parse_series_factor(lx: &mut Lexer<'_>) -> VfResult<SeriesFactor> {
    match lx.peek() {
        Some(b'(') => {
            lx.bump();
            Ok(SeriesFactor::Coeff(parse_paren_coeff(lx)?))
        }
        Some(c) if is_var_byte(c) => {
            lx.bump();
            let exp = if lx.eat(b'^') {
                let e = lx.integer()?;
                i64::try_from(e).map_err(|_| VfError::Parse("exponent out of range".into()))?
            } else {
                1
            };
            Ok(SeriesFactor::Power(c, exp))
        }
        Some(c) if c.is_ascii_digit() || c == b'i' => Ok(SeriesFactor::Coeff(parse_coeff_atom(lx)?)),
        other => Err(VfError::Parse(format!(
            "expected a coefficient or variable, found {:?}",
            other.map(|c| c as char)
        ))),
    }
}

/// Parse a series literal into an exact Laurent polynomial.
pub fn parse_series(text: &str) -> VfResult<LaurentSeries> {
    let mut lx = Lexer::new(text);
    let mut out = LaurentSeries::zero();
    let mut var: Option<u8> = None;
    if lx.at_end() {
        return Err(VfError::Parse("empty series literal".into()));
    }
    loop {
        let neg = if lx.eat(b'-') {
            true
        } else {
            lx.eat(b'+');
            false
        };
        // term: factors joined by '*' (juxtaposition is not supported)
        let mut coeff = Scalar::one();
        let mut exp = 0i64;
        loop {
            match parse_series_factor(&mut lx)? {
                SeriesFactor::Coeff(c) => coeff = &coeff * &c,
                SeriesFactor::Power(v, e) => {
                    match var {
                        None => var = Some(v),
                        Some(prev) if prev == v => {}
                        Some(prev) => {
                            return Err(VfError::Parse(format!(
                                "mixed variables '{}' and '{}' in one literal",
                                prev as char, v as char
                            )))
                        }
                    }
                    exp += e;
                }
            }
            if !lx.eat(b'*') {
                break;
            }
        }
        let term = if neg {
            LaurentSeries::monomial(exp, -&coeff)
        } else {
            LaurentSeries::monomial(exp, coeff)
        };
        out = out.add(&term);
        match lx.peek() {
            None => return Ok(out),
            Some(b'+') | Some(b'-') => continue,
            Some(c) => {
                return Err(VfError::Parse(format!(
                    "unexpected character '{}' in series literal",
                    c as char
                )))
            }
        }
    }
}

/// Parse a scalar literal (a series literal that must be constant).
pub fn parse_scalar(text: &str) -> VfResult<Scalar> {
    let series = parse_series(text)?;
    series
        .as_constant()
        .ok_or_else(|| VfError::Parse(format!("'{text}' is not a constant")))
}

/// A generator descriptor like `e@-1` (plain sector) or `e^1@-1` (copied
/// sector), or `beta@3` / `ctilde@-2` for the Heisenberg-type algebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDescriptor {
    pub name: String,
    pub copied: bool,
    pub mode: i64,
}

pub fn parse_generator(text: &str) -> VfResult<GeneratorDescriptor> {
    let (head, mode_text) = text
        .split_once('@')
        .ok_or_else(|| VfError::Parse(format!("generator '{text}' is missing '@mode'")))?;
    let (name, copied) = match head.strip_suffix("^1") {
        Some(base) => (base, true),
        None => (head, false),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(VfError::Parse(format!("bad generator name '{head}'")));
    }
    let mode: i64 = mode_text
        .trim()
        .parse()
        .map_err(|_| VfError::Parse(format!("bad mode '{mode_text}' in '{text}'")))?;
    Ok(GeneratorDescriptor {
        name: name.trim().to_string(),
        copied,
        mode,
    })
}

/// One additive term of a vector descriptor: an optional series
/// coefficient times a word of generator descriptors applied to the cyclic
/// vector, e.g. `3/2*z^2*e@-1*f^1@-2*1`.
#[derive(Clone, Debug)]
pub struct VectorTerm {
    pub coeff: LaurentSeries,
    pub word: Vec<GeneratorDescriptor>,
}

/// Parse a vector descriptor: terms joined by `+`/`-`, each a `*`-joined
/// product of scalar/series factors and generators, ending in `1`.
pub fn parse_vector(text: &str) -> VfResult<Vec<VectorTerm>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(VfError::Parse("empty vector descriptor".into()));
    }
    let mut sign = Scalar::one();
    loop {
        // split the leading term at the next top-level '+'/'-'
        let mut term_end = rest.len();
        for (i, c) in rest.char_indices() {
            if (c == '+' || c == '-') && i > 0 {
                // a sign directly after '@', '^', '*' or at a coefficient
                // start belongs to the number, not the term separator
                let prev = rest[..i].trim_end().chars().last().unwrap_or(' ');
                if matches!(prev, '@' | '^' | '*' | '(' | '/') {
                    continue;
                }
                term_end = i;
                break;
            }
        }
        let (term_text, tail) = rest.split_at(term_end);
        let term = parse_vector_term(term_text.trim(), &sign)?;
        out.push(term);
        rest = tail;
        if rest.is_empty() {
            return Ok(out);
        }
        sign = if rest.starts_with('-') {
            Scalar::from_integer(-1)
        } else {
            Scalar::one()
        };
        rest = rest[1..].trim_start();
        if rest.is_empty() {
            return Err(VfError::Parse("dangling sign in vector descriptor".into()));
        }
    }
}

fn parse_vector_term(text: &str, sign: &Scalar) -> VfResult<VectorTerm> {
    let mut coeff = LaurentSeries::constant(sign.clone());
    let mut word = Vec::new();
    let mut saw_unit = false;
    for factor in text.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(VfError::Parse(format!("empty factor in term '{text}'")));
        }
        if saw_unit {
            return Err(VfError::Parse(format!(
                "nothing may follow the cyclic vector '1' in '{text}'"
            )));
        }
        if factor == "1" {
            saw_unit = true;
            continue;
        }
        if factor.contains('@') {
            word.push(parse_generator(factor)?);
        } else {
            let series = parse_series(factor)?;
            coeff = coeff.mul(&series);
        }
    }
    if !saw_unit {
        return Err(VfError::Parse(format!(
            "vector term '{text}' must end with the cyclic vector '1'"
        )));
    }
    Ok(VectorTerm { coeff, word })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_literals() {
        let s = parse_series("z^-1 + 3/2*z^2").unwrap();
        assert_eq!(s.coeff(-1).unwrap(), Scalar::one());
        assert_eq!(s.coeff(2).unwrap(), Scalar::from_ratio(3, 2));
        assert_eq!(s.coeff(0).unwrap(), Scalar::zero());

        let t = parse_series("(1+2i)*t^3 - i").unwrap();
        assert_eq!(
            t.coeff(3).unwrap(),
            &Scalar::one() + &(&Scalar::from_integer(2) * &Scalar::i())
        );
        assert_eq!(t.coeff(0).unwrap(), -Scalar::i());

        assert_eq!(parse_series("5").unwrap(), LaurentSeries::constant(Scalar::from_integer(5)));
        assert!(parse_series("z + t").is_err());
        assert!(parse_series("").is_err());
    }

    #[test]
    fn p_polynomial_literal() {
        let p = parse_series("z^3+z").unwrap();
        assert_eq!(p.coeff(3).unwrap(), Scalar::one());
        assert_eq!(p.coeff(1).unwrap(), Scalar::one());
        assert!(p.is_polynomial());
    }

    #[test]
    fn generators() {
        let g = parse_generator("e^1@-1").unwrap();
        assert_eq!(g.name, "e");
        assert!(g.copied);
        assert_eq!(g.mode, -1);
        let h = parse_generator("h@0").unwrap();
        assert!(!h.copied);
        assert_eq!(h.mode, 0);
        assert!(parse_generator("e-1").is_err());
    }

    #[test]
    fn vectors() {
        let v = parse_vector("f^1@-1*1").unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].word.len(), 1);
        assert!(v[0].coeff.as_constant().unwrap().is_one());

        let w = parse_vector("3/2*z^2*e@-1*f^1@-2*1 - 1").unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].word.len(), 2);
        assert_eq!(w[1].word.len(), 0);
        assert_eq!(w[1].coeff.as_constant().unwrap(), Scalar::from_integer(-1));

        // modes carry their own signs without splitting terms
        let u = parse_vector("e@-1*1 + f@-2*1").unwrap();
        assert_eq!(u.len(), 2);
    }
}
