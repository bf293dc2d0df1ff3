//! Polynomial text grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | atom ('^' int)?
//! atom  := int ('/' int)? | 'pi' | 'u' | 'X' | 'X0' | '(' expr ')'
//! ```
//!
//! Whitespace is ignored. `pi` is the uniformizer, `u` the lift of the
//! residue generator.

use num_bigint::BigInt;
use num_rational::BigRational;
use stablered::numfield::{Field, FieldElement};
use stablered::polyalg::{Poly, Var};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    field: Field,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn skip(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.pos).copied()
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        self.skip();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        Ok(txt.parse().unwrap())
    }

    fn small(&mut self) -> Result<u32, ParseError> {
        let at = self.pos;
        let n = self.int()?;
        u32::try_from(n).or_else(|_| Err(ParseError { pos: at, msg: "exponent too large".into() }))
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.small()?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let f = self.field.clone();
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.int()?;
                let mut q = BigRational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let at = self.pos;
                    let den = self.int()?;
                    if den == BigInt::from(0) {
                        return Err(ParseError { pos: at, msg: "zero denominator".into() });
                    }
                    q /= BigRational::from_integer(den);
                }
                Ok(Poly::constant(FieldElement::from_rational(&f, &q), Var::X0))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                match &self.s[start..self.pos] {
                    b"pi" => Ok(Poly::constant(FieldElement::pi(&f), Var::X0)),
                    b"u" => Ok(Poly::constant(FieldElement::u(&f), Var::X0)),
                    b"X" | b"X0" => Ok(Poly::x(&f, Var::X0)),
                    other => Err(ParseError { pos: start, msg: format!("unknown symbol '{}'", String::from_utf8_lossy(other)) }),
                }
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
        }
    }
}

/// Parses a polynomial in X over the given field.
pub fn parse_poly(text: &str, field: &Field) -> Result<Poly, ParseError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, field: field.clone() };
    let out = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Parses a field element; X is rejected.
pub fn parse_element(text: &str, field: &Field) -> Result<FieldElement, ParseError> {
    let p = parse_poly(text, field)?;
    if p.deg() > 0 {
        return Err(ParseError { pos: 0, msg: "field element contains X".into() });
    }
    Ok(p.coeff(0))
}
