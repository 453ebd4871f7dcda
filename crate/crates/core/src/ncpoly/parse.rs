//! Recursive-descent parser for noncommutative polynomial expressions.
//!
//! ```text
//! expr    := term { ("+"|"-") term }
//! term    := factor { "*" factor }
//! factor  := primary [ "^" NAT ]
//! primary := "A" NAT | "i" | RATIONAL | "(" expr ")" | "[" expr "," expr "]"
//! RATIONAL := INT [ "/" NAT ]
//! ```
//!
//! Whitespace is insignificant. A leading `-` on an expression is accepted as
//! unary negation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::NcPolynomial;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Parses `text` into a polynomial over `generators` symbols `A1..A{generators}`.
pub fn parse_polynomial(text: &str, generators: usize) -> Result<NcPolynomial> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0, generators };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(p.with_generators(generators))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    generators: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn nat(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a natural number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("validated digits"))
    }

    fn small_nat(&mut self) -> Result<usize> {
        let start = self.pos;
        let n = self.nat()?;
        n.try_into().map_err(|_| Error::Syntax { pos: start, msg: "number too large".into() })
    }

    fn expr(&mut self) -> Result<NcPolynomial> {
        let negate = self.eat(b'-');
        let first = self.term()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<NcPolynomial> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NcPolynomial> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exp = self.small_nat()?;
            return Ok(base.pow(exp as u32));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<NcPolynomial> {
        let g = self.generators;
        match self.peek() {
            Some(b'A') => {
                self.pos += 1;
                let at = self.pos;
                let idx = self.small_nat()?;
                if idx == 0 {
                    return Err(Error::Syntax { pos: at, msg: "generator indices start at 1".into() });
                }
                if idx > g {
                    return Err(Error::GeneratorOutOfRange { index: idx, count: g });
                }
                Ok(NcPolynomial::generator(g, idx - 1))
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(NcPolynomial::constant(g, Scalar::i()))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.nat()?;
                let den = if self.eat(b'/') {
                    let at = self.pos;
                    let d = self.nat()?;
                    if d.is_zero() {
                        return Err(Error::Syntax { pos: at, msg: "zero denominator".into() });
                    }
                    d
                } else {
                    BigInt::from(1)
                };
                Ok(NcPolynomial::constant(g, Scalar::from_rational(BigRational::new(num, den))))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'[') => {
                self.pos += 1;
                let x = self.expr()?;
                self.expect(b',')?;
                let y = self.expr()?;
                self.expect(b']')?;
                Ok(x.commutator(&y))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
