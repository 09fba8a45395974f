//! Recursive-descent parser for the polynomial text grammar.
//!
//! Grammar: variables `x1..xn`, integer and rational literals (`3`, `3/2`),
//! operators `+ - * ^`, parentheses, unary minus. `^` binds tightest, then
//! `*`, then `+`/`-`. Exponents are nonnegative integers.

use num_bigint::BigInt;

use super::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Rat;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

pub fn parse(text: &str, nvars: usize) -> Result<Polynomial> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        nvars,
    };
    p.skip_ws();
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(poly)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = if self.eat(b'-') {
            -&self.term()?
        } else {
            self.eat(b'+');
            self.term()?
        };
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

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        while self.eat(b'*') {
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.integer()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| self.err("exponent out of range"))?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let idx = self.integer()? as usize;
                self.skip_ws();
                Polynomial::var(self.nvars, idx)
            }
            Some(c) if c.is_ascii_digit() => {
                let numer = self.integer()?;
                let denom = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d == 0 {
                        return Err(self.err("zero denominator"));
                    }
                    d
                } else {
                    1
                };
                self.skip_ws();
                Ok(Polynomial::constant(
                    self.nvars,
                    Rat::new(BigInt::from(numer), BigInt::from(denom)),
                ))
            }
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                Ok(-&self.atom()?)
            }
            _ => Err(self.err("expected variable, number, or '('")),
        }
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected integer"));
        }
        let end = self.pos;
        self.skip_ws();
        std::str::from_utf8(&self.src[start..end])
            .expect("digits are ascii")
            .parse()
            .map_err(|_| self.err("integer out of range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Exponents;
    use num_traits::{One, Zero};

    #[test]
    fn parses_spec_examples() {
        let q = parse("x1^2 + x2^2", 2).unwrap();
        let terms: Vec<_> = q.terms().collect();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[1].0, &Exponents(vec![2, 0]));

        let z = parse("0", 3).unwrap();
        assert!(z.is_zero());

        let cubic = parse("x1*(x2^2+x3^2) + x2^3", 3).unwrap();
        let expect = Polynomial::from_terms(
            3,
            vec![
                (vec![1, 2, 0], Rat::one()),
                (vec![1, 0, 2], Rat::one()),
                (vec![0, 3, 0], Rat::one()),
            ],
        );
        assert_eq!(cubic, expect);
    }

    #[test]
    fn rational_literals() {
        let q = parse("3/2*x1 - 1/3", 1).unwrap();
        assert_eq!(
            q.eval_rat(&crate::poly::RationalPoint::from_i64(&[1]))
                .unwrap(),
            Rat::new(7.into(), 6.into())
        );
    }

    #[test]
    fn unary_minus_and_nesting() {
        let q = parse("-(x1 - x2)^2", 2).unwrap();
        let expanded = parse("-x1^2 + 2*x1*x2 - x2^2", 2).unwrap();
        assert_eq!(q, expanded);
    }

    #[test]
    fn syntax_error_carries_position() {
        match parse("x1 + * x2", 2) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn variable_out_of_range() {
        assert!(matches!(
            parse("x3", 2),
            Err(Error::VarOutOfRange { index: 3, nvars: 2 })
        ));
        assert!(parse("x0", 2).is_err());
    }

    #[test]
    fn cancellation_produces_zero() {
        let q = parse("x1 - x1", 2).unwrap();
        assert!(q.is_zero());
        assert!(q.constant_term().is_zero());
    }
}
