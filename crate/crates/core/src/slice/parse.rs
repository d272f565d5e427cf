//! Text grammar for stem functions:
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := 'pow(' int ')' | 'reg(' int ')' | 'rat(' int ',' int ')' | number | 'q(' n ',' n ',' n ',' n ')' | '(' expr ')'
//! ```
//!
//! A scalar factor multiplies the function values from the right, so
//! `q(0,1,0,0)*reg(2)` is `s -> reg(2)(s) e1`.

use super::StemFunction;
use crate::error::{Error, Result};
use crate::quat::Quaternion;

enum Atom {
    Scalar(Quaternion),
    Func(StemFunction),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

pub fn parse_function(src: &str) -> Result<StemFunction> {
    let mut p = Parser { src, pos: 0 };
    let atom = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(into_func(atom))
}

fn into_func(a: Atom) -> StemFunction {
    match a {
        Atom::Func(f) => f,
        Atom::Scalar(c) => StemFunction::constant(c),
    }
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {token:?}")))
        }
    }

    fn expr(&mut self) -> Result<Atom> {
        let mut acc = self.term()?;
        while self.eat("+") {
            let rhs = self.term()?;
            acc = match (acc, rhs) {
                (Atom::Scalar(a), Atom::Scalar(b)) => Atom::Scalar(a + b),
                (a, b) => Atom::Func(StemFunction::sum(into_func(a), into_func(b))),
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Atom> {
        let mut acc = self.factor()?;
        while self.eat("*") {
            let rhs = self.factor()?;
            acc = match (acc, rhs) {
                (Atom::Scalar(a), Atom::Scalar(b)) => Atom::Scalar(a * b),
                (Atom::Scalar(c), Atom::Func(f)) | (Atom::Func(f), Atom::Scalar(c)) => Atom::Func(f.scale(c)),
                (Atom::Func(f), Atom::Func(g)) => Atom::Func(StemFunction::product(f, g)?),
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Atom> {
        if self.eat("(") {
            let inner = self.expr()?;
            self.expect(")")?;
            return Ok(inner);
        }
        if self.eat("pow(") {
            let n = self.integer()?;
            self.expect(")")?;
            return Ok(Atom::Func(StemFunction::power(n)));
        }
        if self.eat("reg(") {
            let n = self.integer()?;
            self.expect(")")?;
            return Ok(Atom::Func(StemFunction::regularizer(n)?));
        }
        if self.eat("rat(") {
            let num = self.integer()?;
            self.expect(",")?;
            let den = self.integer()?;
            self.expect(")")?;
            return Ok(Atom::Func(StemFunction::rational(num, den)));
        }
        if self.eat("q(") {
            let mut c = [0.0; 4];
            for (i, slot) in c.iter_mut().enumerate() {
                if i > 0 {
                    self.expect(",")?;
                }
                *slot = self.number()?;
            }
            self.expect(")")?;
            return Ok(Atom::Scalar(Quaternion::from_array(c)));
        }
        Ok(Atom::Scalar(Quaternion::real(self.number()?)))
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        let text = &self.rest()[..len];
        let n = text.parse().map_err(|_| self.error("expected a non-negative integer"))?;
        self.pos += len;
        Ok(n)
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let len = self
            .rest()
            .char_indices()
            .take_while(|&(i, c)| {
                c.is_ascii_digit()
                    || c == '.'
                    || c == 'e'
                    || c == 'E'
                    || (c == '-' || c == '+') && { i == 0 || matches!(self.rest().as_bytes()[i - 1], b'e' | b'E') }
            })
            .count();
        let text = &self.rest()[..len];
        let v: f64 = text.parse().map_err(|_| self.error("expected a number or function"))?;
        self.pos += len;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_grammar() {
        let f = parse_function("2*pow(1) + reg(2)*pow(3)").unwrap();
        let g = StemFunction::sum(
            StemFunction::power(1).scale(2.0),
            StemFunction::product(StemFunction::regularizer(2).unwrap(), StemFunction::power(3)).unwrap(),
        );
        assert_eq!(f, g);
        let f = parse_function("(pow(1)+pow(2))*reg(4)").unwrap();
        assert!(f.is_intrinsic());
        let f = parse_function("q(0,1,0,0)*reg(2)").unwrap();
        assert!(!f.is_intrinsic());
        let f = parse_function("-1.5e-1*pow(2)").unwrap();
        assert_eq!(f, StemFunction::power(2).scale(-0.15));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_function("pow(").is_err());
        assert!(parse_function("reg(0)").is_err());
        assert!(parse_function("pow(1) pow(2)").is_err());
        assert!(parse_function("q(0,1,0,0)*reg(1)*reg(2)").is_err());
        assert!(parse_function("sin(1)").is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in ["reg(2)", "pow(1)*reg(3)", "(pow(1)+reg(2))", "q(0,1,0,0)*reg(2)", "reg(1)*(q(0,1,0,0)*reg(2))", "3*(pow(1)*reg(2))"] {
            let f = parse_function(src).unwrap();
            assert_eq!(parse_function(&f.to_string()).unwrap(), f);
        }
    }
}
