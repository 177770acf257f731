//! Text syntax for elements: juxtaposition is the product, `x*` a starred generator,
//! `d(x)` a differential, parameters `q`, `p` (and their fourth roots `s`, `r`), `t`.

use std::sync::Arc;

use thiserror::Error;

use crate::freealg::{Alphabet, Element};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at token {token}: {msg}")]
    Syntax { token: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("division by a non-scalar or zero expression")]
    BadDivision,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Plus,
    Minus,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>, ParseError> {
    let cs: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' | '\n' | '\r' | '·' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            '0'..='9' => {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = cs[start..i].iter().collect();
                let n = s.parse::<i64>().map_err(|_| ParseError::Syntax {
                    token: out.len() + 1,
                    msg: format!("number `{}` out of range", s),
                })?;
                out.push(Tok::Num(n));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                    i += 1;
                }
                if i < cs.len() && cs[i] == '*' {
                    i += 1;
                }
                out.push(Tok::Ident(cs[start..i].iter().collect()));
            }
            _ => {
                return Err(ParseError::Syntax {
                    token: out.len() + 1,
                    msg: format!("unexpected character `{}`", c),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    alphabet: &'a Arc<Alphabet>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            token: self.pos + 1,
            msg: msg.to_string(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected {:?}", t))
        }
    }

    fn sum(&mut self) -> Result<Element, ParseError> {
        let mut acc = self.signed()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.signed()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.signed()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed(&mut self) -> Result<Element, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(self.signed()?.neg());
        }
        self.product()
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::LParen))
    }

    fn product(&mut self) -> Result<Element, ParseError> {
        if !self.starts_atom() {
            return self.err("expected a term");
        }
        let mut acc = self.power()?;
        loop {
            if self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                let den = self.power()?;
                let c = as_scalar(&den).ok_or(ParseError::BadDivision)?;
                if c.is_zero() {
                    return Err(ParseError::BadDivision);
                }
                acc = acc.scale(&c.inv());
            } else if self.starts_atom() {
                let f = self.power()?;
                acc = &acc * &f;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Element, ParseError> {
        let (base, param) = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let (n, d) = self.exponent()?;
        if d != 1 || n < 0 {
            match param {
                Some(v) if (n * 4) % d == 0 => {
                    let quarters = (n * 4 / d) as i32;
                    let sc = match v {
                        'q' => Scalar::q_pow(quarters),
                        'p' => Scalar::p_pow(quarters),
                        _ => return self.err("fractional powers only for q and p"),
                    };
                    return Ok(Element::scalar(self.alphabet, sc));
                }
                _ => {
                    if d == 1 {
                        if let Some(c) = as_scalar(&base) {
                            if c.is_zero() {
                                return Err(ParseError::BadDivision);
                            }
                            return Ok(Element::scalar(self.alphabet, c.pow(n as i32)));
                        }
                    }
                    return self.err("unsupported exponent");
                }
            }
        }
        Ok(base.pow(n as u32))
    }

    fn exponent(&mut self) -> Result<(i64, i64), ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok((n, 1))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Num(n)) => {
                        self.pos += 1;
                        Ok((-n, 1))
                    }
                    _ => self.err("expected exponent"),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let neg = if self.peek() == Some(&Tok::Minus) {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                let n = match self.peek().cloned() {
                    Some(Tok::Num(n)) => n,
                    _ => return self.err("expected exponent numerator"),
                };
                self.pos += 1;
                let d = if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if d > 0 => {
                            self.pos += 1;
                            d
                        }
                        _ => return self.err("expected exponent denominator"),
                    }
                } else {
                    1
                };
                self.expect(Tok::RParen)?;
                let g = num_integer::gcd(n, d);
                Ok((if neg { -n / g } else { n / g }, d / g))
            }
            _ => self.err("expected exponent"),
        }
    }

    /// The atom, plus the parameter letter if it is a bare `q` or `p`.
    fn atom(&mut self) -> Result<(Element, Option<char>), ParseError> {
        let a = self.alphabet;
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok((Element::scalar(a, Scalar::from_int(n)), None))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok((e, None))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "d" && self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let inner = self.sum()?;
                    self.expect(Tok::RParen)?;
                    if !a.has_differentials() {
                        return Err(ParseError::UnknownGenerator("d(...)".into()));
                    }
                    return Ok((inner.d().expect("differentials present"), None));
                }
                if let Ok(i) = a.index(&name) {
                    return Ok((Element::letter(a, i), None));
                }
                let (sc, param) = match name.as_str() {
                    "q" => (Scalar::q(), Some('q')),
                    "p" => (Scalar::p(), Some('p')),
                    "s" => (Scalar::s(), None),
                    "r" => (Scalar::r(), None),
                    "t" => (Scalar::t(), None),
                    _ => return Err(ParseError::UnknownGenerator(name)),
                };
                Ok((Element::scalar(a, sc), param))
            }
            _ => self.err("expected a term"),
        }
    }
}

fn as_scalar(e: &Element) -> Option<Scalar> {
    match e.terms().len() {
        0 => Some(Scalar::zero()),
        1 => {
            let (w, c) = e.terms().iter().next().unwrap();
            w.is_unit().then(|| c.clone())
        }
        _ => None,
    }
}

/// Parses an element over `alphabet`.
pub fn parse_element(alphabet: &Arc<Alphabet>, src: &str) -> Result<Element, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        alphabet,
    };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a scalar expression (no generators).
pub fn parse_scalar(src: &str) -> Result<Scalar, ParseError> {
    let a = Arc::new(Alphabet::new(&[]).expect("empty alphabet"));
    let e = parse_element(&a, src)?;
    as_scalar(&e).ok_or(ParseError::Syntax {
        token: 1,
        msg: "not a scalar".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(&[("x", "x*")]).unwrap())
    }

    #[test]
    fn disc_relation() {
        let a = disc();
        let e = parse_element(&a, "x* x - q x x* - (1-q)").unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e.to_string(), "x* x - q x x* + (-1 + q)");
    }

    #[test]
    fn fractional_powers() {
        assert_eq!(parse_scalar("q^(1/4)").unwrap(), Scalar::s());
        assert_eq!(parse_scalar("q^(5/4)").unwrap(), Scalar::q_pow(5));
        assert_eq!(parse_scalar("q^-1").unwrap(), Scalar::q().inv());
        assert_eq!(parse_scalar("3/2 q").unwrap(), Scalar::q() * Scalar::from_ratio(3, 2));
    }

    #[test]
    fn malformed() {
        let a = disc();
        assert_eq!(
            parse_element(&a, "x -"),
            Err(ParseError::Syntax {
                token: 3,
                msg: "expected a term".into()
            })
        );
        assert!(matches!(parse_element(&a, "z"), Err(ParseError::UnknownGenerator(_))));
    }

    #[test]
    fn display_round_trip() {
        let a = Arc::new(disc().with_differentials());
        for src in [
            "x d(x) - q^-1 d(x) x",
            "(1 - q)/(1 + q) x x* + q^(5/4) x*",
            "-3/2 + p q x",
        ] {
            let e = parse_element(&a, src).unwrap();
            assert_eq!(parse_element(&a, &e.to_string()).unwrap(), e, "{}", src);
        }
    }
}
