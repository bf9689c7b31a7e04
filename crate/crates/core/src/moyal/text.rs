//! Text form of symbols: `+`/`-` separated terms such as `(3/2)*h^1*q1^2*p2`.
//!
//! `h` is the formal Planck constant and `i` the imaginary unit. Printing is
//! canonical (terms ordered by hbar power, then by decreasing exponent vector),
//! so `parse_with_dim(print(s), s.n()) == s`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::coeff::{c_i, is_zero, real, Coeff};
use super::symbol::{Monomial, PolySymbol, MAX_DOF, MAX_EXPONENT};
use crate::error::{Error, Result};

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

fn write_term(out: &mut String, first: bool, value: &BigRational, imag: bool, m: &Monomial, n: usize) {
    let negative = value.is_negative();
    if first {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    let mag = value.abs();
    let mut factors: Vec<String> = Vec::new();
    if !mag.is_one() {
        factors.push(fmt_rational(&mag));
    }
    if imag {
        factors.push("i".into());
    }
    match m.hbar {
        0 => {}
        1 => factors.push("h".into()),
        k => factors.push(format!("h^{k}")),
    }
    for (slot, &e) in m.exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = if slot < n { format!("q{}", slot + 1) } else { format!("p{}", slot - n + 1) };
        factors.push(if e == 1 { name } else { format!("{name}^{e}") });
    }
    if factors.is_empty() {
        factors.push("1".into());
    }
    out.push_str(&factors.join("*"));
}

/// Canonical text of a symbol.
pub fn print(s: &PolySymbol) -> String {
    let mut out = String::new();
    let mut first = true;
    for (m, c) in s.terms() {
        if !c.re.is_zero() {
            write_term(&mut out, first, &c.re, false, m, s.n());
            first = false;
        }
        if !c.im.is_zero() {
            write_term(&mut out, first, &c.im, true, m, s.n());
            first = false;
        }
    }
    if first {
        out.push('0');
    }
    out
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Q(usize),
    P(usize),
    H,
    I,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: String| Error::Parse { pos, message };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '(' => toks.push((start, Tok::LParen)),
            ')' => toks.push((start, Tok::RParen)),
            '+' => toks.push((start, Tok::Plus)),
            '-' => toks.push((start, Tok::Minus)),
            '*' => toks.push((start, Tok::Star)),
            '/' => toks.push((start, Tok::Slash)),
            '^' => toks.push((start, Tok::Caret)),
            'h' => toks.push((start, Tok::H)),
            'i' => toks.push((start, Tok::I)),
            'q' | 'p' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err(start, format!("expected an index after `{c}`")));
                }
                let idx: usize = chars[i + 1..j].iter().collect::<String>().parse().map_err(|_| err(start, "bad index".into()))?;
                if idx == 0 || idx > MAX_DOF {
                    return Err(err(start, format!("variable index must be in 1..={MAX_DOF}")));
                }
                toks.push((start, if c == 'q' { Tok::Q(idx) } else { Tok::P(idx) }));
                i = j;
                continue;
            }
            d if d.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let v: BigInt = chars[i..j].iter().collect::<String>().parse().unwrap();
                toks.push((start, Tok::Num(v)));
                i = j;
                continue;
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    max_index: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn fail<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse { pos: self.here(), message: message.into() })
    }

    fn expr(&mut self) -> Result<PolySymbol> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => self.pos += 1,
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { -&first } else { first };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PolySymbol> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul_commutative(&self.power()?)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.power()?;
                    let c = constant_value(&d).ok_or(Error::Parse { pos: at, message: "can only divide by a constant".into() })?;
                    if is_zero(&c) {
                        return Err(Error::Parse { pos: at, message: "division by zero".into() });
                    }
                    acc = acc.scale(&(Coeff::one() / c));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<PolySymbol> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(k)) => {
                    self.pos += 1;
                    let k: u32 = k.try_into().ok().filter(|k| *k <= MAX_EXPONENT).ok_or(Error::Parse {
                        pos: self.here(),
                        message: format!("exponent must be at most {MAX_EXPONENT}"),
                    })?;
                    Ok(base.pow_commutative(k))
                }
                _ => self.fail("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<PolySymbol> {
        let n = MAX_DOF;
        let tok = match self.peek().cloned() {
            Some(t) => t,
            None => return self.fail("unexpected end of input"),
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(PolySymbol::constant(n, real(BigRational::from_integer(v)))),
            Tok::H => Ok(PolySymbol::hbar(n)),
            Tok::I => Ok(PolySymbol::constant(n, c_i())),
            Tok::Q(k) => {
                self.max_index = self.max_index.max(k);
                Ok(PolySymbol::q(n, k))
            }
            Tok::P(k) => {
                self.max_index = self.max_index.max(k);
                Ok(PolySymbol::p(n, k))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.fail("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::Minus => Ok(-&self.power()?),
            _ => {
                self.pos -= 1;
                self.fail("expected a number, variable, `h`, `i` or `(`")
            }
        }
    }
}

fn constant_value(s: &PolySymbol) -> Option<Coeff> {
    if s.is_zero() {
        return Some(Complex::zero());
    }
    if s.len() == 1 {
        let (m, c) = s.terms().next().unwrap();
        if m.hbar == 0 && m.degree() == 0 {
            return Some(c.clone());
        }
    }
    None
}

fn parse_raw(text: &str) -> Result<(PolySymbol, usize)> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse { pos: 0, message: "empty expression".into() });
    }
    let mut p = Parser { toks, pos: 0, end: text.chars().count(), max_index: 0 };
    let s = p.expr()?;
    if p.pos != p.toks.len() {
        return p.fail("unexpected trailing input");
    }
    Ok((s, p.max_index))
}

/// Parse a symbol; the number of degrees of freedom is the largest variable
/// index that occurs (at least 1).
pub fn parse(text: &str) -> Result<PolySymbol> {
    let (s, max_index) = parse_raw(text)?;
    s.with_dim(max_index.max(1))
}

/// Parse a symbol into a fixed number of degrees of freedom.
pub fn parse_with_dim(text: &str, n: usize) -> Result<PolySymbol> {
    let (s, max_index) = parse_raw(text)?;
    if max_index > n {
        return Err(Error::Parse { pos: 0, message: format!("variable index {max_index} exceeds n = {n}") });
    }
    s.with_dim(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::star::{star, OmegaConvention};

    #[test]
    fn prints_canonical_forms() {
        let q = parse("q1").unwrap();
        let p = parse("p1").unwrap();
        assert_eq!(print(&star(&q, &p, OmegaConvention::Operator).unwrap()), "q1*p1 + (1/2)*i*h");
        assert_eq!(print(&star(&p, &q, OmegaConvention::Operator).unwrap()), "q1*p1 - (1/2)*i*h");
        let q2 = parse("q1^2").unwrap();
        let p2 = parse("p1^2").unwrap();
        assert_eq!(print(&star(&q2, &p2, OmegaConvention::Operator).unwrap()), "q1^2*p1^2 + 2*i*h*q1*p1 - (1/2)*h^2");
        assert_eq!(print(&PolySymbol::zero(2)), "0");
        assert_eq!(print(&parse("-1").unwrap()), "-1");
    }

    #[test]
    fn parses_grammar() {
        let s = parse("(3/2)*h^1*q1^2*p2^1").unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(print(&s), "(3/2)*h*q1^2*p2");
        let t = parse("(q1 + p1)^2 - 2*q1*p1").unwrap();
        assert_eq!(t, parse("q1^2 + p1^2").unwrap());
        assert_eq!(parse("(1 + i)*(1 - i)").unwrap(), parse("2").unwrap());
        assert_eq!(parse("q1/4").unwrap(), parse("(1/4)*q1").unwrap());
    }

    #[test]
    fn roundtrip() {
        for text in ["q1*p1 + (1/2)*i*h", "-(7/3)*i*h^2*q2^3 + q1 - 5", "(2/3 + (1/5)*i)*p3^4*q1", "0", "h"] {
            let s = parse_with_dim(text, 3).unwrap();
            assert_eq!(parse_with_dim(&print(&s), 3).unwrap(), s, "{text}");
        }
    }

    #[test]
    fn reports_positions() {
        assert_eq!(parse("q1 + * p1").unwrap_err(), Error::Parse { pos: 5, message: "expected a number, variable, `h`, `i` or `(`".into() });
        assert!(matches!(parse("q1 + x"), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse("(q1"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse("q1/q1"), Err(Error::Parse { .. })));
        assert!(matches!(parse(""), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse("q9"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_with_dim("q2", 1), Err(Error::Parse { .. })));
    }

    #[test]
    fn monomial_constructor_matches_text() {
        let s = PolySymbol::monomial(2, 1, &[2, 0, 0, 1], real(BigRational::new(3.into(), 2.into()))).unwrap();
        assert_eq!(s, parse("(3/2)*h*q1^2*p2").unwrap());
    }
}
