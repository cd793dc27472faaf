//! Recursive-descent parser for operator expressions such as
//! `X1^2 + X2^2 + i*(X2*Y2 + Y2*X2)` or `2i(X1Y2 - X2Y1) + Y1^2`.
//!
//! Products are noncommutative; multiplication may be implicit. Every term
//! must end up homogeneous of degree two, with `U` counting as degree two.

use super::{Generator, OperatorExpression, Term};
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    ImagUnit,
    Gen(Generator),
    Central,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Sym {
    G(Generator),
    U,
}

impl Sym {
    fn degree(self) -> usize {
        match self {
            Sym::G(_) => 1,
            Sym::U => 2,
        }
    }
}

/// Noncommutative polynomial as a list of (word, coefficient).
#[derive(Debug, Clone, Default)]
struct Poly(Vec<(Vec<Sym>, C64)>);

impl Poly {
    fn scalar(c: C64) -> Self {
        Poly(vec![(Vec::new(), c)])
    }

    fn word(s: Sym) -> Self {
        Poly(vec![(vec![s], C64::new(1.0, 0.0))])
    }

    fn add(mut self, other: Poly, sign: f64) -> Poly {
        for (w, c) in other.0 {
            self.push(w, c * sign);
        }
        self
    }

    fn push(&mut self, w: Vec<Sym>, c: C64) {
        if let Some(e) = self.0.iter_mut().find(|(x, _)| *x == w) {
            e.1 += c;
        } else {
            self.0.push((w, c));
        }
    }

    fn mul(&self, other: &Poly, pos: usize) -> Result<Poly> {
        let mut out = Poly::default();
        for (w1, c1) in &self.0 {
            for (w2, c2) in &other.0 {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                let deg: usize = w.iter().map(|s| s.degree()).sum();
                if deg > 2 {
                    return Err(Error::Parse { pos, msg: "term of degree above two".into() });
                }
                out.push(w, c1 * c2);
            }
        }
        Ok(out)
    }
}

fn lex(text: &str, n: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let start = i;
        match ch {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, start)),
            '-' | '−' => out.push((Tok::Minus, start)),
            '*' | '·' => out.push((Tok::Star, start)),
            '^' => out.push((Tok::Caret, start)),
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            'i' => out.push((Tok::ImagUnit, start)),
            'U' => out.push((Tok::Central, start)),
            'X' | 'Y' => {
                i += 1;
                if i < chars.len() && chars[i] == '_' {
                    i += 1;
                }
                let ds = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(Error::Parse { pos: start, msg: format!("generator {ch} needs an index") });
                }
                let digits: String = chars[ds..i].iter().collect();
                let index: usize = digits
                    .parse()
                    .map_err(|_| Error::Parse { pos: ds, msg: "bad generator index".into() })?;
                let name: String = chars[start..i].iter().collect();
                if index == 0 || index > n {
                    return Err(Error::GeneratorOutOfRange { name, n });
                }
                let g = if ch == 'X' { Generator::X(index) } else { Generator::Y(index) };
                out.push((Tok::Gen(g), start));
                continue;
            }
            d if d.is_ascii_digit() || d == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part, only when followed by digits
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v: f64 = s.parse().map_err(|_| Error::Parse { pos: start, msg: format!("bad number '{s}'") })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            other => {
                return Err(Error::Parse { pos: start, msg: format!("unexpected character '{other}'") });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.0)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.product()?;
                    acc = acc.add(rhs, 1.0);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.product()?;
                    acc = acc.add(rhs, -1.0);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(t: Tok) -> bool {
        matches!(t, Tok::Num(_) | Tok::ImagUnit | Tok::Gen(_) | Tok::Central | Tok::LParen)
    }

    fn product(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            let at = self.at();
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs, at)?;
                }
                Some(t) if Self::starts_factor(t) => {
                    let rhs = self.power()?;
                    acc = acc.mul(&rhs, at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Poly::default().add(self.unary()?, -1.0))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(Tok::Caret) {
            let at = self.at();
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v <= 8.0 => v as usize,
                _ => return Err(Error::Parse { pos: self.at(), msg: "exponent must be a small non-negative integer".into() }),
            };
            self.pos += 1;
            let mut acc = Poly::scalar(C64::new(1.0, 0.0));
            for _ in 0..e {
                acc = acc.mul(&base, at)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        let at = self.at();
        let t = self.peek().ok_or(Error::Parse { pos: at, msg: "unexpected end of input".into() })?;
        self.pos += 1;
        match t {
            Tok::Num(v) => Ok(Poly::scalar(C64::new(v, 0.0))),
            Tok::ImagUnit => Ok(Poly::scalar(C64::new(0.0, 1.0))),
            Tok::Gen(g) => Ok(Poly::word(Sym::G(g))),
            Tok::Central => Ok(Poly::word(Sym::U)),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(Tok::RParen) {
                    return Err(Error::Parse { pos: self.at(), msg: "expected ')'".into() });
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(Error::Parse { pos: at, msg: format!("unexpected token {other:?}") }),
        }
    }
}

/// Parse `text` into second-order terms plus a central coefficient.
pub fn parse_operator(text: &str, n: usize) -> Result<OperatorExpression> {
    if n == 0 {
        return Err(Error::Schema("n must be positive".into()));
    }
    let toks = lex(text, n)?;
    let end = text.chars().count();
    if toks.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, pos: 0, end };
    let poly = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse { pos: p.at(), msg: "trailing input".into() });
    }
    let mut terms = Vec::new();
    let mut central = C64::new(0.0, 0.0);
    for (w, c) in poly.0 {
        match w.as_slice() {
            [Sym::G(a), Sym::G(b)] => terms.push(Term { coefficient: c, factors: [*a, *b] }),
            [Sym::U] => central += c,
            _ if c == C64::new(0.0, 0.0) => {}
            _ => {
                return Err(Error::Parse { pos: 0, msg: "expression is not homogeneous of degree two".into() });
            }
        }
    }
    Ok(OperatorExpression { n, terms, central })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::{X, Y};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn example_4_1_terms() {
        let e = parse_operator("X1^2+X2^2+i*(X2*Y2+Y2*X2)", 2).unwrap();
        assert_eq!(e.central, c(0.0, 0.0));
        let want = [(c(1., 0.), [X(1), X(1)]), (c(1., 0.), [X(2), X(2)]), (c(0., 1.), [X(2), Y(2)]), (c(0., 1.), [Y(2), X(2)])];
        assert_eq!(e.terms.len(), 4);
        for (coef, f) in want {
            assert!(e.terms.iter().any(|t| t.factors == f && t.coefficient == coef), "{f:?}");
        }
    }

    #[test]
    fn central_only() {
        let e = parse_operator("U", 1).unwrap();
        assert!(e.terms.is_empty());
        assert_eq!(e.central, c(1.0, 0.0));
    }

    #[test]
    fn single_product() {
        let e = parse_operator("2*X1*Y1", 1).unwrap();
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.terms[0].coefficient, c(2.0, 0.0));
        assert_eq!(e.terms[0].factors, [X(1), Y(1)]);
    }

    #[test]
    fn implicit_products_and_literals() {
        let e = parse_operator("2i(X_1Y2 - X2 Y1) + 1e-3 U - i*3*U", 2).unwrap();
        assert_eq!(e.central, c(1e-3, -3.0));
        assert!(e.terms.iter().any(|t| t.factors == [X(1), Y(2)] && t.coefficient == c(0.0, 2.0)));
        assert!(e.terms.iter().any(|t| t.factors == [X(2), Y(1)] && t.coefficient == c(0.0, -2.0)));
    }

    #[test]
    fn square_of_sum_keeps_order() {
        let e = parse_operator("(Y3 - iY2)^2", 3).unwrap();
        assert!(e.terms.iter().any(|t| t.factors == [Y(3), Y(2)] && t.coefficient == c(0.0, -1.0)));
        assert!(e.terms.iter().any(|t| t.factors == [Y(2), Y(3)] && t.coefficient == c(0.0, -1.0)));
        assert!(e.terms.iter().any(|t| t.factors == [Y(2), Y(2)] && t.coefficient == c(-1.0, 0.0)));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_operator("X1 + $", 1) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_operator("X3^2", 2), Err(Error::GeneratorOutOfRange { .. })));
        assert!(parse_operator("X1", 1).is_err());
        assert!(parse_operator("X1*X1*X1", 1).is_err());
        assert!(parse_operator("(X1+Y1", 1).is_err());
    }
}
