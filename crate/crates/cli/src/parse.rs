//! Expression language: lexer, recursive-descent parser and printer.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := factor ("*" factor)*
//! factor  := primary ("^" uint)?
//! primary := scalar | gen | "(" expr ")" | ORD "{" expr "}" | "-" factor
//! ORD     := N | A | QP | PQ | W | S[s=<rational>]
//! ```

use std::fmt;

use wick_core::algebra::Kind;
use num_traits::{One, Signed};
use wick_core::scalar::{integer, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderName {
    Normal,
    Antinormal,
    Qp,
    Pq,
    Weyl,
    S(Rational),
}

impl fmt::Display for OrderName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderName::Normal => f.write_str("N"),
            OrderName::Antinormal => f.write_str("A"),
            OrderName::Qp => f.write_str("QP"),
            OrderName::Pq => f.write_str("PQ"),
            OrderName::Weyl => f.write_str("W"),
            OrderName::S(s) => write!(f, "S[s={s}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Non-negative rational literal.
    Num(Rational),
    /// `r*i`, written `i` or `<r>i`.
    Imag(Rational),
    Root2,
    Sym(String),
    Gen { kind: Kind, index: Option<u16> },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Ordered(OrderName, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

const RESERVED: [&str; 12] = ["q", "p", "c", "cd", "i", "sqrt2", "N", "A", "QP", "PQ", "W", "S"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Imag(Rational),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

/// Exact value of a literal such as `3`, `3/4`, `0.25` or `-1/2`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let value = if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{}{}", if int.is_empty() { "0" } else { int }, frac);
        format!("{digits}/1{}", "0".repeat(frac.len())).parse::<Rational>().ok()?
    } else {
        let ok = body.split('/').all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_digit()));
        if !ok || body.matches('/').count() > 1 {
            return None;
        }
        let r = body.parse::<Rational>().ok()?;
        if body.contains('/') && r.denom() == &0.into() {
            return None;
        }
        r
    };
    Some(if neg { -value } else { value })
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, chars: src.char_indices().collect(), i: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.i).map_or(self.src.len(), |&(p, _)| p)
    }

    fn tokens(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.peek().is_some_and(char::is_whitespace) {
                self.i += 1;
            }
            let pos = self.pos();
            let Some(ch) = self.peek() else {
                out.push(Token { tok: Tok::End, pos });
                return Ok(out);
            };
            if ch.is_ascii_digit() || ch == '.' {
                let start = self.i;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.i += 1;
                }
                // a fraction bar directly followed by digits belongs to the literal
                if self.peek() == Some('/') && self.chars.get(self.i + 1).is_some_and(|&(_, c)| c.is_ascii_digit()) {
                    self.i += 1;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.i += 1;
                    }
                }
                let text: String = self.chars[start..self.i].iter().map(|&(_, c)| c).collect();
                let value = parse_rational(&text)
                    .ok_or_else(|| error_at(self.src, pos, format!("malformed number '{text}'")))?;
                let next_is_ident = self.chars.get(self.i + 1).is_some_and(|&(_, c)| c.is_alphanumeric() || c == '_');
                if self.peek() == Some('i') && !next_is_ident {
                    self.i += 1;
                    out.push(Token { tok: Tok::Imag(value), pos });
                } else {
                    out.push(Token { tok: Tok::Num(value), pos });
                }
            } else if ch.is_alphabetic() || ch == '_' {
                let start = self.i;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.i += 1;
                }
                let text: String = self.chars[start..self.i].iter().map(|&(_, c)| c).collect();
                out.push(Token { tok: Tok::Ident(text), pos });
            } else if "+-*^()[]{}=/".contains(ch) {
                self.i += 1;
                out.push(Token { tok: Tok::Sym(ch), pos });
            } else {
                return Err(error_at(self.src, pos, format!("unexpected character '{ch}'")));
            }
        }
    }
}

fn error_at(src: &str, pos: usize, message: String) -> ParseError {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    ParseError { line, column, message }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    i: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.i].pos
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(error_at(self.src, self.pos(), message.into()))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Num(r) => format!("number {r}"),
            Tok::Imag(r) => format!("imaginary {r}i"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".into(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(format!("expected '{c}', found {}", self.describe()))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            return match self.peek().clone() {
                Tok::Num(r) if r.is_integer() && !r.is_negative() => {
                    let e: u32 = r.numer().try_into().map_err(|_| error_at(self.src, self.pos(), "exponent too large".into()))?;
                    self.i += 1;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => self.fail(format!("expected a non-negative integer exponent, found {}", self.describe())),
            };
        }
        Ok(base)
    }

    fn index(&mut self) -> Result<Option<u16>, ParseError> {
        if !self.eat('[') {
            return Ok(None);
        }
        let idx = match self.peek().clone() {
            Tok::Num(r) if r.is_integer() && r.is_positive() => {
                let v: u16 = r.numer().try_into().map_err(|_| error_at(self.src, self.pos(), "index too large".into()))?;
                self.i += 1;
                v
            }
            _ => return self.fail(format!("bad index: expected a positive integer, found {}", self.describe())),
        };
        self.expect(']')?;
        Ok(Some(idx))
    }

    fn ordering(&mut self, name: &str) -> Result<OrderName, ParseError> {
        Ok(match name {
            "N" => OrderName::Normal,
            "A" => OrderName::Antinormal,
            "QP" => OrderName::Qp,
            "PQ" => OrderName::Pq,
            "W" => OrderName::Weyl,
            "S" => {
                self.expect('[')?;
                match self.peek().clone() {
                    Tok::Ident(s) if s == "s" => self.i += 1,
                    _ => return self.fail(format!("expected 's=' in S[...], found {}", self.describe())),
                }
                self.expect('=')?;
                let neg = self.eat('-');
                let s = match self.peek().clone() {
                    Tok::Num(r) => {
                        self.i += 1;
                        if neg {
                            -r
                        } else {
                            r
                        }
                    }
                    _ => return self.fail(format!("expected a rational s, found {}", self.describe())),
                };
                self.expect(']')?;
                OrderName::S(s)
            }
            _ => unreachable!(),
        })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(r) => {
                self.i += 1;
                Ok(Expr::Num(r))
            }
            Tok::Imag(r) => {
                self.i += 1;
                Ok(Expr::Imag(r))
            }
            Tok::Sym('(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('-') => {
                self.i += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Tok::Ident(name) => {
                self.i += 1;
                let kind = match name.as_str() {
                    "q" => Some(Kind::Q),
                    "p" => Some(Kind::P),
                    "c" => Some(Kind::C),
                    "cd" => Some(Kind::Cd),
                    _ => None,
                };
                if let Some(kind) = kind {
                    let index = self.index()?;
                    return Ok(Expr::Gen { kind, index });
                }
                match name.as_str() {
                    "i" => Ok(Expr::Imag(integer(1))),
                    "sqrt2" => Ok(Expr::Root2),
                    "N" | "A" | "QP" | "PQ" | "W" | "S" => {
                        let ord = self.ordering(&name)?;
                        self.expect('{')?;
                        let body = self.expr()?;
                        self.expect('}')?;
                        Ok(Expr::Ordered(ord, Box::new(body)))
                    }
                    _ => Ok(Expr::Sym(name)),
                }
            }
            _ => self.fail(format!("unexpected {}", self.describe())),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser { src, toks, i: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return p.fail(format!("unexpected {} after expression", p.describe()));
    }
    Ok(e)
}

/// Parses an ordering name such as `N`, `QP` or `S[s=1/2]`.
pub fn parse_ordering(src: &str) -> Result<OrderName, ParseError> {
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser { src, toks, i: 0 };
    let name = match p.peek().clone() {
        Tok::Ident(n) if ["N", "A", "QP", "PQ", "W", "S"].contains(&n.as_str()) => {
            p.i += 1;
            p.ordering(&n)?
        }
        _ => return p.fail(format!("unknown ordering {}; expected N, A, QP, PQ, W or S[s=<rational>]", p.describe())),
    };
    if p.peek() != &Tok::End {
        return p.fail(format!("unexpected {} after ordering name", p.describe()));
    }
    Ok(name)
}

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

// binding strength for the printer
const SUM: u8 = 0;
const PRODUCT: u8 = 1;
const POWER: u8 = 2;

fn strength(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) => PRODUCT,
        Expr::Pow(..) | Expr::Neg(..) => POWER,
        _ => 3,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if strength(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Imag(r) if r.is_one() => f.write_str("i"),
            Expr::Imag(r) => write!(f, "{r}i"),
            Expr::Root2 => f.write_str("sqrt2"),
            Expr::Sym(s) => f.write_str(s),
            Expr::Gen { kind, index } => {
                f.write_str(kind.name())?;
                match index {
                    Some(k) => write!(f, "[{k}]"),
                    None => Ok(()),
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                write_at(f, a, SUM)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                write_at(f, b, PRODUCT)
            }
            Expr::Mul(a, b) => {
                write_at(f, a, PRODUCT)?;
                f.write_str("*")?;
                write_at(f, b, POWER)
            }
            Expr::Pow(b, e) => {
                // a power's base is a primary; nested powers need parentheses
                write_at(f, b, 3)?;
                write!(f, "^{e}")
            }
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_at(f, e, POWER)
            }
            Expr::Ordered(name, body) => write!(f, "{name}{{{body}}}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use wick_core::scalar::rational;

    fn num(n: i64, d: i64) -> Expr {
        Expr::Num(rational(n, d))
    }

    #[test]
    fn precedence() {
        let e = parse("a + b*c^2").unwrap();
        let want = Expr::Add(
            Box::new(Expr::Sym("a".into())),
            Box::new(Expr::Mul(
                Box::new(Expr::Sym("b".into())),
                Box::new(Expr::Pow(Box::new(Expr::Gen { kind: Kind::C, index: None }), 2)),
            )),
        );
        assert_eq!(e, want);
        assert_eq!(parse("1 - 2 - 3").unwrap().to_string(), "1 - 2 - 3");
        assert_eq!(parse("1 - (2 - 3)").unwrap().to_string(), "1 - (2 - 3)");
    }

    #[test]
    fn literals() {
        assert_eq!(parse("0.25").unwrap(), num(1, 4));
        assert_eq!(parse("3/4").unwrap(), num(3, 4));
        assert_eq!(parse("2i").unwrap(), Expr::Imag(rational(2, 1)));
        assert_eq!(parse("1/2i").unwrap(), Expr::Imag(rational(1, 2)));
        assert_eq!(parse("i").unwrap(), Expr::Imag(rational(1, 1)));
        assert_eq!(parse("sqrt2").unwrap(), Expr::Root2);
        assert_eq!(parse("q[2]").unwrap(), Expr::Gen { kind: Kind::Q, index: Some(2) });
        assert_eq!(parse("zc").unwrap(), Expr::Sym("zc".into()));
        assert_eq!(parse_rational("-1.5"), Some(rational(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1.2.3"), None);
    }

    #[test]
    fn orderings() {
        let e = parse("S[s=-1/2]{ c^2*cd }").unwrap();
        assert!(matches!(e, Expr::Ordered(OrderName::S(ref s), _) if s == &rational(-1, 2)));
        assert_eq!(e.to_string(), "S[s=-1/2]{c^2*cd}");
        assert_eq!(parse_ordering("QP").unwrap(), OrderName::Qp);
        assert!(parse_ordering("X").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("c * (cd + ").unwrap_err();
        assert_eq!((e.line, e.column), (1, 11));
        let e = parse("q[0]").unwrap_err();
        assert!(e.message.contains("bad index"));
        let e = parse("c\n  $").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(parse("c^-1").is_err());
        assert!(parse("N c").is_err());
    }

    fn leaf() -> impl Strategy<Value = Expr> {
        prop_oneof![
            (0i64..20, 1i64..5).prop_map(|(n, d)| num(n, d)),
            (1i64..20, 1i64..5).prop_map(|(n, d)| Expr::Imag(rational(n, d))),
            Just(Expr::Root2),
            prop::sample::select(vec!["z", "zc", "l", "lc", "s", "mu", "x_1"]).prop_map(|s| Expr::Sym(s.into())),
            (prop::sample::select(vec![Kind::Q, Kind::P, Kind::C, Kind::Cd]), prop::option::of(1u16..4))
                .prop_map(|(kind, index)| Expr::Gen { kind, index }),
        ]
    }

    fn ordering_name() -> impl Strategy<Value = OrderName> {
        prop_oneof![
            Just(OrderName::Normal),
            Just(OrderName::Antinormal),
            Just(OrderName::Qp),
            Just(OrderName::Pq),
            Just(OrderName::Weyl),
            (-4i64..=4).prop_map(|s| OrderName::S(rational(s, 4))),
        ]
    }

    fn ast() -> impl Strategy<Value = Expr> {
        leaf().prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), 0u32..5).prop_map(|(a, e)| Expr::Pow(Box::new(a), e)),
                (ordering_name(), inner).prop_map(|(o, a)| Expr::Ordered(o, Box::new(a))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_round_trips(e in ast()) {
            let text = e.to_string();
            prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
        }
    }
}
