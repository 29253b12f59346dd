//! Surface syntax for elements: a small recursive-descent parser, a renderer
//! whose output parses back to the same tree, and lowering to [`Element`].
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := unary ("*" unary)* ;
//! unary  := "-" unary | factor ;
//! factor := atom ("^" NAT)? ;
//! atom   := "e" | "f" | "h" | "H1" | "H2"
//!         | "E(" NAT ")" | "F(" NAT ")"
//!         | "binom(" ("H1"|"H2") "," NAT ")"
//!         | NAT ("/" NAT)? | "(" expr ")" ;
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactmath::{fmt_rational, Rational, Var};
use crate::schur::normalize_terms;
use crate::straighten::{Element, Flavor, Generator, Mode, NormalMonomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Sum(Vec<Expr>),
    Neg(Box<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Scalar(Rational),
    Gen(Generator),
    /// A product written exactly as `F(a)*binom(H2,b)*E(c)` (or the mirrored
    /// `E(a)*binom(H1,b)*F(c)`), kept as a single node.
    Normal { flavor: Flavor, a: u32, b: u32, c: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(BigInt),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            toks.push((start, Tok::Nat(input[start..i].parse().expect("ascii digits"))));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            toks.push((start, Tok::Ident(input[start..i].to_string())));
        } else if b"+-*^/(),".contains(&ch) {
            toks.push((i, Tok::Sym(ch as char)));
            i += 1;
        } else {
            let c = input[i..].chars().next().expect("in bounds");
            return Err(ParseError { offset: i, expected: vec!["a token".into()], found: format!("`{c}`") });
        }
    }
    toks.push((input.len(), Tok::End));
    Ok(toks)
}

const ATOM_START: &[&str] = &["e", "f", "h", "H1", "H2", "E(", "F(", "binom(", "integer", "(", "-"];

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&c.to_string()]))
        }
    }

    fn nat(&mut self) -> Result<BigInt, ParseError> {
        match self.peek() {
            Tok::Nat(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&["nonnegative integer"])),
        }
    }

    fn small_nat(&mut self) -> Result<u32, ParseError> {
        let offset = self.offset();
        let n = self.nat()?;
        u32::try_from(&n).map_err(|_| ParseError {
            offset,
            expected: vec!["integer below 2^32".into()],
            found: format!("`{n}`"),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    terms.push(Expr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        while *self.peek() == Tok::Sym('*') {
            self.bump();
            factors.push(self.unary()?);
        }
        if factors.len() == 1 {
            return Ok(factors.pop().unwrap());
        }
        Ok(as_normal(&factors).unwrap_or(Expr::Prod(factors)))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let n = self.small_nat()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Nat(num) => {
                self.bump();
                if *self.peek() == Tok::Sym('/') {
                    self.bump();
                    let offset = self.offset();
                    let den = self.nat()?;
                    if den.is_zero() {
                        return Err(ParseError { offset, expected: vec!["nonzero denominator".into()], found: "`0`".into() });
                    }
                    return Ok(Expr::Scalar(Rational::new(num, den)));
                }
                Ok(Expr::Scalar(Rational::from_integer(num)))
            }
            Tok::Sym('(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let g = match name.as_str() {
                    "e" => Generator::E,
                    "f" => Generator::F,
                    "h" => Generator::H,
                    "H1" => Generator::H1,
                    "H2" => Generator::H2,
                    "E" | "F" => {
                        self.bump();
                        self.expect_sym('(')?;
                        let m = self.small_nat()?;
                        self.expect_sym(')')?;
                        let g = if name == "E" { Generator::EDiv(m) } else { Generator::FDiv(m) };
                        return Ok(Expr::Gen(g));
                    }
                    "binom" => {
                        self.bump();
                        self.expect_sym('(')?;
                        let var = match self.peek() {
                            Tok::Ident(v) if v == "H1" => Var::H1,
                            Tok::Ident(v) if v == "H2" => Var::H2,
                            _ => return Err(self.error(&["H1", "H2"])),
                        };
                        self.bump();
                        self.expect_sym(',')?;
                        let m = self.small_nat()?;
                        self.expect_sym(')')?;
                        return Ok(Expr::Gen(Generator::Binom(var, m)));
                    }
                    _ => return Err(self.error(ATOM_START)),
                };
                self.bump();
                Ok(Expr::Gen(g))
            }
            _ => Err(self.error(ATOM_START)),
        }
    }
}

fn as_normal(factors: &[Expr]) -> Option<Expr> {
    match factors {
        [Expr::Gen(Generator::FDiv(a)), Expr::Gen(Generator::Binom(Var::H2, b)), Expr::Gen(Generator::EDiv(c))] => {
            Some(Expr::Normal { flavor: Flavor::Fhe, a: *a, b: *b, c: *c })
        }
        [Expr::Gen(Generator::EDiv(a)), Expr::Gen(Generator::Binom(Var::H1, b)), Expr::Gen(Generator::FDiv(c))] => {
            Some(Expr::Normal { flavor: Flavor::Ehf, a: *a, b: *b, c: *c })
        }
        _ => None,
    }
}

/// Parses an expression; whitespace is insignificant.
pub fn parse(input: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(input)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["+", "-", "*", "^", "end of input"]));
    }
    Ok(e)
}

// binding strength of a node when printed without parentheses
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Sum(_) => 0,
        Expr::Prod(_) | Expr::Normal { .. } => 1,
        Expr::Neg(_) => 2,
        Expr::Pow(..) => 3,
        Expr::Scalar(q) if q.is_negative() => 0,
        Expr::Scalar(_) | Expr::Gen(_) => 4,
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if level(e) >= min {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Sum(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    match (i, t) {
                        (0, Expr::Neg(inner)) => {
                            f.write_str("-")?;
                            wrap(f, inner, 2)?;
                        }
                        (0, t) => wrap(f, t, 1)?,
                        (_, Expr::Neg(inner)) => {
                            f.write_str(" - ")?;
                            wrap(f, inner, 1)?;
                        }
                        (_, t) => {
                            f.write_str(" + ")?;
                            wrap(f, t, 1)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Neg(inner) => {
                f.write_str("-")?;
                wrap(f, inner, 2)
            }
            Expr::Prod(factors) => {
                for (i, x) in factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    // a nested product or normal block would merge into this one
                    wrap(f, x, 2)?;
                }
                Ok(())
            }
            Expr::Pow(base, n) => {
                wrap(f, base, 4)?;
                write!(f, "^{n}")
            }
            Expr::Scalar(q) => f.write_str(&fmt_rational(q)),
            Expr::Gen(g) => f.write_str(&generator_name(*g)),
            Expr::Normal { flavor, a, b, c } => match flavor {
                Flavor::Fhe => write!(f, "F({a})*binom(H2,{b})*E({c})"),
                Flavor::Ehf => write!(f, "E({a})*binom(H1,{b})*F({c})"),
            },
        }
    }
}

pub fn generator_name(g: Generator) -> String {
    match g {
        Generator::E => "e".into(),
        Generator::F => "f".into(),
        Generator::H => "h".into(),
        Generator::H1 => "H1".into(),
        Generator::H2 => "H2".into(),
        Generator::EDiv(m) => format!("E({m})"),
        Generator::FDiv(m) => format!("F({m})"),
        Generator::Binom(v, m) => format!("binom({v},{m})"),
    }
}

impl Expr {
    /// Builds the element this expression denotes. In `Mode::Schur(d)` every
    /// intermediate result is kept normalized in `B_d`.
    pub fn lower(&self, flavor: Flavor, mode: Mode) -> Element {
        let leaf = |x: Element| match mode {
            Mode::Universal => x,
            Mode::Schur(d) => normalize_terms(&x, d),
        };
        match self {
            Expr::Sum(terms) => terms.iter().fold(Element::zero(flavor), |acc, t| &acc + &t.lower(flavor, mode)),
            Expr::Neg(inner) => -&inner.lower(flavor, mode),
            Expr::Prod(factors) => {
                let mut it = factors.iter();
                let first = it.next().map_or_else(|| Element::one(flavor), |x| x.lower(flavor, mode));
                it.fold(first, |acc, x| acc.mul(&x.lower(flavor, mode), mode))
            }
            // e^m is m! e^(m); this skips the repeated straightening
            Expr::Pow(base, n) if matches!(**base, Expr::Gen(Generator::E) | Expr::Gen(Generator::F)) => {
                let g = if **base == Expr::Gen(Generator::E) { Generator::EDiv(*n) } else { Generator::FDiv(*n) };
                let fact: BigInt = (1..=*n as u64).map(BigInt::from).product();
                leaf(Element::generator(flavor, g).scale(&Rational::from_integer(fact)))
            }
            Expr::Pow(base, n) => base.lower(flavor, mode).pow(*n, mode),
            Expr::Scalar(q) => leaf(Element::scalar(flavor, q.clone())),
            Expr::Gen(g) => leaf(Element::generator(flavor, *g)),
            Expr::Normal { flavor: written, a, b, c } if *written == flavor => {
                leaf(Element::basis(flavor, NormalMonomial::new(*a, *b, *c)))
            }
            Expr::Normal { flavor: written, a, b, c } => {
                let (l, p, r) = match written {
                    Flavor::Fhe => (Generator::FDiv(*a), Generator::Binom(Var::H2, *b), Generator::EDiv(*c)),
                    Flavor::Ehf => (Generator::EDiv(*a), Generator::Binom(Var::H1, *b), Generator::FDiv(*c)),
                };
                Expr::Prod(vec![Expr::Gen(l), Expr::Gen(p), Expr::Gen(r)]).lower(flavor, mode)
            }
        }
    }

    /// Number of nodes, used to bound random test inputs.
    pub fn size(&self) -> usize {
        match self {
            Expr::Sum(xs) | Expr::Prod(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
            Expr::Neg(x) | Expr::Pow(x, _) => 1 + x.size(),
            _ => 1,
        }
    }
}

/// Parses and lowers in one step.
pub fn parse_element(input: &str, flavor: Flavor, mode: Mode) -> Result<Element, ParseError> {
    Ok(parse(input)?.lower(flavor, mode))
}
