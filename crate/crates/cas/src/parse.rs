//! Plain-text expression parser for rational functions.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' exponent)?
//! base   := integer | variable | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! parses as `-(x^2)`. Exponents must evaluate to nonnegative integer
//! constants. Variables must belong to the supplied [`VarSet`]; integers are
//! arbitrary precision. Every error carries the byte offset it refers to.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::poly::VarSet;
use crate::ratfunc::RationalFunction;
use crate::Rational;

/// A parse failure at a byte offset of the source string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    UnknownVariable(String),
    /// `^` applied to something that is not a nonnegative integer constant.
    BadExponent,
    DivisionByZero,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => {
                write!(
                    f,
                    "syntax error at offset {}: unexpected character '{}'",
                    self.offset, c
                )
            }
            ParseErrorKind::UnexpectedEnd => {
                write!(
                    f,
                    "syntax error at offset {}: unexpected end of input",
                    self.offset
                )
            }
            ParseErrorKind::UnexpectedToken(t) => {
                write!(
                    f,
                    "syntax error at offset {}: unexpected token `{}`",
                    self.offset, t
                )
            }
            ParseErrorKind::UnknownVariable(v) => {
                write!(f, "unknown variable `{}` at offset {}", v, self.offset)
            }
            ParseErrorKind::BadExponent => {
                write!(
                    f,
                    "exponent at offset {} must be a nonnegative integer constant",
                    self.offset
                )
            }
            ParseErrorKind::DivisionByZero => {
                write!(f, "division by zero at offset {}", self.offset)
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => n.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i].parse().expect("digits parse");
                out.push((Tok::Int(n), start));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_owned()), start));
            }
            other => {
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(other),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vars: &'a VarSet,
}

/// Binding powers: `+ -` < `* /` < unary `-` < `^` (right-associative).
const BP_ADD: (u8, u8) = (1, 2);
const BP_MUL: (u8, u8) = (3, 4);
const BP_NEG: u8 = 5;
const BP_POW: (u8, u8) = (7, 6);

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self) -> ParseError {
        match self.peek() {
            Some((t, off)) => ParseError {
                offset: *off,
                kind: ParseErrorKind::UnexpectedToken(t.describe()),
            },
            None => ParseError {
                offset: self.end,
                kind: ParseErrorKind::UnexpectedEnd,
            },
        }
    }

    fn primary(&mut self) -> Result<RationalFunction, ParseError> {
        match self.next() {
            Some((Tok::Int(n), _)) => Ok(RationalFunction::constant(
                self.vars,
                Rational::from_integer(n),
            )),
            Some((Tok::Ident(name), off)) => {
                RationalFunction::var(self.vars, &name).ok_or(ParseError {
                    offset: off,
                    kind: ParseErrorKind::UnknownVariable(name),
                })
            }
            Some((Tok::LParen, _)) => {
                let inner = self.expr(0)?;
                match self.next() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    Some((t, o)) => Err(ParseError {
                        offset: o,
                        kind: ParseErrorKind::UnexpectedToken(t.describe()),
                    }),
                    None => Err(ParseError {
                        offset: self.end,
                        kind: ParseErrorKind::UnexpectedEnd,
                    }),
                }
            }
            Some((Tok::Minus, _)) => {
                let inner = self.expr(BP_NEG)?;
                Ok(-inner)
            }
            Some((t, off)) => Err(ParseError {
                offset: off,
                kind: ParseErrorKind::UnexpectedToken(t.describe()),
            }),
            None => Err(ParseError {
                offset: self.end,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<RationalFunction, ParseError> {
        let mut lhs = self.primary()?;
        while let Some((t @ (Tok::Plus | Tok::Minus | Tok::Star | Tok::Slash | Tok::Caret), off)) =
            self.peek()
        {
            let (op, op_off) = (t.clone(), *off);
            let (lbp, rbp) = match op {
                Tok::Plus | Tok::Minus => BP_ADD,
                Tok::Star | Tok::Slash => BP_MUL,
                Tok::Caret => BP_POW,
                _ => unreachable!(),
            };
            if lbp < min_bp {
                break;
            }
            self.pos += 1;
            let rhs_off = self.peek().map(|(_, o)| *o).unwrap_or(self.end);
            let rhs = self.expr(rbp)?;
            lhs = match op {
                Tok::Plus => &lhs + &rhs,
                Tok::Minus => &lhs - &rhs,
                Tok::Star => &lhs * &rhs,
                Tok::Slash => lhs.div(&rhs).map_err(|_| ParseError {
                    offset: op_off,
                    kind: ParseErrorKind::DivisionByZero,
                })?,
                Tok::Caret => {
                    let e = rhs
                        .as_constant()
                        .filter(|c| c.is_integer() && !c.is_negative())
                        .and_then(|c| c.numer().to_i32())
                        .ok_or(ParseError {
                            offset: rhs_off,
                            kind: ParseErrorKind::BadExponent,
                        })?;
                    lhs.pow(e).expect("nonnegative exponent cannot fail")
                }
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }
}

/// Parses `src` into a rational function over the given variables.
pub fn parse_expression(src: &str, vars: &VarSet) -> Result<RationalFunction, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
        vars,
    };
    let rf = p.expr(0)?;
    if p.peek().is_some() {
        return Err(p.err_here());
    }
    Ok(rf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::rational;

    fn vs() -> VarSet {
        VarSet::new(&["D1", "D2", "S"])
    }

    #[test]
    fn binomial_square_expands() {
        let f = parse_expression("(D1+D2)^2", &vs()).unwrap();
        let d1 = Polynomial::var(&vs(), "D1").unwrap();
        let d2 = Polynomial::var(&vs(), "D2").unwrap();
        let expect = &(&d1.pow(2) + &(&d1 * &d2).mul_rational(&rational(2, 1))) + &d2.pow(2);
        assert!(f.is_polynomial());
        assert_eq!(f.numerator(), &expect);
    }

    #[test]
    fn simple_fraction() {
        let f = parse_expression("1/(D1-D2)", &vs()).unwrap();
        assert_eq!(f.numerator(), &Polynomial::one(&vs()));
        let d1 = Polynomial::var(&vs(), "D1").unwrap();
        let d2 = Polynomial::var(&vs(), "D2").unwrap();
        assert_eq!(f.denominator(), &(&d1 - &d2));
    }

    #[test]
    fn dangling_operator_reports_offset() {
        let err = parse_expression("D1+", &vs()).unwrap_err();
        assert_eq!(err.offset, 3);
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(
            err.to_string(),
            "syntax error at offset 3: unexpected end of input"
        );
    }

    #[test]
    fn unknown_variable_reports_name_and_offset() {
        let err = parse_expression("D1 + Q7", &vs()).unwrap_err();
        assert_eq!(err.offset, 5);
        assert_eq!(err.kind, ParseErrorKind::UnknownVariable("Q7".into()));
    }

    #[test]
    fn precedence_and_associativity() {
        let vs = vs();
        let parse = |s: &str| parse_expression(s, &vs).unwrap();
        assert_eq!(
            parse("D1 + D2 * S"),
            &parse("D1") + &(&parse("D2") * &parse("S"))
        );
        assert_eq!(parse("2^3^2"), parse("512"));
        assert_eq!(parse("-D1^2"), -parse("D1^2"));
        assert_eq!(parse("(-D1)^2"), parse("D1^2"));
        assert_eq!(parse("6/3/2"), parse("1"));
        assert_eq!(
            parse("D1 - D2 - S"),
            &(&parse("D1") - &parse("D2")) - &parse("S")
        );
        assert_eq!(parse("2*-3"), parse("-6"));
    }

    #[test]
    fn exponent_must_be_nonnegative_integer() {
        for bad in ["D1^D2", "D1^(1/2)", "D1^-1", "2^(0-1)"] {
            let err = parse_expression(bad, &vs()).unwrap_err();
            assert_eq!(err.kind, ParseErrorKind::BadExponent, "{bad}");
        }
        // ...but a parenthesized constant that *evaluates* to a nonnegative
        // integer is fine.
        assert_eq!(
            parse_expression("D1^(1+1)", &vs()).unwrap(),
            parse_expression("D1^2", &vs()).unwrap()
        );
    }

    #[test]
    fn division_by_zero_constant() {
        let err = parse_expression("D1/(2-2)", &vs()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DivisionByZero);
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn stray_input_rejected() {
        let err = parse_expression("D1 D2", &vs()).unwrap_err();
        assert_eq!(err.offset, 3);
        assert_eq!(err.kind, ParseErrorKind::UnexpectedToken("D2".into()));
        let err = parse_expression("(D1", &vs()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        let err = parse_expression("D1)", &vs()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedToken(")".into()));
        let err = parse_expression("", &vs()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        let err = parse_expression("D1 # D2", &vs()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('#'));
    }
}
