//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr    := rel | opexpr
//! rel     := opexpr REL opexpr          REL in { <=  <  ==  =<=  =<  in }
//! opexpr  := term (OP ["~"] term)*      OP in { &  |  +  -  ^ }, left-assoc
//! term    := literal | "(" expr ")"
//! literal := "{" [item ("," item)*] "}"
//! item    := number | literal | number "[" number "]"
//! ```
//!
//! A literal containing any `[m]` item is a multiset; elements (nested
//! literals) can never carry multiplicities. The `~` suffix switches
//! that one operator use to value semantics. The left side of `in` is
//! a member — a bare number or a plain set literal.

use std::fmt;

use hset_core::operations::{OpName, Semantic};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

/// An element denotation inside a literal.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementLit {
    Num(f64),
    Set(Vec<ElementLit>),
}

/// A top-level literal: items with optional multiplicities. Any
/// multiplicity present makes the whole literal a multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct SetLiteral {
    pub items: Vec<(ElementLit, Option<f64>)>,
}

impl SetLiteral {
    pub fn is_multiset(&self) -> bool {
        self.items.iter().any(|(_, m)| m.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    /// `<=`
    Subset,
    /// `<`
    StrictSubset,
    /// `==`
    Equal,
    /// `=<=`
    ExactSubset,
    /// `=<`
    StrictExactSubset,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(SetLiteral),
    Op {
        op: OpName,
        semantic: Semantic,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Rel {
        rel: RelOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Membership {
        member: ElementLit,
        rhs: Box<Expr>,
    },
}

// ----------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Amp,
    Pipe,
    Plus,
    Minus,
    Caret,
    Tilde,
    Le,
    Lt,
    EqEq,
    ExactLe,
    ExactLt,
    In,
    Num(f64),
}

impl Tok {
    fn describe(self) -> &'static str {
        match self {
            Tok::LBrace => "'{'",
            Tok::RBrace => "'}'",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::LBracket => "'['",
            Tok::RBracket => "']'",
            Tok::Comma => "','",
            Tok::Amp => "'&'",
            Tok::Pipe => "'|'",
            Tok::Plus => "'+'",
            Tok::Minus => "'-'",
            Tok::Caret => "'^'",
            Tok::Tilde => "'~'",
            Tok::Le => "'<='",
            Tok::Lt => "'<'",
            Tok::EqEq => "'=='",
            Tok::ExactLe => "'=<='",
            Tok::ExactLt => "'=<'",
            Tok::In => "'in'",
            Tok::Num(_) => "a number",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let tok = match bytes[i] {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'^' => Tok::Caret,
            b'~' => Tok::Tilde,
            b'=' => {
                if bytes[i + 1..].starts_with(b"<=") {
                    i += 2;
                    Tok::ExactLe
                } else if bytes.get(i + 1) == Some(&b'<') {
                    i += 1;
                    Tok::ExactLt
                } else if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    Tok::EqEq
                } else {
                    return err(start, "unexpected '='");
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    Tok::Le
                } else {
                    Tok::Lt
                }
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    i += 1;
                    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                        i += 1;
                    }
                    let exp_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == exp_start {
                        return err(start, "exponent needs digits");
                    }
                }
                let token = &text[start..i];
                let value: f64 = match token.parse() {
                    Ok(v) => v,
                    Err(_) => return err(start, format!("invalid number '{token}'")),
                };
                if !value.is_finite() {
                    return err(start, format!("number '{token}' out of range"));
                }
                toks.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word = &text[start..i];
                if word != "in" {
                    return err(start, format!("unknown word '{word}'"));
                }
                toks.push((Tok::In, start));
                continue;
            }
            c => return err(start, format!("unexpected character '{}'", c as char)),
        };
        i += 1;
        toks.push((tok, start));
    }
    Ok(toks)
}

// ----------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|&(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(_, p)| p)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => err(self.here(), format!("expected {what}, found {}", t.describe())),
            None => err(self.end, format!("expected {what}, found end of input")),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        // A bare (possibly negative) number can only start a membership
        // test.
        if self.starts_with_number() {
            let member = ElementLit::Num(self.parse_signed_number()?);
            self.expect(Tok::In, "'in' after a bare number")?;
            let rhs = self.parse_opexpr()?;
            return Ok(Expr::Membership {
                member,
                rhs: Box::new(rhs),
            });
        }
        let lhs = self.parse_opexpr()?;
        let rel = match self.peek() {
            Some(Tok::Le) => RelOp::Subset,
            Some(Tok::Lt) => RelOp::StrictSubset,
            Some(Tok::EqEq) => RelOp::Equal,
            Some(Tok::ExactLe) => RelOp::ExactSubset,
            Some(Tok::ExactLt) => RelOp::StrictExactSubset,
            Some(Tok::In) => {
                let at = self.here();
                self.pos += 1;
                let member = match lhs {
                    Expr::Literal(lit) => literal_as_element(lit, at)?,
                    _ => {
                        return err(
                            at,
                            "left operand of 'in' must be a number or a set literal",
                        )
                    }
                };
                let rhs = self.parse_opexpr()?;
                return Ok(Expr::Membership {
                    member,
                    rhs: Box::new(rhs),
                });
            }
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.parse_opexpr()?;
        Ok(Expr::Rel {
            rel,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        })
    }

    fn starts_with_number(&self) -> bool {
        match self.peek() {
            Some(Tok::Num(_)) => true,
            Some(Tok::Minus) => matches!(
                self.toks.get(self.pos + 1).map(|&(t, _)| t),
                Some(Tok::Num(_))
            ),
            _ => false,
        }
    }

    fn parse_opexpr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Amp) => OpName::Intersection,
                Some(Tok::Pipe) => OpName::Union,
                Some(Tok::Plus) => OpName::Sum,
                Some(Tok::Minus) => OpName::Difference,
                Some(Tok::Caret) => OpName::SymmDiff,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let semantic = if self.peek() == Some(Tok::Tilde) {
                self.pos += 1;
                Semantic::Value
            } else {
                Semantic::Refer
            };
            let rhs = self.parse_term()?;
            lhs = Expr::Op {
                op,
                semantic,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::LBrace) => Ok(Expr::Literal(self.parse_literal()?)),
            Some(t) => err(
                self.here(),
                format!("expected a set literal or '(', found {}", t.describe()),
            ),
            None => err(self.end, "expected a set literal or '(', found end of input"),
        }
    }

    fn parse_literal(&mut self) -> Result<SetLiteral, ParseError> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut items = Vec::new();
        if self.peek() == Some(Tok::RBrace) {
            self.pos += 1;
            return Ok(SetLiteral { items });
        }
        loop {
            items.push(self.parse_item()?);
            match self.advance() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrace) => return Ok(SetLiteral { items }),
                Some(t) => {
                    return err(
                        self.toks[self.pos - 1].1,
                        format!("expected ',' or '}}', found {}", t.describe()),
                    )
                }
                None => return err(self.end, "expected ',' or '}', found end of input"),
            }
        }
    }

    fn parse_item(&mut self) -> Result<(ElementLit, Option<f64>), ParseError> {
        if self.peek() == Some(Tok::LBrace) {
            return Ok((ElementLit::Set(self.parse_element_set()?), None));
        }
        let value = self.parse_signed_number()?;
        if self.peek() == Some(Tok::LBracket) {
            self.pos += 1;
            let at = self.here();
            let mult = self.parse_signed_number()?;
            if !mult.is_finite() || mult <= 0.0 {
                return err(at, format!("multiplicity must be positive, got {mult}"));
            }
            self.expect(Tok::RBracket, "']'")?;
            return Ok((ElementLit::Num(value), Some(mult)));
        }
        Ok((ElementLit::Num(value), None))
    }

    /// A nested literal denotes an element: a plain set, where
    /// multiplicities make no sense.
    fn parse_element_set(&mut self) -> Result<Vec<ElementLit>, ParseError> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut members = Vec::new();
        if self.peek() == Some(Tok::RBrace) {
            self.pos += 1;
            return Ok(members);
        }
        loop {
            if self.peek() == Some(Tok::LBrace) {
                members.push(ElementLit::Set(self.parse_element_set()?));
            } else {
                let value = self.parse_signed_number()?;
                if self.peek() == Some(Tok::LBracket) {
                    return err(self.here(), "an element cannot carry a multiplicity");
                }
                members.push(ElementLit::Num(value));
            }
            match self.advance() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrace) => return Ok(members),
                Some(t) => {
                    return err(
                        self.toks[self.pos - 1].1,
                        format!("expected ',' or '}}', found {}", t.describe()),
                    )
                }
                None => return err(self.end, "expected ',' or '}', found end of input"),
            }
        }
    }

    fn parse_signed_number(&mut self) -> Result<f64, ParseError> {
        let negative = if self.peek() == Some(Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.advance() {
            Some(Tok::Num(v)) => Ok(if negative { -v } else { v }),
            Some(t) => err(
                self.toks[self.pos - 1].1,
                format!("expected a number, found {}", t.describe()),
            ),
            None => err(self.end, "expected a number, found end of input"),
        }
    }
}

/// Reinterpret a top-level literal as a single element, for the left
/// side of `in`. Multiset literals are not elements.
fn literal_as_element(lit: SetLiteral, at: usize) -> Result<ElementLit, ParseError> {
    let mut members = Vec::with_capacity(lit.items.len());
    for (item, mult) in lit.items {
        if mult.is_some() {
            return err(at, "a multiset cannot be a member; drop the [m]");
        }
        members.push(item);
    }
    Ok(ElementLit::Set(members))
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let expr = p.parse_expr()?;
    if let Some(t) = p.peek() {
        return err(
            p.here(),
            format!("expected end of input, found {}", t.describe()),
        );
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(x: f64) -> ElementLit {
        ElementLit::Num(x)
    }

    #[test]
    fn parses_plain_literals() {
        let e = parse("{1,2}").unwrap();
        match e {
            Expr::Literal(lit) => {
                assert!(!lit.is_multiset());
                assert_eq!(lit.items, vec![(num(1.0), None), (num(2.0), None)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("{}").unwrap(), Expr::Literal(_)));
    }

    #[test]
    fn parses_multiset_literals() {
        let e = parse("{1[2],3}").unwrap();
        match e {
            Expr::Literal(lit) => {
                assert!(lit.is_multiset());
                assert_eq!(lit.items, vec![(num(1.0), Some(2.0)), (num(3.0), None)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_negative_numbers_and_nested_sets() {
        let e = parse("{-1,{2,{}},-0.5[0.25]}").unwrap();
        match e {
            Expr::Literal(lit) => {
                assert_eq!(lit.items.len(), 3);
                assert_eq!(lit.items[0], (num(-1.0), None));
                assert_eq!(
                    lit.items[1],
                    (
                        ElementLit::Set(vec![num(2.0), ElementLit::Set(vec![])]),
                        None
                    )
                );
                assert_eq!(lit.items[2], (num(-0.5), Some(0.25)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn operators_are_left_associative_with_optional_value_marker() {
        let e = parse("{1} - {2} -~ {3}").unwrap();
        match e {
            Expr::Op {
                op: OpName::Difference,
                semantic: Semantic::Value,
                lhs,
                ..
            } => match *lhs {
                Expr::Op {
                    op: OpName::Difference,
                    semantic: Semantic::Refer,
                    ..
                } => {}
                other => panic!("unexpected lhs {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_operator_tokens_map() {
        for (text, op) in [
            ("{1}&{2}", OpName::Intersection),
            ("{1}|{2}", OpName::Union),
            ("{1}+{2}", OpName::Sum),
            ("{1}-{2}", OpName::Difference),
            ("{1}^{2}", OpName::SymmDiff),
        ] {
            match parse(text).unwrap() {
                Expr::Op { op: got, .. } => assert_eq!(got, op),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn all_relation_tokens_map() {
        for (text, rel) in [
            ("{1}<={2}", RelOp::Subset),
            ("{1}<{2}", RelOp::StrictSubset),
            ("{1}=={2}", RelOp::Equal),
            ("{1}=<={2}", RelOp::ExactSubset),
            ("{1}=<{2}", RelOp::StrictExactSubset),
        ] {
            match parse(text).unwrap() {
                Expr::Rel { rel: got, .. } => assert_eq!(got, rel),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn membership_forms() {
        match parse("2 in {1,2}").unwrap() {
            Expr::Membership { member, .. } => assert_eq!(member, num(2.0)),
            other => panic!("unexpected {other:?}"),
        }
        match parse("-3 in {1}").unwrap() {
            Expr::Membership { member, .. } => assert_eq!(member, num(-3.0)),
            other => panic!("unexpected {other:?}"),
        }
        match parse("{} in {{},1}").unwrap() {
            Expr::Membership { member, .. } => assert_eq!(member, ElementLit::Set(vec![])),
            other => panic!("unexpected {other:?}"),
        }
        match parse("{1,2} in {{1,2}}").unwrap() {
            Expr::Membership { member, .. } => {
                assert_eq!(member, ElementLit::Set(vec![num(1.0), num(2.0)]))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parenthesized_relations_nest() {
        assert!(matches!(parse("({1}<={2})").unwrap(), Expr::Rel { .. }));
    }

    #[test]
    fn scientific_notation() {
        match parse("{1e3,2.5E-1}").unwrap() {
            Expr::Literal(lit) => {
                assert_eq!(lit.items[0], (num(1000.0), None));
                assert_eq!(lit.items[1], (num(0.25), None));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_syntax_errors_with_positions() {
        for text in [
            "", "{", "{1", "{1,}", "{1}}", "}", "{1} &", "& {1}", "{1} {2}", "2", "2 in",
            "in {1}", "{1[2}", "{a}", "{1}~{2}", "--2 in {1}", "{1} == {2} == {3}",
            "{1} <> {2}", "{1[2]} in {1}", "({1}", "{1,,2}", "5 5", "{1e}", "{1} =< =",
        ] {
            let e = parse(text).unwrap_err();
            assert!(e.pos <= text.len(), "position in range for {text:?}");
        }
    }

    #[test]
    fn rejects_bad_multiplicities() {
        for text in ["{1[0]}", "{1[-2]}", "{1[1e999]}"] {
            let e = parse(text).unwrap_err();
            assert!(
                e.msg.contains("positive") || e.msg.contains("out of range"),
                "{text:?} -> {}",
                e.msg
            );
        }
    }

    #[test]
    fn rejects_multiplicities_inside_elements() {
        let e = parse("{{1[2]}}").unwrap_err();
        assert!(e.msg.contains("element cannot carry"));
        let e = parse("{1[2]} in {1}").unwrap_err();
        assert!(e.msg.contains("multiset cannot be a member"));
    }

    #[test]
    fn rejects_huge_number_literals() {
        let e = parse("{1e999}").unwrap_err();
        assert!(e.msg.contains("out of range"));
    }
}
