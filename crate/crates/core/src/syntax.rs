//! Text syntax for preference expressions.
//!
//! ```text
//! expr    := disj
//! disj    := conj { "|" conj }
//! conj    := unary { "." unary }
//! unary   := "~" unary | primary
//! primary := atom | "(" expr ")" | "TOP" | "BOT"
//! atom    := IDENT "=" NUMBER
//! ```
//!
//! `·` is accepted for `.` and `∨` for `|`.

use std::fmt;

use thiserror::Error;

use crate::expr::{Atom, PreferenceExpr};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message} (at `{token}`)")]
pub struct ParseDiagnostic {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: String,
}

pub fn parse(text: &str) -> Result<PreferenceExpr, ParseDiagnostic> {
    let mut p = Parser { text, pos: 0 };
    let e = p.disjunction()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected input after expression"));
    }
    Ok(e)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    /// Consume one of `ops` after whitespace.
    fn eat(&mut self, ops: &[char]) -> bool {
        self.skip_ws();
        match self.peek() {
            Some(c) if ops.contains(&c) => {
                self.pos += c.len_utf8();
                true
            }
            _ => false,
        }
    }

    fn error(&self, message: &str) -> ParseDiagnostic {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, offset: usize, message: &str) -> ParseDiagnostic {
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().unwrap_or("").chars().count() + 1;
        let token = match self.text[offset..].chars().next() {
            None => "<end of input>".to_string(),
            Some(c) if is_ident_char(c) => self.text[offset..]
                .chars()
                .take_while(|&c| is_ident_char(c))
                .collect(),
            Some(c) => c.to_string(),
        };
        ParseDiagnostic {
            offset,
            line,
            column,
            message: message.to_string(),
            token,
        }
    }

    fn disjunction(&mut self) -> Result<PreferenceExpr, ParseDiagnostic> {
        let mut items = vec![self.conjunction()?];
        while self.eat(&['|', '∨']) {
            items.push(self.conjunction()?);
        }
        Ok(collapse(items, PreferenceExpr::Disjunction))
    }

    fn conjunction(&mut self) -> Result<PreferenceExpr, ParseDiagnostic> {
        let mut items = vec![self.unary()?];
        while self.eat(&['.', '·']) {
            items.push(self.unary()?);
        }
        Ok(collapse(items, PreferenceExpr::Conjunction))
    }

    fn unary(&mut self) -> Result<PreferenceExpr, ParseDiagnostic> {
        if self.eat(&['~']) {
            return Ok(PreferenceExpr::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<PreferenceExpr, ParseDiagnostic> {
        self.skip_ws();
        if self.eat(&['(']) {
            let e = self.disjunction()?;
            if !self.eat(&[')']) {
                return Err(self.error("expected `)`"));
            }
            return Ok(e);
        }
        let ident: String = self
            .rest()
            .chars()
            .take_while(|&c| is_ident_char(c))
            .collect();
        if ident.is_empty() || ident.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(self.error("expected an atom, `~`, `(`, TOP or BOT"));
        }
        self.pos += ident.len();
        if !self.eat(&['=']) {
            return match ident.as_str() {
                "TOP" => Ok(PreferenceExpr::Top),
                "BOT" => Ok(PreferenceExpr::Bottom),
                _ => Err(self.error(&format!("expected `=` after attribute `{ident}`"))),
            };
        }
        self.skip_ws();
        let level = self.number()?;
        self.skip_ws();
        if self.peek() == Some('=') {
            return Err(self.error("duplicate `=` in atom"));
        }
        Ok(PreferenceExpr::Atom(Atom::new(ident.as_str(), level)))
    }

    /// Decimal real: optional sign, digits with an optional fraction, and an
    /// optional exponent. A `.` not followed by a digit is left for the
    /// conjunction operator.
    fn number(&mut self) -> Result<f64, ParseDiagnostic> {
        let bytes = self.rest().as_bytes();
        let mut i = 0;
        if matches!(bytes.first(), Some(b'+' | b'-')) {
            i += 1;
        }
        let int_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut digits = i - int_start;
        if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
                digits += 1;
            }
        }
        if digits == 0 {
            return Err(self.error("expected a number"));
        }
        if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
            let mut j = i + 1;
            if j < bytes.len() && matches!(bytes[j], b'+' | b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let literal = &self.rest()[..i];
        let value: f64 = literal
            .parse()
            .map_err(|_| self.error("malformed number"))?;
        if !value.is_finite() {
            return Err(self.error("number out of range"));
        }
        self.pos += i;
        Ok(value)
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn collapse(
    mut items: Vec<PreferenceExpr>,
    make: fn(Vec<PreferenceExpr>) -> PreferenceExpr,
) -> PreferenceExpr {
    if items.len() == 1 {
        items.pop().unwrap()
    } else {
        make(items)
    }
}

const PREC_DISJ: u8 = 1;
const PREC_CONJ: u8 = 2;
const PREC_UNARY: u8 = 3;

/// Render with the fewest parentheses the precedence rules allow.
pub fn format(e: &PreferenceExpr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, PREC_DISJ).expect("writing to a String cannot fail");
    out
}

fn write_expr(out: &mut String, e: &PreferenceExpr, min_prec: u8) -> fmt::Result {
    use std::fmt::Write;
    match e {
        PreferenceExpr::Atom(a) => write!(out, "{}={}", a.attribute, a.level),
        PreferenceExpr::Top => out.write_str("TOP"),
        PreferenceExpr::Bottom => out.write_str("BOT"),
        PreferenceExpr::Complement(inner) => {
            out.push('~');
            write_expr(out, inner, PREC_UNARY)
        }
        PreferenceExpr::Conjunction(cs) => write_nary(out, cs, " . ", PREC_CONJ, min_prec, "TOP"),
        PreferenceExpr::Disjunction(cs) => write_nary(out, cs, " | ", PREC_DISJ, min_prec, "BOT"),
    }
}

fn write_nary(
    out: &mut String,
    children: &[PreferenceExpr],
    sep: &str,
    prec: u8,
    min_prec: u8,
    empty: &str,
) -> fmt::Result {
    match children {
        [] => {
            out.push_str(empty);
            return Ok(());
        }
        [only] => return write_expr(out, only, min_prec),
        _ => {}
    }
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    for (i, c) in children.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        // Children of the same kind are parenthesized to keep the grouping.
        write_expr(out, c, prec + 1)?;
    }
    if parens {
        out.push(')');
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use PreferenceExpr as E;

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse("x=2 . y=3").unwrap(),
            E::and([E::atom("x", 2.0), E::atom("y", 3.0)])
        );
        assert_eq!(
            parse("~(x=2 | y=3)").unwrap(),
            E::not(E::or([E::atom("x", 2.0), E::atom("y", 3.0)]))
        );
        assert_eq!(
            parse("x=2 . y=3 | z=1").unwrap(),
            E::or([
                E::and([E::atom("x", 2.0), E::atom("y", 3.0)]),
                E::atom("z", 1.0)
            ])
        );
    }

    #[test]
    fn complement_binds_tightest() {
        assert_eq!(
            parse("~x=2 . y=3").unwrap(),
            E::and([E::not(E::atom("x", 2.0)), E::atom("y", 3.0)])
        );
        assert_eq!(parse("~~x=2").unwrap(), E::not(E::not(E::atom("x", 2.0))));
    }

    #[test]
    fn numbers_and_dots() {
        assert_eq!(
            parse("x=2.y=3").unwrap(),
            E::and([E::atom("x", 2.0), E::atom("y", 3.0)])
        );
        assert_eq!(parse("x=2.5").unwrap(), E::atom("x", 2.5));
        assert_eq!(parse("x = -1.5e2").unwrap(), E::atom("x", -150.0));
        assert_eq!(parse("  x_1=0.25  ").unwrap(), E::atom("x_1", 0.25));
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(
            parse("x=2 · y=3 ∨ z=1").unwrap(),
            parse("x=2 . y=3 | z=1").unwrap()
        );
    }

    #[test]
    fn constants() {
        assert_eq!(parse("TOP").unwrap(), E::Top);
        assert_eq!(
            parse("BOT | x=1").unwrap(),
            E::or([E::Bottom, E::atom("x", 1.0)])
        );
        assert_eq!(parse("TOP=1").unwrap(), E::atom("TOP", 1.0));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("x=2 . (y=3").unwrap_err();
        assert_eq!(e.message, "expected `)`");
        assert_eq!(e.offset, 10);
        assert_eq!(e.token, "<end of input>");

        let e = parse("x=2=3").unwrap_err();
        assert_eq!(e.message, "duplicate `=` in atom");
        assert_eq!((e.line, e.column), (1, 4));

        let e = parse("x=2 |\n  y").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        assert_eq!(e.token, "<end of input>");

        let e = parse("x=").unwrap_err();
        assert_eq!(e.message, "expected a number");
        assert!(parse("").is_err());
        assert!(parse("x=1 y=2").is_err());
        assert!(parse("x=1 . ").is_err());
        let e = parse("x=1 & y=2").unwrap_err();
        assert_eq!(e.token, "&");
    }

    #[test]
    fn formatting() {
        assert_eq!(
            format(&E::and([E::atom("x", 2.0), E::atom("y", 3.0)])),
            "x=2 . y=3"
        );
        assert_eq!(format(&E::not(E::atom("x", 2.0))), "~x=2");
        let e = E::or([
            E::and([E::atom("x", 2.0), E::atom("y", 3.0)]),
            E::atom("z", 1.0),
        ]);
        assert_eq!(format(&e), "x=2 . y=3 | z=1");
        let e = E::and([
            E::or([E::atom("x", 2.0), E::atom("y", 3.0)]),
            E::atom("z", 1.0),
        ]);
        assert_eq!(format(&e), "(x=2 | y=3) . z=1");
        assert_eq!(
            format(&E::not(E::or([E::atom("x", 0.5), E::Top]))),
            "~(x=0.5 | TOP)"
        );
        assert_eq!(format(&E::and([])), "TOP");
        assert_eq!(format(&E::or([])), "BOT");
    }

    #[test]
    fn nested_same_kind_keeps_grouping() {
        let e = E::and([
            E::atom("x", 1.0),
            E::and([E::atom("y", 2.0), E::atom("z", 3.0)]),
        ]);
        assert_eq!(format(&e), "x=1 . (y=2 . z=3)");
        assert_eq!(parse(&format(&e)).unwrap(), e);
    }
}
