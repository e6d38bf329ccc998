//! Recursive-descent parser for the concrete formula syntax.
//!
//! Binding strength, tightest first: `! X F G`, `&`, `|`, `->`, `U`.
//! `U` is right-associative; `&`, `|` and `->` associate to the left.

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnbalancedParen,
    DanglingOperator(&'static str),
    UnexpectedToken(String),
    Empty,
}

/// A parse failure. `column` is 1-based and counts characters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {}", describe(.kind))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub column: usize,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::UnexpectedChar(c) => format!("unexpected character `{c}`"),
        ParseErrorKind::UnbalancedParen => "unbalanced parentheses".to_string(),
        ParseErrorKind::DanglingOperator(op) => format!("dangling operator `{op}`"),
        ParseErrorKind::UnexpectedToken(t) => format!("unexpected {t}"),
        ParseErrorKind::Empty => "empty formula".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Arrow,
    Next,
    Until,
    Finally,
    Globally,
}

impl Tok {
    fn symbol(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "identifier",
            Tok::True => "true",
            Tok::False => "false",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Not => "!",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Arrow => "->",
            Tok::Next => "X",
            Tok::Until => "U",
            Tok::Finally => "F",
            Tok::Globally => "G",
        }
    }

    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            other => format!("`{}`", other.symbol()),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let single = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            'X' => Some(Tok::Next),
            'U' => Some(Tok::Until),
            'F' => Some(Tok::Finally),
            'G' => Some(Tok::Globally),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, column));
            i += 1;
        } else if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push((Tok::Arrow, column));
                i += 2;
            } else {
                return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(c), column });
            }
        } else if c.is_ascii_lowercase() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word),
            };
            out.push((tok, column));
        } else {
            return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(c), column });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_column)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let left = self.implies()?;
        if self.eat(&Tok::Until) {
            let right = self.operand_after("U", Self::until)?;
            return Ok(Formula::until(left, right));
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.or()?;
        while self.eat(&Tok::Arrow) {
            let rhs = self.operand_after("->", Self::or)?;
            acc = Formula::implies(acc, rhs);
        }
        Ok(acc)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.operand_after("|", Self::and)?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.operand_after("&", Self::unary)?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    /// Parses the operand of an operator that was just consumed, turning a
    /// missing operand into a dangling-operator error.
    fn operand_after(
        &mut self,
        op: &'static str,
        next: fn(&mut Self) -> Result<Formula, ParseError>,
    ) -> Result<Formula, ParseError> {
        match self.peek() {
            None | Some(Tok::RParen) => Err(ParseError {
                kind: ParseErrorKind::DanglingOperator(op),
                column: self.toks[self.pos - 1].1,
            }),
            Some(Tok::And | Tok::Or | Tok::Arrow | Tok::Until) => {
                Err(ParseError { kind: ParseErrorKind::DanglingOperator(op), column: self.toks[self.pos - 1].1 })
            }
            _ => next(self),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let build: fn(Formula) -> Formula = match self.peek() {
            Some(Tok::Not) => Formula::not,
            Some(Tok::Next) => Formula::next,
            Some(Tok::Finally) => Formula::finally,
            Some(Tok::Globally) => Formula::globally,
            _ => return self.primary(),
        };
        let (tok, _) = self.bump().expect("peeked");
        let inner = self.operand_after(tok.symbol(), Self::unary)?;
        Ok(build(inner))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let column = self.column();
        match self.bump() {
            Some((Tok::Ident(name), _)) => Ok(Formula::Atom(name)),
            Some((Tok::True, _)) => Ok(Formula::True),
            Some((Tok::False, _)) => Ok(Formula::False),
            Some((Tok::LParen, open)) => {
                if self.peek() == Some(&Tok::RParen) {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnexpectedToken("`)`".to_string()),
                        column: self.column(),
                    });
                }
                let inner = self.until()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    None => Err(ParseError { kind: ParseErrorKind::UnbalancedParen, column: open }),
                    Some(t) => Err(ParseError {
                        kind: ParseErrorKind::UnexpectedToken(t.describe()),
                        column: self.column(),
                    }),
                }
            }
            Some((Tok::RParen, _)) => Err(ParseError { kind: ParseErrorKind::UnbalancedParen, column }),
            Some((t, _)) => Err(ParseError { kind: ParseErrorKind::UnexpectedToken(t.describe()), column }),
            None => Err(ParseError { kind: ParseErrorKind::Empty, column }),
        }
    }
}

/// Parses one formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let end_column = text.chars().count() + 1;
    if toks.is_empty() {
        return Err(ParseError { kind: ParseErrorKind::Empty, column: 1 });
    }
    let mut p = Parser { toks, pos: 0, end_column };
    let f = p.until()?;
    match p.peek() {
        None => Ok(f),
        Some(Tok::RParen) => Err(ParseError { kind: ParseErrorKind::UnbalancedParen, column: p.column() }),
        Some(t) => {
            let kind = ParseErrorKind::UnexpectedToken(t.describe());
            Err(ParseError { kind, column: p.column() })
        }
    }
}
