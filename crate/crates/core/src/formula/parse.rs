//! Lexer and recursive-descent parser for the formula text syntax.

use std::collections::BTreeSet;
use std::fmt;

use super::{Agent, Formula};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Top,
    Bottom,
    Not,
    And,
    Or,
    Implies,
    Iff,
    BoxOp,
    Diamond,
    LBracket,
    RBracket,
    LParen,
    RParen,
    /// `K:`, `B:`, `O:`, `Os:` or `Ob:`
    Modal(Modal),
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Modal {
    K,
    B,
    O,
    Os,
    Ob,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Top => "`#t`".into(),
            Tok::Bottom => "`#f`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::BoxOp => "`[]`".into(),
            Tok::Diamond => "`<>`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Modal(m) => format!("`{}:`", modal_text(*m)),
            Tok::End => "end of input".into(),
        }
    }
}

fn modal_text(m: Modal) -> &'static str {
    match m {
        Modal::K => "K",
        Modal::B => "B",
        Modal::O => "O",
        Modal::Os => "Os",
        Modal::Ob => "Ob",
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    /// Whitespace separates this token from the previous one.
    spaced: bool,
}

/// A syntax error with a 1-based position and the tokens that would have
/// been accepted there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub expected: BTreeSet<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let expected: Vec<&str> = self.expected.iter().map(String::as_str).collect();
        write!(
            f,
            "syntax error at line {}, column {}: found {}, expected {}",
            self.line,
            self.column,
            self.found,
            expected.join(" or ")
        )
    }
}

impl std::error::Error for ParseError {}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut spaced = false;
    let error = |line, column, found: String, expected: &[&str]| ParseError {
        line,
        column,
        found,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            spaced = true;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            spaced = true;
            continue;
        }
        let at = |k: usize| chars.get(i + k).copied();
        let (tok, len) = match c {
            '!' => (Tok::Not, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ']' => (Tok::RBracket, 1),
            '[' => {
                // `[]` (inner whitespace allowed) is necessity
                let mut k = 1;
                while at(k).is_some_and(|c| c == ' ' || c == '\t') {
                    k += 1;
                }
                if at(k) == Some(']') {
                    (Tok::BoxOp, k + 1)
                } else {
                    (Tok::LBracket, 1)
                }
            }
            '-' if at(1) == Some('>') => (Tok::Implies, 2),
            '<' if at(1) == Some('>') => (Tok::Diamond, 2),
            '<' if at(1) == Some('-') && at(2) == Some('>') => (Tok::Iff, 3),
            '#' if at(1) == Some('t') => (Tok::Top, 2),
            '#' if at(1) == Some('f') => (Tok::Bottom, 2),
            c if is_ident_start(c) => {
                let mut k = 1;
                while at(k).is_some_and(is_ident_char) {
                    k += 1;
                }
                let word: String = chars[i..i + k].iter().collect();
                let modal = match word.as_str() {
                    "K" => Some(Modal::K),
                    "B" => Some(Modal::B),
                    "O" => Some(Modal::O),
                    "Os" => Some(Modal::Os),
                    "Ob" => Some(Modal::Ob),
                    _ => None,
                };
                match modal {
                    Some(m) if at(k) == Some(':') => (Tok::Modal(m), k + 1),
                    _ => (Tok::Ident(word), k),
                }
            }
            other => {
                return Err(error(
                    line,
                    col,
                    format!("`{other}`"),
                    &["formula", "connective"],
                ))
            }
        };
        out.push(Token {
            tok,
            line,
            column: col,
            spaced,
        });
        spaced = false;
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
        spaced,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

const FORMULA_START: &[&str] = &[
    "atom", "metavariable", "`#t`", "`#f`", "`!`", "`(`", "`[]`", "`<>`", "`[`", "`K:`", "`B:`",
    "`O:`", "`Os:`", "`Ob:`",
];

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError {
            line: t.line,
            column: t.column,
            found: t.tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&tok.describe()])
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.implies()?;
        while self.peek().tok == Tok::Iff {
            self.bump();
            let right = self.implies()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if self.peek().tok == Tok::Implies {
            self.bump();
            let right = self.implies()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.and()?;
        while self.peek().tok == Tok::Or {
            self.bump();
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.peek().tok == Tok::And {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    /// The agent name that must immediately follow a modal prefix.
    fn agent_after_modal(&mut self) -> Result<Agent, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(name) if !t.spaced => {
                self.bump();
                Ok(Agent::from_ident(&name))
            }
            _ => self.fail(&["agent name directly after `:`"]),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::BoxOp => {
                self.bump();
                Ok(Formula::Box(Box::new(self.unary()?)))
            }
            Tok::Diamond => {
                self.bump();
                Ok(Formula::Diamond(Box::new(self.unary()?)))
            }
            Tok::LBracket => {
                self.bump();
                let agent = match self.peek().tok.clone() {
                    Tok::Ident(name) => {
                        self.bump();
                        Agent::from_ident(&name)
                    }
                    _ => return self.fail(&["agent name", "`]`"]),
                };
                self.expect(Tok::RBracket)?;
                Ok(Formula::Stit(agent, Box::new(self.unary()?)))
            }
            Tok::Modal(m) => {
                self.bump();
                let agent = self.agent_after_modal()?;
                let condition = if m == Modal::B && self.peek().tok == Tok::LBracket && !self.peek().spaced {
                    self.bump();
                    let c = self.iff()?;
                    self.expect(Tok::RBracket)?;
                    Some(Box::new(c))
                } else {
                    None
                };
                let body = Box::new(self.unary()?);
                Ok(match m {
                    Modal::K => Formula::Knows(agent, body),
                    Modal::B => Formula::Believes(agent, condition, body),
                    Modal::O => Formula::OughtObj(agent, body),
                    Modal::Os => Formula::OughtSubj(agent, body),
                    Modal::Ob => Formula::OughtDox(agent, body),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok.clone() {
            Tok::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Bottom => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Ident(name) => {
                self.bump();
                if name.starts_with(|c: char| c.is_ascii_uppercase()) {
                    Ok(Formula::Var(name))
                } else {
                    Ok(Formula::Atom(name))
                }
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.fail(FORMULA_START),
        }
    }
}

/// Parses a formula. Precedence, tightest first: unary operators, `&`,
/// `|`, `->` (right-associative), `<->` (left-associative).
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let f = parser.iff()?;
    if parser.peek().tok != Tok::End {
        return parser.fail(&["`&`", "`|`", "`->`", "`<->`", "end of input"]);
    }
    Ok(f)
}
