//! Concrete syntax shared by ESL and QPTL formulas.
//!
//! Precedence, tightest first: unary `! X F G K[i]`, then `U` (right
//! associative), `&`, `|`, and `->` (right associative). A quantifier
//! `exists x:A.` / `forall x:A.` extends as far right as possible.
//! QPTL drops `K[i]` and writes quantifiers without the agent tag.

use super::{Formula, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at column {}: {message}", position + 1)]
    Syntax { position: usize, message: String },
    #[error("unknown agent `{name}` at column {}", position + 1)]
    UnknownAgent { name: String, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::UnknownAgent { position, .. } => {
                *position
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Dialect {
    Esl,
    Qptl,
}

/// Parse tree before desugaring and name resolution.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Surface {
    True,
    False,
    Ident(String),
    Not(Box<Surface>),
    Next(Box<Surface>),
    Eventually(Box<Surface>),
    Globally(Box<Surface>),
    Know {
        agent: String,
        position: usize,
        body: Box<Surface>,
    },
    And(Box<Surface>, Box<Surface>),
    Or(Box<Surface>, Box<Surface>),
    Implies(Box<Surface>, Box<Surface>),
    Until(Box<Surface>, Box<Surface>),
    Quant {
        universal: bool,
        var: String,
        agent: Option<(String, usize)>,
        body: Box<Surface>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Bang,
    Arrow,
    Bar,
    Amp,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Dot,
    Word(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Bang => "`!`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Word(w) => format!("`{w}`"),
        }
    }
}

const KEYWORDS: &[&str] = &["exists", "forall", "true", "false", "X", "F", "G", "U", "K"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '!' => Tok::Bang,
            '|' => Tok::Bar,
            '&' => Tok::Amp,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '-' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => {
                        chars.next();
                        out.push((Tok::Arrow, pos));
                        continue;
                    }
                    _ => {
                        return Err(ParseError::Syntax {
                            position: pos,
                            message: "expected `->`".into(),
                        })
                    }
                }
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        word.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Word(word), pos));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    position: pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        chars.next();
        out.push((tok, pos));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    dialect: Dialect,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn peek_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(x)) if x == w)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    // Any word is accepted as a name, including keywords.
    fn name(&mut self, wanted: &str) -> Result<(String, usize), ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.at += 1;
                Ok((w, pos))
            }
            _ => self.unexpected(wanted),
        }
    }

    fn formula(&mut self) -> Result<Surface, ParseError> {
        if self.peek_word("exists") || self.peek_word("forall") {
            self.quant()
        } else {
            self.implies()
        }
    }

    fn quant(&mut self) -> Result<Surface, ParseError> {
        let universal = self.peek_word("forall");
        self.at += 1;
        let (var, _) = self.name("a variable name")?;
        let agent = match self.dialect {
            Dialect::Esl => {
                self.expect(Tok::Colon, "`:` and an agent name")?;
                Some(self.name("an agent name")?)
            }
            Dialect::Qptl => None,
        };
        self.expect(Tok::Dot, "`.`")?;
        let body = self.formula()?;
        Ok(Surface::Quant {
            universal,
            var,
            agent,
            body: Box::new(body),
        })
    }

    fn implies(&mut self) -> Result<Surface, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.at += 1;
            let rhs = self.formula()?;
            return Ok(Surface::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Surface, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Bar) {
            self.at += 1;
            let rhs = self.and()?;
            lhs = Surface::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Surface, ParseError> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::Amp) {
            self.at += 1;
            let rhs = self.until()?;
            lhs = Surface::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Surface, ParseError> {
        let lhs = self.unary()?;
        if self.peek_word("U") {
            self.at += 1;
            let rhs = self.until()?;
            return Ok(Surface::Until(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Surface, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Bang) => {
                self.at += 1;
                Ok(Surface::Not(Box::new(self.unary()?)))
            }
            Some(Tok::Word(w)) => match w.as_str() {
                "X" => {
                    self.at += 1;
                    Ok(Surface::Next(Box::new(self.unary()?)))
                }
                "F" => {
                    self.at += 1;
                    Ok(Surface::Eventually(Box::new(self.unary()?)))
                }
                "G" => {
                    self.at += 1;
                    Ok(Surface::Globally(Box::new(self.unary()?)))
                }
                // QPTL has no knowledge operator; `K[` is still parsed so that the
                // lowering can reject it by name.
                "K" if self.dialect == Dialect::Esl
                    || matches!(self.toks.get(self.at + 1), Some((Tok::LBracket, _))) =>
                {
                    self.at += 1;
                    self.expect(Tok::LBracket, "`[` after `K`")?;
                    let (agent, position) = self.name("an agent name")?;
                    self.expect(Tok::RBracket, "`]`")?;
                    Ok(Surface::Know {
                        agent,
                        position,
                        body: Box::new(self.unary()?),
                    })
                }
                "exists" | "forall" => self.quant(),
                _ => self.atom(),
            },
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Surface, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Word(w)) => {
                if w == "true" {
                    self.at += 1;
                    Ok(Surface::True)
                } else if w == "false" {
                    self.at += 1;
                    Ok(Surface::False)
                } else if KEYWORDS.contains(&w.as_str()) {
                    self.error(format!("keyword `{w}` cannot be used as an atom"))
                } else {
                    self.at += 1;
                    Ok(Surface::Ident(w))
                }
            }
            _ => self.unexpected("a formula"),
        }
    }
}

pub(crate) fn parse_surface(text: &str, dialect: Dialect) -> Result<Surface, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        dialect,
    };
    let f = p.formula()?;
    if p.at < p.toks.len() {
        return p.unexpected("end of input");
    }
    Ok(f)
}

/// Parses an ESL formula against an agent roster.
///
/// Derived operators are desugared into the core grammar.
pub fn parse_formula<S: AsRef<str>>(text: &str, roster: &[S]) -> Result<Formula, ParseError> {
    let surface = parse_surface(text, Dialect::Esl)?;
    lower(&surface, roster)
}

fn lower<S: AsRef<str>>(s: &Surface, roster: &[S]) -> Result<Formula, ParseError> {
    let agent = |name: &str, position: usize| {
        roster
            .iter()
            .position(|r| r.as_ref() == name)
            .ok_or_else(|| ParseError::UnknownAgent {
                name: name.to_string(),
                position,
            })
    };
    Ok(match s {
        Surface::True => Formula::truth(),
        Surface::False => Formula::falsity(),
        Surface::Ident(name) => Formula::atom(name.clone()),
        Surface::Not(a) => Formula::not(lower(a, roster)?),
        Surface::Next(a) => Formula::next(lower(a, roster)?),
        Surface::Eventually(a) => Formula::eventually(lower(a, roster)?),
        Surface::Globally(a) => Formula::globally(lower(a, roster)?),
        Surface::Know {
            agent: name,
            position,
            body,
        } => Formula::know(agent(name, *position)?, lower(body, roster)?),
        Surface::And(a, b) => Formula::and(lower(a, roster)?, lower(b, roster)?),
        Surface::Or(a, b) => Formula::or(lower(a, roster)?, lower(b, roster)?),
        Surface::Implies(a, b) => Formula::implies(lower(a, roster)?, lower(b, roster)?),
        Surface::Until(a, b) => Formula::until(lower(a, roster)?, lower(b, roster)?),
        Surface::Quant {
            universal,
            var,
            agent: tag,
            body,
        } => {
            let (name, position) = tag.as_ref().expect("ESL quantifiers carry an agent");
            let var = Var::new(var.clone(), agent(name, *position)?);
            let body = lower(body, roster)?;
            if *universal {
                Formula::forall(var, body)
            } else {
                Formula::exists(var, body)
            }
        }
    })
}
