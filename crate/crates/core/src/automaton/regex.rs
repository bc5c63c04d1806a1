//! Regular expression syntax.
//!
//! ```text
//! alt  = cat ('|' cat)*
//! cat  = post+
//! post = atom ('*' | '+' | '?')*
//! atom = label | 'eps' | '(' alt ')'
//! ```

use std::fmt;

use crate::error::AutomatonError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regex {
    Epsilon,
    Label(String),
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Optional(Box<Regex>),
}

impl Regex {
    pub fn label(name: &str) -> Regex {
        Regex::Label(name.to_owned())
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Regex::Epsilon | Regex::Label(_) => 1,
            Regex::Concat(v) | Regex::Alt(v) => 1 + v.iter().map(Regex::size).sum::<usize>(),
            Regex::Star(r) | Regex::Plus(r) | Regex::Optional(r) => 1 + r.size(),
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regex::Epsilon => f.write_str("eps"),
            Regex::Label(l) => f.write_str(l),
            Regex::Concat(v) => {
                for (i, r) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    if matches!(r, Regex::Alt(_)) {
                        write!(f, "({r})")?;
                    } else {
                        write!(f, "{r}")?;
                    }
                }
                Ok(())
            }
            Regex::Alt(v) => {
                for (i, r) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{r}")?;
                }
                Ok(())
            }
            Regex::Star(r) => write_postfix(f, r, '*'),
            Regex::Plus(r) => write_postfix(f, r, '+'),
            Regex::Optional(r) => write_postfix(f, r, '?'),
        }
    }
}

fn write_postfix(f: &mut fmt::Formatter<'_>, r: &Regex, op: char) -> fmt::Result {
    match r {
        Regex::Epsilon | Regex::Label(_) => write!(f, "{r}{op}"),
        _ => write!(f, "({r}){op}"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Eps,
    LParen,
    RParen,
    Bar,
    Star,
    Plus,
    Question,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, AutomatonError> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let tok = match c {
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Token::LParen,
            ')' => Token::RParen,
            '|' => Token::Bar,
            '*' => Token::Star,
            '+' => Token::Plus,
            '?' => Token::Question,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                tokens.push((
                    start,
                    if word == "eps" {
                        Token::Eps
                    } else {
                        Token::Ident(word.to_owned())
                    },
                ));
                continue;
            }
            _ => {
                return Err(AutomatonError::RegexSyntax {
                    position: i,
                    reason: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                })
            }
        };
        tokens.push((i, tok));
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, reason: &str) -> Result<T, AutomatonError> {
        Err(AutomatonError::RegexSyntax {
            position: self.offset(),
            reason: reason.to_owned(),
        })
    }

    fn alt(&mut self) -> Result<Regex, AutomatonError> {
        let mut branches = vec![self.cat()?];
        while self.peek() == Some(&Token::Bar) {
            self.pos += 1;
            branches.push(self.cat()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Regex::Alt(branches)
        })
    }

    fn cat(&mut self) -> Result<Regex, AutomatonError> {
        let mut parts = Vec::new();
        while matches!(
            self.peek(),
            Some(Token::Ident(_)) | Some(Token::Eps) | Some(Token::LParen)
        ) {
            parts.push(self.post()?);
        }
        match parts.len() {
            0 => self.error("expected a label, `eps` or `(`"),
            1 => Ok(parts.pop().unwrap()),
            _ => Ok(Regex::Concat(parts)),
        }
    }

    fn post(&mut self) -> Result<Regex, AutomatonError> {
        let mut r = self.atom()?;
        loop {
            r = match self.peek() {
                Some(Token::Star) => Regex::Star(Box::new(r)),
                Some(Token::Plus) => Regex::Plus(Box::new(r)),
                Some(Token::Question) => Regex::Optional(Box::new(r)),
                _ => return Ok(r),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Regex, AutomatonError> {
        match self.peek().cloned() {
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Regex::Label(name))
            }
            Some(Token::Eps) => {
                self.pos += 1;
                Ok(Regex::Epsilon)
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let r = self.alt()?;
                if self.peek() != Some(&Token::RParen) {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(r)
            }
            _ => self.error("expected a label, `eps` or `(`"),
        }
    }
}

pub fn parse_regex(text: &str) -> Result<Regex, AutomatonError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let r = parser.alt()?;
    if parser.pos != parser.tokens.len() {
        return parser.error("unexpected token");
    }
    Ok(r)
}
