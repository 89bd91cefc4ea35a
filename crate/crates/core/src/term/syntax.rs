//! Text syntax for terms and commands.
//!
//! ```text
//! command ::= '<' term '|' term '>'
//! term    ::= 'mu' binder '.' command
//!           | '(' term ',' term ')'          pair (non-values expand to the pair macro)
//!           | '(' term ')' | '{' term '}' | '!' term
//!           | 'daimon+' | 'daimon-' | 'nat:' N | '@+' name | '@-' name
//!           | var
//! binder  ::= var | '(' var ',' var ')' | '{' var '}' | '!' '(' var ')'
//! var     ::= ('+' | '-') name | name       a bare name must be bound in scope
//! ```

use std::fmt;

use thiserror::Error;

use super::{make_box, make_pair, Command, Polarity, Term, TermError, Variable};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
        let (line, col) = line_col(src, offset);
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

pub(crate) fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LAngle,
    RAngle,
    Bar,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Bang,
    Mu,
    Daimon(Polarity),
    Nat(u64),
    Instr(Polarity, String),
    Var(Option<Polarity>, String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LAngle => write!(f, "'<'"),
            Tok::RAngle => write!(f, "'>'"),
            Tok::Bar => write!(f, "'|'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::Comma => write!(f, "','"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Bang => write!(f, "'!'"),
            Tok::Mu => write!(f, "'mu'"),
            Tok::Daimon(p) => write!(f, "daimon{p}"),
            Tok::Nat(n) => write!(f, "nat:{n}"),
            Tok::Instr(p, n) => write!(f, "@{p}{n}"),
            Tok::Var(Some(p), n) => write!(f, "{p}{n}"),
            Tok::Var(None, n) => write!(f, "{n}"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_at = |mut j: usize| -> (usize, String) {
        let mut s = String::new();
        while j < chars.len() && is_ident(chars[j].1) {
            s.push(chars[j].1);
            j += 1;
        }
        (j, s)
    };
    while i < chars.len() {
        let (off, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let simple = match c {
            '<' => Some(Tok::LAngle),
            '>' => Some(Tok::RAngle),
            '|' => Some(Tok::Bar),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '!' => Some(Tok::Bang),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((off, t));
            i += 1;
            continue;
        }
        if c == '+' || c == '-' {
            let pol = if c == '+' { Polarity::Positive } else { Polarity::Negative };
            if i + 1 < chars.len() && is_ident_start(chars[i + 1].1) {
                let (j, name) = ident_at(i + 1);
                out.push((off, Tok::Var(Some(pol), name)));
                i = j;
                continue;
            }
            return Err(ParseError::at(src, off, format!("expected a name after '{c}'")));
        }
        if c == '@' {
            let pol = match chars.get(i + 1).map(|p| p.1) {
                Some('+') => Polarity::Positive,
                Some('-') => Polarity::Negative,
                _ => return Err(ParseError::at(src, off, "instruction needs '@+' or '@-'")),
            };
            let (j, name) = ident_at(i + 2);
            if name.is_empty() {
                return Err(ParseError::at(src, off, "instruction name expected"));
            }
            out.push((off, Tok::Instr(pol, name)));
            i = j;
            continue;
        }
        if is_ident_start(c) {
            let (j, name) = ident_at(i);
            match name.as_str() {
                "mu" => {
                    out.push((off, Tok::Mu));
                    i = j;
                }
                "daimon" => {
                    let pol = match chars.get(j).map(|p| p.1) {
                        Some('+') => Polarity::Positive,
                        Some('-') => Polarity::Negative,
                        _ => return Err(ParseError::at(src, off, "expected 'daimon+' or 'daimon-'")),
                    };
                    out.push((off, Tok::Daimon(pol)));
                    i = j + 1;
                }
                "nat" if chars.get(j).map(|p| p.1) == Some(':') => {
                    let mut k = j + 1;
                    let mut digits = String::new();
                    while k < chars.len() && chars[k].1.is_ascii_digit() {
                        digits.push(chars[k].1);
                        k += 1;
                    }
                    let n = digits
                        .parse::<u64>()
                        .map_err(|_| ParseError::at(src, off, "expected digits after 'nat:'"))?;
                    out.push((off, Tok::Nat(n)));
                    i = k;
                }
                _ => {
                    out.push((off, Tok::Var(None, name)));
                    i = j;
                }
            }
            continue;
        }
        return Err(ParseError::at(src, off, format!("unexpected character '{c}'")));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    scope: Vec<Variable>,
}

/// Result of [`parse_term_or_command`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Term(Term),
    Command(Command),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            src,
            toks: lex(src)?,
            pos: 0,
            scope: Vec::new(),
        })
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |t| t.0)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::at(self.src, self.offset(), msg)
    }

    fn term_err(&self, offset: usize, e: TermError) -> ParseError {
        ParseError::at(self.src, offset, e.to_string())
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {tok}, found {t}"))),
            None => Err(self.err(format!("expected {tok}, found end of input"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected {t} after end of input"))),
        }
    }

    fn binder_var(&mut self) -> Result<Variable, ParseError> {
        match self.next() {
            Some(Tok::Var(Some(p), name)) => Ok(Variable::new(name, p)),
            Some(Tok::Var(None, name)) => {
                self.pos -= 1;
                Err(self.err(format!("binder '{name}' needs a '+' or '-' sigil")))
            }
            _ => {
                self.pos -= 1;
                Err(self.err("expected a variable"))
            }
        }
    }

    fn command(&mut self) -> Result<Command, ParseError> {
        let start = self.offset();
        self.expect(Tok::LAngle)?;
        let t = self.term()?;
        self.expect(Tok::Bar)?;
        let u = self.term()?;
        self.expect(Tok::RAngle)?;
        Command::new(t, u).map_err(|e| self.term_err(start, e))
    }

    fn scoped<T>(
        &mut self,
        vars: &[Variable],
        f: impl FnOnce(&mut Self) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        self.scope.extend(vars.iter().cloned());
        let r = f(self);
        self.scope.truncate(self.scope.len() - vars.len());
        r
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.offset();
        match self.next() {
            Some(Tok::Mu) => match self.peek() {
                Some(Tok::LParen) => {
                    self.pos += 1;
                    let a = self.binder_var()?;
                    self.expect(Tok::Comma)?;
                    let b = self.binder_var()?;
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::Dot)?;
                    let c = self.scoped(&[a.clone(), b.clone()], |p| p.command())?;
                    Term::mu_pair(a, b, c).map_err(|e| self.term_err(start, e))
                }
                Some(Tok::LBrace) => {
                    self.pos += 1;
                    let k = self.binder_var()?;
                    self.expect(Tok::RBrace)?;
                    self.expect(Tok::Dot)?;
                    let c = self.scoped(std::slice::from_ref(&k), |p| p.command())?;
                    Ok(Term::mu_box(k, c))
                }
                Some(Tok::Bang) => {
                    self.pos += 1;
                    self.expect(Tok::LParen)?;
                    let k = self.binder_var()?;
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::Dot)?;
                    let c = self.scoped(std::slice::from_ref(&k), |p| p.command())?;
                    Ok(Term::mu_bang(k, c))
                }
                _ => {
                    let k = self.binder_var()?;
                    self.expect(Tok::Dot)?;
                    let c = self.scoped(std::slice::from_ref(&k), |p| p.command())?;
                    Ok(Term::mu(k, c))
                }
            },
            Some(Tok::LParen) => {
                let a = self.term()?;
                match self.next() {
                    Some(Tok::Comma) => {
                        let b = self.term()?;
                        self.expect(Tok::RParen)?;
                        Ok(make_pair(a, b))
                    }
                    Some(Tok::RParen) => Ok(a),
                    _ => {
                        self.pos -= 1;
                        Err(self.err("expected ',' or ')'"))
                    }
                }
            }
            Some(Tok::LBrace) => {
                let v = self.term()?;
                self.expect(Tok::RBrace)?;
                Ok(make_box(v))
            }
            Some(Tok::Bang) => {
                let v = self.term()?;
                Term::bang(v).map_err(|e| self.term_err(start, e))
            }
            Some(Tok::Daimon(p)) => Ok(Term::Daimon(p)),
            Some(Tok::Nat(n)) => Ok(Term::Nat(n)),
            Some(Tok::Instr(Polarity::Positive, n)) => Ok(Term::PosInstr(n)),
            Some(Tok::Instr(Polarity::Negative, n)) => Ok(Term::NegInstr(n)),
            Some(Tok::Var(Some(p), name)) => Ok(Term::Var(Variable::new(name, p))),
            Some(Tok::Var(None, name)) => match self.scope.iter().rev().find(|v| v.name == name) {
                Some(v) => Ok(Term::Var(v.clone())),
                None => Err(ParseError::at(
                    self.src,
                    start,
                    format!("free variable '{name}' needs a '+' or '-' sigil"),
                )),
            },
            Some(t) => {
                self.pos -= 1;
                Err(self.err(format!("unexpected {t}")))
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_command(src: &str) -> Result<Command, ParseError> {
    let mut p = Parser::new(src)?;
    let c = p.command()?;
    p.finish()?;
    Ok(c)
}

pub fn parse_term_or_command(src: &str) -> Result<Parsed, ParseError> {
    let mut p = Parser::new(src)?;
    let r = if p.peek() == Some(&Tok::LAngle) {
        Parsed::Command(p.command()?)
    } else {
        Parsed::Term(p.term()?)
    };
    p.finish()?;
    Ok(r)
}
