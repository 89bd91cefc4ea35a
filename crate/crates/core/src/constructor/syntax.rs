//! Text syntax for kinds and constructors.
//!
//! ```text
//! kind  ::= katom ('->' kind)?            katom ::= 'i' | 'o+' | 'o-' | '(' kind ')'
//! ctor  ::= '\' x ':' kind '.' ctor | 'forall' x ':' kind '.' ctor
//!         | 'exists' x ':' kind '.' ctor | '[' ctor '=' ctor ']' ctor | par
//! par   ::= tens ('|' par)?               tens  ::= unary ('*' tens)?
//! unary ::= ('dn' | 'up' | '!' | '?') unary | app
//! app   ::= atom atom*
//! atom  ::= x | '~' x | '0' | 's' | digits | 'rec[' kind ']' | '~rec[' kind ']' | '(' ctor ')'
//! ```
//!
//! Free variables take their kind from the environment; bound ones from their
//! binder.

use std::collections::BTreeMap;
use std::fmt;

use super::{Constructor as C, Kind};
use crate::term::ParseError;

pub type KindEnv = BTreeMap<String, Kind>;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Backslash,
    Colon,
    Dot,
    Arrow,
    Plus,
    Minus,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Eq,
    Star,
    Bar,
    Bang,
    Quest,
    Tilde,
    Num(u64),
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Backslash => write!(f, "'\\'"),
            Tok::Colon => write!(f, "':'"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrack => write!(f, "'['"),
            Tok::RBrack => write!(f, "']'"),
            Tok::Eq => write!(f, "'='"),
            Tok::Star => write!(f, "'*'"),
            Tok::Bar => write!(f, "'|'"),
            Tok::Bang => write!(f, "'!'"),
            Tok::Quest => write!(f, "'?'"),
            Tok::Tilde => write!(f, "'~'"),
            Tok::Num(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
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
        let tok = match c {
            '\\' => Some(Tok::Backslash),
            ':' => Some(Tok::Colon),
            '.' => Some(Tok::Dot),
            '+' => Some(Tok::Plus),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '=' => Some(Tok::Eq),
            '*' => Some(Tok::Star),
            '|' => Some(Tok::Bar),
            '!' => Some(Tok::Bang),
            '?' => Some(Tok::Quest),
            '~' => Some(Tok::Tilde),
            _ => None,
        };
        if let Some(t) = tok {
            out.push((off, t));
            i += 1;
            continue;
        }
        if c == '-' {
            if chars.get(i + 1).map(|p| p.1) == Some('>') {
                out.push((off, Tok::Arrow));
                i += 2;
            } else {
                out.push((off, Tok::Minus));
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                s.push(chars[i].1);
                i += 1;
            }
            let n = s
                .parse::<u64>()
                .map_err(|_| ParseError::at(src, off, "numeral too large"))?;
            out.push((off, Tok::Num(n)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || "_'".contains(chars[i].1)) {
                s.push(chars[i].1);
                i += 1;
            }
            out.push((off, Tok::Ident(s)));
            continue;
        }
        return Err(ParseError::at(src, off, format!("unexpected character '{c}'")));
    }
    Ok(out)
}

pub(crate) const KEYWORDS: &[&str] = &["forall", "exists", "dn", "up", "rec", "s"];

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    env: &'a KindEnv,
    scope: Vec<(String, Kind)>,
}

impl<'a> Parser<'a> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |t| t.0)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::at(self.src, self.offset(), msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(s)) => Some(s.as_str()),
            _ => None,
        }
    }

    fn bump(&mut self) -> Option<Tok> {
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
            Some(t) => Err(self.err(format!("unexpected {t}"))),
        }
    }

    fn kind(&mut self) -> Result<Kind, ParseError> {
        let a = self.kind_atom()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let b = self.kind()?;
            return Ok(Kind::arrow(a, b));
        }
        Ok(a)
    }

    fn kind_atom(&mut self) -> Result<Kind, ParseError> {
        match self.bump() {
            Some(Tok::LParen) => {
                let k = self.kind()?;
                self.expect(Tok::RParen)?;
                Ok(k)
            }
            Some(Tok::Ident(s)) if s == "i" => Ok(Kind::Iota),
            Some(Tok::Ident(s)) if s == "o" => match self.bump() {
                Some(Tok::Plus) => Ok(Kind::OPos),
                Some(Tok::Minus) => Ok(Kind::ONeg),
                _ => {
                    self.pos -= 1;
                    Err(self.err("expected 'o+' or 'o-'"))
                }
            },
            _ => {
                self.pos -= 1;
                Err(self.err("expected a kind ('i', 'o+', 'o-' or an arrow)"))
            }
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.bump() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.err("expected a variable name"))
            }
        }
    }

    fn binder(&mut self) -> Result<(String, Kind), ParseError> {
        let x = self.name()?;
        self.expect(Tok::Colon)?;
        let k = self.kind()?;
        self.expect(Tok::Dot)?;
        Ok((x, k))
    }

    fn ctor(&mut self) -> Result<C, ParseError> {
        if self.peek() == Some(&Tok::Backslash) {
            self.pos += 1;
            let (x, k) = self.binder()?;
            let body = self.scoped(&x, &k)?;
            return Ok(C::lam(x, k, body));
        }
        if let Some(q) = self.peek_ident().filter(|s| *s == "forall" || *s == "exists") {
            let forall = q == "forall";
            self.pos += 1;
            let (x, k) = self.binder()?;
            let body = self.scoped(&x, &k)?;
            return Ok(if forall { C::forall(x, k, body) } else { C::exists(x, k, body) });
        }
        if self.peek() == Some(&Tok::LBrack) {
            self.pos += 1;
            let t = self.ctor()?;
            self.expect(Tok::Eq)?;
            let u = self.ctor()?;
            self.expect(Tok::RBrack)?;
            let a = self.ctor()?;
            return Ok(C::eq_guard(t, u, a));
        }
        self.par()
    }

    fn scoped(&mut self, x: &str, k: &Kind) -> Result<C, ParseError> {
        self.scope.push((x.to_string(), k.clone()));
        let r = self.ctor();
        self.scope.pop();
        r
    }

    fn par(&mut self) -> Result<C, ParseError> {
        let a = self.tens()?;
        if self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            let b = self.par_rhs()?;
            return Ok(C::parr(a, b));
        }
        Ok(a)
    }

    /// Right operands may be binders (which extend as far as possible).
    fn par_rhs(&mut self) -> Result<C, ParseError> {
        if self.starts_binder() {
            self.ctor()
        } else {
            self.par()
        }
    }

    fn starts_binder(&self) -> bool {
        matches!(self.peek(), Some(Tok::Backslash) | Some(Tok::LBrack))
            || matches!(self.peek_ident(), Some("forall") | Some("exists"))
    }

    fn tens(&mut self) -> Result<C, ParseError> {
        let a = self.unary()?;
        if self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let b = if self.starts_binder() { self.ctor()? } else { self.tens()? };
            return Ok(C::tensor(a, b));
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<C, ParseError> {
        let wrap: Option<fn(C) -> C> = match self.peek() {
            Some(Tok::Bang) => Some(C::bang),
            Some(Tok::Quest) => Some(C::quest),
            Some(Tok::Ident(s)) if s == "dn" => Some(C::down),
            Some(Tok::Ident(s)) if s == "up" => Some(C::up),
            _ => None,
        };
        if let Some(f) = wrap {
            self.pos += 1;
            let a = if self.starts_binder() { self.ctor()? } else { self.unary()? };
            return Ok(f(a));
        }
        self.app()
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Tilde) | Some(Tok::Num(_)) | Some(Tok::LParen) => true,
            Some(Tok::Ident(s)) => !matches!(s.as_str(), "forall" | "exists" | "dn" | "up"),
            _ => false,
        }
    }

    fn app(&mut self) -> Result<C, ParseError> {
        let mut f = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            f = C::app(f, a);
        }
        Ok(f)
    }

    fn lookup(&self, x: &str, at: usize) -> Result<Kind, ParseError> {
        self.scope
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, k)| k.clone())
            .or_else(|| self.env.get(x).cloned())
            .ok_or_else(|| ParseError::at(self.src, at, format!("unknown constructor variable '{x}'")))
    }

    fn rec_kind(&mut self) -> Result<Kind, ParseError> {
        self.expect(Tok::LBrack)?;
        let k = self.kind()?;
        self.expect(Tok::RBrack)?;
        Ok(k)
    }

    fn atom(&mut self) -> Result<C, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::LParen) => {
                let t = self.ctor()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Num(n)) => Ok(C::numeral(n)),
            Some(Tok::Tilde) => match self.bump() {
                Some(Tok::Ident(s)) if s == "rec" => Ok(C::RecNeg(self.rec_kind()?)),
                Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                    let k = self.lookup(&s, at)?;
                    Ok(C::VarNeg(s, k))
                }
                _ => {
                    self.pos -= 1;
                    Err(self.err("expected a variable or 'rec' after '~'"))
                }
            },
            Some(Tok::Ident(s)) if s == "s" => Ok(C::Succ),
            Some(Tok::Ident(s)) if s == "rec" => Ok(C::Rec(self.rec_kind()?)),
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let k = self.lookup(&s, at)?;
                Ok(C::Var(s, k))
            }
            Some(t) => {
                self.pos -= 1;
                Err(self.err(format!("unexpected {t}")))
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}

pub fn parse_kind(src: &str) -> Result<Kind, ParseError> {
    let env = KindEnv::new();
    let mut p = Parser {
        src,
        toks: lex(src)?,
        pos: 0,
        env: &env,
        scope: Vec::new(),
    };
    let k = p.kind()?;
    p.finish()?;
    Ok(k)
}

pub fn parse_constructor(src: &str, env: &KindEnv) -> Result<C, ParseError> {
    let mut p = Parser {
        src,
        toks: lex(src)?,
        pos: 0,
        env,
        scope: Vec::new(),
    };
    let t = p.ctor()?;
    p.finish()?;
    Ok(t)
}

// Printing. Levels: 0 binders, 1 par, 2 tensor, 3 unary, 4 application, 5 atoms.

fn level(t: &C) -> u8 {
    match t {
        C::Lam(..) | C::Exists(..) | C::Forall(..) | C::EqGuard(..) => 0,
        C::Parr(..) => 1,
        C::Tensor(..) => 2,
        C::Down(_) | C::Up(_) | C::Bang(_) | C::Quest(_) => 3,
        C::App(..) if t.as_numeral().is_none() => 4,
        _ => 5,
    }
}

/// Whether the printed form ends in a binder body that would swallow anything
/// written after it.
fn ends_open(t: &C) -> bool {
    if t.as_numeral().is_some() {
        return false;
    }
    match t {
        C::Lam(..) | C::Exists(..) | C::Forall(..) | C::EqGuard(..) => true,
        C::Parr(_, b) | C::Tensor(_, b) => ends_open(b),
        C::Down(a) | C::Up(a) | C::Bang(a) | C::Quest(a) => ends_open(a),
        _ => false,
    }
}

/// Writes `t` in a position requiring level `min`. A binder is accepted in a
/// right-most position (`min_open`) as long as nothing follows.
fn write_at(f: &mut fmt::Formatter<'_>, t: &C, min: u8, followed: bool) -> fmt::Result {
    let lvl = level(t);
    let ok = (lvl >= min || (lvl == 0 && min <= 3 && !followed)) && !(followed && ends_open(t));
    if ok {
        write_ctor(f, t, followed)
    } else {
        write!(f, "(")?;
        write_ctor(f, t, false)?;
        write!(f, ")")
    }
}

fn write_ctor(f: &mut fmt::Formatter<'_>, t: &C, followed: bool) -> fmt::Result {
    if let Some(n) = t.as_numeral() {
        return write!(f, "{n}");
    }
    match t {
        C::Var(x, _) => write!(f, "{x}"),
        C::VarNeg(x, _) => write!(f, "~{x}"),
        C::Lam(x, k, b) => write!(f, "\\{x}:{k}. {b}"),
        C::Forall(x, k, b) => write!(f, "forall {x}:{k}. {b}"),
        C::Exists(x, k, b) => write!(f, "exists {x}:{k}. {b}"),
        C::EqGuard(l, r, a) => write!(f, "[{l} = {r}] {a}"),
        C::Parr(a, b) => {
            write_at(f, a, 2, true)?;
            write!(f, " | ")?;
            write_at(f, b, 1, followed)
        }
        C::Tensor(a, b) => {
            write_at(f, a, 3, true)?;
            write!(f, " * ")?;
            write_at(f, b, 2, followed)
        }
        C::Down(a) | C::Up(a) | C::Bang(a) | C::Quest(a) => {
            let op = match t {
                C::Down(_) => "dn ",
                C::Up(_) => "up ",
                C::Bang(_) => "!",
                _ => "?",
            };
            write!(f, "{op}")?;
            write_at(f, a, 3, followed)
        }
        C::App(g, a) => {
            write_at(f, g, 4, true)?;
            write!(f, " ")?;
            write_at(f, a, 5, followed)
        }
        C::Zero => write!(f, "0"),
        C::Succ => write!(f, "s"),
        C::Rec(k) => write!(f, "rec[{k}]"),
        C::RecNeg(k) => write!(f, "~rec[{k}]"),
    }
}

impl fmt::Display for C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ctor(f, self, false)
    }
}
