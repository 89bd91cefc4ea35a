//! The call-by-name and call-by-value translations of the affine λ-calculus
//! into L_foc, with simple types and the derivations the CBN translation
//! induces.
//!
//! CBN: `λα.t ≡ μ(α,x).⟨t|x⟩`, `(t)u ≡ μx.⟨t|u.x⟩`, `u.π ≡ (u,π)`, and
//! `N⊸M ≡ N⊥ ⅋ M`. λ-variables become negative variables.
//!
//! CBV: `λx.t ≡ {μ(x,α).⟨t|α⟩}`, `(t)u ≡ μα.⟨t|u.α⟩`, `u.e ≡ μ{α}.⟨α|(u,e)⟩`,
//! and `P⊸Q ≡ ↓(P⊥ ⅋ Q)`. λ-variables become positive variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::constructor::{Constructor as C, Kind};
use crate::term::{fresh_name, make_pair, Command, Polarity, Term, Variable};
use crate::typing::build;
use crate::typing::{CheckError, Derivation};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LambdaTerm {
    Var(String),
    Abs(String, Box<LambdaTerm>),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
}

/// CBN evaluation contexts: `x` or `u.π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stack {
    Var(String),
    Push(LambdaTerm, Box<Stack>),
}

#[derive(Debug, Error, PartialEq)]
pub enum LambdaError {
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("{0} is used more than once")]
    NotAffine(String),
    #[error("no simple type: {0}")]
    Untypable(String),
    #[error(transparent)]
    Check(#[from] CheckError),
}

impl LambdaTerm {
    pub fn var(x: &str) -> Self {
        LambdaTerm::Var(x.to_string())
    }

    pub fn abs(x: &str, body: LambdaTerm) -> Self {
        LambdaTerm::Abs(x.to_string(), Box::new(body))
    }

    pub fn app(f: LambdaTerm, a: LambdaTerm) -> Self {
        LambdaTerm::App(Box::new(f), Box::new(a))
    }

    pub fn is_value(&self) -> bool {
        !matches!(self, LambdaTerm::App(..))
    }

    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::Abs(_, t) => 1 + t.size(),
            LambdaTerm::App(t, u) => 1 + t.size() + u.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            LambdaTerm::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            LambdaTerm::Abs(x, t) => {
                bound.push(x.clone());
                t.collect_free(bound, out);
                bound.pop();
            }
            LambdaTerm::App(t, u) => {
                t.collect_free(bound, out);
                u.collect_free(bound, out);
            }
        }
    }

    fn names(&self, out: &mut BTreeSet<String>) {
        match self {
            LambdaTerm::Var(x) => {
                out.insert(x.clone());
            }
            LambdaTerm::Abs(x, t) => {
                out.insert(x.clone());
                t.names(out);
            }
            LambdaTerm::App(t, u) => {
                t.names(out);
                u.names(out);
            }
        }
    }

    /// Free occurrences of `x`.
    pub fn occurrences(&self, x: &str) -> usize {
        match self {
            LambdaTerm::Var(y) => usize::from(y == x),
            LambdaTerm::Abs(y, t) if y == x => 0,
            LambdaTerm::Abs(_, t) => t.occurrences(x),
            LambdaTerm::App(t, u) => t.occurrences(x) + u.occurrences(x),
        }
    }

    /// Every bound and free variable occurs at most once.
    pub fn check_affine(&self) -> Result<(), LambdaError> {
        for x in self.free_vars() {
            if self.occurrences(&x) > 1 {
                return Err(LambdaError::NotAffine(x));
            }
        }
        self.check_binders()
    }

    fn check_binders(&self) -> Result<(), LambdaError> {
        match self {
            LambdaTerm::Var(_) => Ok(()),
            LambdaTerm::Abs(x, t) => {
                if t.occurrences(x) > 1 {
                    return Err(LambdaError::NotAffine(x.clone()));
                }
                t.check_binders()
            }
            LambdaTerm::App(t, u) => {
                t.check_binders()?;
                u.check_binders()
            }
        }
    }

    pub fn is_affine(&self) -> bool {
        self.check_affine().is_ok()
    }

    /// Capture-avoiding `self[u/x]`.
    pub fn substitute(&self, x: &str, u: &LambdaTerm) -> LambdaTerm {
        match self {
            LambdaTerm::Var(y) if y == x => u.clone(),
            LambdaTerm::Var(_) => self.clone(),
            LambdaTerm::Abs(y, _) if y == x => self.clone(),
            LambdaTerm::Abs(y, t) => {
                let fv = u.free_vars();
                if fv.contains(y) {
                    let mut avoid = fv;
                    self.names(&mut avoid);
                    let z = fresh_name(y, &avoid);
                    let t = t.substitute(y, &LambdaTerm::Var(z.clone()));
                    LambdaTerm::Abs(z, Box::new(t.substitute(x, u)))
                } else {
                    LambdaTerm::Abs(y.clone(), Box::new(t.substitute(x, u)))
                }
            }
            LambdaTerm::App(t, w) => LambdaTerm::app(t.substitute(x, u), w.substitute(x, u)),
        }
    }

    /// Contracts a root redex `(λx.t)u`.
    pub fn beta_root(&self) -> Option<LambdaTerm> {
        match self {
            LambdaTerm::App(f, u) => match &**f {
                LambdaTerm::Abs(x, t) => Some(t.substitute(x, u)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Renames binders so that no name is bound twice or both bound and free.
    pub fn barendregt(&self) -> LambdaTerm {
        let mut seen = self.free_vars();
        let mut avoid = BTreeSet::new();
        self.names(&mut avoid);
        self.rename_binders(&mut seen, &mut avoid, &BTreeMap::new())
    }

    fn rename_binders(
        &self,
        seen: &mut BTreeSet<String>,
        avoid: &mut BTreeSet<String>,
        map: &BTreeMap<String, String>,
    ) -> LambdaTerm {
        match self {
            LambdaTerm::Var(x) => LambdaTerm::Var(map.get(x).cloned().unwrap_or_else(|| x.clone())),
            LambdaTerm::Abs(x, t) => {
                let y = if seen.contains(x) {
                    let y = fresh_name(x, avoid);
                    avoid.insert(y.clone());
                    y
                } else {
                    x.clone()
                };
                seen.insert(y.clone());
                let mut inner = map.clone();
                inner.insert(x.clone(), y.clone());
                LambdaTerm::Abs(y, Box::new(t.rename_binders(seen, avoid, &inner)))
            }
            LambdaTerm::App(t, u) => {
                let t = t.rename_binders(seen, avoid, map);
                LambdaTerm::app(t, u.rename_binders(seen, avoid, map))
            }
        }
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaTerm::Var(x) => write!(f, "{x}"),
            LambdaTerm::Abs(x, t) => write!(f, "\\{x}. {t}"),
            LambdaTerm::App(t, u) => {
                match &**t {
                    LambdaTerm::Abs(..) => write!(f, "({t})")?,
                    _ => write!(f, "{t}")?,
                }
                match &**u {
                    LambdaTerm::Var(_) => write!(f, " {u}"),
                    _ => write!(f, " ({u})"),
                }
            }
        }
    }
}

impl FromStr for LambdaTerm {
    type Err = LambdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_lambda(s)
    }
}

impl fmt::Display for Stack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stack::Var(x) => write!(f, "{x}"),
            Stack::Push(u, s) => match u {
                LambdaTerm::Var(_) => write!(f, "{u} . {s}"),
                _ => write!(f, "({u}) . {s}"),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing: `\x y. t`, `λx. t`, application by juxtaposition, `#` comments.

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Lam,
    Dot,
    LParen,
    RParen,
    Arrow,
    Ident(String),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, LambdaError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, co) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
        match c {
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            }
            c if c.is_whitespace() => bump(&mut chars),
            '\\' | 'λ' => {
                bump(&mut chars);
                out.push((Tok::Lam, l, co));
            }
            '.' => {
                bump(&mut chars);
                out.push((Tok::Dot, l, co));
            }
            '(' => {
                bump(&mut chars);
                out.push((Tok::LParen, l, co));
            }
            ')' => {
                bump(&mut chars);
                out.push((Tok::RParen, l, co));
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    out.push((Tok::Arrow, l, co));
                } else {
                    return Err(LambdaError::Parse { line: l, col: co, message: "expected '->'".into() });
                }
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        s.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), l, co));
            }
            c => {
                return Err(LambdaError::Parse {
                    line: l,
                    col: co,
                    message: format!("unexpected character '{c}'"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(src: &str) -> Result<Self, LambdaError> {
        let toks = lex(src)?;
        let lines: Vec<&str> = src.lines().collect();
        let end = (lines.len().max(1), lines.last().map_or(1, |l| l.chars().count() + 1));
        Ok(Parser { toks, pos: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn error(&self, message: impl Into<String>) -> LambdaError {
        let (line, col) = self.toks.get(self.pos).map_or(self.end, |t| (t.1, t.2));
        LambdaError::Parse { line, col, message: message.into() }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), LambdaError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn finish(&self) -> Result<(), LambdaError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error("trailing input")),
        }
    }

    fn term(&mut self) -> Result<LambdaTerm, LambdaError> {
        if self.peek() == Some(&Tok::Lam) {
            self.pos += 1;
            let mut binders = Vec::new();
            while let Some(Tok::Ident(x)) = self.peek() {
                binders.push(x.clone());
                self.pos += 1;
            }
            if binders.is_empty() {
                return Err(self.error("expected a binder"));
            }
            self.expect(Tok::Dot, "'.'")?;
            let body = self.term()?;
            return Ok(binders.into_iter().rev().fold(body, |t, x| LambdaTerm::Abs(x, Box::new(t))));
        }
        let mut head = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let arg = self.atom()?;
                    head = LambdaTerm::app(head, arg);
                }
                Some(Tok::Lam) => {
                    let arg = self.term()?;
                    return Ok(LambdaTerm::app(head, arg));
                }
                _ => return Ok(head),
            }
        }
    }

    fn atom(&mut self) -> Result<LambdaTerm, LambdaError> {
        match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                Ok(LambdaTerm::Var(x))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => Err(self.error("expected a term")),
        }
    }

    fn ty(&mut self) -> Result<SimpleType, LambdaError> {
        let dom = match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                SimpleType::Base(x)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.ty()?;
                self.expect(Tok::RParen, "')'")?;
                t
            }
            _ => return Err(self.error("expected a type")),
        };
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            Ok(SimpleType::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }
}

pub fn parse_lambda(src: &str) -> Result<LambdaTerm, LambdaError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

// ---------------------------------------------------------------------------
// Simple types.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SimpleType {
    Base(String),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn base(name: &str) -> Self {
        SimpleType::Base(name.to_string())
    }

    pub fn arrow(a: SimpleType, b: SimpleType) -> Self {
        SimpleType::Arrow(Box::new(a), Box::new(b))
    }

    /// Negative formula: atoms of kind `o⁻`, `N⊸M ≡ N⊥ ⅋ M`.
    pub fn cbn_formula(&self) -> C {
        match self {
            SimpleType::Base(a) => C::var(a.clone(), Kind::ONeg),
            SimpleType::Arrow(a, b) => C::lolli(a.cbn_formula(), b.cbn_formula()),
        }
    }

    /// Positive formula: atoms of kind `o⁺`, `P⊸Q ≡ ↓(P⊥ ⅋ Q)`.
    pub fn cbv_formula(&self) -> C {
        match self {
            SimpleType::Base(a) => C::var(a.clone(), Kind::OPos),
            SimpleType::Arrow(a, b) => C::down(C::parr(a.cbv_formula().negate(), b.cbv_formula())),
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Base(a) => write!(f, "{a}"),
            SimpleType::Arrow(a, b) => match &**a {
                SimpleType::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

impl FromStr for SimpleType {
    type Err = LambdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser::new(s)?;
        let t = p.ty()?;
        p.finish()?;
        Ok(t)
    }
}

#[derive(Clone, Debug)]
enum Ty {
    Meta(usize),
    Base(String),
    Arrow(Box<Ty>, Box<Ty>),
}

#[derive(Default)]
struct Unifier {
    solved: Vec<Option<Ty>>,
}

impl Unifier {
    fn fresh(&mut self) -> Ty {
        self.solved.push(None);
        Ty::Meta(self.solved.len() - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Meta(i) => match &self.solved[*i] {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs(&self, i: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Meta(j) => i == j,
            Ty::Base(_) => false,
            Ty::Arrow(a, b) => self.occurs(i, &a) || self.occurs(i, &b),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), String> {
        match (self.resolve(a), self.resolve(b)) {
            (Ty::Meta(i), Ty::Meta(j)) if i == j => Ok(()),
            (Ty::Meta(i), t) | (t, Ty::Meta(i)) => {
                if self.occurs(i, &t) {
                    return Err("occurs check".into());
                }
                self.solved[i] = Some(t);
                Ok(())
            }
            (Ty::Base(x), Ty::Base(y)) if x == y => Ok(()),
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => {
                self.unify(&a1, &a2)?;
                self.unify(&b1, &b2)
            }
            (x, y) => Err(format!("cannot unify {} with {}", self.show(&x), self.show(&y))),
        }
    }

    fn show(&self, t: &Ty) -> String {
        let mut names = BTreeMap::new();
        self.finish(t, &mut names, &BTreeSet::new()).to_string()
    }

    /// Unsolved metavariables become fresh atoms `o1, o2, …`.
    fn finish(&self, t: &Ty, names: &mut BTreeMap<usize, String>, taken: &BTreeSet<String>) -> SimpleType {
        match self.resolve(t) {
            Ty::Meta(i) => {
                let next = names.len();
                let name = names.entry(i).or_insert_with(|| {
                    let mut k = next + 1;
                    loop {
                        let n = format!("o{k}");
                        if !taken.contains(&n) {
                            return n;
                        }
                        k += 1;
                    }
                });
                SimpleType::Base(name.clone())
            }
            Ty::Base(a) => SimpleType::Base(a),
            Ty::Arrow(a, b) => SimpleType::arrow(self.finish(&a, names, taken), self.finish(&b, names, taken)),
        }
    }

    fn import(t: &SimpleType) -> Ty {
        match t {
            SimpleType::Base(a) => Ty::Base(a.clone()),
            SimpleType::Arrow(a, b) => Ty::Arrow(Box::new(Self::import(a)), Box::new(Self::import(b))),
        }
    }

    fn infer(&mut self, t: &LambdaTerm, env: &mut BTreeMap<String, Ty>, all: &mut BTreeMap<String, Ty>) -> Result<Ty, String> {
        match t {
            LambdaTerm::Var(x) => Ok(match env.get(x) {
                Some(ty) => ty.clone(),
                None => {
                    let ty = self.fresh();
                    env.insert(x.clone(), ty.clone());
                    all.insert(x.clone(), ty.clone());
                    ty
                }
            }),
            LambdaTerm::Abs(x, body) => {
                let a = self.fresh();
                let saved = env.insert(x.clone(), a.clone());
                all.insert(x.clone(), a.clone());
                let b = self.infer(body, env, all)?;
                match saved {
                    Some(s) => env.insert(x.clone(), s),
                    None => env.remove(x),
                };
                Ok(Ty::Arrow(Box::new(a), Box::new(b)))
            }
            LambdaTerm::App(f, u) => {
                let tf = self.infer(f, env, all)?;
                let tu = self.infer(u, env, all)?;
                let r = self.fresh();
                self.unify(&tf, &Ty::Arrow(Box::new(tu), Box::new(r.clone())))?;
                Ok(r)
            }
        }
    }
}

/// A principal simple typing: the term's type and the type of every variable
/// (bound or free). Names must be bound at most once, see
/// [`LambdaTerm::barendregt`].
#[derive(Clone, Debug, PartialEq)]
pub struct Typing {
    pub ty: SimpleType,
    pub vars: BTreeMap<String, SimpleType>,
}

impl Typing {
    /// The type of a subterm.
    pub fn of(&self, t: &LambdaTerm) -> SimpleType {
        match t {
            LambdaTerm::Var(x) => self.vars[x].clone(),
            LambdaTerm::Abs(x, b) => SimpleType::arrow(self.vars[x].clone(), self.of(b)),
            LambdaTerm::App(f, _) => match self.of(f) {
                SimpleType::Arrow(_, r) => *r,
                SimpleType::Base(_) => unreachable!("typed application"),
            },
        }
    }
}

/// Principal type of `t` (optionally instantiated to `expected`).
pub fn infer_type(t: &LambdaTerm, expected: Option<&SimpleType>) -> Result<Typing, LambdaError> {
    let mut u = Unifier::default();
    let mut all = BTreeMap::new();
    let ty = u
        .infer(t, &mut BTreeMap::new(), &mut all)
        .map_err(LambdaError::Untypable)?;
    let mut taken = BTreeSet::new();
    if let Some(e) = expected {
        u.unify(&ty, &Unifier::import(e)).map_err(LambdaError::Untypable)?;
        collect_bases(e, &mut taken);
    }
    let mut names = BTreeMap::new();
    let ty_out = u.finish(&ty, &mut names, &taken);
    let vars = all
        .iter()
        .map(|(x, ty)| (x.clone(), u.finish(ty, &mut names, &taken)))
        .collect();
    Ok(Typing { ty: ty_out, vars })
}

fn collect_bases(t: &SimpleType, out: &mut BTreeSet<String>) {
    match t {
        SimpleType::Base(a) => {
            out.insert(a.clone());
        }
        SimpleType::Arrow(a, b) => {
            collect_bases(a, out);
            collect_bases(b, out);
        }
    }
}

// ---------------------------------------------------------------------------
// Translations.

struct Encoder {
    avoid: BTreeSet<String>,
    typing: Option<Typing>,
}

impl Encoder {
    fn new(ts: &[&LambdaTerm], stack: Option<&Stack>, typing: Option<Typing>) -> Self {
        let mut avoid = BTreeSet::new();
        for t in ts {
            t.names(&mut avoid);
        }
        let mut s = stack;
        while let Some(st) = s {
            match st {
                Stack::Var(x) => {
                    avoid.insert(x.clone());
                    s = None;
                }
                Stack::Push(u, rest) => {
                    u.names(&mut avoid);
                    s = Some(rest);
                }
            }
        }
        Encoder { avoid, typing }
    }

    fn fresh(&mut self, base: &str, p: Polarity) -> Variable {
        let name = fresh_name(base, &self.avoid);
        self.avoid.insert(name.clone());
        Variable::new(name, p)
    }

    fn cbn_ty(&self, t: &LambdaTerm) -> C {
        self.typing.as_ref().expect("typed encoding").of(t).cbn_formula()
    }

    fn cbv_ty(&self, t: &LambdaTerm) -> C {
        self.typing.as_ref().expect("typed encoding").of(t).cbv_formula()
    }

    fn typed(&self) -> bool {
        self.typing.is_some()
    }

    /// The translation and, when a typing is present, its derivation.
    fn cbn(&mut self, t: &LambdaTerm) -> Result<(Term, Option<Derivation>), CheckError> {
        match t {
            LambdaTerm::Var(a) => {
                let v = Variable::neg(a.clone());
                let d = self.typed().then(|| build::ax(v.clone(), self.cbn_ty(t)));
                Ok((Term::Var(v), d))
            }
            LambdaTerm::Abs(a, body) => {
                let (tb, db) = self.cbn(body)?;
                let alpha = Variable::neg(a.clone());
                let x = self.fresh("x", Polarity::Positive);
                let c = Command::new(tb, Term::Var(x.clone())).expect("negative body against stack variable");
                let d = match db {
                    Some(db) => {
                        let m = self.cbn_ty(body);
                        let mut d = build::cut(db, build::ax(x.clone(), m.negate()))?;
                        if body.occurrences(a) == 0 {
                            let n = self.typing.as_ref().unwrap().vars[a].cbn_formula();
                            d = build::weaken(alpha.clone(), n.negate(), d);
                        }
                        Some(build::parr(alpha.clone(), x.clone(), d))
                    }
                    None => None,
                };
                let term = Term::mu_pair(alpha, x, c).expect("distinct binders");
                Ok((term, d))
            }
            LambdaTerm::App(f, u) => {
                let (tf, df) = self.cbn(f)?;
                let (tu, du) = self.cbn(u)?;
                let x = self.fresh("x", Polarity::Positive);
                let pair = Term::pair(tu, Term::Var(x.clone())).expect("negative terms are values");
                let c = Command::new(tf, pair).expect("function against argument pair");
                let d = match (df, du) {
                    (Some(df), Some(du)) => {
                        let m = self.cbn_ty(t);
                        let dp = build::tensor(du, build::ax(x.clone(), m.negate()))?;
                        Some(build::mu(x.clone(), build::cut(df, dp)?))
                    }
                    _ => None,
                };
                Ok((Term::mu(x, c), d))
            }
        }
    }

    fn cbn_stack(&mut self, s: &Stack) -> Result<Term, CheckError> {
        Ok(match s {
            Stack::Var(x) => Term::Var(Variable::pos(x.clone())),
            Stack::Push(u, rest) => {
                let (tu, _) = self.cbn(u)?;
                Term::pair(tu, self.cbn_stack(rest)?).expect("stacks are values")
            }
        })
    }

    fn cbv(&mut self, t: &LambdaTerm) -> Result<(Term, Option<Derivation>), CheckError> {
        match t {
            LambdaTerm::Var(x) => {
                let v = Variable::pos(x.clone());
                let d = self.typed().then(|| build::ax(v.clone(), self.cbv_ty(t)));
                Ok((Term::Var(v), d))
            }
            LambdaTerm::Abs(x, body) => {
                let (tb, db) = self.cbv(body)?;
                let xv = Variable::pos(x.clone());
                let alpha = self.fresh("a", Polarity::Negative);
                let c = Command::new(tb, Term::Var(alpha.clone())).expect("positive body against continuation");
                let d = match db {
                    Some(db) => {
                        let q = self.cbv_ty(body);
                        let mut d = build::cut(db, build::ax(alpha.clone(), q.negate()))?;
                        if body.occurrences(x) == 0 {
                            let p = self.typing.as_ref().unwrap().vars[x].cbv_formula();
                            d = build::weaken(xv.clone(), p.negate(), d);
                        }
                        Some(build::down(build::parr(xv.clone(), alpha.clone(), d)))
                    }
                    None => None,
                };
                let fun = Term::mu_pair(xv, alpha, c).expect("distinct binders");
                Ok((Term::boxed(fun).expect("negative terms are values"), d))
            }
            LambdaTerm::App(f, u) => {
                let (tf, df) = self.cbv(f)?;
                let (tu, du) = self.cbv(u)?;
                let alpha = self.fresh("a", Polarity::Negative);
                let beta = self.fresh("b", Polarity::Negative);
                let pair = make_pair(tu, Term::Var(alpha.clone()));
                let inner = Command::new(pair.clone(), Term::Var(beta.clone())).expect("pair against continuation");
                let d = match (df, du) {
                    (Some(df), Some(du)) => {
                        let p = self.cbv_ty(u);
                        let q = self.cbv_ty(t);
                        let dp = pair_derivation(&pair, du, &p, &alpha, &q)?;
                        let tensor = C::tensor(p, q.negate());
                        let dup = build::up(beta.clone(), build::cut(dp, build::ax(beta.clone(), tensor.negate()))?);
                        Some(build::mu(alpha.clone(), build::cut(df, dup)?))
                    }
                    _ => None,
                };
                let arg = Term::mu_box(beta, inner);
                let c = Command::new(tf, arg).expect("boxed function against argument");
                Ok((Term::mu(alpha, c), d))
            }
        }
    }
}

/// Derivation of `(u, α) : P ⊗ Q⊥` for the derived pair; `du` types `u : P`.
fn pair_derivation(pair: &Term, du: Derivation, p: &C, alpha: &Variable, q: &C) -> Result<Derivation, CheckError> {
    let ax_alpha = || build::ax(alpha.clone(), q.negate());
    if let Term::Pair(..) = pair {
        return build::tensor(du, ax_alpha());
    }
    // μa.⟨u | μk1.⟨α | μk2.⟨(k1,k2)|a⟩⟩⟩
    let Term::Mu(a, outer) = pair else { unreachable!("make_pair shape") };
    let Term::Mu(k1, mid) = outer.neg() else { unreachable!("make_pair shape") };
    let Term::Mu(k2, _) = mid.pos() else { unreachable!("make_pair shape") };
    let tensor = C::tensor(p.clone(), q.negate());
    let inner_pair = build::tensor(build::ax(k1.clone(), p.clone()), build::ax(k2.clone(), q.negate()))?;
    let inner = build::cut(inner_pair, build::ax(a.clone(), tensor.negate()))?;
    let mid_d = build::cut(build::mu(k2.clone(), inner), ax_alpha())?;
    let outer_d = build::cut(du, build::mu(k1.clone(), mid_d))?;
    Ok(build::mu(a.clone(), outer_d))
}

/// The CBN translation; a negative term.
pub fn encode_cbn(t: &LambdaTerm) -> Term {
    let t = t.barendregt();
    Encoder::new(&[&t], None, None).cbn(&t).expect("untyped encoding").0
}

/// A CBN stack as a positive value.
pub fn encode_cbn_stack(s: &Stack) -> Term {
    Encoder::new(&[], Some(s), None).cbn_stack(s).expect("untyped encoding")
}

/// `⟨t | π⟩` under the CBN translation, with fresh names kept apart.
pub fn encode_cbn_command(t: &LambdaTerm, s: &Stack) -> Command {
    let t = t.barendregt();
    let mut enc = Encoder::new(&[&t], Some(s), None);
    let (tt, _) = enc.cbn(&t).expect("untyped encoding");
    let ts = enc.cbn_stack(s).expect("untyped encoding");
    Command::new(tt, ts).expect("negative term against positive stack")
}

/// The CBV translation; a positive term.
pub fn encode_cbv(t: &LambdaTerm) -> Term {
    let t = t.barendregt();
    Encoder::new(&[&t], None, None).cbv(&t).expect("untyped encoding").0
}

/// The CBN typing derivation of an affine simply-typed term. Its subject is
/// `encode_cbn(t)`; free λ-variables appear in the context.
pub fn derive_cbn(t: &LambdaTerm, ty: Option<&SimpleType>) -> Result<Derivation, LambdaError> {
    let t = t.barendregt();
    t.check_affine()?;
    let typing = infer_type(&t, ty)?;
    let (_, d) = Encoder::new(&[&t], None, Some(typing)).cbn(&t)?;
    Ok(d.expect("typed encoding"))
}

/// The CBV counterpart of [`derive_cbn`]; its subject is `encode_cbv(t)`.
pub fn derive_cbv(t: &LambdaTerm, ty: Option<&SimpleType>) -> Result<Derivation, LambdaError> {
    let t = t.barendregt();
    t.check_affine()?;
    let typing = infer_type(&t, ty)?;
    let (_, d) = Encoder::new(&[&t], None, Some(typing)).cbv(&t)?;
    Ok(d.expect("typed encoding"))
}

#[cfg(test)]
mod tests;
