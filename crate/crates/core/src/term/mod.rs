//! Polarized terms and commands.
//!
//! Terms are split by polarity. Positive terms are eager (values `x`, `(V,V')`,
//! `{V}`, positive instructions, and `μα.c`), negative terms are lazy (`α`,
//! `μx.c`, `μ(κ,κ').c`, `μ{κ}.c`, `μ!(κ).c`, negative instructions). A command
//! is the interaction of one term of each polarity and is always stored with the
//! positive side on the left, so `⟨t|u⟩` and `⟨u|t⟩` are the same value.

mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use syntax::{parse_command, parse_term, parse_term_or_command, ParseError, Parsed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn sigil(self) -> char {
        match self {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sigil())
    }
}

/// A term variable. Equality takes both the name and the polarity into account.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub name: String,
    pub polarity: Polarity,
}

impl Variable {
    pub fn new(name: impl Into<String>, polarity: Polarity) -> Variable {
        Variable {
            name: name.into(),
            polarity,
        }
    }

    pub fn pos(name: impl Into<String>) -> Variable {
        Variable::new(name, Polarity::Positive)
    }

    pub fn neg(name: impl Into<String>) -> Variable {
        Variable::new(name, Polarity::Negative)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.polarity.sigil(), self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Variable),
    /// `(V, V')`, both components values.
    Pair(Box<Term>, Box<Term>),
    /// `{V}`.
    Boxed(Box<Term>),
    PosInstr(String),
    NegInstr(String),
    /// `μκ.c`; positive when κ is negative and vice versa.
    Mu(Variable, Box<Command>),
    MuPair(Variable, Variable, Box<Command>),
    MuBox(Variable, Box<Command>),
    /// `!V`, a positive instruction.
    Bang(Box<Term>),
    /// `μ!(κ).c`, a negative instruction.
    MuBang(Variable, Box<Command>),
    /// Primitive integer `n̄` used as a countdown counter.
    Nat(u64),
    Daimon(Polarity),
}

/// `⟨t₊ | t₋⟩`, stored positive-left.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Command {
    pos: Term,
    neg: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("command sides {left} and {right} have the same polarity")]
    SamePolarity { left: String, right: String },
    #[error("cannot substitute {term} for {var}: polarity mismatch")]
    PolarityMismatch { var: Variable, term: String },
    #[error("{0} is not a value")]
    NotAValue(String),
    #[error("binder μ({0},{0}) binds the same variable twice")]
    DuplicateBinder(Variable),
    #[error("variable {0} is listed twice")]
    DuplicateVariable(Variable),
    #[error("variable {0} must be positive")]
    ExpectedPositive(Variable),
}

/// Either side of a substitution or free-variable query.
pub trait Syntax {
    fn collect_free(&self, bound: &mut Vec<Variable>, out: &mut BTreeSet<Variable>);
    fn collect_names(&self, out: &mut BTreeSet<String>);
}

pub fn free_vars<S: Syntax + ?Sized>(x: &S) -> BTreeSet<Variable> {
    let mut out = BTreeSet::new();
    x.collect_free(&mut Vec::new(), &mut out);
    out
}

fn all_names<S: Syntax + ?Sized>(x: &S) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    x.collect_names(&mut out);
    out
}

impl Term {
    pub fn var(v: Variable) -> Term {
        Term::Var(v)
    }

    pub fn pos_var(name: &str) -> Term {
        Term::Var(Variable::pos(name))
    }

    pub fn neg_var(name: &str) -> Term {
        Term::Var(Variable::neg(name))
    }

    /// `(V, V')`; both components must be values.
    pub fn pair(a: Term, b: Term) -> Result<Term, TermError> {
        for t in [&a, &b] {
            if !t.is_value() {
                return Err(TermError::NotAValue(t.to_string()));
            }
        }
        Ok(Term::Pair(Box::new(a), Box::new(b)))
    }

    pub fn boxed(v: Term) -> Result<Term, TermError> {
        if !v.is_value() {
            return Err(TermError::NotAValue(v.to_string()));
        }
        Ok(Term::Boxed(Box::new(v)))
    }

    pub fn bang(v: Term) -> Result<Term, TermError> {
        if !v.is_value() {
            return Err(TermError::NotAValue(v.to_string()));
        }
        Ok(Term::Bang(Box::new(v)))
    }

    pub fn mu(var: Variable, body: Command) -> Term {
        Term::Mu(var, Box::new(body))
    }

    pub fn mu_pair(a: Variable, b: Variable, body: Command) -> Result<Term, TermError> {
        if a == b {
            return Err(TermError::DuplicateBinder(a));
        }
        Ok(Term::MuPair(a, b, Box::new(body)))
    }

    pub fn mu_box(var: Variable, body: Command) -> Term {
        Term::MuBox(var, Box::new(body))
    }

    pub fn mu_bang(var: Variable, body: Command) -> Term {
        Term::MuBang(var, Box::new(body))
    }

    pub fn polarity(&self) -> Polarity {
        use Polarity::*;
        match self {
            Term::Var(v) => v.polarity,
            Term::Mu(v, _) => v.polarity.flip(),
            Term::Pair(..)
            | Term::Boxed(_)
            | Term::PosInstr(_)
            | Term::Bang(_)
            | Term::Nat(_) => Positive,
            Term::NegInstr(_) | Term::MuPair(..) | Term::MuBox(..) | Term::MuBang(..) => Negative,
            Term::Daimon(p) => *p,
        }
    }

    /// Values are positive values and all negative terms.
    pub fn is_value(&self) -> bool {
        match self {
            Term::Mu(v, _) => v.polarity == Polarity::Positive,
            _ => true,
        }
    }

    /// An instruction constant: something execution may legitimately stop on.
    pub fn is_instruction(&self) -> bool {
        matches!(
            self,
            Term::PosInstr(_) | Term::NegInstr(_) | Term::Nat(_) | Term::Daimon(_) | Term::Bang(_)
        )
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::PosInstr(_) | Term::NegInstr(_) | Term::Nat(_) | Term::Daimon(_) => 1,
            Term::Pair(a, b) => 1 + a.size() + b.size(),
            Term::Boxed(v) | Term::Bang(v) => 1 + v.size(),
            Term::Mu(_, c) | Term::MuPair(_, _, c) | Term::MuBox(_, c) | Term::MuBang(_, c) => {
                1 + c.size()
            }
        }
    }

    pub fn substitute(&self, subst: &Substitution) -> Result<Term, TermError> {
        subst.check()?;
        Ok(subst.apply_term(self))
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha_term(self, other, &mut Vec::new())
    }

    /// Renames every bound variable to a canonical name, so structural equality of
    /// canonical forms decides α-equivalence.
    pub fn canonical(&self) -> Term {
        let prefix = canonical_prefix(&free_vars(self));
        let mut r = Canon {
            prefix,
            next: 0,
            scope: Vec::new(),
        };
        r.term(self)
    }

    /// Every bound variable occurs at most once under its binder.
    pub fn is_affine(&self) -> bool {
        match self {
            Term::Var(_) | Term::PosInstr(_) | Term::NegInstr(_) | Term::Nat(_) | Term::Daimon(_) => true,
            Term::Pair(a, b) => a.is_affine() && b.is_affine(),
            Term::Boxed(v) | Term::Bang(v) => v.is_affine(),
            Term::Mu(k, c) | Term::MuBox(k, c) | Term::MuBang(k, c) => {
                c.occurrences(k) <= 1 && c.is_affine()
            }
            Term::MuPair(k1, k2, c) => {
                c.occurrences(k1) <= 1 && c.occurrences(k2) <= 1 && c.is_affine()
            }
        }
    }

    pub fn occurrences(&self, v: &Variable) -> usize {
        match self {
            Term::Var(w) => usize::from(w == v),
            Term::PosInstr(_) | Term::NegInstr(_) | Term::Nat(_) | Term::Daimon(_) => 0,
            Term::Pair(a, b) => a.occurrences(v) + b.occurrences(v),
            Term::Boxed(t) | Term::Bang(t) => t.occurrences(v),
            Term::Mu(k, c) | Term::MuBox(k, c) | Term::MuBang(k, c) => {
                if k == v {
                    0
                } else {
                    c.occurrences(v)
                }
            }
            Term::MuPair(k1, k2, c) => {
                if k1 == v || k2 == v {
                    0
                } else {
                    c.occurrences(v)
                }
            }
        }
    }

    /// Checks the grammar invariants that the enum alone cannot express.
    pub fn well_formed(&self) -> Result<(), TermError> {
        match self {
            Term::Var(_) | Term::PosInstr(_) | Term::NegInstr(_) | Term::Nat(_) | Term::Daimon(_) => Ok(()),
            Term::Pair(a, b) => {
                for t in [a, b] {
                    if !t.is_value() {
                        return Err(TermError::NotAValue(t.to_string()));
                    }
                    t.well_formed()?;
                }
                Ok(())
            }
            Term::Boxed(v) | Term::Bang(v) => {
                if !v.is_value() {
                    return Err(TermError::NotAValue(v.to_string()));
                }
                v.well_formed()
            }
            Term::MuPair(a, b, c) => {
                if a == b {
                    return Err(TermError::DuplicateBinder(a.clone()));
                }
                c.well_formed()
            }
            Term::Mu(_, c) | Term::MuBox(_, c) | Term::MuBang(_, c) => c.well_formed(),
        }
    }
}

impl Syntax for Term {
    fn collect_free(&self, bound: &mut Vec<Variable>, out: &mut BTreeSet<Variable>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::PosInstr(_) | Term::NegInstr(_) | Term::Nat(_) | Term::Daimon(_) => {}
            Term::Pair(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::Boxed(t) | Term::Bang(t) => t.collect_free(bound, out),
            Term::Mu(k, c) | Term::MuBox(k, c) | Term::MuBang(k, c) => {
                bound.push(k.clone());
                c.collect_free(bound, out);
                bound.pop();
            }
            Term::MuPair(k1, k2, c) => {
                bound.push(k1.clone());
                bound.push(k2.clone());
                c.collect_free(bound, out);
                bound.pop();
                bound.pop();
            }
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.name.clone());
            }
            Term::PosInstr(_) | Term::NegInstr(_) | Term::Nat(_) | Term::Daimon(_) => {}
            Term::Pair(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Term::Boxed(t) | Term::Bang(t) => t.collect_names(out),
            Term::Mu(k, c) | Term::MuBox(k, c) | Term::MuBang(k, c) => {
                out.insert(k.name.clone());
                c.collect_names(out);
            }
            Term::MuPair(k1, k2, c) => {
                out.insert(k1.name.clone());
                out.insert(k2.name.clone());
                c.collect_names(out);
            }
        }
    }
}

impl Command {
    /// Builds `⟨t|u⟩` in canonical orientation. The order of the arguments is
    /// irrelevant; two terms of the same polarity are rejected.
    pub fn new(t: Term, u: Term) -> Result<Command, TermError> {
        match (t.polarity(), u.polarity()) {
            (Polarity::Positive, Polarity::Negative) => Ok(Command { pos: t, neg: u }),
            (Polarity::Negative, Polarity::Positive) => Ok(Command { pos: u, neg: t }),
            _ => Err(TermError::SamePolarity {
                left: t.to_string(),
                right: u.to_string(),
            }),
        }
    }

    pub fn pos(&self) -> &Term {
        &self.pos
    }

    pub fn neg(&self) -> &Term {
        &self.neg
    }

    pub fn into_parts(self) -> (Term, Term) {
        (self.pos, self.neg)
    }

    pub fn size(&self) -> usize {
        1 + self.pos.size() + self.neg.size()
    }

    pub fn substitute(&self, subst: &Substitution) -> Result<Command, TermError> {
        subst.check()?;
        Ok(subst.apply_command(self))
    }

    pub fn alpha_eq(&self, other: &Command) -> bool {
        alpha_command(self, other, &mut Vec::new())
    }

    pub fn canonical(&self) -> Command {
        let prefix = canonical_prefix(&free_vars(self));
        let mut r = Canon {
            prefix,
            next: 0,
            scope: Vec::new(),
        };
        r.command(self)
    }

    pub fn is_affine(&self) -> bool {
        self.pos.is_affine() && self.neg.is_affine()
    }

    pub fn occurrences(&self, v: &Variable) -> usize {
        self.pos.occurrences(v) + self.neg.occurrences(v)
    }

    pub fn well_formed(&self) -> Result<(), TermError> {
        self.pos.well_formed()?;
        self.neg.well_formed()
    }

    pub fn is_closed(&self) -> bool {
        free_vars(self).is_empty()
    }
}

impl Syntax for Command {
    fn collect_free(&self, bound: &mut Vec<Variable>, out: &mut BTreeSet<Variable>) {
        self.pos.collect_free(bound, out);
        self.neg.collect_free(bound, out);
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        self.pos.collect_names(out);
        self.neg.collect_names(out);
    }
}

/// A simultaneous, capture-avoiding substitution of terms for variables.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    map: BTreeMap<Variable, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn single(var: Variable, term: Term) -> Substitution {
        let mut s = Substitution::new();
        s.insert(var, term);
        s
    }

    pub fn insert(&mut self, var: Variable, term: Term) -> &mut Self {
        self.map.insert(var, term);
        self
    }

    pub fn with(mut self, var: Variable, term: Term) -> Self {
        self.map.insert(var, term);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Every binding must respect polarity and bind a value.
    pub fn check(&self) -> Result<(), TermError> {
        for (v, t) in &self.map {
            if t.polarity() != v.polarity {
                return Err(TermError::PolarityMismatch {
                    var: v.clone(),
                    term: t.to_string(),
                });
            }
            if !t.is_value() {
                return Err(TermError::NotAValue(t.to_string()));
            }
        }
        Ok(())
    }

    fn range_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            for v in free_vars(t) {
                out.insert(v.name);
            }
        }
        out
    }

    fn without(&self, vars: &[&Variable]) -> Substitution {
        let mut s = self.clone();
        for v in vars {
            s.map.remove(*v);
        }
        s
    }

    pub(crate) fn apply_term(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::PosInstr(_) | Term::NegInstr(_) | Term::Nat(_) | Term::Daimon(_) => t.clone(),
            Term::Pair(a, b) => Term::Pair(Box::new(self.apply_term(a)), Box::new(self.apply_term(b))),
            Term::Boxed(v) => Term::Boxed(Box::new(self.apply_term(v))),
            Term::Bang(v) => Term::Bang(Box::new(self.apply_term(v))),
            Term::Mu(k, c) => {
                let (k, c) = self.under_binder(k, c);
                Term::Mu(k, Box::new(c))
            }
            Term::MuBox(k, c) => {
                let (k, c) = self.under_binder(k, c);
                Term::MuBox(k, Box::new(c))
            }
            Term::MuBang(k, c) => {
                let (k, c) = self.under_binder(k, c);
                Term::MuBang(k, Box::new(c))
            }
            Term::MuPair(k1, k2, c) => {
                let inner = self.without(&[k1, k2]);
                if inner.map.is_empty() {
                    return t.clone();
                }
                let clash = inner.range_names();
                let mut avoid = all_names(c.as_ref());
                avoid.extend(clash.iter().cloned());
                let mut s = inner;
                let k1n = rename_if(k1, &clash, &mut avoid, &mut s);
                let k2n = rename_if(k2, &clash, &mut avoid, &mut s);
                Term::MuPair(k1n, k2n, Box::new(s.apply_command(c)))
            }
        }
    }

    fn under_binder(&self, k: &Variable, c: &Command) -> (Variable, Command) {
        let inner = self.without(&[k]);
        if inner.map.is_empty() {
            return (k.clone(), c.clone());
        }
        let clash = inner.range_names();
        let mut avoid = all_names(c);
        avoid.extend(clash.iter().cloned());
        let mut s = inner;
        let kn = rename_if(k, &clash, &mut avoid, &mut s);
        (kn, s.apply_command(c))
    }

    pub(crate) fn apply_command(&self, c: &Command) -> Command {
        Command {
            pos: self.apply_term(&c.pos),
            neg: self.apply_term(&c.neg),
        }
    }
}

fn rename_if(
    k: &Variable,
    clash: &BTreeSet<String>,
    avoid: &mut BTreeSet<String>,
    s: &mut Substitution,
) -> Variable {
    if !clash.contains(&k.name) {
        return k.clone();
    }
    let fresh = fresh_name(&k.name, avoid);
    avoid.insert(fresh.clone());
    let kn = Variable::new(fresh, k.polarity);
    s.map.insert(k.clone(), Term::Var(kn.clone()));
    kn
}

/// Smallest `base'`, `base''`, `base_2`... not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let root = base.trim_end_matches(|c: char| c == '\'' || c.is_ascii_digit() || c == '_');
    let root = if root.is_empty() { "v" } else { root };
    for i in 1.. {
        let cand = format!("{root}{i}");
        if !avoid.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// A variable named after `base` that does not clash with any name in `avoid`.
pub fn fresh_var(base: &str, polarity: Polarity, avoid: &BTreeSet<String>) -> Variable {
    if !avoid.contains(base) {
        return Variable::new(base, polarity);
    }
    Variable::new(fresh_name(base, avoid), polarity)
}

fn lookup(scope: &[(Variable, Variable)], v: &Variable, left: bool) -> Option<usize> {
    scope
        .iter()
        .rposition(|(a, b)| if left { a == v } else { b == v })
}

fn alpha_term(a: &Term, b: &Term, scope: &mut Vec<(Variable, Variable)>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match (lookup(scope, x, true), lookup(scope, y, false)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Term::Pair(a1, a2), Term::Pair(b1, b2)) => {
            alpha_term(a1, b1, scope) && alpha_term(a2, b2, scope)
        }
        (Term::Boxed(x), Term::Boxed(y)) | (Term::Bang(x), Term::Bang(y)) => alpha_term(x, y, scope),
        (Term::PosInstr(x), Term::PosInstr(y)) | (Term::NegInstr(x), Term::NegInstr(y)) => x == y,
        (Term::Nat(x), Term::Nat(y)) => x == y,
        (Term::Daimon(x), Term::Daimon(y)) => x == y,
        (Term::Mu(k, c), Term::Mu(l, d))
        | (Term::MuBox(k, c), Term::MuBox(l, d))
        | (Term::MuBang(k, c), Term::MuBang(l, d)) => {
            if k.polarity != l.polarity {
                return false;
            }
            scope.push((k.clone(), l.clone()));
            let r = alpha_command(c, d, scope);
            scope.pop();
            r
        }
        (Term::MuPair(k1, k2, c), Term::MuPair(l1, l2, d)) => {
            if k1.polarity != l1.polarity || k2.polarity != l2.polarity {
                return false;
            }
            scope.push((k1.clone(), l1.clone()));
            scope.push((k2.clone(), l2.clone()));
            let r = alpha_command(c, d, scope);
            scope.pop();
            scope.pop();
            r
        }
        _ => false,
    }
}

fn alpha_command(a: &Command, b: &Command, scope: &mut Vec<(Variable, Variable)>) -> bool {
    alpha_term(&a.pos, &b.pos, scope) && alpha_term(&a.neg, &b.neg, scope)
}

fn canonical_prefix(free: &BTreeSet<Variable>) -> String {
    let mut prefix = String::from("_");
    while free.iter().any(|v| v.name.starts_with(&prefix)) {
        prefix.push('_');
    }
    prefix
}

struct Canon {
    prefix: String,
    next: usize,
    scope: Vec<(Variable, Variable)>,
}

impl Canon {
    fn bind(&mut self, k: &Variable) -> Variable {
        let v = Variable::new(format!("{}{}", self.prefix, self.next), k.polarity);
        self.next += 1;
        self.scope.push((k.clone(), v.clone()));
        v
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.scope.iter().rev().find(|(a, _)| a == v) {
                Some((_, b)) => Term::Var(b.clone()),
                None => t.clone(),
            },
            Term::PosInstr(_) | Term::NegInstr(_) | Term::Nat(_) | Term::Daimon(_) => t.clone(),
            Term::Pair(a, b) => Term::Pair(Box::new(self.term(a)), Box::new(self.term(b))),
            Term::Boxed(v) => Term::Boxed(Box::new(self.term(v))),
            Term::Bang(v) => Term::Bang(Box::new(self.term(v))),
            Term::Mu(k, c) => {
                let k = self.bind(k);
                let c = self.command(c);
                self.scope.pop();
                Term::Mu(k, Box::new(c))
            }
            Term::MuBox(k, c) => {
                let k = self.bind(k);
                let c = self.command(c);
                self.scope.pop();
                Term::MuBox(k, Box::new(c))
            }
            Term::MuBang(k, c) => {
                let k = self.bind(k);
                let c = self.command(c);
                self.scope.pop();
                Term::MuBang(k, Box::new(c))
            }
            Term::MuPair(k1, k2, c) => {
                let k1 = self.bind(k1);
                let k2 = self.bind(k2);
                let c = self.command(c);
                self.scope.pop();
                self.scope.pop();
                Term::MuPair(k1, k2, Box::new(c))
            }
        }
    }

    fn command(&mut self, c: &Command) -> Command {
        Command {
            pos: self.term(&c.pos),
            neg: self.term(&c.neg),
        }
    }
}

/// The general pair `(t,u)`. Values give `Pair` directly; otherwise the
/// left-to-right expansion `μα.⟨t | μκ.⟨u | μκ'.⟨(κ,κ')|α⟩⟩⟩`.
pub fn make_pair(t: Term, u: Term) -> Term {
    if t.is_value() && u.is_value() {
        return Term::Pair(Box::new(t), Box::new(u));
    }
    let mut avoid = all_names(&t);
    u.collect_names(&mut avoid);
    let alpha = fresh_var("a", Polarity::Negative, &avoid);
    avoid.insert(alpha.name.clone());
    let k1 = fresh_var("k", t.polarity(), &avoid);
    avoid.insert(k1.name.clone());
    let k2 = fresh_var("k", u.polarity(), &avoid);
    let pair = Term::Pair(Box::new(Term::Var(k1.clone())), Box::new(Term::Var(k2.clone())));
    let inner = Command::new(pair, Term::Var(alpha.clone())).expect("pair against negative variable");
    let mid = Command::new(u, Term::mu(k2, inner)).expect("κ' has the polarity of u");
    let outer = Command::new(t, Term::mu(k1, mid)).expect("κ has the polarity of t");
    Term::mu(alpha, outer)
}

/// The general one-tuple `{t}`: `μα.⟨t | μκ.⟨{κ}|α⟩⟩` unless `t` is a value.
pub fn make_box(t: Term) -> Term {
    if t.is_value() {
        return Term::Boxed(Box::new(t));
    }
    let mut avoid = all_names(&t);
    let alpha = fresh_var("a", Polarity::Negative, &avoid);
    avoid.insert(alpha.name.clone());
    let k = fresh_var("k", t.polarity(), &avoid);
    let inner = Command::new(Term::Boxed(Box::new(Term::Var(k.clone()))), Term::Var(alpha.clone()))
        .expect("box against negative variable");
    let outer = Command::new(t, Term::mu(k, inner)).expect("κ has the polarity of t");
    Term::mu(alpha, outer)
}

/// `!_{x₁..x_k} V = μκ.⟨μ!(x₁).⟨ ... ⟨μ!(x_k).⟨!V|κ⟩ | x_k⟩ ... ⟩ | x₁⟩`.
pub fn bang_macro(vars: &[Variable], value: Term) -> Result<Term, TermError> {
    let mut seen = BTreeSet::new();
    for v in vars {
        if v.polarity != Polarity::Positive {
            return Err(TermError::ExpectedPositive(v.clone()));
        }
        if !seen.insert(v) {
            return Err(TermError::DuplicateVariable(v.clone()));
        }
    }
    let bang = Term::bang(value)?;
    let mut avoid = all_names(&bang);
    avoid.extend(vars.iter().map(|v| v.name.clone()));
    let kappa = fresh_var("k", Polarity::Negative, &avoid);
    let mut body = Command::new(bang, Term::Var(kappa.clone()))?;
    for x in vars.iter().rev() {
        body = Command::new(Term::mu_bang(x.clone(), body), Term::Var(x.clone()))?;
    }
    Ok(Term::mu(kappa, body))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Pair(a, b) => write!(f, "({a}, {b})"),
            Term::Boxed(v) => write!(f, "{{{v}}}"),
            Term::PosInstr(n) => write!(f, "@+{n}"),
            Term::NegInstr(n) => write!(f, "@-{n}"),
            Term::Mu(k, c) => write!(f, "mu {k}. {c}"),
            Term::MuPair(k1, k2, c) => write!(f, "mu ({k1}, {k2}). {c}"),
            Term::MuBox(k, c) => write!(f, "mu {{{k}}}. {c}"),
            Term::Bang(v) => write!(f, "!{v}"),
            Term::MuBang(k, c) => write!(f, "mu !({k}). {c}"),
            Term::Nat(n) => write!(f, "nat:{n}"),
            Term::Daimon(p) => write!(f, "daimon{p}"),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} | {}>", self.pos, self.neg)
    }
}

#[cfg(test)]
mod tests;
