//! Linear forcing: forcing structures, the forcing orthogonal, the formula
//! translation `A*` and `p ⊩ A`, and the countdown machine.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::constructor::{conv_check, parse_constructor, ConvError, Constructor as C, Kind, KindEnv, KindError};
use crate::reduce::{StepCounts, StepKind};
use crate::term::{fresh_name, Command, Polarity, Substitution, Term, TermError};

// ---------------------------------------------------------------------------
// Forcing structures.

/// `(κ, C[·], +, 0)`. The monoid laws are required up to `≅`.
#[derive(Clone, Debug, PartialEq)]
pub struct ForcingStructure {
    pub name: &'static str,
    pub condition_kind: Kind,
    pub predicate: C,
    pub plus: C,
    pub zero: C,
}

/// `λp.λq. rec_ι q (λy.s) p`: recursion on the first argument.
pub fn integer_plus() -> C {
    let i = || Kind::Iota;
    C::lam(
        "p",
        i(),
        C::lam(
            "q",
            i(),
            C::apps(
                C::Rec(i()),
                [C::var("q", i()), C::lam("y", i(), C::Succ), C::var("p", i())],
            ),
        ),
    )
}

impl ForcingStructure {
    /// Integers with an opaque positive predicate `C : ι → o⁺`.
    pub fn integer() -> Self {
        ForcingStructure {
            name: "integer",
            condition_kind: Kind::Iota,
            predicate: C::var("C", Kind::arrow(Kind::Iota, Kind::OPos)),
            plus: integer_plus(),
            zero: C::Zero,
        }
    }

    /// Integers with the constant predicate `λx.top`, `top : o⁻` opaque.
    pub fn trivial() -> Self {
        ForcingStructure {
            name: "trivial",
            condition_kind: Kind::Iota,
            predicate: C::lam("x", Kind::Iota, C::var("top", Kind::ONeg)),
            plus: integer_plus(),
            zero: C::Zero,
        }
    }

    pub fn add(&self, p: C, q: C) -> C {
        C::apps(self.plus.clone(), [p, q])
    }

    /// `C[p]`.
    pub fn holds(&self, p: C) -> C {
        C::app(self.predicate.clone(), p)
    }

    /// Kind-checks the components.
    pub fn well_kinded(&self) -> Result<(), KindError> {
        let k = &self.condition_kind;
        let expect = |c: &C, ok: &dyn Fn(&Kind) -> bool, expected: String| -> Result<(), KindError> {
            let found = c.kind()?;
            if ok(&found) {
                Ok(())
            } else {
                Err(KindError::Mismatch { term: c.to_string(), expected, found })
            }
        };
        let pred = |pk: &Kind| {
            *pk == Kind::arrow(k.clone(), Kind::OPos) || *pk == Kind::arrow(k.clone(), Kind::ONeg)
        };
        expect(&self.predicate, &pred, format!("{k} → o"))?;
        let kkk = Kind::arrow(k.clone(), Kind::arrow(k.clone(), k.clone()));
        expect(&self.plus, &|pk| *pk == kkk, kkk.to_string())?;
        expect(&self.zero, &|zk| zk == k, k.to_string())
    }

    /// The three laws on every triple of numerals `≤ max` (integer
    /// conditions only). Returns the failing instances.
    pub fn check_laws(&self, max: u64, fuel: u64) -> Result<Vec<String>, ConvError> {
        let n = C::numeral;
        let mut failures = Vec::new();
        for p in 0..=max {
            if !conv_check(&self.add(self.zero.clone(), n(p)), &n(p), fuel)? {
                failures.push(format!("0+{p} ≇ {p}"));
            }
            for q in 0..=max {
                if !conv_check(&self.add(n(p), n(q)), &self.add(n(q), n(p)), fuel)? {
                    failures.push(format!("{p}+{q} ≇ {q}+{p}"));
                }
                for r in 0..=max {
                    let lhs = self.add(n(p), self.add(n(q), n(r)));
                    let rhs = self.add(self.add(n(p), n(q)), n(r));
                    if !conv_check(&lhs, &rhs, fuel)? {
                        failures.push(format!("{p}+({q}+{r}) ≇ ({p}+{q})+{r}"));
                    }
                }
            }
        }
        Ok(failures)
    }
}

/// Parses a condition of the structure's kind; every free identifier is taken
/// to be a condition variable.
pub fn parse_condition(fs: &ForcingStructure, src: &str) -> Result<C, ConditionError> {
    let mut env = KindEnv::new();
    for word in src.split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\'')) {
        let starts_alpha = word.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_');
        if starts_alpha && !crate::constructor::KEYWORDS.contains(&word) {
            env.insert(word.to_string(), fs.condition_kind.clone());
        }
    }
    let c = parse_constructor(src, &env)?;
    let k = c.kind_check(&env)?;
    if k != fs.condition_kind {
        return Err(ConditionError::WrongKind {
            expected: fs.condition_kind.clone(),
            found: k,
        });
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ConditionError {
    #[error(transparent)]
    Parse(#[from] crate::term::ParseError),
    #[error(transparent)]
    Kind(#[from] KindError),
    #[error("a condition has kind {expected}, not {found}")]
    WrongKind { expected: Kind, found: Kind },
}

// ---------------------------------------------------------------------------
// MAL formulas.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MalFormula {
    Var(String),
    /// `X⊥`
    VarNeg(String),
    Tensor(Box<MalFormula>, Box<MalFormula>),
    Parr(Box<MalFormula>, Box<MalFormula>),
    Down(Box<MalFormula>),
    Up(Box<MalFormula>),
}

#[derive(Debug, Error, PartialEq)]
pub enum MalError {
    #[error(transparent)]
    Parse(#[from] crate::term::ParseError),
    #[error("{0} is not a MAL formula")]
    NotMal(String),
}

use MalFormula as M;

impl MalFormula {
    pub fn var(x: &str) -> Self {
        M::Var(x.to_string())
    }

    pub fn var_neg(x: &str) -> Self {
        M::VarNeg(x.to_string())
    }

    pub fn tensor(a: M, b: M) -> Self {
        M::Tensor(Box::new(a), Box::new(b))
    }

    pub fn parr(a: M, b: M) -> Self {
        M::Parr(Box::new(a), Box::new(b))
    }

    pub fn down(a: M) -> Self {
        M::Down(Box::new(a))
    }

    pub fn up(a: M) -> Self {
        M::Up(Box::new(a))
    }

    pub fn polarity(&self) -> Polarity {
        match self {
            M::Var(_) | M::Tensor(..) | M::Down(_) => Polarity::Positive,
            M::VarNeg(_) | M::Parr(..) | M::Up(_) => Polarity::Negative,
        }
    }

    pub fn dual(&self) -> M {
        match self {
            M::Var(x) => M::VarNeg(x.clone()),
            M::VarNeg(x) => M::Var(x.clone()),
            M::Tensor(a, b) => M::parr(a.dual(), b.dual()),
            M::Parr(a, b) => M::tensor(a.dual(), b.dual()),
            M::Down(a) => M::up(a.dual()),
            M::Up(a) => M::down(a.dual()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            M::Var(_) | M::VarNeg(_) => 1,
            M::Tensor(a, b) | M::Parr(a, b) => 1 + a.size() + b.size(),
            M::Down(a) | M::Up(a) => 1 + a.size(),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            M::Var(x) | M::VarNeg(x) => {
                out.insert(x.clone());
            }
            M::Tensor(a, b) | M::Parr(a, b) => {
                a.collect(out);
                b.collect(out);
            }
            M::Down(a) | M::Up(a) => a.collect(out),
        }
    }

    /// The formula as a constructor, variables at `o⁺`.
    pub fn to_constructor(&self) -> C {
        match self {
            M::Var(x) => C::var(x.clone(), Kind::OPos),
            M::VarNeg(x) => C::var_neg(x.clone(), Kind::OPos),
            M::Tensor(a, b) => C::tensor(a.to_constructor(), b.to_constructor()),
            M::Parr(a, b) => C::parr(a.to_constructor(), b.to_constructor()),
            M::Down(a) => C::down(a.to_constructor()),
            M::Up(a) => C::up(a.to_constructor()),
        }
    }

    pub fn from_constructor(c: &C) -> Result<M, MalError> {
        Ok(match c {
            C::Var(x, Kind::OPos) => M::Var(x.clone()),
            C::VarNeg(x, Kind::OPos) => M::VarNeg(x.clone()),
            C::Tensor(a, b) => M::tensor(Self::from_constructor(a)?, Self::from_constructor(b)?),
            C::Parr(a, b) => M::parr(Self::from_constructor(a)?, Self::from_constructor(b)?),
            C::Down(a) => M::down(Self::from_constructor(a)?),
            C::Up(a) => M::up(Self::from_constructor(a)?),
            _ => return Err(MalError::NotMal(c.to_string())),
        })
    }

    /// Constructor syntax with every identifier a variable of kind `o⁺`:
    /// `X * dn (~Y | Z)`.
    pub fn parse(src: &str) -> Result<M, MalError> {
        let env: KindEnv = src
            .split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\''))
            .filter(|w| w.starts_with(|c: char| c.is_alphabetic()))
            .filter(|w| !matches!(*w, "dn" | "up"))
            .map(|w| (w.to_string(), Kind::OPos))
            .collect();
        Self::from_constructor(&parse_constructor(src, &env)?)
    }
}

impl fmt::Display for MalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_constructor())
    }
}

// ---------------------------------------------------------------------------
// Translation.

/// Translates formulas over a fixed structure; bound condition variables are
/// numbered apart from every MAL variable and structure name.
pub struct Translator<'a> {
    fs: &'a ForcingStructure,
    avoid: BTreeSet<String>,
}

impl<'a> Translator<'a> {
    pub fn new(fs: &'a ForcingStructure) -> Self {
        let mut avoid = fs.predicate.free_vars();
        avoid.extend(fs.plus.free_vars());
        Translator { fs, avoid }
    }

    /// Keeps fresh names away from these as well.
    pub fn avoiding(mut self, names: impl IntoIterator<Item = String>) -> Self {
        self.avoid.extend(names);
        self
    }

    fn fresh(&mut self, base: &str) -> String {
        let x = fresh_name(base, &self.avoid);
        self.avoid.insert(x.clone());
        x
    }

    fn kappa(&self) -> Kind {
        self.fs.condition_kind.clone()
    }

    /// The constructor variable `X^{κ→o⁺}` standing for `X`.
    pub fn atom(&self, x: &str) -> C {
        C::var(x.to_string(), Kind::arrow(self.kappa(), Kind::OPos))
    }

    /// `Z̄ ≡ λr.∀r'. Z(r') ⊸ C[r+r']`.
    pub fn orthogonal(&mut self, z: &C) -> C {
        self.avoid.extend(z.free_vars());
        let r = self.fresh("r");
        let r2 = self.fresh("r");
        let k = self.kappa();
        let var = |x: &String| C::var(x.clone(), k.clone());
        let body = C::lolli(
            C::app(z.clone(), var(&r2)),
            self.fs.holds(self.fs.add(var(&r), var(&r2))),
        );
        C::lam(r, k.clone(), C::forall(r2, k.clone(), body))
    }

    /// `λr.∃p₁.∃p₂.⟨r = p₁+p₂⟩(A(p₁) ⊗ B(p₂))` for predicates `A`, `B`.
    fn split(&mut self, a: C, b: C) -> C {
        let r = self.fresh("r");
        let p1 = self.fresh("p");
        let p2 = self.fresh("p");
        let k = self.kappa();
        let var = |x: &String| C::var(x.clone(), k.clone());
        let body = C::eq_guard(
            var(&r),
            self.fs.add(var(&p1), var(&p2)),
            C::tensor(C::app(a, var(&p1)), C::app(b, var(&p2))),
        );
        C::lam(r, k.clone(), C::exists(p1, k.clone(), C::exists(p2, k.clone(), body)))
    }

    /// `A*`, of kind `κ → o^{polarity of A}`.
    pub fn translate(&mut self, a: &MalFormula) -> C {
        self.avoid.extend(a.vars());
        match a {
            M::Var(x) => self.atom(x),
            M::VarNeg(x) => {
                let z = self.atom(x);
                self.orthogonal(&z)
            }
            M::Tensor(a, b) => {
                let (ta, tb) = (self.translate(a), self.translate(b));
                self.split(ta, tb)
            }
            M::Parr(a, b) => {
                let (ta, tb) = (self.translate(&a.dual()), self.translate(&b.dual()));
                let z = self.split(ta, tb);
                self.orthogonal(&z)
            }
            M::Down(a) => {
                let ta = self.translate(a);
                let r = self.fresh("r");
                let k = self.kappa();
                C::lam(r.clone(), k.clone(), C::down(C::app(ta, C::var(r, k))))
            }
            M::Up(a) => {
                let ta = self.translate(&a.dual());
                let r = self.fresh("r");
                let k = self.kappa();
                let z = C::lam(r.clone(), k.clone(), C::down(C::app(ta, C::var(r, k))));
                self.orthogonal(&z)
            }
        }
    }

    /// `p ⊩ A`: `Z̄̄(P*)(p)` for positive `A`, `N*(p)` for negative.
    pub fn force(&mut self, p: &C, a: &MalFormula) -> C {
        self.avoid.extend(p.free_vars());
        let t = self.translate(a);
        match a.polarity() {
            Polarity::Negative => C::app(t, p.clone()),
            Polarity::Positive => {
                let o = self.orthogonal(&t);
                C::app(self.orthogonal(&o), p.clone())
            }
        }
    }
}

pub fn forcing_orthogonal(fs: &ForcingStructure, z: &C) -> C {
    Translator::new(fs).orthogonal(z)
}

pub fn translate(fs: &ForcingStructure, a: &MalFormula) -> C {
    Translator::new(fs).translate(a)
}

pub fn force(fs: &ForcingStructure, p: &C, a: &MalFormula) -> C {
    Translator::new(fs).force(p, a)
}

/// `N*(p) ≅ \overline{(N⊥)*}(p)` for negative `N`.
pub fn check_posforcing(fs: &ForcingStructure, n: &MalFormula, p: &C, fuel: u64) -> Result<bool, ConvError> {
    let mut tr = Translator::new(fs).avoiding(p.free_vars());
    let lhs = C::app(tr.translate(n), p.clone());
    let dual = tr.translate(&n.dual());
    let rhs = C::app(tr.orthogonal(&dual), p.clone());
    conv_check(&lhs, &rhs, fuel)
}

// ---------------------------------------------------------------------------
// The countdown machine.

/// `⟨t⊖ | (u, K)⟩`. Both orientations of `{t, u}` denote the same command, so
/// the marked side is stored as the negative one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcingCommand {
    pub marked: Term,
    pub partner: Term,
    pub counter: Term,
}

#[derive(Debug, Error, PartialEq)]
pub enum ForcingError {
    #[error(transparent)]
    Term(#[from] TermError),
}

impl ForcingCommand {
    /// Requires `t` and `u` of opposite polarities.
    pub fn new(t: Term, u: Term, counter: Term) -> Result<Self, ForcingError> {
        let c = Command::new(t, u)?;
        Ok(Self::lift(&c, counter))
    }

    /// `⟨t⁺|u⁻⟩^⊖{K} = ⟨u⁻⊖ | (t⁺, K)⟩`.
    pub fn lift(c: &Command, counter: Term) -> Self {
        ForcingCommand {
            marked: c.neg().clone(),
            partner: c.pos().clone(),
            counter,
        }
    }

    pub fn with_counter(c: &Command, n: u64) -> Self {
        Self::lift(c, Term::Nat(n))
    }

    /// The underlying command.
    pub fn command(&self) -> Command {
        Command::new(self.partner.clone(), self.marked.clone()).expect("stored with opposite polarities")
    }

    /// `(u, K)`, the positive side of the forcing command.
    pub fn argument(&self) -> Term {
        Term::Pair(Box::new(self.partner.clone()), Box::new(self.counter.clone()))
    }

    pub fn counter_value(&self) -> Option<u64> {
        match self.counter {
            Term::Nat(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for ForcingCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}@ | ({}, {})>", self.marked, self.partner, self.counter)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum CountdownStep {
    Next(StepKind, ForcingCommand),
    /// A β-like redex met the counter at 0.
    Diverge,
    /// No rule applies.
    Stuck,
}

fn next(kind: StepKind, c: &Command, counter: Term) -> CountdownStep {
    CountdownStep::Next(kind, ForcingCommand::lift(c, counter))
}

/// One `→•` step. μ-like rules keep the counter; the ⅋ and ↑ rules consume
/// one unit, and diverge at 0. Nothing fires unless the counter is a numeral.
pub fn countdown_step(fc: &ForcingCommand) -> CountdownStep {
    let Some(n) = fc.counter_value() else {
        return CountdownStep::Stuck;
    };
    let (t, u) = (&fc.marked, &fc.partner);
    let subst1 = |v, x: &Term, c| Substitution::single(v, x.clone()).apply_command(c);
    match (t, u) {
        (_, Term::Mu(alpha, c)) => next(StepKind::Mu, &subst1(alpha.clone(), t, c), fc.counter.clone()),
        (Term::Mu(x, c), v) => next(StepKind::Mu, &subst1(x.clone(), v, c), fc.counter.clone()),
        (Term::MuPair(k1, k2, c), Term::Pair(v1, v2))
            if k1.polarity == v1.polarity() && k2.polarity == v2.polarity() =>
        {
            if n == 0 {
                return CountdownStep::Diverge;
            }
            let s = Substitution::new()
                .with(k1.clone(), (**v1).clone())
                .with(k2.clone(), (**v2).clone());
            next(StepKind::Beta, &s.apply_command(c), Term::Nat(n - 1))
        }
        (Term::MuBox(k, c), Term::Boxed(v)) if k.polarity == v.polarity() => {
            if n == 0 {
                return CountdownStep::Diverge;
            }
            next(StepKind::Beta, &subst1(k.clone(), v, c), Term::Nat(n - 1))
        }
        _ => CountdownStep::Stuck,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountdownVerdict {
    Normalizes,
    Diverges,
    FuelOut,
}

impl fmt::Display for CountdownVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountdownVerdict::Normalizes => "normalizes",
            CountdownVerdict::Diverges => "diverges",
            CountdownVerdict::FuelOut => "fuel-out",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountdownRun {
    pub verdict: CountdownVerdict,
    pub counts: StepCounts,
    pub start: ForcingCommand,
    pub steps: Vec<(StepKind, ForcingCommand)>,
}

impl CountdownRun {
    pub fn last(&self) -> &ForcingCommand {
        self.steps.last().map_or(&self.start, |s| &s.1)
    }

    /// The reduction trace text with a counter column.
    pub fn to_text(&self) -> String {
        let line = |i: usize, tag: &str, fc: &ForcingCommand| {
            format!("{i}\t{tag}\t{}\t{}\n", fc.counter, fc.command())
        };
        let mut out = line(0, "-", &self.start);
        for (i, (k, fc)) in self.steps.iter().enumerate() {
            out.push_str(&line(i + 1, k.tag(), fc));
        }
        out.push_str(&format!(
            "# outcome={} mu={} beta={} counter={}\n",
            self.verdict,
            self.counts.mu,
            self.counts.beta,
            self.last().counter
        ));
        out
    }
}

/// Runs `c^⊖{n̄}` for at most `fuel` steps.
pub fn countdown_run(c: &Command, n: u64, fuel: u64) -> CountdownRun {
    let start = ForcingCommand::with_counter(c, n);
    let mut cur = start.clone();
    let mut steps = Vec::new();
    let mut counts = StepCounts::default();
    let verdict = loop {
        match countdown_step(&cur) {
            CountdownStep::Stuck => break CountdownVerdict::Normalizes,
            CountdownStep::Diverge => break CountdownVerdict::Diverges,
            CountdownStep::Next(..) if steps.len() as u64 >= fuel => break CountdownVerdict::FuelOut,
            CountdownStep::Next(k, fc) => {
                counts.bump(k);
                steps.push((k, fc.clone()));
                cur = fc;
            }
        }
    };
    CountdownRun { verdict, counts, start, steps }
}

#[cfg(test)]
mod tests;
