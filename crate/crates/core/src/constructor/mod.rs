//! Kinds and type constructors of MALω, with involutive negation and a
//! normalization-based decision procedure for convertibility.
//!
//! Variables carry their kind. `x⊥` is a first-class atom (`VarNeg`), and so is
//! the dual recursor; every other constructor negates structurally.

mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use syntax::{parse_constructor, parse_kind, KindEnv};
pub(crate) use syntax::KEYWORDS;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Iota,
    OPos,
    ONeg,
    Arrow(Box<Kind>, Box<Kind>),
}

impl Kind {
    pub fn arrow(a: Kind, b: Kind) -> Kind {
        Kind::Arrow(Box::new(a), Box::new(b))
    }

    /// `ι⊥ = ι`, `o⁺⊥ = o⁻`, `(σ→τ)⊥ = σ→τ⊥`.
    pub fn dual(&self) -> Kind {
        match self {
            Kind::Iota => Kind::Iota,
            Kind::OPos => Kind::ONeg,
            Kind::ONeg => Kind::OPos,
            Kind::Arrow(a, b) => Kind::arrow((**a).clone(), b.dual()),
        }
    }

    pub fn is_formula(&self) -> bool {
        matches!(self, Kind::OPos | Kind::ONeg)
    }

    /// `τ → (ι → τ → τ) → ι → τ`.
    pub fn rec_kind(tau: &Kind) -> Kind {
        let step = Kind::arrow(Kind::Iota, Kind::arrow(tau.clone(), tau.clone()));
        Kind::arrow(
            tau.clone(),
            Kind::arrow(step, Kind::arrow(Kind::Iota, tau.clone())),
        )
    }

    /// The dual recursor returns `τ⊥`, so that `T : σ` implies `T⊥ : σ⊥`.
    pub fn rec_neg_kind(tau: &Kind) -> Kind {
        Kind::rec_kind(tau).dual()
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Iota => write!(f, "i"),
            Kind::OPos => write!(f, "o+"),
            Kind::ONeg => write!(f, "o-"),
            Kind::Arrow(a, b) => match **a {
                Kind::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Constructor {
    Var(String, Kind),
    /// `(x^τ)⊥`, of kind `τ⊥`.
    VarNeg(String, Kind),
    Lam(String, Kind, Box<Constructor>),
    App(Box<Constructor>, Box<Constructor>),
    Zero,
    Succ,
    Rec(Kind),
    RecNeg(Kind),
    Tensor(Box<Constructor>, Box<Constructor>),
    Parr(Box<Constructor>, Box<Constructor>),
    Exists(String, Kind, Box<Constructor>),
    Forall(String, Kind, Box<Constructor>),
    Down(Box<Constructor>),
    Up(Box<Constructor>),
    Bang(Box<Constructor>),
    Quest(Box<Constructor>),
    /// `⟨T = U⟩A`.
    EqGuard(Box<Constructor>, Box<Constructor>, Box<Constructor>),
}

use Constructor as C;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KindError {
    #[error("variable {name} used at kind {used} but declared at kind {declared}")]
    VariableKind {
        name: String,
        used: Kind,
        declared: Kind,
    },
    #[error("in {term}: expected kind {expected}, found {found}")]
    Mismatch {
        term: String,
        expected: String,
        found: Kind,
    },
    #[error("in {term}: {function} of kind {kind} is not a function")]
    NotAFunction {
        term: String,
        function: String,
        kind: Kind,
    },
    #[error("in {0}: both sides of an equation must have the same kind")]
    EquationKinds(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConvError {
    #[error("convertibility unknown: normalization ran out of fuel")]
    FuelExhausted,
}

impl Constructor {
    pub fn var(name: impl Into<String>, kind: Kind) -> C {
        C::Var(name.into(), kind)
    }

    pub fn var_neg(name: impl Into<String>, kind: Kind) -> C {
        C::VarNeg(name.into(), kind)
    }

    pub fn lam(name: impl Into<String>, kind: Kind, body: C) -> C {
        C::Lam(name.into(), kind, Box::new(body))
    }

    pub fn app(f: C, a: C) -> C {
        C::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: C, args: impl IntoIterator<Item = C>) -> C {
        args.into_iter().fold(f, C::app)
    }

    pub fn tensor(a: C, b: C) -> C {
        C::Tensor(Box::new(a), Box::new(b))
    }

    pub fn parr(a: C, b: C) -> C {
        C::Parr(Box::new(a), Box::new(b))
    }

    pub fn down(a: C) -> C {
        C::Down(Box::new(a))
    }

    pub fn up(a: C) -> C {
        C::Up(Box::new(a))
    }

    pub fn bang(a: C) -> C {
        C::Bang(Box::new(a))
    }

    pub fn quest(a: C) -> C {
        C::Quest(Box::new(a))
    }

    pub fn exists(name: impl Into<String>, kind: Kind, body: C) -> C {
        C::Exists(name.into(), kind, Box::new(body))
    }

    pub fn forall(name: impl Into<String>, kind: Kind, body: C) -> C {
        C::Forall(name.into(), kind, Box::new(body))
    }

    pub fn eq_guard(t: C, u: C, a: C) -> C {
        C::EqGuard(Box::new(t), Box::new(u), Box::new(a))
    }

    /// `sⁿ 0`.
    pub fn numeral(n: u64) -> C {
        (0..n).fold(C::Zero, |acc, _| C::app(C::Succ, acc))
    }

    /// `N⊸M ≡ N⊥ ⅋ M`.
    pub fn lolli(a: C, b: C) -> C {
        C::parr(a.negate(), b)
    }

    /// The numeral value of `sⁿ 0`, if that is what this is.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut n = 0;
        let mut cur = self;
        loop {
            match cur {
                C::Zero => return Some(n),
                C::App(f, a) if **f == C::Succ => {
                    n += 1;
                    cur = a;
                }
                _ => return None,
            }
        }
    }

    /// Involutive negation.
    pub fn negate(&self) -> C {
        match self {
            C::Var(x, k) => C::VarNeg(x.clone(), k.clone()),
            C::VarNeg(x, k) => C::Var(x.clone(), k.clone()),
            C::Lam(x, k, t) => C::lam(x.clone(), k.clone(), t.negate()),
            C::App(t, u) => C::app(t.negate(), (**u).clone()),
            C::Zero => C::Zero,
            C::Succ => C::Succ,
            C::Rec(k) => C::RecNeg(k.clone()),
            C::RecNeg(k) => C::Rec(k.clone()),
            C::Tensor(a, b) => C::parr(a.negate(), b.negate()),
            C::Parr(a, b) => C::tensor(a.negate(), b.negate()),
            C::Exists(x, k, a) => C::forall(x.clone(), k.clone(), a.negate()),
            C::Forall(x, k, a) => C::exists(x.clone(), k.clone(), a.negate()),
            C::Down(a) => C::up(a.negate()),
            C::Up(a) => C::down(a.negate()),
            C::Bang(a) => C::quest(a.negate()),
            C::Quest(a) => C::bang(a.negate()),
            C::EqGuard(t, u, a) => C::eq_guard((**t).clone(), (**u).clone(), a.negate()),
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            C::Var(..) | C::VarNeg(..) | C::Zero | C::Succ | C::Rec(_) | C::RecNeg(_) => 1,
            C::Lam(_, _, t) | C::Exists(_, _, t) | C::Forall(_, _, t) => 1 + t.size(),
            C::Down(t) | C::Up(t) | C::Bang(t) | C::Quest(t) => 1 + t.size(),
            C::App(a, b) | C::Tensor(a, b) | C::Parr(a, b) => 1 + a.size() + b.size(),
            C::EqGuard(t, u, a) => 1 + t.size() + u.size() + a.size(),
        }
    }

    /// Names of free variables (occurring plainly or negated).
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            C::Var(x, _) | C::VarNeg(x, _) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            C::Lam(x, _, t) | C::Exists(x, _, t) | C::Forall(x, _, t) => {
                bound.push(x.clone());
                t.collect_free(bound, out);
                bound.pop();
            }
            C::App(a, b) | C::Tensor(a, b) | C::Parr(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            C::Down(a) | C::Up(a) | C::Bang(a) | C::Quest(a) => a.collect_free(bound, out),
            C::EqGuard(t, u, a) => {
                t.collect_free(bound, out);
                u.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            C::Zero | C::Succ | C::Rec(_) | C::RecNeg(_) => {}
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            C::Var(x, _) | C::VarNeg(x, _) => {
                out.insert(x.clone());
            }
            C::Lam(x, _, t) | C::Exists(x, _, t) | C::Forall(x, _, t) => {
                out.insert(x.clone());
                t.collect_names(out);
            }
            C::App(a, b) | C::Tensor(a, b) | C::Parr(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            C::Down(a) | C::Up(a) | C::Bang(a) | C::Quest(a) => a.collect_names(out),
            C::EqGuard(t, u, a) => {
                t.collect_names(out);
                u.collect_names(out);
                a.collect_names(out);
            }
            C::Zero | C::Succ | C::Rec(_) | C::RecNeg(_) => {}
        }
    }

    /// `T{x := U}`: replaces `x` by `U` and `x⊥` by `U⊥`, avoiding capture.
    pub fn subst(&self, x: &str, u: &C) -> C {
        let mut map = BTreeMap::new();
        map.insert(x.to_string(), u.clone());
        self.subst_many(&map)
    }

    /// Simultaneous substitution.
    pub fn subst_many(&self, map: &BTreeMap<String, C>) -> C {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            C::Var(x, _) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            C::VarNeg(x, _) => map.get(x).map_or_else(|| self.clone(), |u| u.negate()),
            C::Lam(x, k, t) => {
                let (x, t) = subst_binder(x, k, t, map);
                C::Lam(x, k.clone(), Box::new(t))
            }
            C::Exists(x, k, t) => {
                let (x, t) = subst_binder(x, k, t, map);
                C::Exists(x, k.clone(), Box::new(t))
            }
            C::Forall(x, k, t) => {
                let (x, t) = subst_binder(x, k, t, map);
                C::Forall(x, k.clone(), Box::new(t))
            }
            C::App(a, b) => C::app(a.subst_many(map), b.subst_many(map)),
            C::Tensor(a, b) => C::tensor(a.subst_many(map), b.subst_many(map)),
            C::Parr(a, b) => C::parr(a.subst_many(map), b.subst_many(map)),
            C::Down(a) => C::down(a.subst_many(map)),
            C::Up(a) => C::up(a.subst_many(map)),
            C::Bang(a) => C::bang(a.subst_many(map)),
            C::Quest(a) => C::quest(a.subst_many(map)),
            C::EqGuard(t, u, a) => {
                C::eq_guard(t.subst_many(map), u.subst_many(map), a.subst_many(map))
            }
            C::Zero | C::Succ | C::Rec(_) | C::RecNeg(_) => self.clone(),
        }
    }

    /// α-equivalence (binder kinds must agree).
    pub fn alpha_eq(&self, other: &C) -> bool {
        alpha(self, other, &mut Vec::new())
    }

    /// Kinding. Free variables found in `env` must agree with it; other
    /// free variables are taken at their annotated kind.
    pub fn kind_check(&self, env: &BTreeMap<String, Kind>) -> Result<Kind, KindError> {
        let mut scope: Vec<(String, Kind)> = Vec::new();
        kind_of(self, env, &mut scope)
    }

    /// Kind under an empty environment.
    pub fn kind(&self) -> Result<Kind, KindError> {
        self.kind_check(&BTreeMap::new())
    }
}

fn subst_binder(x: &str, kind: &Kind, body: &C, map: &BTreeMap<String, C>) -> (String, C) {
    let mut inner = map.clone();
    inner.remove(x);
    if inner.is_empty() {
        return (x.to_string(), body.clone());
    }
    let mut clash = BTreeSet::new();
    for u in inner.values() {
        clash.extend(u.free_vars());
    }
    if !clash.contains(x) {
        return (x.to_string(), body.subst_many(&inner));
    }
    let mut avoid = clash;
    body.collect_names(&mut avoid);
    for k in inner.keys() {
        avoid.insert(k.clone());
    }
    let fresh = crate::term::fresh_name(x, &avoid);
    let renamed = body.subst(x, &C::Var(fresh.clone(), kind.clone()));
    (fresh, renamed.subst_many(&inner))
}

fn alpha(a: &C, b: &C, scope: &mut Vec<(String, String)>) -> bool {
    let var_eq = |x: &String, y: &String, scope: &Vec<(String, String)>| {
        let i = scope.iter().rposition(|(l, _)| l == x);
        let j = scope.iter().rposition(|(_, r)| r == y);
        match (i, j) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        }
    };
    match (a, b) {
        (C::Var(x, k), C::Var(y, l)) | (C::VarNeg(x, k), C::VarNeg(y, l)) => {
            k == l && var_eq(x, y, scope)
        }
        (C::Lam(x, k, t), C::Lam(y, l, u))
        | (C::Exists(x, k, t), C::Exists(y, l, u))
        | (C::Forall(x, k, t), C::Forall(y, l, u)) => {
            if k != l {
                return false;
            }
            scope.push((x.clone(), y.clone()));
            let r = alpha(t, u, scope);
            scope.pop();
            r
        }
        (C::App(a1, a2), C::App(b1, b2))
        | (C::Tensor(a1, a2), C::Tensor(b1, b2))
        | (C::Parr(a1, a2), C::Parr(b1, b2)) => alpha(a1, b1, scope) && alpha(a2, b2, scope),
        (C::Down(x), C::Down(y))
        | (C::Up(x), C::Up(y))
        | (C::Bang(x), C::Bang(y))
        | (C::Quest(x), C::Quest(y)) => alpha(x, y, scope),
        (C::EqGuard(t1, u1, a1), C::EqGuard(t2, u2, a2)) => {
            alpha(t1, t2, scope) && alpha(u1, u2, scope) && alpha(a1, a2, scope)
        }
        (C::Zero, C::Zero) | (C::Succ, C::Succ) => true,
        (C::Rec(k), C::Rec(l)) | (C::RecNeg(k), C::RecNeg(l)) => k == l,
        _ => false,
    }
}

fn expect_formula(t: &C, k: Kind) -> Result<Kind, KindError> {
    if k.is_formula() {
        Ok(k)
    } else {
        Err(KindError::Mismatch {
            term: t.to_string(),
            expected: "o+ or o-".into(),
            found: k,
        })
    }
}

fn kind_of(
    t: &C,
    env: &BTreeMap<String, Kind>,
    scope: &mut Vec<(String, Kind)>,
) -> Result<Kind, KindError> {
    let declared = |x: &String, scope: &Vec<(String, Kind)>| {
        scope
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, k)| k.clone())
            .or_else(|| env.get(x).cloned())
    };
    match t {
        C::Var(x, k) | C::VarNeg(x, k) => {
            if let Some(d) = declared(x, scope) {
                if &d != k {
                    return Err(KindError::VariableKind {
                        name: x.clone(),
                        used: k.clone(),
                        declared: d,
                    });
                }
            }
            Ok(if matches!(t, C::Var(..)) { k.clone() } else { k.dual() })
        }
        C::Lam(x, k, body) => {
            scope.push((x.clone(), k.clone()));
            let r = kind_of(body, env, scope);
            scope.pop();
            Ok(Kind::arrow(k.clone(), r?))
        }
        C::App(f, a) => {
            let kf = kind_of(f, env, scope)?;
            let ka = kind_of(a, env, scope)?;
            match kf {
                Kind::Arrow(dom, cod) => {
                    if *dom == ka {
                        Ok(*cod)
                    } else {
                        Err(KindError::Mismatch {
                            term: t.to_string(),
                            expected: dom.to_string(),
                            found: ka,
                        })
                    }
                }
                other => Err(KindError::NotAFunction {
                    term: t.to_string(),
                    function: f.to_string(),
                    kind: other,
                }),
            }
        }
        C::Zero => Ok(Kind::Iota),
        C::Succ => Ok(Kind::arrow(Kind::Iota, Kind::Iota)),
        C::Rec(k) => Ok(Kind::rec_kind(k)),
        C::RecNeg(k) => Ok(Kind::rec_neg_kind(k)),
        C::Tensor(a, b) | C::Parr(a, b) => {
            let ka = kind_of(a, env, scope)?;
            expect_formula(a, ka)?;
            let kb = kind_of(b, env, scope)?;
            expect_formula(b, kb)?;
            Ok(if matches!(t, C::Tensor(..)) { Kind::OPos } else { Kind::ONeg })
        }
        C::Exists(x, k, a) | C::Forall(x, k, a) => {
            scope.push((x.clone(), k.clone()));
            let r = kind_of(a, env, scope);
            scope.pop();
            expect_formula(a, r?)
        }
        C::Down(a) | C::Bang(a) => {
            let ka = kind_of(a, env, scope)?;
            expect_formula(a, ka)?;
            Ok(Kind::OPos)
        }
        C::Up(a) | C::Quest(a) => {
            let ka = kind_of(a, env, scope)?;
            expect_formula(a, ka)?;
            Ok(Kind::ONeg)
        }
        C::EqGuard(l, r, a) => {
            let kl = kind_of(l, env, scope)?;
            let kr = kind_of(r, env, scope)?;
            if kl != kr {
                return Err(KindError::EquationKinds(t.to_string()));
            }
            let ka = kind_of(a, env, scope)?;
            expect_formula(a, ka)
        }
    }
}

/// Default fuel for normalization (β and recursor unfoldings).
pub const DEFAULT_CONV_FUEL: u64 = 100_000;

struct Normalizer {
    fuel: u64,
}

impl Normalizer {
    fn tick(&mut self) -> Result<(), ConvError> {
        if self.fuel == 0 {
            return Err(ConvError::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn nf(&mut self, t: &C) -> Result<C, ConvError> {
        match t {
            C::App(..) => self.nf_app(t),
            C::Lam(x, k, body) => {
                let b = self.nf(body)?;
                // η: λx.T x → T when x ∉ FV(T)
                if let C::App(f, a) = &b {
                    if matches!(&**a, C::Var(y, _) if y == x) && !f.free_vars().contains(x) {
                        return Ok((**f).clone());
                    }
                }
                Ok(C::lam(x.clone(), k.clone(), b))
            }
            C::Tensor(a, b) => Ok(C::tensor(self.nf(a)?, self.nf(b)?)),
            C::Parr(a, b) => Ok(C::parr(self.nf(a)?, self.nf(b)?)),
            C::Exists(x, k, a) => Ok(C::exists(x.clone(), k.clone(), self.nf(a)?)),
            C::Forall(x, k, a) => Ok(C::forall(x.clone(), k.clone(), self.nf(a)?)),
            C::Down(a) => Ok(C::down(self.nf(a)?)),
            C::Up(a) => Ok(C::up(self.nf(a)?)),
            C::Bang(a) => Ok(C::bang(self.nf(a)?)),
            C::Quest(a) => Ok(C::quest(self.nf(a)?)),
            C::EqGuard(l, r, a) => Ok(C::eq_guard(self.nf(l)?, self.nf(r)?, self.nf(a)?)),
            C::Var(..) | C::VarNeg(..) | C::Zero | C::Succ | C::Rec(_) | C::RecNeg(_) => {
                Ok(t.clone())
            }
        }
    }

    fn nf_app(&mut self, t: &C) -> Result<C, ConvError> {
        let mut args = Vec::new();
        let mut head = t;
        while let C::App(f, a) = head {
            args.push((**a).clone());
            head = f;
        }
        args.reverse();
        let h = self.nf(head)?;
        if let C::App(..) = h {
            // η exposed an application spine: re-collect it
            return self.nf(&C::apps(h, args));
        }
        match &h {
            C::Lam(x, _, body) => {
                self.tick()?;
                let mut rest = args.into_iter();
                let first = rest.next().expect("application has an argument");
                let reduced = body.subst(x, &first);
                self.nf(&C::apps(reduced, rest))
            }
            C::Rec(_) | C::RecNeg(_) if args.len() >= 3 => {
                let neg = matches!(h, C::RecNeg(_));
                let tau = match &h {
                    C::Rec(k) | C::RecNeg(k) => k.clone(),
                    _ => unreachable!(),
                };
                let n = self.nf(&args[2])?;
                let base = &args[0];
                let stepf = &args[1];
                let rest = args[3..].to_vec();
                match &n {
                    C::Zero => {
                        self.tick()?;
                        let r = if neg { base.negate() } else { base.clone() };
                        self.nf(&C::apps(r, rest))
                    }
                    C::App(f, m) if **f == C::Succ => {
                        self.tick()?;
                        let inner = C::apps(C::Rec(tau), [base.clone(), stepf.clone(), (**m).clone()]);
                        let s = if neg { stepf.negate() } else { stepf.clone() };
                        let r = C::apps(s, [(**m).clone(), inner]);
                        self.nf(&C::apps(r, rest))
                    }
                    _ => {
                        let mut out = vec![self.nf(base)?, self.nf(stepf)?, n.clone()];
                        for a in rest {
                            out.push(self.nf(&a)?);
                        }
                        Ok(C::apps(h.clone(), out))
                    }
                }
            }
            _ => {
                let mut out = Vec::with_capacity(args.len());
                for a in &args {
                    out.push(self.nf(a)?);
                }
                Ok(C::apps(h.clone(), out))
            }
        }
    }
}

/// Normal form under β, recursor unfolding on numerals, and η.
pub fn normalize(t: &C, fuel: u64) -> Result<C, ConvError> {
    Normalizer { fuel }.nf(t)
}

/// Decides `T ≅ U` by comparing normal forms up to α. `Err` means the fuel was
/// not enough to decide.
pub fn conv_check(t: &C, u: &C, fuel: u64) -> Result<bool, ConvError> {
    let mut n = Normalizer { fuel };
    let a = n.nf(t)?;
    let b = n.nf(u)?;
    Ok(a.alpha_eq(&b))
}

#[cfg(test)]
mod tests;
