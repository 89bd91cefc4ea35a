//! Seeded random generators shared by the property suites, `selftest` and
//! the acceptance harness.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::constructor::{Constructor as C, Kind};
use crate::forcing::MalFormula;
use crate::lambda::{LambdaTerm, Stack};
use crate::quantity::{NatQuantity, SoftQuantity};
use crate::term::{Command, Polarity, Term, Variable};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Free constructor variables the generators may use.
pub fn constructor_env() -> Vec<(String, Kind)> {
    vec![
        ("X".into(), Kind::OPos),
        ("Y".into(), Kind::ONeg),
        ("n".into(), Kind::Iota),
        ("F".into(), Kind::arrow(Kind::Iota, Kind::OPos)),
    ]
}

struct CtorGen<'a, R: Rng> {
    rng: &'a mut R,
    scope: Vec<(String, Kind)>,
    counter: usize,
}

impl<R: Rng> CtorGen<'_, R> {
    fn fresh(&mut self, base: &str) -> String {
        self.counter += 1;
        format!("{base}{}", self.counter)
    }

    fn vars_of(&self, k: &Kind) -> Vec<C> {
        let mut out = Vec::new();
        for (x, xk) in &self.scope {
            if xk == k {
                out.push(C::var(x.clone(), k.clone()));
            }
            if &xk.dual() == k && xk != k {
                out.push(C::var_neg(x.clone(), xk.clone()));
            }
        }
        out
    }

    fn with<T>(&mut self, x: &str, k: &Kind, f: impl FnOnce(&mut Self) -> T) -> T {
        self.scope.push((x.to_string(), k.clone()));
        let r = f(self);
        self.scope.pop();
        r
    }

    fn formula(&mut self, depth: u32) -> C {
        let k = if self.rng.gen_bool(0.5) { Kind::OPos } else { Kind::ONeg };
        self.gen(&k, depth)
    }

    fn leaf(&mut self, k: &Kind) -> C {
        let vars = self.vars_of(k);
        if !vars.is_empty() && (self.rng.gen_bool(0.7) || !matches!(k, Kind::Iota)) {
            return vars[self.rng.gen_range(0..vars.len())].clone();
        }
        match k {
            Kind::Iota => C::numeral(self.rng.gen_range(0..3)),
            Kind::Arrow(a, b) => {
                let x = self.fresh("v");
                let body = self.with(&x, a, |g| g.leaf(b));
                C::lam(x, (**a).clone(), body)
            }
            _ => unreachable!("formula kinds always have a variable in scope"),
        }
    }

    /// `(λx:σ. body) arg`, a β-redex of kind `k`.
    fn redex(&mut self, k: &Kind, depth: u32) -> C {
        let sigma = if self.rng.gen_bool(0.6) { Kind::Iota } else { Kind::OPos };
        let x = self.fresh("v");
        let body = self.with(&x, &sigma, |g| g.gen(k, depth - 1));
        let arg = self.gen(&sigma, depth - 1);
        C::app(C::lam(x, sigma, body), arg)
    }

    /// `rec_k base step n` (or the dual recursor) at kind `k`.
    fn recursion(&mut self, k: &Kind, depth: u32) -> C {
        let dual = k.is_formula() && self.rng.gen_bool(0.3);
        let tau = if dual { k.dual() } else { k.clone() };
        let base = self.gen(&tau, depth - 1);
        let (y, z) = (self.fresh("y"), self.fresh("z"));
        let step_body = self.with(&y, &Kind::Iota, |g| {
            g.with(&z, &tau, |g| g.gen(&tau, depth - 1))
        });
        let step = C::lam(y, Kind::Iota, C::lam(z, tau.clone(), step_body));
        let n = if self.rng.gen_bool(0.7) {
            C::numeral(self.rng.gen_range(0..4))
        } else {
            self.gen(&Kind::Iota, 1)
        };
        let head = if dual { C::RecNeg(tau) } else { C::Rec(tau) };
        C::apps(head, [base, step, n])
    }

    fn gen(&mut self, k: &Kind, depth: u32) -> C {
        if depth == 0 {
            return self.leaf(k);
        }
        match k {
            Kind::Iota => match self.rng.gen_range(0..6) {
                0 | 1 => self.leaf(k),
                2 => C::app(C::Succ, self.gen(k, depth - 1)),
                3 => self.redex(k, depth),
                4 => self.recursion(k, depth),
                _ => C::numeral(self.rng.gen_range(0..4)),
            },
            Kind::Arrow(a, b) => {
                let x = self.fresh("v");
                let body = self.with(&x, a, |g| g.gen(b, depth - 1));
                C::lam(x, (**a).clone(), body)
            }
            Kind::OPos | Kind::ONeg => {
                let pos = *k == Kind::OPos;
                let pick = self.rng.gen_range(0..9);
                let sub = |g: &mut Self| g.formula(depth - 1);
                match pick {
                    0 => self.leaf(k),
                    1 => {
                        let (a, b) = (sub(self), sub(self));
                        if pos {
                            C::tensor(a, b)
                        } else {
                            C::parr(a, b)
                        }
                    }
                    2 => {
                        let a = sub(self);
                        if pos {
                            C::down(a)
                        } else {
                            C::up(a)
                        }
                    }
                    3 => {
                        let a = sub(self);
                        if pos {
                            C::bang(a)
                        } else {
                            C::quest(a)
                        }
                    }
                    4 => {
                        let x = self.fresh("x");
                        let kx = if self.rng.gen_bool(0.5) { Kind::Iota } else { Kind::OPos };
                        let body = self.with(&x, &kx, |g| g.gen(k, depth - 1));
                        if pos {
                            C::exists(x, kx, body)
                        } else {
                            C::forall(x, kx, body)
                        }
                    }
                    5 => {
                        let l = self.gen(&Kind::Iota, depth - 1);
                        let r = self.gen(&Kind::Iota, depth - 1);
                        C::eq_guard(l, r, self.gen(k, depth - 1))
                    }
                    6 => self.redex(k, depth),
                    7 => self.recursion(k, depth),
                    _ => {
                        // F applied to an integer, or its negation
                        let f = C::var("F", Kind::arrow(Kind::Iota, Kind::OPos));
                        let t = C::app(f, self.gen(&Kind::Iota, depth - 1));
                        if pos {
                            t
                        } else {
                            t.negate()
                        }
                    }
                }
            }
        }
    }
}

/// A well-kinded constructor of kind `k` over [`constructor_env`].
pub fn constructor<R: Rng>(rng: &mut R, k: &Kind, depth: u32) -> C {
    let mut g = CtorGen {
        rng,
        scope: constructor_env(),
        counter: 0,
    };
    g.gen(k, depth)
}

/// A closed constructor of kind `ι` built from numerals, `s`, β-redexes and
/// `rec_ι`.
pub fn closed_integer<R: Rng>(rng: &mut R, depth: u32) -> C {
    let mut g = CtorGen {
        rng,
        scope: Vec::new(),
        counter: 0,
    };
    g.gen_closed_iota(depth)
}

impl<R: Rng> CtorGen<'_, R> {
    fn gen_closed_iota(&mut self, depth: u32) -> C {
        if depth == 0 {
            return self.leaf(&Kind::Iota);
        }
        match self.rng.gen_range(0..5) {
            0 => self.leaf(&Kind::Iota),
            1 => C::app(C::Succ, self.gen_closed_iota(depth - 1)),
            2 => {
                let x = self.fresh("v");
                let body = self.with(&x, &Kind::Iota, |g| g.gen_closed_iota(depth - 1));
                C::app(C::lam(x, Kind::Iota, body), self.gen_closed_iota(depth - 1))
            }
            _ => {
                let base = self.gen_closed_iota(depth - 1);
                let (y, z) = (self.fresh("y"), self.fresh("z"));
                let body = self.with(&y, &Kind::Iota, |g| {
                    g.with(&z, &Kind::Iota, |g| g.gen_closed_iota(depth - 1))
                });
                let step = C::lam(y, Kind::Iota, C::lam(z, Kind::Iota, body));
                let n = C::numeral(self.rng.gen_range(0..4));
                C::apps(C::Rec(Kind::Iota), [base, step, n])
            }
        }
    }
}

struct LamGen<'a, R: Rng> {
    rng: &'a mut R,
    counter: usize,
}

impl<R: Rng> LamGen<'_, R> {
    fn fresh(&mut self) -> String {
        self.counter += 1;
        format!("v{}", self.counter)
    }

    /// An affine term using each of `avail` at most once (used ones are
    /// removed).
    fn term(&mut self, avail: &mut Vec<String>, depth: u32) -> LambdaTerm {
        let pick_var = !avail.is_empty() && (depth == 0 || self.rng.gen_bool(0.3));
        if pick_var {
            let i = self.rng.gen_range(0..avail.len());
            return LambdaTerm::Var(avail.swap_remove(i));
        }
        if depth == 0 || self.rng.gen_bool(0.5) {
            let x = self.fresh();
            avail.push(x.clone());
            let body = self.term(avail, depth.saturating_sub(1));
            avail.retain(|y| y != &x);
            return LambdaTerm::abs(&x, body);
        }
        let f = self.term(avail, depth - 1);
        let a = self.term(avail, depth - 1);
        LambdaTerm::app(f, a)
    }
}

/// A closed affine λ-term.
pub fn affine_lambda<R: Rng>(rng: &mut R, depth: u32) -> LambdaTerm {
    LamGen { rng, counter: 0 }.term(&mut Vec::new(), depth)
}

/// A closed affine redex `(λx.t) u`; with `value_arg` the argument is an
/// abstraction.
pub fn affine_redex<R: Rng>(rng: &mut R, depth: u32, value_arg: bool) -> LambdaTerm {
    let mut g = LamGen { rng, counter: 0 };
    let x = g.fresh();
    let mut avail = vec![x.clone()];
    let body = g.term(&mut avail, depth);
    let arg = loop {
        let a = g.term(&mut Vec::new(), depth);
        if !value_arg || a.is_value() {
            break a;
        }
    };
    LambdaTerm::app(LambdaTerm::abs(&x, body), arg)
}

/// A CBN stack `u1 . … . uk . x` of closed affine terms.
pub fn cbn_stack<R: Rng>(rng: &mut R, depth: u32) -> Stack {
    let k = rng.gen_range(0..3);
    let mut s = Stack::Var("k".into());
    for _ in 0..k {
        let u = affine_lambda(rng, depth);
        s = Stack::Push(u, Box::new(s));
    }
    s
}

/// A MAL formula over `X, Y, Z` of size exactly `size` (≥ 1).
pub fn mal_formula<R: Rng>(rng: &mut R, size: usize) -> MalFormula {
    let atom = |rng: &mut R| {
        let x = ["X", "Y", "Z"][rng.gen_range(0..3)];
        if rng.gen_bool(0.5) {
            MalFormula::var(x)
        } else {
            MalFormula::var_neg(x)
        }
    };
    match size {
        0 | 1 => atom(rng),
        2 => {
            let a = atom(rng);
            if rng.gen_bool(0.5) {
                MalFormula::down(a)
            } else {
                MalFormula::up(a)
            }
        }
        _ => match rng.gen_range(0..4) {
            0 => MalFormula::down(mal_formula(rng, size - 1)),
            1 => MalFormula::up(mal_formula(rng, size - 1)),
            k => {
                let l = rng.gen_range(1..size - 1);
                let (a, b) = (mal_formula(rng, l), mal_formula(rng, size - 1 - l));
                if k == 2 {
                    MalFormula::tensor(a, b)
                } else {
                    MalFormula::parr(a, b)
                }
            }
        },
    }
}

pub fn nat_quantity<R: Rng>(rng: &mut R) -> NatQuantity {
    NatQuantity(rng.gen_range(0..1_000_000))
}

/// A soft element `(n; f)` with degree below 4 and small coefficients.
pub fn soft_quantity<R: Rng>(rng: &mut R) -> SoftQuantity {
    let len = rng.gen_range(0..5);
    let coeffs = (0..len).map(|_| rng.gen_range(0..6)).collect();
    SoftQuantity::new(rng.gen_range(0..8), coeffs)
}

/// Affine generator of raw `L_foc` terms. Every binder's variable is used at
/// most once, so every generated command terminates.
struct TermGen<'a, R: Rng> {
    rng: &'a mut R,
    avail: Vec<Variable>,
    counter: usize,
}

impl<R: Rng> TermGen<'_, R> {
    fn fresh(&mut self, pol: Polarity) -> Variable {
        self.counter += 1;
        let base = match pol {
            Polarity::Positive => "x",
            Polarity::Negative => "a",
        };
        Variable::new(format!("{base}{}", self.counter), pol)
    }

    fn pol(&mut self) -> Polarity {
        if self.rng.gen_bool(0.5) {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    fn take_var(&mut self, pol: Polarity) -> Option<Term> {
        let idx: Vec<usize> = (0..self.avail.len()).filter(|&i| self.avail[i].polarity == pol).collect();
        if idx.is_empty() {
            return None;
        }
        let i = idx[self.rng.gen_range(0..idx.len())];
        Some(Term::Var(self.avail.swap_remove(i)))
    }

    fn bind<T>(&mut self, vs: &[Variable], f: impl FnOnce(&mut Self) -> T) -> T {
        self.avail.extend(vs.iter().cloned());
        let r = f(self);
        self.avail.retain(|v| !vs.contains(v));
        r
    }

    fn leaf(&mut self, pol: Polarity) -> Term {
        if self.rng.gen_bool(0.7) {
            if let Some(v) = self.take_var(pol) {
                return v;
            }
        }
        match (pol, self.rng.gen_range(0..3)) {
            (_, 0) => Term::Daimon(pol),
            (Polarity::Positive, 1) => Term::Nat(self.rng.gen_range(0..3)),
            (Polarity::Positive, _) => Term::PosInstr("c".into()),
            (Polarity::Negative, _) => Term::NegInstr("e".into()),
        }
    }

    fn value(&mut self, pol: Polarity, depth: u32) -> Term {
        match pol {
            Polarity::Negative => self.term(pol, depth),
            Polarity::Positive => self.pos_value(depth),
        }
    }

    fn pos_value(&mut self, depth: u32) -> Term {
        if depth == 0 {
            return self.leaf(Polarity::Positive);
        }
        match self.rng.gen_range(0..5) {
            0 => self.leaf(Polarity::Positive),
            1 | 2 => {
                let (p1, p2) = (self.pol(), self.pol());
                let a = self.value(p1, depth - 1);
                let b = self.value(p2, depth - 1);
                Term::Pair(Box::new(a), Box::new(b))
            }
            3 => {
                let p = self.pol();
                Term::Boxed(Box::new(self.value(p, depth - 1)))
            }
            _ => {
                let p = self.pol();
                Term::Bang(Box::new(self.value(p, depth - 1)))
            }
        }
    }

    fn term(&mut self, pol: Polarity, depth: u32) -> Term {
        if depth == 0 {
            return self.leaf(pol);
        }
        match pol {
            Polarity::Positive => {
                if self.rng.gen_bool(0.3) {
                    let a = self.fresh(Polarity::Negative);
                    let c = self.bind(std::slice::from_ref(&a), |g| g.command(depth - 1));
                    Term::mu(a, c)
                } else {
                    self.pos_value(depth)
                }
            }
            Polarity::Negative => match self.rng.gen_range(0..6) {
                0 => self.leaf(pol),
                1 => {
                    let x = self.fresh(Polarity::Positive);
                    let c = self.bind(std::slice::from_ref(&x), |g| g.command(depth - 1));
                    Term::mu(x, c)
                }
                2 | 3 => {
                    let (p1, p2) = (self.pol(), self.pol());
                    let (k1, k2) = (self.fresh(p1), self.fresh(p2));
                    let c = self.bind(&[k1.clone(), k2.clone()], |g| g.command(depth - 1));
                    Term::MuPair(k1, k2, Box::new(c))
                }
                4 => {
                    let p = self.pol();
                    let k = self.fresh(p);
                    let c = self.bind(std::slice::from_ref(&k), |g| g.command(depth - 1));
                    Term::MuBox(k, Box::new(c))
                }
                _ => {
                    let p = self.pol();
                    let k = self.fresh(p);
                    let c = self.bind(std::slice::from_ref(&k), |g| g.command(depth - 1));
                    Term::MuBang(k, Box::new(c))
                }
            },
        }
    }

    fn command(&mut self, depth: u32) -> Command {
        if depth > 0 && self.rng.gen_bool(0.5) {
            return self.redex(depth);
        }
        let t = self.term(Polarity::Positive, depth);
        let u = self.term(Polarity::Negative, depth);
        Command::new(t, u).expect("opposite polarities")
    }
}

impl<R: Rng> TermGen<'_, R> {
    /// A command whose two sides match: a pair, box or bang against the
    /// corresponding binder, with agreeing polarities.
    fn redex(&mut self, depth: u32) -> Command {
        let d = depth - 1;
        let (pos, neg) = match self.rng.gen_range(0..3) {
            0 => {
                let (p1, p2) = (self.pol(), self.pol());
                let (a, b) = (self.value(p1, d), self.value(p2, d));
                let (k1, k2) = (self.fresh(p1), self.fresh(p2));
                let c = self.bind(&[k1.clone(), k2.clone()], |g| g.command(d));
                (Term::Pair(Box::new(a), Box::new(b)), Term::MuPair(k1, k2, Box::new(c)))
            }
            1 => {
                let p = self.pol();
                let v = self.value(p, d);
                let k = self.fresh(p);
                let c = self.bind(std::slice::from_ref(&k), |g| g.command(d));
                (Term::Boxed(Box::new(v)), Term::MuBox(k, Box::new(c)))
            }
            _ => {
                let p = self.pol();
                let v = self.value(p, d);
                let k = self.fresh(p);
                let c = self.bind(std::slice::from_ref(&k), |g| g.command(d));
                (Term::Bang(Box::new(v)), Term::MuBang(k, Box::new(c)))
            }
        };
        Command::new(pos, neg).expect("opposite polarities")
    }
}

/// A closed affine negative term, built from every binder form with daimons,
/// instructions and integers at the leaves.
pub fn negative_term<R: Rng>(rng: &mut R, depth: u32) -> Term {
    TermGen { rng, avail: Vec::new(), counter: 0 }.term(Polarity::Negative, depth)
}

/// A closed `μx.c`: the negative terms that do something against `✠₊`.
pub fn negative_mu<R: Rng>(rng: &mut R, depth: u32) -> Term {
    let mut g = TermGen { rng, avail: Vec::new(), counter: 0 };
    let x = g.fresh(Polarity::Positive);
    let c = g.bind(std::slice::from_ref(&x), |g| g.command(depth.saturating_sub(1)));
    Term::mu(x, c)
}

/// A closed affine command.
pub fn closed_command<R: Rng>(rng: &mut R, depth: u32) -> Command {
    TermGen { rng, avail: Vec::new(), counter: 0 }.command(depth)
}

/// A closed positive value.
pub fn positive_value<R: Rng>(rng: &mut R, depth: u32) -> Term {
    TermGen { rng, avail: Vec::new(), counter: 0 }.pos_value(depth)
}

/// A value of polarity `pol` whose free variables are among `free` (each used
/// at most once, not necessarily all).
pub fn open_value<R: Rng>(rng: &mut R, pol: Polarity, free: &[Variable], depth: u32) -> Term {
    TermGen { rng, avail: free.to_vec(), counter: 100 }.value(pol, depth)
}
