//! Quantitative monoids: `(𝓜, +, 0, ≤, ‖·‖)` with an optional unit and an
//! optional soft exponential. Three instances: natural numbers, the soft
//! monoid of pairs `(n, f)` and the trivial monoid `{0}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub trait Quantity: Clone + fmt::Debug + fmt::Display + PartialEq {
    const NAME: &'static str;

    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn leq(&self, other: &Self) -> bool;
    fn norm(&self) -> u64;

    /// An element with `1 ≤ ‖unit‖`, if the monoid has one.
    fn unit() -> Option<Self>;

    /// `!p`, when the monoid carries a soft exponential.
    fn bang(&self) -> Option<Self> {
        None
    }

    /// `r_n`, when the monoid carries a soft exponential.
    fn r(_n: u64) -> Option<Self> {
        None
    }

    /// `n.p = p + … + p` (`n` times).
    fn scale(&self, n: u64) -> Self {
        (0..n).fold(Self::zero(), |acc, _| acc.add(self))
    }
}

/// `(ℕ, +, 0, ≤, x ↦ x)` with unit 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NatQuantity(pub u64);

impl Quantity for NatQuantity {
    const NAME: &'static str = "nat";

    fn zero() -> Self {
        NatQuantity(0)
    }

    fn add(&self, other: &Self) -> Self {
        NatQuantity(self.0.saturating_add(other.0))
    }

    fn leq(&self, other: &Self) -> bool {
        self.0 <= other.0
    }

    fn norm(&self) -> u64 {
        self.0
    }

    fn unit() -> Option<Self> {
        Some(NatQuantity(1))
    }
}

impl fmt::Display for NatQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The monoid whose underlying set is `{0}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialQuantity;

impl Quantity for TrivialQuantity {
    const NAME: &'static str = "trivial";

    fn zero() -> Self {
        TrivialQuantity
    }

    fn add(&self, _: &Self) -> Self {
        TrivialQuantity
    }

    fn leq(&self, _: &Self) -> bool {
        true
    }

    fn norm(&self) -> u64 {
        0
    }

    fn unit() -> Option<Self> {
        None
    }
}

impl fmt::Display for TrivialQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("0")
    }
}

/// Polynomial with natural coefficients, lowest degree first, no trailing
/// zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polynomial(Vec<u64>);

impl Polynomial {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial(coeffs)
    }

    pub fn constant(c: u64) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.0
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc.saturating_mul(x).saturating_add(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let coeff = |p: &Self, i: usize| p.0.get(i).copied().unwrap_or(0);
        Polynomial::new(
            (0..n)
                .map(|i| coeff(self, i).saturating_add(coeff(other, i)))
                .collect(),
        )
    }

    /// `f⁺(X) = (X + 1) f(X)`.
    pub fn times_x_plus_one(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut out = vec![0u64; self.0.len() + 1];
        for (i, &c) in self.0.iter().enumerate() {
            out[i] = out[i].saturating_add(c);
            out[i + 1] = out[i + 1].saturating_add(c);
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("X")?,
                (1, c) => write!(f, "{c} X")?,
                (i, 1) => write!(f, "X^{i}")?,
                (i, c) => write!(f, "{c} X^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `(n, f)` with `(n,f) + (m,g) = (max(n,m), f+g)` and `‖(n,f)‖ = f(n)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SoftQuantity {
    pub n: u64,
    pub f: Polynomial,
}

impl SoftQuantity {
    pub fn new(n: u64, coeffs: Vec<u64>) -> Self {
        SoftQuantity {
            n,
            f: Polynomial::new(coeffs),
        }
    }
}

impl Quantity for SoftQuantity {
    const NAME: &'static str = "soft";

    fn zero() -> Self {
        SoftQuantity::default()
    }

    fn add(&self, other: &Self) -> Self {
        SoftQuantity {
            n: self.n.max(other.n),
            f: self.f.add(&other.f),
        }
    }

    fn leq(&self, other: &Self) -> bool {
        soft_leq(self, other)
    }

    fn norm(&self) -> u64 {
        self.f.eval(self.n)
    }

    fn unit() -> Option<Self> {
        Some(SoftQuantity::new(0, vec![1]))
    }

    fn bang(&self) -> Option<Self> {
        Some(SoftQuantity {
            n: self.n,
            f: self.f.times_x_plus_one(),
        })
    }

    fn r(n: u64) -> Option<Self> {
        Some(SoftQuantity {
            n,
            f: Polynomial::default(),
        })
    }
}

/// Above this many integer points the exact check gives up and answers `false`.
const LEQ_SCAN_LIMIT: i128 = 1 << 16;

/// `(n,f) ≤ (m,g)` iff `n ≤ m`, `f(x) ≤ g(x)` for `x ≥ m`, and `g − f` is
/// nondecreasing on `[m, ∞)`.
///
/// Writing `d = g − f`, this is `d(m) ≥ 0` together with `d(x+1) ≥ d(x)` for
/// every integer `x ≥ m`. If `d(X + m)` has nonnegative coefficients both hold
/// at once. Otherwise the difference polynomial's sign is settled past its
/// Cauchy bound and the integers below it are checked one by one. Sound; only
/// incomplete when that range is unreasonably large.
pub fn soft_leq(p: &SoftQuantity, q: &SoftQuantity) -> bool {
    if p.n > q.n {
        return false;
    }
    let m = q.n as i128;
    let len = p.f.0.len().max(q.f.0.len());
    let d: Vec<i128> = (0..len)
        .map(|i| {
            q.f.0.get(i).copied().unwrap_or(0) as i128 - p.f.0.get(i).copied().unwrap_or(0) as i128
        })
        .collect();
    let shifted = taylor_shift(&d, m);
    if shifted.iter().all(|&c| c >= 0) {
        return true;
    }
    if eval_i(&d, m) < 0 {
        return false;
    }
    // Δd(x) = d(x+1) − d(x), in x + m coordinates
    let e = shifted;
    let plus_one = taylor_shift(&e, 1);
    let mut delta: Vec<i128> = plus_one.iter().zip(&e).map(|(a, b)| a - b).collect();
    while delta.last() == Some(&0) {
        delta.pop();
    }
    let Some(&lead) = delta.last() else {
        return true;
    };
    if lead < 0 {
        return false;
    }
    let bound = 1 + delta.iter().map(|c| c.abs()).max().unwrap_or(0) / lead;
    if bound > LEQ_SCAN_LIMIT {
        return false;
    }
    (0..=bound).all(|t| eval_i(&delta, t) >= 0)
}

fn eval_i(p: &[i128], x: i128) -> i128 {
    p.iter().rev().fold(0i128, |acc, &c| acc.saturating_mul(x).saturating_add(c))
}

/// Coefficients of `p(X + a)`.
fn taylor_shift(p: &[i128], a: i128) -> Vec<i128> {
    let mut out = p.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            out[j] = out[j].saturating_add(a.saturating_mul(out[j + 1]));
        }
    }
    out
}

impl fmt::Display for SoftQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.n, self.f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("malformed soft quantity at column {col}: {message}")]
pub struct QuantityParseError {
    pub col: usize,
    pub message: String,
}

impl FromStr for SoftQuantity {
    type Err = QuantityParseError;

    /// `(n; c0 + c1 X + c2 X^2 ...)`; terms may come in any order and repeat.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |col: usize, m: &str| QuantityParseError {
            col: col + 1,
            message: m.to_string(),
        };
        let t = s.trim();
        let lead = s.len() - s.trim_start().len();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| err(lead, "expected '(n; polynomial)'"))?;
        let (n_src, poly_src) = inner
            .split_once(';')
            .ok_or_else(|| err(lead + 1, "expected ';'"))?;
        let n = n_src
            .trim()
            .parse::<u64>()
            .map_err(|_| err(lead + 1, "expected a natural number"))?;
        let mut coeffs: Vec<u64> = Vec::new();
        let mut offset = lead + 2 + n_src.len();
        for term in poly_src.split('+') {
            let col = offset + term.len() - term.trim_start().len();
            offset += term.len() + 1;
            let term: String = term.chars().filter(|c| !c.is_whitespace()).collect();
            let bad = || err(col, &format!("bad monomial '{term}'"));
            let (c, deg) = match term.find('X') {
                None => (term.parse::<u64>().map_err(|_| bad())?, 0usize),
                Some(i) => {
                    let c = match term[..i].trim_end_matches('*') {
                        "" => 1,
                        c => c.parse::<u64>().map_err(|_| bad())?,
                    };
                    let deg = match &term[i + 1..] {
                        "" => 1,
                        rest => rest
                            .strip_prefix('^')
                            .and_then(|d| d.parse::<usize>().ok())
                            .ok_or_else(bad)?,
                    };
                    (c, deg)
                }
            };
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, 0);
            }
            coeffs[deg] = coeffs[deg].saturating_add(c);
        }
        Ok(SoftQuantity::new(n, coeffs))
    }
}

/// Runtime choice of monoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonoidName {
    Nat,
    Soft,
    Trivial,
}

impl FromStr for MonoidName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nat" => Ok(MonoidName::Nat),
            "soft" => Ok(MonoidName::Soft),
            "trivial" => Ok(MonoidName::Trivial),
            other => Err(format!("unknown monoid '{other}' (nat, soft, trivial)")),
        }
    }
}

impl fmt::Display for MonoidName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MonoidName::Nat => NatQuantity::NAME,
            MonoidName::Soft => SoftQuantity::NAME,
            MonoidName::Trivial => TrivialQuantity::NAME,
        })
    }
}

/// A law of the quantitative-monoid interface that failed on concrete
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawViolation {
    pub law: &'static str,
    pub witness: String,
}

/// Checks every law that involves at most the given elements: commutativity,
/// associativity and neutrality (structurally), anti-triangularity,
/// compatibility of `≤` with the norm, `‖0‖ = 0`, the unit law, and the soft
/// exponential laws for `n`.
pub fn check_laws<Q: Quantity>(p: &Q, q: &Q, r: &Q, n: u64) -> Vec<LawViolation> {
    let mut out = Vec::new();
    let mut law = |ok: bool, law: &'static str| {
        if !ok {
            out.push(LawViolation {
                law,
                witness: format!("p={p} q={q} r={r} n={n}"),
            });
        }
    };
    let z = Q::zero();
    law(p.add(q) == q.add(p), "commutativity");
    law(p.add(&q.add(r)) == p.add(q).add(r), "associativity");
    law(p.add(&z) == *p && z.add(p) == *p, "neutrality");
    law(z.norm() == 0, "norm of zero");
    law(
        p.norm().saturating_add(q.norm()) <= p.add(q).norm(),
        "anti-triangularity",
    );
    law(p.leq(p), "reflexivity");
    law(!p.leq(q) || p.norm() <= q.norm(), "order/norm compatibility");
    law(!(p.leq(q) && q.leq(r)) || p.leq(r), "transitivity");
    law(!p.leq(q) || p.add(r).leq(&q.add(r)), "order/addition compatibility");
    if let Some(u) = Q::unit() {
        law(1 <= u.norm(), "unit");
    }
    if let (Some(bp), Some(bq), Some(bpq), Some(rn)) = (p.bang(), q.bang(), p.add(q).bang(), Q::r(n)) {
        law(bp.add(&bq).leq(&bpq), "!p + !q <= !(p + q)");
        law(p.scale(n).leq(&bp.add(&rn)), "n.p <= !p + r_n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn soft(s: &str) -> SoftQuantity {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(NatQuantity(3).add(&NatQuantity(4)).norm(), 7);
        let s = SoftQuantity::new(2, vec![1, 1]).add(&SoftQuantity::new(3, vec![0, 2]));
        assert_eq!(s, SoftQuantity::new(3, vec![1, 3]));
        assert_eq!(s.norm(), 10);
        assert_eq!(TrivialQuantity.add(&TrivialQuantity), TrivialQuantity);
        assert_eq!(TrivialQuantity.norm(), 0);
    }

    #[test]
    fn soft_exponential_examples() {
        let one = SoftQuantity::new(0, vec![1]);
        assert_eq!(one.bang(), Some(SoftQuantity::new(0, vec![1, 1])));
        assert_eq!(SoftQuantity::zero().bang(), Some(SoftQuantity::zero()));
        assert_eq!(SoftQuantity::r(5), Some(SoftQuantity::new(5, vec![])));
        assert_eq!(NatQuantity(1).bang(), None);
    }

    #[test]
    fn soft_order_examples() {
        assert!(soft_leq(&soft("(1; X)"), &soft("(2; X^2 + X)")));
        assert!(!soft_leq(&soft("(3; X)"), &soft("(1; X)")));
        // needs the threshold: 3 ≤ X + 1 only from X = 2 on
        assert!(soft_leq(&soft("(0; 3)"), &soft("(2; X + 1)")));
        assert!(!soft_leq(&soft("(0; 3)"), &soft("(1; X + 1)")));
        // nonnegative from m on but decreasing there
        assert!(!soft_leq(&soft("(0; 4 X)"), &soft("(0; X^2)")));
        assert!(soft_leq(&soft("(0; 4 X)"), &soft("(4; X^2 + 1)")));
        // k.p ≤ !p + r_k with k ≥ 2 is not coefficientwise
        let p = soft("(1; 2 + X)");
        for k in 0..6 {
            assert!(p.scale(k).leq(&p.bang().unwrap().add(&SoftQuantity::r(k).unwrap())));
        }
    }

    #[test]
    fn display_and_parse() {
        let s = SoftQuantity::new(4, vec![3, 0, 2, 1]);
        assert_eq!(s.to_string(), "(4; 3 + 2 X^2 + X^3)");
        assert_eq!(soft(&s.to_string()), s);
        assert_eq!(SoftQuantity::zero().to_string(), "(0; 0)");
        assert_eq!(soft("(2; 1 + 3X + X^2 + 2*X)"), SoftQuantity::new(2, vec![1, 5, 1]));
        assert!("(2; 1 + Y)".parse::<SoftQuantity>().is_err());
        assert!("2; 1".parse::<SoftQuantity>().is_err());
    }

    fn arb_soft() -> impl Strategy<Value = SoftQuantity> {
        (0u64..6, prop::collection::vec(0u64..5, 0..4)).prop_map(|(n, c)| SoftQuantity::new(n, c))
    }

    /// Pointwise evaluation of the order on a finite window, as an oracle.
    fn leq_window(p: &SoftQuantity, q: &SoftQuantity) -> bool {
        let d = |x: u64| q.f.eval(x) as i128 - p.f.eval(x) as i128;
        p.n <= q.n && (q.n..q.n + 4096).all(|x| d(x) >= 0 && d(x + 1) >= d(x))
    }

    proptest! {
        #[test]
        fn soft_laws(p in arb_soft(), q in arb_soft(), r in arb_soft(), n in 0u64..6) {
            prop_assert_eq!(check_laws(&p, &q, &r, n), vec![]);
            prop_assert_eq!(p.add(&q).bang(), Some(p.bang().unwrap().add(&q.bang().unwrap())));
            if let Some(d) = p.f.degree() {
                prop_assert_eq!(p.bang().unwrap().f.degree(), Some(d + 1));
            }
        }

        #[test]
        fn nat_laws(p in 0u64..1000, q in 0u64..1000, r in 0u64..1000) {
            let v = check_laws(&NatQuantity(p), &NatQuantity(q), &NatQuantity(r), 3);
            prop_assert_eq!(v, vec![]);
        }

        #[test]
        fn soft_leq_is_sound(p in arb_soft(), q in arb_soft()) {
            if soft_leq(&p, &q) {
                prop_assert!(leq_window(&p, &q));
            }
        }

        #[test]
        fn soft_leq_matches_window_on_small_degrees(p in arb_soft(), q in arb_soft()) {
            // degree ≤ 3 and coefficients < 5: the window covers every sign change
            prop_assert_eq!(soft_leq(&p, &q), leq_window(&p, &q));
        }

        #[test]
        fn soft_round_trip(p in arb_soft()) {
            prop_assert_eq!(p.to_string().parse::<SoftQuantity>(), Ok(p));
        }
    }
}
