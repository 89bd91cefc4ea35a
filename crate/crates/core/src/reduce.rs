//! One-step reduction `→μ ∪ →β ∪ →!`, fuel-bounded normalization and step
//! counting.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{Command, Substitution, Term, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    /// `(+)` and `(−)`.
    Mu,
    /// `(⅋)` and `(↑)`.
    Beta,
    /// `⟨μ!(κ).c | !V⟩ → c[V/κ]`.
    Bang,
}

impl StepKind {
    pub fn tag(self) -> &'static str {
        match self {
            StepKind::Mu => "mu",
            StepKind::Beta => "beta",
            StepKind::Bang => "bang",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounts {
    pub mu: u64,
    pub beta: u64,
    pub bang: u64,
}

impl StepCounts {
    pub fn get(&self, kind: StepKind) -> u64 {
        match kind {
            StepKind::Mu => self.mu,
            StepKind::Beta => self.beta,
            StepKind::Bang => self.bang,
        }
    }

    pub fn bump(&mut self, kind: StepKind) {
        match kind {
            StepKind::Mu => self.mu += 1,
            StepKind::Beta => self.beta += 1,
            StepKind::Bang => self.bang += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.mu + self.beta + self.bang
    }

    /// `Time^{→β ∪ →!}`.
    pub fn time(&self) -> u64 {
        self.beta + self.bang
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// No rule applies and the command is waiting on an instruction.
    Normal,
    /// No rule applies and no instruction is involved (open or ill-typed).
    Stuck,
    FuelExhausted,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Normal => "normal",
            Outcome::Stuck => "stuck",
            Outcome::FuelExhausted => "fuel-exhausted",
        })
    }
}

fn subst1(v: &Variable, t: &Term, c: &Command) -> Command {
    Substitution::single(v.clone(), t.clone()).apply_command(c)
}

/// Contracts the unique redex of `c`, if any.
pub fn step(c: &Command) -> Option<(StepKind, Command)> {
    let (p, n) = (c.pos(), c.neg());
    match (p, n) {
        // (+): the positive side is a μ on a negative variable
        (Term::Mu(alpha, body), _) => Some((StepKind::Mu, subst1(alpha, n, body))),
        // (−): fires only against a value, which is every remaining positive term
        (_, Term::Mu(x, body)) => Some((StepKind::Mu, subst1(x, p, body))),
        (Term::Boxed(v), Term::MuBox(k, body)) if k.polarity == v.polarity() => {
            Some((StepKind::Beta, subst1(k, v, body)))
        }
        (Term::Pair(v1, v2), Term::MuPair(k1, k2, body))
            if k1.polarity == v1.polarity() && k2.polarity == v2.polarity() =>
        {
            let s = Substitution::new()
                .with(k1.clone(), (**v1).clone())
                .with(k2.clone(), (**v2).clone());
            Some((StepKind::Beta, s.apply_command(body)))
        }
        (Term::Bang(v), Term::MuBang(k, body)) if k.polarity == v.polarity() => {
            Some((StepKind::Bang, subst1(k, v, body)))
        }
        _ => None,
    }
}

/// Classifies an irreducible command.
pub fn classify_irreducible(c: &Command) -> Outcome {
    if c.pos().is_instruction() || c.neg().is_instruction() {
        Outcome::Normal
    } else {
        Outcome::Stuck
    }
}

/// Result of a run that does not record intermediate commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunSummary {
    pub counts: StepCounts,
    pub outcome: Outcome,
    pub last: Command,
}

impl RunSummary {
    pub fn time_beta(&self) -> Option<u64> {
        match self.outcome {
            Outcome::FuelExhausted => None,
            _ => Some(self.counts.time()),
        }
    }
}

/// Runs at most `fuel` steps without keeping the intermediate commands.
pub fn evaluate(c: &Command, fuel: u64) -> RunSummary {
    let mut cur = c.clone();
    let mut counts = StepCounts::default();
    let mut left = fuel;
    loop {
        match step(&cur) {
            None => {
                return RunSummary {
                    counts,
                    outcome: classify_irreducible(&cur),
                    last: cur,
                }
            }
            Some(_) if left == 0 => {
                return RunSummary {
                    counts,
                    outcome: Outcome::FuelExhausted,
                    last: cur,
                }
            }
            Some((kind, next)) => {
                counts.bump(kind);
                left -= 1;
                cur = next;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: Command,
    pub steps: Vec<(StepKind, Command)>,
    pub counts: StepCounts,
    pub outcome: Outcome,
}

impl Trace {
    pub fn last(&self) -> &Command {
        self.steps.last().map_or(&self.start, |s| &s.1)
    }

    pub fn time_beta(&self) -> Option<u64> {
        match self.outcome {
            Outcome::FuelExhausted => None,
            _ => Some(self.counts.time()),
        }
    }

    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            mu: self.counts.mu,
            beta: self.counts.beta,
            bang: self.counts.bang,
            time: self.time_beta(),
            outcome: self.outcome,
        }
    }

    /// One line per configuration: index, rule tag (`-` for the start), command.
    pub fn to_text(&self) -> String {
        let mut out = format!("0\t-\t{}\n", self.start);
        for (i, (k, c)) in self.steps.iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{}\n", i + 1, k, c));
        }
        out.push_str(&format!(
            "# outcome={} mu={} beta={} bang={}\n",
            self.outcome, self.counts.mu, self.counts.beta, self.counts.bang
        ));
        out
    }
}

/// Machine-readable summary of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub mu: u64,
    pub beta: u64,
    pub bang: u64,
    pub time: Option<u64>,
    pub outcome: Outcome,
}

/// Iterates [`step`] until no rule applies or `fuel` steps were taken,
/// recording every intermediate command.
pub fn normalize(c: &Command, fuel: u64) -> Trace {
    let mut steps = Vec::new();
    let mut counts = StepCounts::default();
    let mut cur = c.clone();
    let outcome = loop {
        match step(&cur) {
            None => break classify_irreducible(&cur),
            Some(_) if steps.len() as u64 >= fuel => break Outcome::FuelExhausted,
            Some((kind, next)) => {
                counts.bump(kind);
                steps.push((kind, next.clone()));
                cur = next;
            }
        }
    };
    Trace {
        start: c.clone(),
        steps,
        counts,
        outcome,
    }
}

/// `Time^{→β ∪ →!}(c)`, or `None` if `fuel` steps do not suffice.
pub fn time_beta(c: &Command, fuel: u64) -> Option<u64> {
    evaluate(c, fuel).time_beta()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_command;

    fn cmd(s: &str) -> Command {
        parse_command(s).unwrap()
    }

    #[test]
    fn mu_rules() {
        let c = cmd("<mu -a. <+x | a> | -b>");
        assert_eq!(step(&c), Some((StepKind::Mu, cmd("<+x | -b>"))));
        let c = cmd("<+y | mu +x. <x | -b>>");
        assert_eq!(step(&c), Some((StepKind::Mu, cmd("<+y | -b>"))));
        // (+) takes priority over (−) on ⟨μα.c | μx.c'⟩
        let c = cmd("<mu -a. <+z | a> | mu +x. <x | -b>>");
        let (k, next) = step(&c).unwrap();
        assert_eq!(k, StepKind::Mu);
        assert_eq!(next, cmd("<+z | mu +x. <x | -b>>"));
    }

    #[test]
    fn beta_rules() {
        let c = cmd("<(+v, -w) | mu (+k, -l). <k | l>>");
        assert_eq!(step(&c), Some((StepKind::Beta, cmd("<+v | -w>"))));
        let c = cmd("<{-w} | mu {-k}. <+v | k>>");
        assert_eq!(step(&c), Some((StepKind::Beta, cmd("<+v | -w>"))));
        // polarities must match
        let c = cmd("<(+v, -w) | mu (-k, +l). <l | k>>");
        assert_eq!(step(&c), None);
        assert_eq!(classify_irreducible(&c), Outcome::Stuck);
    }

    #[test]
    fn daimons_do_not_reduce() {
        let c = cmd("<daimon+ | daimon->");
        assert_eq!(step(&c), None);
        let t = normalize(&c, 10);
        assert_eq!(t.outcome, Outcome::Normal);
        assert_eq!(t.counts, StepCounts::default());
        assert_eq!(time_beta(&c, 10), Some(0));
    }

    #[test]
    fn single_shift_redex() {
        let c = cmd("<{daimon-} | mu {-k}. <daimon+ | k>>");
        assert_eq!(time_beta(&c, 10), Some(1));
    }

    #[test]
    fn fuel_exhaustion() {
        let c = cmd("<mu -a. <mu -b. <daimon+ | b> | a> | daimon->");
        assert_eq!(evaluate(&c, 1).outcome, Outcome::FuelExhausted);
        assert_eq!(time_beta(&c, 1), None);
        assert_eq!(time_beta(&c, 2), Some(0));
        let t = normalize(&c, 2);
        assert_eq!(t.steps.len(), 2);
        assert!(t.to_text().contains("outcome=normal"));
    }

    #[test]
    fn bang_step_counts_in_time() {
        let c = cmd("<!daimon- | mu !(-k). <daimon+ | k>>");
        let t = normalize(&c, 10);
        assert_eq!(t.counts.bang, 1);
        assert_eq!(t.time_beta(), Some(1));
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn mu_keeps_time_and_beta_costs_one(seed in any::<u64>()) {
            let c = crate::gen::closed_command(&mut crate::gen::rng(seed), 5);
            let t = time_beta(&c, 100_000).unwrap();
            if let Some((kind, next)) = step(&c) {
                let t2 = time_beta(&next, 100_000).unwrap();
                match kind {
                    StepKind::Mu => prop_assert_eq!(t, t2),
                    StepKind::Beta | StepKind::Bang => prop_assert_eq!(t, t2 + 1),
                }
                // the stored orientation does not affect which rule fires
                let flipped = Command::new(c.neg().clone(), c.pos().clone()).unwrap();
                prop_assert_eq!(step(&flipped), Some((kind, next)));
            } else {
                prop_assert_eq!(t, 0);
            }
        }

        #[test]
        fn trace_counts_tally_the_steps(seed in any::<u64>()) {
            let c = crate::gen::closed_command(&mut crate::gen::rng(seed), 5);
            let tr = normalize(&c, 100_000);
            let mut counts = StepCounts::default();
            for (k, _) in &tr.steps {
                counts.bump(*k);
            }
            prop_assert_eq!(counts, tr.counts);
            prop_assert!(step(tr.last()).is_none());
            prop_assert_eq!(evaluate(&c, 100_000).counts, tr.counts);
        }
    }
}
