//! Derivation trees for MALω, its soft extension SALω (`!ₖ`, `Mₙ`) and the
//! contraction rule of PAω; a checker that recomputes every conclusion, the
//! weight `Mp{π}` in any quantitative monoid, and certification of the
//! time bound on the daimon closure of the conclusion.

pub mod build;
mod file;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructor::{conv_check, ConvError, Constructor, Kind, DEFAULT_CONV_FUEL};
use crate::quantity::{MonoidName, NatQuantity, Quantity, SoftQuantity, TrivialQuantity};
use crate::reduce::{evaluate, Outcome, StepCounts};
use crate::term::{bang_macro, free_vars, Command, Polarity, Substitution, Term, Variable};

pub use file::{DerivationFile, FileError};

/// Variable assignments `x : N`, `α : P`.
pub type Context = BTreeMap<Variable, Constructor>;

#[derive(Clone, Debug, PartialEq)]
pub enum Judgment {
    /// `c : (⊢ Γ)`
    Command { command: Command, context: Context },
    /// `⊢ t : A | Γ`
    Term {
        term: Term,
        formula: Constructor,
        context: Context,
    },
}

impl Judgment {
    pub fn context(&self) -> &Context {
        match self {
            Judgment::Command { context, .. } | Judgment::Term { context, .. } => context,
        }
    }

    /// Equal up to α on the subject and on formulas.
    pub fn alpha_eq(&self, other: &Judgment) -> bool {
        let ctx_eq = |a: &Context, b: &Context| {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|((x, f), (y, g))| x == y && f.alpha_eq(g))
        };
        match (self, other) {
            (
                Judgment::Command { command: c, context: g },
                Judgment::Command { command: d, context: h },
            ) => c.alpha_eq(d) && ctx_eq(g, h),
            (
                Judgment::Term { term: t, formula: a, context: g },
                Judgment::Term { term: u, formula: b, context: h },
            ) => t.alpha_eq(u) && a.alpha_eq(b) && ctx_eq(g, h),
            _ => false,
        }
    }

    /// The closed command of the linear-time theorem: every context variable
    /// replaced by a daimon of its polarity, and a term judgment cut against a
    /// daimon.
    pub fn daimon_closure(&self) -> Command {
        let mut s = Substitution::new();
        for v in self.context().keys() {
            s.insert(v.clone(), Term::Daimon(v.polarity));
        }
        let c = match self {
            Judgment::Command { command, .. } => command.clone(),
            Judgment::Term { term, .. } => {
                Command::new(term.clone(), Term::Daimon(term.polarity().flip()))
                    .expect("daimon of the opposite polarity")
            }
        };
        c.substitute(&s).expect("daimons are values of the variable's polarity")
    }
}

fn write_context(f: &mut fmt::Formatter<'_>, ctx: &Context) -> fmt::Result {
    for (i, (v, a)) in ctx.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{v} : {a}")?;
    }
    Ok(())
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::Command { command, context } => {
                write!(f, "{command} : (|- ")?;
                write_context(f, context)?;
                f.write_str(")")
            }
            Judgment::Term { term, formula, context } => {
                write!(f, "|- {term} : {formula} | ")?;
                write_context(f, context)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Mal,
    Sal,
    Pa,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mal" => Ok(Mode::Mal),
            "sal" => Ok(Mode::Sal),
            "pa" => Ok(Mode::Pa),
            other => Err(format!("unknown mode '{other}' (mal, sal, pa)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Mal => "mal",
            Mode::Sal => "sal",
            Mode::Pa => "pa",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    /// `⊢ x : P | x : P⊥`
    AxPos { var: Variable, formula: Constructor },
    /// `⊢ α : N | α : N⊥`
    AxNeg { var: Variable, formula: Constructor },
    MuPos { var: Variable },
    MuNeg { var: Variable },
    /// Premises are the two sides; `split` lists the context variables each
    /// one consumes.
    Cut { split: [Vec<Variable>; 2] },
    Tensor { split: [Vec<Variable>; 2] },
    Parr { vars: (Variable, Variable) },
    ShiftDown,
    ShiftUp { var: Variable },
    /// `body` is `A` with `var` free; the premise must type the subject with
    /// `A[witness/var]`.
    Exists {
        var: String,
        kind: Kind,
        witness: Constructor,
        body: Constructor,
    },
    Forall { var: String, kind: Kind },
    Conv { var: Variable, target: Constructor },
    Weaken { var: Variable, formula: Constructor },
    /// Promotion with the listed context variables boxed, outermost first.
    BangK { boxed: Vec<Variable> },
    /// Merges `merged` (all of one formula) into `binder`. With nothing to
    /// merge `formula` gives `A`.
    MultiplexN {
        merged: Vec<Variable>,
        binder: Variable,
        formula: Option<Constructor>,
    },
    Contract {
        left: Variable,
        right: Variable,
        merged: Variable,
    },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::AxPos { .. } => "ax+",
            Rule::AxNeg { .. } => "ax-",
            Rule::MuPos { .. } => "mu+",
            Rule::MuNeg { .. } => "mu-",
            Rule::Cut { .. } => "cut",
            Rule::Tensor { .. } => "tensor",
            Rule::Parr { .. } => "parr",
            Rule::ShiftDown => "down",
            Rule::ShiftUp { .. } => "up",
            Rule::Exists { .. } => "exists",
            Rule::Forall { .. } => "forall",
            Rule::Conv { .. } => "conv",
            Rule::Weaken { .. } => "weaken",
            Rule::BangK { .. } => "bang",
            Rule::MultiplexN { .. } => "multiplex",
            Rule::Contract { .. } => "contract",
        }
    }

    fn arity(&self) -> usize {
        match self {
            Rule::AxPos { .. } | Rule::AxNeg { .. } => 0,
            Rule::Cut { .. } | Rule::Tensor { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    /// Checked against the recomputed conclusion when present.
    pub conclusion: Option<Judgment>,
}

impl Derivation {
    pub fn new(rule: Rule, premises: Vec<Derivation>) -> Derivation {
        Derivation {
            rule,
            premises,
            conclusion: None,
        }
    }

    pub fn leaf(rule: Rule) -> Derivation {
        Derivation::new(rule, Vec::new())
    }

    pub fn unary(rule: Rule, premise: Derivation) -> Derivation {
        Derivation::new(rule, vec![premise])
    }

    pub fn binary(rule: Rule, left: Derivation, right: Derivation) -> Derivation {
        Derivation::new(rule, vec![left, right])
    }

    /// Records the checked conclusion at every node.
    pub fn annotate(&mut self, mode: Mode) -> Result<Judgment, CheckError> {
        for p in &mut self.premises {
            p.annotate(mode)?;
        }
        let j = check(self, mode)?;
        self.conclusion = Some(j.clone());
        Ok(j)
    }

    pub fn rule_count(&self) -> usize {
        1 + self.premises.iter().map(Derivation::rule_count).sum::<usize>()
    }

    /// `δ(π)`: the largest number of nested `!ₖ` rules on a branch.
    pub fn depth(&self) -> usize {
        let below = self.premises.iter().map(Derivation::depth).max().unwrap_or(0);
        below + usize::from(matches!(self.rule, Rule::BangK { .. }))
    }

    pub fn tally(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.tally_into(&mut out);
        out
    }

    fn tally_into(&self, out: &mut BTreeMap<String, usize>) {
        *out.entry(self.rule.name().to_string()).or_insert(0) += 1;
        for p in &self.premises {
            p.tally_into(out);
        }
    }

    /// The least mode that admits every rule used.
    pub fn required_mode(&self) -> Mode {
        let t = self.tally();
        if t.contains_key("contract") {
            Mode::Pa
        } else if t.contains_key("bang") || t.contains_key("multiplex") {
            Mode::Sal
        } else {
            Mode::Mal
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("at {path} ({rule}): {reason}")]
    RuleMismatch {
        path: String,
        rule: &'static str,
        reason: String,
    },
    #[error("at {path} ({rule}): bad context split: {reason}")]
    SplitError {
        path: String,
        rule: &'static str,
        reason: String,
    },
    #[error("at {path} ({rule}): affinity violated: {reason}")]
    AffinityError {
        path: String,
        rule: &'static str,
        reason: String,
    },
    #[error("at {path}: convertibility of {from} and {to} unknown (fuel exhausted)")]
    ConvUnknown {
        path: String,
        from: String,
        to: String,
    },
}

/// Checks every node of `d` and returns its conclusion.
pub fn check(d: &Derivation, mode: Mode) -> Result<Judgment, CheckError> {
    check_with_fuel(d, mode, DEFAULT_CONV_FUEL)
}

/// Like [`check`] with an explicit fuel for the `≅` rule.
pub fn check_with_fuel(d: &Derivation, mode: Mode, fuel: u64) -> Result<Judgment, CheckError> {
    Checker { mode: Some(mode), fuel }.node(d, "root")
}

/// Checks with every rule of every mode enabled.
pub(crate) fn check_any(d: &Derivation) -> Result<Judgment, CheckError> {
    Checker { mode: None, fuel: DEFAULT_CONV_FUEL }.node(d, "root")
}

struct Checker {
    /// `None` admits every rule.
    mode: Option<Mode>,
    fuel: u64,
}

fn polarity_of_kind(k: &Kind) -> Option<Polarity> {
    match k {
        Kind::OPos => Some(Polarity::Positive),
        Kind::ONeg => Some(Polarity::Negative),
        _ => None,
    }
}

fn ctx_names(ctx: &Context) -> String {
    let names: Vec<String> = ctx.keys().map(|v| v.to_string()).collect();
    format!("{{{}}}", names.join(", "))
}

impl Checker {
    fn node(&self, d: &Derivation, path: &str) -> Result<Judgment, CheckError> {
        let rule = d.rule.name();
        let mismatch = |reason: String| CheckError::RuleMismatch {
            path: path.to_string(),
            rule,
            reason,
        };
        if d.premises.len() != d.rule.arity() {
            return Err(mismatch(format!(
                "expected {} premise(s), found {}",
                d.rule.arity(),
                d.premises.len()
            )));
        }
        if let Some(mode) = self.mode {
            let allowed = match d.rule {
                Rule::BangK { .. } | Rule::MultiplexN { .. } => mode == Mode::Sal,
                Rule::Contract { .. } => mode == Mode::Pa,
                _ => true,
            };
            if !allowed {
                return Err(mismatch(format!("rule not available in {mode} mode")));
            }
        }
        let mut prem = Vec::with_capacity(d.premises.len());
        for (i, p) in d.premises.iter().enumerate() {
            prem.push(self.node(p, &format!("{path}/{i}"))?);
        }
        let j = self.rule(d, path, prem)?;
        if let Some(given) = &d.conclusion {
            if !given.alpha_eq(&j) {
                return Err(mismatch(format!("stated conclusion {given} but the rule gives {j}")));
            }
        }
        Ok(j)
    }

    fn formula(&self, a: &Constructor, path: &str, rule: &'static str) -> Result<Polarity, CheckError> {
        let k = a.kind().map_err(|e| CheckError::RuleMismatch {
            path: path.to_string(),
            rule,
            reason: format!("ill-kinded formula {a}: {e}"),
        })?;
        polarity_of_kind(&k).ok_or_else(|| CheckError::RuleMismatch {
            path: path.to_string(),
            rule,
            reason: format!("{a} has kind {k}, not a formula kind"),
        })
    }

    fn rule(&self, d: &Derivation, path: &str, prem: Vec<Judgment>) -> Result<Judgment, CheckError> {
        let rule = d.rule.name();
        let err = |reason: String| CheckError::RuleMismatch {
            path: path.to_string(),
            rule,
            reason,
        };
        let affinity = |reason: String| CheckError::AffinityError {
            path: path.to_string(),
            rule,
            reason,
        };
        let term_err = |e: crate::term::TermError| err(e.to_string());
        let mut prem = prem.into_iter();
        let mut command_premise = || match prem.next() {
            Some(Judgment::Command { command, context }) => Ok((command, context)),
            Some(j) => Err(err(format!("premise must be a command judgment, found {j}"))),
            None => unreachable!("arity checked"),
        };
        match &d.rule {
            Rule::AxPos { var, formula } | Rule::AxNeg { var, formula } => {
                let want = if matches!(d.rule, Rule::AxPos { .. }) {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                };
                if var.polarity != want {
                    return Err(err(format!("variable {var} has the wrong polarity")));
                }
                let p = self.formula(formula, path, rule)?;
                if p != want {
                    return Err(err(format!("{var} cannot have type {formula}")));
                }
                let mut context = Context::new();
                context.insert(var.clone(), formula.negate());
                Ok(Judgment::Term {
                    term: Term::Var(var.clone()),
                    formula: formula.clone(),
                    context,
                })
            }
            Rule::MuPos { var } | Rule::MuNeg { var } => {
                let (c, mut ctx) = command_premise()?;
                let want = if matches!(d.rule, Rule::MuPos { .. }) {
                    Polarity::Negative
                } else {
                    Polarity::Positive
                };
                if var.polarity != want {
                    return Err(err(format!("binder {var} has the wrong polarity")));
                }
                let formula = ctx
                    .remove(var)
                    .ok_or_else(|| err(format!("{var} is not in the premise context {}", ctx_names(&ctx))))?;
                Ok(Judgment::Term {
                    term: Term::mu(var.clone(), c),
                    formula,
                    context: ctx,
                })
            }
            Rule::Cut { split } | Rule::Tensor { split } => {
                let mut sides = Vec::new();
                for j in prem.by_ref() {
                    match j {
                        Judgment::Term { term, formula, context } => sides.push((term, formula, context)),
                        j => return Err(err(format!("premise must be a term judgment, found {j}"))),
                    }
                }
                let (t, a, g) = sides.remove(0);
                let (u, b, h) = sides.remove(0);
                for (i, ctx) in [&g, &h].into_iter().enumerate() {
                    let declared: BTreeSet<&Variable> = split[i].iter().collect();
                    let actual: BTreeSet<&Variable> = ctx.keys().collect();
                    if declared != actual {
                        return Err(CheckError::SplitError {
                            path: path.to_string(),
                            rule,
                            reason: format!(
                                "premise {i} uses {} but the split lists [{}]",
                                ctx_names(ctx),
                                split[i].iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
                            ),
                        });
                    }
                }
                if let Some(v) = g.keys().find(|v| h.contains_key(*v)) {
                    return Err(affinity(format!("{v} is used by both premises")));
                }
                let mut context = g;
                context.extend(h);
                if matches!(d.rule, Rule::Cut { .. }) {
                    if !b.alpha_eq(&a.negate()) {
                        return Err(err(format!("cut formulas {a} and {b} are not dual")));
                    }
                    let command = Command::new(t, u).map_err(term_err)?;
                    Ok(Judgment::Command { command, context })
                } else {
                    if !t.is_value() || !u.is_value() {
                        return Err(err("both components of a pair must be values".into()));
                    }
                    let term = Term::pair(t, u).map_err(term_err)?;
                    Ok(Judgment::Term {
                        term,
                        formula: Constructor::tensor(a, b),
                        context,
                    })
                }
            }
            Rule::Parr { vars: (k1, k2) } => {
                let (c, mut ctx) = command_premise()?;
                let a = ctx
                    .remove(k1)
                    .ok_or_else(|| err(format!("{k1} is not in the premise context")))?;
                let b = ctx
                    .remove(k2)
                    .ok_or_else(|| err(format!("{k2} is not in the premise context")))?;
                let term = Term::mu_pair(k1.clone(), k2.clone(), c).map_err(term_err)?;
                Ok(Judgment::Term {
                    term,
                    formula: Constructor::parr(a, b),
                    context: ctx,
                })
            }
            Rule::ShiftDown => match prem.next() {
                Some(Judgment::Term { term, formula, context }) => {
                    if !term.is_value() {
                        return Err(err(format!("{term} is not a value")));
                    }
                    Ok(Judgment::Term {
                        term: Term::boxed(term).map_err(term_err)?,
                        formula: Constructor::down(formula),
                        context,
                    })
                }
                _ => Err(err("premise must be a term judgment".into())),
            },
            Rule::ShiftUp { var } => {
                let (c, mut ctx) = command_premise()?;
                let a = ctx
                    .remove(var)
                    .ok_or_else(|| err(format!("{var} is not in the premise context")))?;
                Ok(Judgment::Term {
                    term: Term::mu_box(var.clone(), c),
                    formula: Constructor::up(a),
                    context: ctx,
                })
            }
            Rule::Exists { var, kind, witness, body } => match prem.next() {
                Some(Judgment::Term { term, formula, context }) => {
                    let wk = witness
                        .kind()
                        .map_err(|e| err(format!("ill-kinded witness {witness}: {e}")))?;
                    if &wk != kind {
                        return Err(err(format!("witness {witness} has kind {wk}, expected {kind}")));
                    }
                    let concl = Constructor::exists(var.clone(), kind.clone(), body.clone());
                    self.formula(&concl, path, rule)?;
                    let inst = body.subst(var, witness);
                    if !formula.alpha_eq(&inst) {
                        return Err(err(format!("premise has type {formula}, expected {inst}")));
                    }
                    Ok(Judgment::Term {
                        term,
                        formula: concl,
                        context,
                    })
                }
                _ => Err(err("premise must be a term judgment".into())),
            },
            Rule::Forall { var, kind } => match prem.next() {
                Some(Judgment::Term { term, formula, context }) => {
                    if !term.is_value() {
                        return Err(err(format!("{term} is not a value")));
                    }
                    if let Some((v, _)) = context.iter().find(|(_, a)| a.free_vars().contains(var)) {
                        return Err(err(format!("{var} appears in the context (type of {v})")));
                    }
                    let concl = Constructor::forall(var.clone(), kind.clone(), formula);
                    self.formula(&concl, path, rule)?;
                    Ok(Judgment::Term {
                        term,
                        formula: concl,
                        context,
                    })
                }
                _ => Err(err("premise must be a term judgment".into())),
            },
            Rule::Conv { var, target } => {
                let (c, mut ctx) = command_premise()?;
                let a = ctx
                    .get(var)
                    .ok_or_else(|| err(format!("{var} is not in the premise context")))?;
                let ka = a.kind().map_err(|e| err(e.to_string()))?;
                let kb = target.kind().map_err(|e| err(e.to_string()))?;
                if ka != kb {
                    return Err(err(format!("{a} : {ka} and {target} : {kb} differ in kind")));
                }
                match conv_check(a, target, self.fuel) {
                    Ok(true) => {}
                    Ok(false) => return Err(err(format!("{a} and {target} are not convertible"))),
                    Err(ConvError::FuelExhausted) => {
                        return Err(CheckError::ConvUnknown {
                            path: path.to_string(),
                            from: a.to_string(),
                            to: target.to_string(),
                        })
                    }
                }
                ctx.insert(var.clone(), target.clone());
                Ok(Judgment::Command { command: c, context: ctx })
            }
            Rule::Weaken { var, formula } => {
                let (c, mut ctx) = command_premise()?;
                let p = self.formula(formula, path, rule)?;
                if p == var.polarity {
                    return Err(err(format!("{var} cannot be assigned {formula} (same polarity)")));
                }
                if ctx.contains_key(var) {
                    return Err(affinity(format!("{var} is already in the context")));
                }
                if free_vars(&c).contains(var) {
                    return Err(affinity(format!("{var} occurs in the command")));
                }
                ctx.insert(var.clone(), formula.clone());
                Ok(Judgment::Command { command: c, context: ctx })
            }
            Rule::BangK { boxed } => match prem.next() {
                Some(Judgment::Term { term, formula, context }) => {
                    if !term.is_value() {
                        return Err(err(format!("{term} is not a value")));
                    }
                    let listed: BTreeSet<&Variable> = boxed.iter().collect();
                    if listed.len() != boxed.len() || listed != context.keys().collect() {
                        return Err(CheckError::SplitError {
                            path: path.to_string(),
                            rule,
                            reason: format!("boxed variables must list the context {} once each", ctx_names(&context)),
                        });
                    }
                    let mut out = Context::new();
                    for (v, n) in context {
                        if self.formula(&n, path, rule)? != Polarity::Negative {
                            return Err(err(format!("context formula {n} of {v} is not negative")));
                        }
                        out.insert(v, Constructor::quest(n));
                    }
                    Ok(Judgment::Term {
                        term: bang_macro(boxed, term).map_err(term_err)?,
                        formula: Constructor::bang(formula),
                        context: out,
                    })
                }
                _ => Err(err("premise must be a term judgment".into())),
            },
            Rule::MultiplexN { merged, binder, formula } => {
                let (c, mut ctx) = command_premise()?;
                let mut a: Option<Constructor> = formula.clone();
                for k in merged {
                    let f = ctx
                        .remove(k)
                        .ok_or_else(|| err(format!("{k} is not in the premise context (or listed twice)")))?;
                    match &a {
                        Some(prev) if !prev.alpha_eq(&f) => {
                            return Err(err(format!("merged variables have types {prev} and {f}")))
                        }
                        Some(_) => {}
                        None => a = Some(f),
                    }
                }
                let a = a.ok_or_else(|| err("M_0 needs an explicit formula".into()))?;
                let p = self.formula(&a, path, rule)?;
                if binder.polarity == p {
                    return Err(err(format!("binder {binder} cannot be assigned {a}")));
                }
                if ctx.contains_key(binder) || (!merged.contains(binder) && free_vars(&c).contains(binder)) {
                    return Err(affinity(format!("binder {binder} is not fresh")));
                }
                let mut s = Substitution::new();
                for k in merged {
                    if k.polarity != binder.polarity {
                        return Err(err(format!("{k} and {binder} differ in polarity")));
                    }
                    s.insert(k.clone(), Term::Var(binder.clone()));
                }
                let body = c.substitute(&s).map_err(term_err)?;
                Ok(Judgment::Term {
                    term: Term::mu_bang(binder.clone(), body),
                    formula: Constructor::quest(a),
                    context: ctx,
                })
            }
            Rule::Contract { left, right, merged } => {
                let (c, mut ctx) = command_premise()?;
                let a = ctx
                    .remove(left)
                    .ok_or_else(|| err(format!("{left} is not in the premise context")))?;
                let b = ctx
                    .remove(right)
                    .ok_or_else(|| err(format!("{right} is not in the premise context")))?;
                if !a.alpha_eq(&b) {
                    return Err(err(format!("contracted variables have types {a} and {b}")));
                }
                if left.polarity != merged.polarity || right.polarity != merged.polarity {
                    return Err(err("contracted variables differ in polarity".into()));
                }
                if ctx.contains_key(merged)
                    || (merged != left && merged != right && free_vars(&c).contains(merged))
                {
                    return Err(affinity(format!("{merged} is not fresh")));
                }
                let s = Substitution::new()
                    .with(left.clone(), Term::Var(merged.clone()))
                    .with(right.clone(), Term::Var(merged.clone()));
                let command = c.substitute(&s).map_err(term_err)?;
                ctx.insert(merged.clone(), a);
                Ok(Judgment::Command { command, context: ctx })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("rule {0} needs a soft exponential, which the {1} monoid lacks")]
    MonoidCapabilityError(&'static str, &'static str),
    #[error("contraction is only sound with the trivial monoid, not {0}")]
    ContractInQuantitative(&'static str),
}

/// `Mp{π}` with the rule tally and `δ(π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightReport<Q> {
    pub weight: Q,
    pub tally: BTreeMap<String, usize>,
    pub depth: usize,
}

/// `p_β`: the unit where there is one, `0` in the trivial monoid.
pub fn default_p_beta<Q: Quantity>() -> Q {
    Q::unit().unwrap_or_else(Q::zero)
}

/// Folds the weight table bottom-up with the given `p_β`.
pub fn weight<Q: Quantity>(d: &Derivation, p_beta: &Q) -> Result<WeightReport<Q>, WeightError> {
    Ok(WeightReport {
        weight: mp(d, p_beta)?,
        tally: d.tally(),
        depth: d.depth(),
    })
}

fn mp<Q: Quantity>(d: &Derivation, pb: &Q) -> Result<Q, WeightError> {
    let ws = d
        .premises
        .iter()
        .map(|p| mp(p, pb))
        .collect::<Result<Vec<Q>, _>>()?;
    let first = || ws[0].clone();
    Ok(match &d.rule {
        Rule::AxPos { .. } | Rule::AxNeg { .. } => Q::zero(),
        Rule::MuPos { .. }
        | Rule::MuNeg { .. }
        | Rule::ShiftDown
        | Rule::Exists { .. }
        | Rule::Forall { .. }
        | Rule::Conv { .. }
        | Rule::Weaken { .. } => first(),
        Rule::Parr { .. } | Rule::ShiftUp { .. } => first().add(pb),
        Rule::Cut { .. } | Rule::Tensor { .. } => ws[0].add(&ws[1]),
        Rule::BangK { boxed } => {
            let b = first()
                .bang()
                .ok_or(WeightError::MonoidCapabilityError("bang", Q::NAME))?;
            b.add(&pb.scale(boxed.len() as u64))
        }
        Rule::MultiplexN { merged, .. } => {
            let r = Q::r(merged.len() as u64).ok_or(WeightError::MonoidCapabilityError("multiplex", Q::NAME))?;
            first().add(pb).add(&r)
        }
        Rule::Contract { .. } => {
            if Q::NAME != TrivialQuantity::NAME {
                return Err(WeightError::ContractInQuantitative(Q::NAME));
            }
            first()
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// Result of certifying one derivation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertReport {
    pub judgment: String,
    /// The daimon closure that is actually run.
    pub command: String,
    pub mode: Mode,
    pub monoid: MonoidName,
    pub tally: BTreeMap<String, usize>,
    pub depth: usize,
    pub weight: String,
    pub norm: u64,
    pub size: usize,
    pub steps: StepCounts,
    /// `Time^{→β ∪ →!}`; `None` when the fuel ran out.
    pub time: Option<u64>,
    pub outcome: Outcome,
    /// `time ≤ ‖Mp{π}‖`; in the trivial monoid, termination.
    pub bound_respected: bool,
    /// `time ≤ |c|`, reported in MAL mode.
    pub linear_bound_respected: Option<bool>,
}

impl CertReport {
    pub fn passed(&self) -> bool {
        self.bound_respected && self.linear_bound_respected.unwrap_or(true)
    }
}

/// Checks `d` in `mode`, weighs it in `monoid` and runs the daimon closure of
/// its conclusion for at most `fuel` steps.
pub fn certify(d: &Derivation, mode: Mode, monoid: MonoidName, fuel: u64) -> Result<CertReport, CertifyError> {
    match monoid {
        MonoidName::Nat => certify_in::<NatQuantity>(d, mode, monoid, fuel),
        MonoidName::Soft => certify_in::<SoftQuantity>(d, mode, monoid, fuel),
        MonoidName::Trivial => certify_in::<TrivialQuantity>(d, mode, monoid, fuel),
    }
}

fn certify_in<Q: Quantity>(d: &Derivation, mode: Mode, monoid: MonoidName, fuel: u64) -> Result<CertReport, CertifyError> {
    let j = check(d, mode)?;
    let w = weight::<Q>(d, &default_p_beta())?;
    let closed = j.daimon_closure();
    let run = evaluate(&closed, fuel);
    let time = run.time_beta();
    let norm = w.weight.norm();
    let bound_respected = match time {
        None => false,
        Some(t) if Q::unit().is_some() => t <= norm,
        Some(_) => true,
    };
    let size = closed.size();
    let linear_bound_respected = (mode == Mode::Mal).then(|| time.is_some_and(|t| t <= size as u64));
    Ok(CertReport {
        judgment: j.to_string(),
        command: closed.to_string(),
        mode,
        monoid,
        tally: w.tally,
        depth: w.depth,
        weight: w.weight.to_string(),
        norm,
        size,
        steps: run.counts,
        time,
        outcome: run.outcome,
        bound_respected,
        linear_bound_respected,
    })
}

#[cfg(test)]
mod tests;
