//! JSON form of derivations.
//!
//! ```json
//! { "signature": { "X": "o+" },
//!   "mode": "mal",
//!   "root": { "rule": "cut", "split": [["+x"], []],
//!             "premises": [ ... ],
//!             "conclusion": { "command": "<+x | daimon->", "context": [["+x", "~X"]] } } }
//! ```
//!
//! Terms and variables use the term syntax, formulas and kinds the constructor
//! syntax. Free constructor variables are declared in `signature`; the bound
//! variable of `forall`/`exists` is in scope in the premises. Per-rule fields:
//! `var`, `formula` (ax±, weaken), `var` (mu±, up), `vars` (parr), `split`
//! (cut, tensor), `var`/`kind` (forall), `var`/`kind`/`witness`/`body`
//! (exists; `witness_kind` is accepted as a synonym of `kind`), `var`/`target`
//! (conv), `boxed` (bang), `merged`/`binder`/`n`/`formula` (multiplex),
//! `left`/`right`/`merged` (contract).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Context, Derivation, Judgment, Mode, Rule};
use crate::constructor::{parse_constructor, parse_kind, Constructor, Kind, KindEnv};
use crate::term::{parse_command, parse_term, Term, Variable};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FileError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("at {path}: {message}")]
    Schema { path: String, message: String },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJudgment {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    term: Option<String>,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    formula: Option<String>,
    #[serde(default)]
    context: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vars: Option<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split: Option<(Vec<String>, Vec<String>)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    body: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boxed: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    merged: Option<MergedField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    binder: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<RawNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    conclusion: Option<RawJudgment>,
}

/// `merged` is a list for multiplex and a single variable for contract.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum MergedField {
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    signature: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<Mode>,
    root: RawNode,
}

/// A derivation together with its signature and intended mode.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationFile {
    pub signature: KindEnv,
    pub mode: Option<Mode>,
    pub root: Derivation,
}

impl DerivationFile {
    pub fn new(root: Derivation, mode: Option<Mode>) -> DerivationFile {
        let mut signature = KindEnv::new();
        collect_signature(&root, &mut signature);
        DerivationFile { signature, mode, root }
    }

    pub fn parse(src: &str) -> Result<DerivationFile, FileError> {
        let raw: RawFile = serde_json::from_str(src).map_err(|e| FileError::Json(e.to_string()))?;
        let mut env = KindEnv::new();
        for (name, k) in &raw.signature {
            let kind = parse_kind(k).map_err(|e| FileError::Schema {
                path: format!("signature.{name}"),
                message: e.to_string(),
            })?;
            env.insert(name.clone(), kind);
        }
        let reader = Reader { env };
        let root = reader.node(&raw.root, "root")?;
        Ok(DerivationFile {
            signature: reader.env,
            mode: raw.mode,
            root,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = RawFile {
            signature: self.signature.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            mode: self.mode,
            root: write_node(&self.root),
        };
        serde_json::to_string_pretty(&raw).expect("derivations serialize")
    }
}

/// Free constructor variables of every formula in `d`, at their kinds.
/// Eigenvariables are included; re-declaring them is harmless.
fn collect_signature(d: &Derivation, out: &mut KindEnv) {
    let mut add = |c: &Constructor| collect_free_kinds(c, &mut Vec::new(), out);
    match &d.rule {
        Rule::AxPos { formula, .. } | Rule::AxNeg { formula, .. } | Rule::Weaken { formula, .. } => add(formula),
        Rule::Exists { witness, body, var, kind } => {
            add(witness);
            add(&Constructor::exists(var.clone(), kind.clone(), body.clone()));
        }
        Rule::Conv { target, .. } => add(target),
        Rule::MultiplexN { formula: Some(f), .. } => add(f),
        _ => {}
    }
    if let Some(j) = &d.conclusion {
        for a in j.context().values() {
            add(a);
        }
        if let Judgment::Term { formula, .. } = j {
            add(formula);
        }
    }
    for p in &d.premises {
        collect_signature(p, out);
    }
}

fn collect_free_kinds(c: &Constructor, bound: &mut Vec<String>, out: &mut KindEnv) {
    use Constructor as C;
    match c {
        C::Var(x, k) | C::VarNeg(x, k) => {
            if !bound.contains(x) {
                out.entry(x.clone()).or_insert_with(|| k.clone());
            }
        }
        C::Lam(x, _, t) | C::Exists(x, _, t) | C::Forall(x, _, t) => {
            bound.push(x.clone());
            collect_free_kinds(t, bound, out);
            bound.pop();
        }
        C::App(a, b) | C::Tensor(a, b) | C::Parr(a, b) => {
            collect_free_kinds(a, bound, out);
            collect_free_kinds(b, bound, out);
        }
        C::Down(a) | C::Up(a) | C::Bang(a) | C::Quest(a) => collect_free_kinds(a, bound, out),
        C::EqGuard(t, u, a) => {
            collect_free_kinds(t, bound, out);
            collect_free_kinds(u, bound, out);
            collect_free_kinds(a, bound, out);
        }
        C::Zero | C::Succ | C::Rec(_) | C::RecNeg(_) => {}
    }
}

struct Reader {
    env: KindEnv,
}

fn schema(path: &str, message: impl Into<String>) -> FileError {
    FileError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn parse_var(src: &str, path: &str) -> Result<Variable, FileError> {
    match parse_term(src) {
        Ok(Term::Var(v)) => Ok(v),
        Ok(t) => Err(schema(path, format!("expected a variable, found {t}"))),
        Err(e) => Err(schema(path, format!("variable '{src}': {e}"))),
    }
}

fn parse_vars(srcs: &[String], path: &str) -> Result<Vec<Variable>, FileError> {
    srcs.iter().map(|s| parse_var(s, path)).collect()
}

impl Reader {
    fn formula(&self, src: &str, path: &str) -> Result<Constructor, FileError> {
        parse_constructor(src, &self.env).map_err(|e| schema(path, format!("formula '{src}': {e}")))
    }

    fn kind(&self, src: &str, path: &str) -> Result<Kind, FileError> {
        parse_kind(src).map_err(|e| schema(path, format!("kind '{src}': {e}")))
    }

    fn judgment(&self, j: &RawJudgment, path: &str) -> Result<Judgment, FileError> {
        let path = &format!("{path}.conclusion");
        let mut context = Context::new();
        for (v, a) in &j.context {
            let v = parse_var(v, path)?;
            let a = self.formula(a, path)?;
            if context.insert(v.clone(), a).is_some() {
                return Err(schema(path, format!("{v} is listed twice")));
            }
        }
        match (&j.command, &j.term, &j.formula) {
            (Some(c), None, None) => Ok(Judgment::Command {
                command: parse_command(c).map_err(|e| schema(path, format!("command: {e}")))?,
                context,
            }),
            (None, Some(t), Some(a)) => Ok(Judgment::Term {
                term: parse_term(t).map_err(|e| schema(path, format!("term: {e}")))?,
                formula: self.formula(a, path)?,
                context,
            }),
            _ => Err(schema(path, "a judgment has either 'command' or both 'term' and 'type'")),
        }
    }

    fn node(&self, n: &RawNode, path: &str) -> Result<Derivation, FileError> {
        let need = |field: &Option<String>, name: &str| {
            field
                .clone()
                .ok_or_else(|| schema(path, format!("rule '{}' needs '{name}'", n.rule)))
        };
        let var = || parse_var(&need(&n.var, "var")?, path);
        let formula = || self.formula(&need(&n.formula, "formula")?, path);
        let split = || -> Result<[Vec<Variable>; 2], FileError> {
            let (a, b) = n
                .split
                .as_ref()
                .ok_or_else(|| schema(path, format!("rule '{}' needs 'split'", n.rule)))?;
            Ok([parse_vars(a, path)?, parse_vars(b, path)?])
        };
        let mut inner_env = None;
        let rule = match n.rule.as_str() {
            "ax+" => Rule::AxPos { var: var()?, formula: formula()? },
            "ax-" => Rule::AxNeg { var: var()?, formula: formula()? },
            "mu+" => Rule::MuPos { var: var()? },
            "mu-" => Rule::MuNeg { var: var()? },
            "cut" => Rule::Cut { split: split()? },
            "tensor" => Rule::Tensor { split: split()? },
            "parr" => {
                let (a, b) = n.vars.as_ref().ok_or_else(|| schema(path, "rule 'parr' needs 'vars'"))?;
                Rule::Parr {
                    vars: (parse_var(a, path)?, parse_var(b, path)?),
                }
            }
            "down" => Rule::ShiftDown,
            "up" => Rule::ShiftUp { var: var()? },
            "forall" | "exists" => {
                let x = need(&n.var, "var")?;
                let k = n
                    .kind
                    .as_ref()
                    .or(n.witness_kind.as_ref())
                    .ok_or_else(|| schema(path, format!("rule '{}' needs 'kind'", n.rule)))?;
                let kind = self.kind(k, path)?;
                let mut env = self.env.clone();
                env.insert(x.clone(), kind.clone());
                let scoped = Reader { env };
                let rule = if n.rule == "forall" {
                    Rule::Forall { var: x, kind }
                } else {
                    Rule::Exists {
                        witness: self.formula(&need(&n.witness, "witness")?, path)?,
                        body: scoped.formula(&need(&n.body, "body")?, path)?,
                        var: x,
                        kind,
                    }
                };
                if matches!(rule, Rule::Forall { .. }) {
                    inner_env = Some(scoped);
                }
                rule
            }
            "conv" => Rule::Conv {
                var: var()?,
                target: self.formula(&need(&n.target, "target")?, path)?,
            },
            "weaken" => Rule::Weaken { var: var()?, formula: formula()? },
            "bang" => Rule::BangK {
                boxed: parse_vars(n.boxed.as_deref().unwrap_or_default(), path)?,
            },
            "multiplex" => {
                let merged = match &n.merged {
                    Some(MergedField::Many(v)) => parse_vars(v, path)?,
                    Some(MergedField::One(v)) => vec![parse_var(v, path)?],
                    None => Vec::new(),
                };
                if let Some(k) = n.n {
                    if k != merged.len() {
                        return Err(schema(path, format!("n = {k} but {} variables are merged", merged.len())));
                    }
                }
                Rule::MultiplexN {
                    merged,
                    binder: parse_var(&need(&n.binder, "binder")?, path)?,
                    formula: n.formula.as_ref().map(|f| self.formula(f, path)).transpose()?,
                }
            }
            "contract" => Rule::Contract {
                left: parse_var(&need(&n.left, "left")?, path)?,
                right: parse_var(&need(&n.right, "right")?, path)?,
                merged: match &n.merged {
                    Some(MergedField::One(v)) => parse_var(v, path)?,
                    _ => return Err(schema(path, "rule 'contract' needs 'merged' (one variable)")),
                },
            },
            other => return Err(schema(path, format!("unknown rule '{other}'"))),
        };
        let reader = inner_env.as_ref().unwrap_or(self);
        let premises = n
            .premises
            .iter()
            .enumerate()
            .map(|(i, p)| reader.node(p, &format!("{path}/{i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let conclusion = n.conclusion.as_ref().map(|j| self.judgment(j, path)).transpose()?;
        Ok(Derivation {
            rule,
            premises,
            conclusion,
        })
    }
}

fn var_str(v: &Variable) -> String {
    v.to_string()
}

fn write_judgment(j: &Judgment) -> RawJudgment {
    let context = j
        .context()
        .iter()
        .map(|(v, a)| (var_str(v), a.to_string()))
        .collect();
    match j {
        Judgment::Command { command, .. } => RawJudgment {
            command: Some(command.to_string()),
            context,
            ..RawJudgment::default()
        },
        Judgment::Term { term, formula, .. } => RawJudgment {
            term: Some(term.to_string()),
            formula: Some(formula.to_string()),
            context,
            ..RawJudgment::default()
        },
    }
}

fn write_node(d: &Derivation) -> RawNode {
    let mut n = RawNode {
        rule: d.rule.name().to_string(),
        premises: d.premises.iter().map(write_node).collect(),
        conclusion: d.conclusion.as_ref().map(write_judgment),
        ..RawNode::default()
    };
    let vs = |v: &[Variable]| v.iter().map(var_str).collect::<Vec<_>>();
    match &d.rule {
        Rule::AxPos { var, formula } | Rule::AxNeg { var, formula } | Rule::Weaken { var, formula } => {
            n.var = Some(var_str(var));
            n.formula = Some(formula.to_string());
        }
        Rule::MuPos { var } | Rule::MuNeg { var } | Rule::ShiftUp { var } => n.var = Some(var_str(var)),
        Rule::Cut { split } | Rule::Tensor { split } => n.split = Some((vs(&split[0]), vs(&split[1]))),
        Rule::Parr { vars } => n.vars = Some((var_str(&vars.0), var_str(&vars.1))),
        Rule::ShiftDown => {}
        Rule::Exists { var, kind, witness, body } => {
            n.var = Some(var.clone());
            n.kind = Some(kind.to_string());
            n.witness = Some(witness.to_string());
            n.body = Some(body.to_string());
        }
        Rule::Forall { var, kind } => {
            n.var = Some(var.clone());
            n.kind = Some(kind.to_string());
        }
        Rule::Conv { var, target } => {
            n.var = Some(var_str(var));
            n.target = Some(target.to_string());
        }
        Rule::BangK { boxed } => n.boxed = Some(vs(boxed)),
        Rule::MultiplexN { merged, binder, formula } => {
            n.n = Some(merged.len());
            n.merged = Some(MergedField::Many(vs(merged)));
            n.binder = Some(var_str(binder));
            n.formula = formula.as_ref().map(|f| f.to_string());
        }
        Rule::Contract { left, right, merged } => {
            n.left = Some(var_str(left));
            n.right = Some(var_str(right));
            n.merged = Some(MergedField::One(var_str(merged)));
        }
    }
    n
}
