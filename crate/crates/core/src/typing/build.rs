//! Shorthands for assembling derivations bottom-up. Two-premise rules compute
//! their context split from the premises, so those builders check the
//! premises (with every rule enabled) and can fail.

use super::{check_any, CheckError, Derivation, Judgment, Rule};
use crate::constructor::{Constructor, Kind};
use crate::term::{Polarity, Variable};

/// `(Ax₊)` or `(Ax₋)` according to the variable's polarity.
pub fn ax(var: Variable, formula: Constructor) -> Derivation {
    Derivation::leaf(match var.polarity {
        Polarity::Positive => Rule::AxPos { var, formula },
        Polarity::Negative => Rule::AxNeg { var, formula },
    })
}

/// `(μ₊)` for a negative binder, `(μ₋)` for a positive one.
pub fn mu(var: Variable, premise: Derivation) -> Derivation {
    Derivation::unary(
        match var.polarity {
            Polarity::Negative => Rule::MuPos { var },
            Polarity::Positive => Rule::MuNeg { var },
        },
        premise,
    )
}

fn split(l: &Derivation, r: &Derivation) -> Result<[Vec<Variable>; 2], CheckError> {
    let names = |j: Judgment| j.context().keys().cloned().collect::<Vec<_>>();
    Ok([names(check_any(l)?), names(check_any(r)?)])
}

pub fn cut(l: Derivation, r: Derivation) -> Result<Derivation, CheckError> {
    let split = split(&l, &r)?;
    Ok(Derivation::binary(Rule::Cut { split }, l, r))
}

pub fn tensor(l: Derivation, r: Derivation) -> Result<Derivation, CheckError> {
    let split = split(&l, &r)?;
    Ok(Derivation::binary(Rule::Tensor { split }, l, r))
}

pub fn parr(k1: Variable, k2: Variable, premise: Derivation) -> Derivation {
    Derivation::unary(Rule::Parr { vars: (k1, k2) }, premise)
}

pub fn down(premise: Derivation) -> Derivation {
    Derivation::unary(Rule::ShiftDown, premise)
}

pub fn up(var: Variable, premise: Derivation) -> Derivation {
    Derivation::unary(Rule::ShiftUp { var }, premise)
}

pub fn exists(var: &str, kind: Kind, witness: Constructor, body: Constructor, premise: Derivation) -> Derivation {
    Derivation::unary(
        Rule::Exists {
            var: var.to_string(),
            kind,
            witness,
            body,
        },
        premise,
    )
}

pub fn forall(var: &str, kind: Kind, premise: Derivation) -> Derivation {
    Derivation::unary(
        Rule::Forall {
            var: var.to_string(),
            kind,
        },
        premise,
    )
}

pub fn conv(var: Variable, target: Constructor, premise: Derivation) -> Derivation {
    Derivation::unary(Rule::Conv { var, target }, premise)
}

pub fn weaken(var: Variable, formula: Constructor, premise: Derivation) -> Derivation {
    Derivation::unary(Rule::Weaken { var, formula }, premise)
}

/// `(!ₖ)` boxing the premise's whole context, in variable order.
pub fn bang(premise: Derivation) -> Result<Derivation, CheckError> {
    let boxed = check_any(&premise)?.context().keys().cloned().collect();
    Ok(Derivation::unary(Rule::BangK { boxed }, premise))
}

pub fn multiplex(merged: Vec<Variable>, binder: Variable, premise: Derivation) -> Derivation {
    Derivation::unary(
        Rule::MultiplexN {
            merged,
            binder,
            formula: None,
        },
        premise,
    )
}

pub fn contract(left: Variable, right: Variable, merged: Variable, premise: Derivation) -> Derivation {
    Derivation::unary(Rule::Contract { left, right, merged }, premise)
}
