//! A workbench for the polarized calculus L_foc: terms and reduction, the
//! constructor language of MALω, quantitative monoids, derivation checking and
//! weights, λ-calculus encodings, and the linear forcing layer with its
//! countdown machine.

pub mod term;
pub mod reduce;
pub mod constructor;
pub mod gen;
pub mod quantity;
pub mod typing;
pub mod lambda;
pub mod forcing;
pub mod corpus;
pub mod selftest;
pub mod cli;
