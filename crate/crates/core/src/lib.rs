//! Exact-arithmetic participatory budgeting: voting rules, proportionality
//! axioms, and utilitarian welfare guarantees.
//!
//! An approval-based PB instance consists of a budget, a set of costed
//! projects, and per-voter approval sets. This crate implements the four
//! standard rule families over such instances — value-greedy selection, the
//! Method of Equal Shares (with greedy completion), and exact welfare
//! maximization — together with the machinery needed to certify their
//! welfare behaviour:
//!
//! * cost-neutral additive satisfaction functions (cost, cardinality,
//!   rounded square-root, and table-defined), including the
//!   decreasing-normalized-satisfaction (DNS) class test;
//! * the EJR-up-to-one-project proportionality checker with violation
//!   witnesses;
//! * closed-form welfare bounds parameterized by budget and extreme project
//!   costs, with certified rational brackets for the irrational terms;
//! * generators for the adversarial instance families on which those bounds
//!   are tight, plus seeded random instances for falsification sweeps.
//!
//! Every monetary and satisfaction quantity is a [`Rational`] (arbitrary
//! precision); no floating point enters any rule, axiom, or bound
//! computation. The crate is `no_std` (alloc required); all file formats and
//! the CLI live in the companion `pb-cli` crate.

#![cfg_attr(not(test), no_std)]
// Error variants carry the exact rationals they report on.
#![allow(clippy::result_large_err)]

extern crate alloc;

pub mod axioms;
pub mod generators;
pub mod guarantees;
pub mod model;
pub mod rational;
pub mod roots;
pub mod rules;
pub mod satisfaction;
#[cfg(test)]
mod testutil;

pub use model::{validate_instance, Instance, InstanceParams, Project, RawInstance, ValidationMode, VoterId};
pub use rational::Rational;
pub use satisfaction::SatisfactionFunction;
