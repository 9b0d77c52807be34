//! Exact-arithmetic toolkit for welfare-sharing games.
//!
//! A welfare-sharing game has a set of players choosing subsets of resources;
//! each resource generates a welfare depending on who is on it, split among
//! those players by a local distribution rule. This crate provides:
//!
//! - [`model`]: players, subsets, welfare functions and their unanimity-basis
//!   decomposition (exact rationals throughout, no floating point),
//! - [`rules`]: the standard distribution-rule families (equal/proportional
//!   share, Shapley value, marginal contribution, and their weighted and
//!   generalized weighted variants), weight systems, budget-balance auditing,
//!   and the ground-welfare transform connecting the Shapley and
//!   marginal-contribution families,
//! - [`game`]: finite games, exhaustive pure-Nash-equilibrium enumeration and
//!   best-response cycle certificates,
//! - [`potential`]: vector-valued potential functions (closed form and
//!   recursive) and the potential-property verifier,
//! - [`classify`]: a staged decision procedure that either certifies a rule
//!   set as a generalized weighted Shapley value (with an explicit weight
//!   system) or pinpoints the first failed necessary condition,
//! - [`counterexamples`]: constructive generators that turn each failed
//!   condition into a concrete game with no pure Nash equilibrium,
//! - [`json`]: the stable JSON formats used by the `sharekit` CLI.

pub mod rational;

pub mod model;

pub mod rules;

pub mod game;

pub mod potential;

pub mod classify;

pub mod counterexamples;

pub mod json;

pub use model::{BasisForm, PlayerSet, Subset, WelfareFunction};
pub use rational::Rational;
pub use rules::{DistributionRule, RuleSpec, WeightSystem};

/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid rational '{0}'")]
    InvalidRational(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error("enumeration budget exceeded: {profiles} profiles, budget {budget}")]
    BudgetExceeded { profiles: u128, budget: u64 },

    #[error("premise violated: {0}")]
    PremiseViolated(String),

    #[error("{path}: {message}")]
    Json { path: String, message: String },

    #[error("internal invariant failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn premise(msg: impl Into<String>) -> Self {
        Error::PremiseViolated(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
