//! Bayesian program induction over a small stochastic expression language.
//!
//! Hypotheses are *factorized programs*: an ordered list of one-argument
//! functions `F1..FK` built from `pair`, `first`, `rest`, `if`, `flip`,
//! `empty` and calls to earlier (or the same) factors. Running the last
//! factor on the empty string samples an output string, so every program
//! denotes a probability distribution over strings.
//!
//! The crate is organised as:
//!
//! - [`expr`]: atoms, strings, expressions, programs and their canonical text form.
//! - [`eval`]: the interpreter, with a call budget and a length cap.
//! - [`dist`]: output distributions, by seeded Monte Carlo or by exhaustive
//!   enumeration of flip outcomes.
//! - [`grammar`]: the probabilistic grammar over expressions (sampling and priors).
//! - [`scoring`]: datasets, likelihood and posterior scores.
//! - [`inference`]: tree-regeneration Metropolis-Hastings and hypothesis stores.
//! - [`languages`]: target languages, their samplers and membership oracles.
//! - [`metrics`]: precision, recall and F-scores against a target language.
//! - [`runner`]: run configuration and the experiment drivers used by the CLI.

pub mod dist;
pub mod error;
pub mod eval;
pub mod expr;
pub mod grammar;
pub mod inference;
pub mod languages;
pub mod metrics;
pub mod rng;
pub mod runner;
pub mod scoring;

pub use dist::{enumerate_distribution, estimate_distribution, StringDistribution};
pub use error::{Error, Result};
pub use eval::{evaluate, EvalLimits, EvalOutcome};
pub use expr::{Atom, Expr, FactorizedProgram, Prob, Str};
pub use grammar::{ExpressionGrammar, Nonterminal};
pub use inference::{ChainConfig, HypothesisStore};
pub use languages::{LanguageId, TargetLanguage};
pub use scoring::{Dataset, ScoreParams, ScoredHypothesis, Scorer};
