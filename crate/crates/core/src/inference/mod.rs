//! Tree-regeneration Metropolis-Hastings over factorized programs.
//!
//! Each step either regenerates a subtree of one factor (probability
//! `1 - factor_move_prob`) or adds/removes the last factor. Chains run
//! independently; their best hypotheses are merged into a
//! [`HypothesisStore`] whose weights are the renormalized posteriors.

mod chain;
mod proposal;
mod store;

use rayon::prelude::*;

pub use chain::{mh_step, run_chain, Chain, ChainState};
pub use proposal::{propose_factor_move, propose_regen, Proposal};
pub use store::{HypothesisStore, StoreEntry};

use crate::error::{Error, Result};
use crate::expr::MAX_FACTORS;
use crate::scoring::{Dataset, Scorer};

/// Worker stack size. Evaluation recurses through nested factor calls.
const STACK_SIZE: usize = 64 << 20;

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub steps: usize,
    pub chains: usize,
    /// Hypotheses kept per chain.
    pub top_n: usize,
    pub factor_move_prob: f64,
    pub max_factors: usize,
    /// Posterior differences are divided by this in the acceptance ratio.
    pub temperature: f64,
    pub seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig::paper(0)
    }
}

impl ChainConfig {
    /// 12 chains of 50000 steps.
    pub fn paper(seed: u64) -> ChainConfig {
        ChainConfig {
            steps: 50_000,
            chains: 12,
            top_n: 100,
            factor_move_prob: 0.2,
            max_factors: MAX_FACTORS,
            temperature: 1.0,
            seed,
        }
    }

    /// 4 chains of 20000 steps.
    pub fn desk(seed: u64) -> ChainConfig {
        ChainConfig {
            steps: 20_000,
            chains: 4,
            ..ChainConfig::paper(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.steps == 0 {
            return fail("steps must be at least 1");
        }
        if self.chains == 0 || self.top_n == 0 {
            return fail("chains and top_n must be at least 1");
        }
        if !(0.0..1.0).contains(&self.factor_move_prob) {
            return fail("factor_move_prob must be in [0, 1)");
        }
        if !(1..=MAX_FACTORS).contains(&self.max_factors) {
            return fail("max_factors must be in 1..=10");
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return fail("temperature must be positive");
        }
        Ok(())
    }
}

/// Run `f(i)` for `i in 0..n` on a pool with large stacks. Results
/// come back in index order whatever the scheduling.
pub fn par_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    pool().install(|| (0..n).into_par_iter().map(&f).collect())
}

/// Apply `f` to every item on the same pool as [`par_indexed`].
pub fn par_each_mut<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T) + Sync + Send,
{
    pool().install(|| items.par_iter_mut().for_each(f))
}

fn pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .stack_size(STACK_SIZE)
        .build()
        .expect("thread pool")
}

/// Run every chain and merge their top hypotheses.
pub fn run_inference(config: &ChainConfig, data: &Dataset, scorer: &Scorer) -> HypothesisStore {
    let tops = par_indexed(config.chains, |i| run_chain(config, i, data, scorer));
    HypothesisStore::from_hypotheses(tops.into_iter().flatten())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::atoms;
    use crate::grammar::ExpressionGrammar;
    use crate::scoring::ScoreParams;

    fn scorer() -> Scorer {
        let g = ExpressionGrammar::standard(&atoms(&["a"]).unwrap()).unwrap();
        Scorer::new(g, ScoreParams::default(), 0)
    }

    #[test]
    fn profiles() {
        assert_eq!(ChainConfig::default().chains, 12);
        assert_eq!(ChainConfig::default().steps, 50_000);
        assert_eq!(ChainConfig::desk(0).chains, 4);
        assert!(ChainConfig::desk(0).validate().is_ok());
        let bad = ChainConfig {
            factor_move_prob: 1.0,
            ..ChainConfig::desk(0)
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn store_from_chains() {
        let config = ChainConfig {
            steps: 300,
            chains: 3,
            top_n: 4,
            ..ChainConfig::desk(11)
        };
        let data = Dataset::from_compact(&["a", "aa"]);
        let s = scorer();
        let store = run_inference(&config, &data, &s);
        assert!(store.len() <= 12);
        assert!((store.total_weight() - 1.0).abs() < 1e-9);
        // one chain is run_chain plus normalization
        let single = ChainConfig {
            chains: 1,
            ..config.clone()
        };
        let store1 = run_inference(&single, &data, &s);
        let top = run_chain(&single, 0, &data, &s);
        let names: Vec<_> = store1
            .entries()
            .iter()
            .map(|e| e.hypothesis.canonical.clone())
            .collect();
        assert_eq!(names, top.iter().map(|h| h.canonical.clone()).collect::<Vec<_>>());
        // same config, same store
        let again = run_inference(&config, &data, &scorer());
        assert_eq!(store.to_text(&[]), again.to_text(&[]));
    }
}
