use std::collections::HashSet;

use rand::Rng;

use super::proposal::{propose_factor_move, propose_regen, Proposal};
use super::store::rank;
use super::ChainConfig;
use crate::expr::FactorizedProgram;
use crate::grammar::Nonterminal;
use crate::rng::{derive_seed, SplitMix64};
use crate::scoring::{Dataset, ScoredHypothesis, Scorer};

#[derive(Clone, Debug)]
pub struct ChainState {
    pub current: ScoredHypothesis,
    pub step: usize,
    pub accepted: usize,
}

impl ChainState {
    pub fn acceptance_rate(&self) -> f64 {
        if self.step == 0 {
            0.0
        } else {
            self.accepted as f64 / self.step as f64
        }
    }
}

/// The `cap` best distinct hypotheses offered so far. Rejected hypotheses
/// are never kept.
#[derive(Clone, Debug)]
pub(crate) struct TopN {
    cap: usize,
    items: Vec<ScoredHypothesis>,
    names: HashSet<String>,
}

impl TopN {
    pub fn new(cap: usize) -> TopN {
        TopN {
            cap,
            items: Vec::with_capacity(cap + 1),
            names: HashSet::new(),
        }
    }

    pub fn offer(&mut self, h: &ScoredHypothesis) {
        if !h.log_post.is_finite() || self.names.contains(&h.canonical) {
            return;
        }
        let pos = self.items.partition_point(|x| rank(x, h).is_lt());
        if pos >= self.cap {
            return;
        }
        self.items.insert(pos, h.clone());
        self.names.insert(h.canonical.clone());
        if self.items.len() > self.cap {
            let dropped = self.items.pop().expect("over capacity");
            self.names.remove(&dropped.canonical);
        }
    }

    pub fn items(&self) -> &[ScoredHypothesis] {
        &self.items
    }

    fn rescore(&mut self, data: &Dataset, scorer: &Scorer) {
        let old = std::mem::take(&mut self.items);
        self.names.clear();
        for h in old {
            self.offer(&scorer.rescore(&h, data));
        }
    }
}

/// One MH transition. Returns whether the proposal was accepted.
pub fn mh_step<R: Rng + ?Sized>(
    state: &mut ChainState,
    data: &Dataset,
    scorer: &Scorer,
    config: &ChainConfig,
    rng: &mut R,
) -> bool {
    let grammar = scorer.grammar();
    let program = &state.current.program;
    let proposal: Proposal = if rng.gen::<f64>() < config.factor_move_prob {
        propose_factor_move(program, grammar, rng, config.max_factors)
    } else {
        propose_regen(program, grammar, rng)
    };
    let u: f64 = rng.gen();
    state.step += 1;
    let candidate = scorer.score(&proposal.program, data);
    let accept = if candidate.log_post == f64::NEG_INFINITY {
        false
    } else if state.current.log_post == f64::NEG_INFINITY {
        true
    } else {
        let log_ratio = (candidate.log_post - state.current.log_post) / config.temperature + proposal.log_q_bwd
            - proposal.log_q_fwd;
        log_ratio >= 0.0 || u.ln() < log_ratio
    };
    if accept {
        state.current = candidate;
        state.accepted += 1;
    }
    accept
}

/// A single Markov chain that can be advanced in pieces and moved to new
/// data between pieces.
#[derive(Clone, Debug)]
pub struct Chain {
    config: ChainConfig,
    rng: SplitMix64,
    state: ChainState,
    top: TopN,
    initial: ScoredHypothesis,
    best_log_post: f64,
}

impl Chain {
    /// Start from a fresh single-factor sample. The chain's random stream is
    /// derived from `(config.seed, index)`.
    pub fn new(config: &ChainConfig, index: usize, data: &Dataset, scorer: &Scorer) -> Chain {
        let mut rng = SplitMix64::new(derive_seed(config.seed, index as u64));
        let grammar = scorer.grammar();
        let body = grammar
            .sample_expression(Nonterminal::List, 1, &mut rng, grammar.max_depth())
            .expect("list sampling from factor 1");
        let program = FactorizedProgram::single(body).expect("sampled expression is valid");
        Chain::from_program(config, &program, rng, data, scorer)
    }

    /// Start from a given program.
    pub fn starting_at(
        config: &ChainConfig,
        index: usize,
        program: &FactorizedProgram,
        data: &Dataset,
        scorer: &Scorer,
    ) -> Chain {
        let rng = SplitMix64::new(derive_seed(config.seed, index as u64));
        Chain::from_program(config, program, rng, data, scorer)
    }

    fn from_program(
        config: &ChainConfig,
        program: &FactorizedProgram,
        rng: SplitMix64,
        data: &Dataset,
        scorer: &Scorer,
    ) -> Chain {
        let current = scorer.score(program, data);
        let mut top = TopN::new(config.top_n);
        top.offer(&current);
        Chain {
            config: config.clone(),
            rng,
            best_log_post: current.log_post,
            initial: current.clone(),
            state: ChainState {
                current,
                step: 0,
                accepted: 0,
            },
            top,
        }
    }

    pub fn step(&mut self, data: &Dataset, scorer: &Scorer) -> bool {
        let accepted = mh_step(&mut self.state, data, scorer, &self.config, &mut self.rng);
        if accepted {
            self.top.offer(&self.state.current);
            self.best_log_post = self.best_log_post.max(self.state.current.log_post);
        }
        accepted
    }

    pub fn run(&mut self, steps: usize, data: &Dataset, scorer: &Scorer) {
        for _ in 0..steps {
            self.step(data, scorer);
        }
    }

    /// Like [`Chain::run`], calling `observe` with the state after every step.
    pub fn run_observed<F: FnMut(&ChainState)>(
        &mut self,
        steps: usize,
        data: &Dataset,
        scorer: &Scorer,
        mut observe: F,
    ) {
        for _ in 0..steps {
            self.step(data, scorer);
            observe(&self.state);
        }
    }

    /// Re-score the current state and the collected hypotheses on new data.
    pub fn set_data(&mut self, data: &Dataset, scorer: &Scorer) {
        self.state.current = scorer.rescore(&self.state.current, data);
        self.initial = scorer.rescore(&self.initial, data);
        self.top.rescore(data, scorer);
        self.top.offer(&self.state.current);
        self.best_log_post = self
            .top
            .items()
            .first()
            .map_or(self.state.current.log_post, |h| h.log_post);
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    /// Highest log posterior visited (on the current data, after `set_data`).
    pub fn best_log_post(&self) -> f64 {
        self.best_log_post
    }

    /// The best distinct hypotheses visited, best first. Falls back to the
    /// initial hypothesis when nothing visited had a finite score.
    pub fn top(&self) -> Vec<ScoredHypothesis> {
        if self.top.items().is_empty() {
            vec![self.initial.clone()]
        } else {
            self.top.items().to_vec()
        }
    }
}

/// Run chain `index` for `config.steps` steps and return its top hypotheses.
pub fn run_chain(config: &ChainConfig, index: usize, data: &Dataset, scorer: &Scorer) -> Vec<ScoredHypothesis> {
    let mut chain = Chain::new(config, index, data, scorer);
    chain.run(config.steps, data, scorer);
    chain.top()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::atoms;
    use crate::grammar::ExpressionGrammar;
    use crate::scoring::ScoreParams;

    fn scorer(alpha: &[&str]) -> Scorer {
        let g = ExpressionGrammar::standard(&atoms(alpha).unwrap()).unwrap();
        Scorer::new(g, ScoreParams::default(), 0)
    }

    fn small(steps: usize) -> ChainConfig {
        ChainConfig {
            steps,
            top_n: 5,
            ..ChainConfig::desk(7)
        }
    }

    #[test]
    fn zero_steps_returns_initial() {
        let s = scorer(&["a"]);
        let data = Dataset::from_compact(&["a"]);
        let top = run_chain(&small(0), 0, &data, &s);
        assert_eq!(top.len(), 1);
        let chain = Chain::new(&small(0), 0, &data, &s);
        assert_eq!(top[0].canonical, chain.state().current.canonical);
    }

    #[test]
    fn top_n_bound_and_order() {
        let s = scorer(&["a"]);
        let data = Dataset::from_compact(&["a", "aa"]);
        let top = run_chain(&small(400), 1, &data, &s);
        assert!(top.len() <= 5);
        for w in top.windows(2) {
            assert!(w[0].log_post >= w[1].log_post);
        }
        let names: HashSet<_> = top.iter().map(|h| &h.canonical).collect();
        assert_eq!(names.len(), top.len());
    }

    #[test]
    fn deterministic_chains() {
        let s = scorer(&["a", "b"]);
        let data = Dataset::from_compact(&["ab"]);
        let a = run_chain(&small(300), 2, &data, &s);
        let b = run_chain(&small(300), 2, &data, &scorer(&["a", "b"]));
        let names = |v: &[ScoredHypothesis]| v.iter().map(|h| h.canonical.clone()).collect::<Vec<_>>();
        assert_eq!(names(&a), names(&b));
    }

    #[test]
    fn running_max_is_monotone() {
        let s = scorer(&["a"]);
        let data = Dataset::from_compact(&["a", "aa", "a"]);
        let mut chain = Chain::new(&small(0), 3, &data, &s);
        let mut last = chain.best_log_post();
        for _ in 0..300 {
            chain.step(&data, &s);
            assert!(chain.best_log_post() >= last);
            last = chain.best_log_post();
        }
    }

    #[test]
    fn rejected_proposals_leave_state() {
        // From a finite state, a proposal scoring -inf is never accepted.
        let s = scorer(&["a"]);
        let data = Dataset::from_compact(&["a"]);
        let p: FactorizedProgram = "(pair a nil)".parse().unwrap();
        let mut chain = Chain::starting_at(&small(0), 0, &p, &data, &s);
        for _ in 0..500 {
            chain.step(&data, &s);
            assert!(chain.state().current.log_post.is_finite());
        }
    }

    #[test]
    fn top_n_keeps_best() {
        let mk = |src: &str, lp: f64| {
            let program: FactorizedProgram = src.parse().unwrap();
            ScoredHypothesis {
                canonical: program.canonical(),
                program,
                log_prior: lp,
                log_lik: 0.0,
                log_post: lp,
                dist: None,
            }
        };
        let mut t = TopN::new(2);
        t.offer(&mk("a", -5.0));
        t.offer(&mk("b", -1.0));
        t.offer(&mk("a", -5.0));
        t.offer(&mk("nil", -3.0));
        t.offer(&mk("x", f64::NEG_INFINITY));
        let names: Vec<_> = t.items().iter().map(|h| h.canonical.as_str()).collect();
        assert_eq!(names, vec!["b", "nil"]);
    }
}
