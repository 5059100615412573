//! Likelihood of positive evidence and the posterior score of a program.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::dist::{estimate_counts, StringDistribution};
use crate::eval::EvalLimits;
use crate::expr::{Atom, FactorizedProgram, Str};
use crate::grammar::ExpressionGrammar;
use crate::rng::{derive_seed_str, fnv1a};

/// A multiset of observed strings, kept in observation order so that
/// prefixes of a dataset are datasets too.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dataset {
    items: Vec<Str>,
    counts: BTreeMap<Str, usize>,
}

impl Dataset {
    pub fn new(items: Vec<Str>) -> Dataset {
        let mut counts = BTreeMap::new();
        for s in &items {
            *counts.entry(s.clone()).or_insert(0) += 1;
        }
        Dataset { items, counts }
    }

    pub fn empty() -> Dataset {
        Dataset::default()
    }

    /// Single-character tokens, e.g. `Dataset::from_compact(&["ab", "aabb"])`.
    pub fn from_compact(items: &[&str]) -> Dataset {
        Dataset::new(items.iter().map(|s| Str::chars(s)).collect())
    }

    pub fn items(&self) -> &[Str] {
        &self.items
    }

    pub fn counts(&self) -> &BTreeMap<Str, usize> {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The first `n` observations.
    pub fn prefix(&self, n: usize) -> Dataset {
        Dataset::new(self.items[..n.min(self.items.len())].to_vec())
    }

    /// Multiset union; order is `self` then `other`.
    pub fn concat(&self, other: &Dataset) -> Dataset {
        let mut items = self.items.clone();
        items.extend_from_slice(&other.items);
        Dataset::new(items)
    }

    /// Distinct tokens in first-seen order.
    pub fn alphabet(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = Vec::new();
        for s in &self.items {
            for a in s.iter() {
                if !out.contains(a) {
                    out.push(*a);
                }
            }
        }
        out
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.items.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreParams {
    /// Simulations per likelihood estimate during search.
    pub n_sim: usize,
    /// Simulations per hypothesis when evaluating a finished store.
    pub eval_n_sim: usize,
    pub outlier_log_penalty: f64,
    /// Programs whose non-halting mass exceeds this get zero prior.
    pub bottom_reject_threshold: f64,
    pub limits: EvalLimits,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams {
            n_sim: 1024,
            eval_n_sim: 2048,
            outlier_log_penalty: -1000.0,
            bottom_reject_threshold: 0.5,
            limits: EvalLimits::default(),
        }
    }
}

impl ScoreParams {
    /// Largest bottom count compatible with the rejection threshold.
    fn bottom_limit(&self) -> usize {
        (self.bottom_reject_threshold * self.n_sim as f64).floor() as usize
    }
}

#[derive(Clone, Debug)]
pub struct ScoredHypothesis {
    pub program: FactorizedProgram,
    pub canonical: String,
    pub log_prior: f64,
    pub log_lik: f64,
    pub log_post: f64,
    /// The search-time output distribution. `None` when the program was
    /// rejected before its distribution was complete.
    pub dist: Option<Arc<StringDistribution>>,
}

impl ScoredHypothesis {
    pub fn is_rejected(&self) -> bool {
        self.log_prior == f64::NEG_INFINITY
    }

    fn rejected(program: FactorizedProgram, canonical: String, dist: Option<Arc<StringDistribution>>) -> Self {
        ScoredHypothesis {
            program,
            canonical,
            log_prior: f64::NEG_INFINITY,
            log_lik: 0.0,
            log_post: f64::NEG_INFINITY,
            dist,
        }
    }
}

/// Multinomial log likelihood with a fixed penalty per unexplained occurrence.
pub fn log_likelihood(dist: &StringDistribution, data: &Dataset, params: &ScoreParams) -> f64 {
    likelihood_of(dist.probs(), data, params)
}

fn likelihood_of(probs: &BTreeMap<Str, f64>, data: &Dataset, params: &ScoreParams) -> f64 {
    let mut total = 0.0;
    for (s, &n) in data.counts() {
        let p = probs.get(s).copied().unwrap_or(0.0);
        let term = if p > 0.0 { p.ln() } else { params.outlier_log_penalty };
        total += n as f64 * term;
    }
    total
}

/// Score without a cache.
pub fn score(
    program: &FactorizedProgram,
    data: &Dataset,
    grammar: &ExpressionGrammar,
    params: &ScoreParams,
    seed: u64,
) -> ScoredHypothesis {
    let canonical = program.canonical();
    let base = base_score(program, &canonical, grammar, params, seed);
    finish(program.clone(), canonical, &base, data, params)
}

/// Data-independent part of a score.
#[derive(Clone, Debug)]
struct Base {
    log_prior: f64,
    dist: Option<Arc<StringDistribution>>,
    /// Halting outputs renormalized, shared with `dist`.
    renormalized: Option<Arc<BTreeMap<Str, f64>>>,
}

fn base_score(
    program: &FactorizedProgram,
    canonical: &str,
    grammar: &ExpressionGrammar,
    params: &ScoreParams,
    seed: u64,
) -> Base {
    let rejected = Base {
        log_prior: f64::NEG_INFINITY,
        dist: None,
        renormalized: None,
    };
    let log_prior = match grammar.log_prior_program(program) {
        Ok(lp) => lp,
        Err(_) => return rejected,
    };
    let hash = fnv1a(canonical.as_bytes());
    let Some(counts) = estimate_counts(
        program,
        hash,
        params.n_sim,
        seed,
        &params.limits,
        Some(params.bottom_limit()),
    ) else {
        return rejected;
    };
    let halted = counts.n_sim - counts.bottom as usize;
    let renormalized: BTreeMap<Str, f64> = counts
        .strings
        .iter()
        .map(|(s, &c)| (s.clone(), f64::from(c) / halted as f64))
        .collect();
    let dist = counts.into_distribution(seed);
    if dist.bottom_mass() > params.bottom_reject_threshold || halted == 0 {
        return Base {
            dist: Some(Arc::new(dist)),
            ..rejected
        };
    }
    Base {
        log_prior,
        dist: Some(Arc::new(dist)),
        renormalized: Some(Arc::new(renormalized)),
    }
}

fn finish(
    program: FactorizedProgram,
    canonical: String,
    base: &Base,
    data: &Dataset,
    params: &ScoreParams,
) -> ScoredHypothesis {
    match &base.renormalized {
        Some(probs) if base.log_prior.is_finite() => {
            let log_lik = likelihood_of(probs, data, params);
            ScoredHypothesis {
                program,
                canonical,
                log_prior: base.log_prior,
                log_lik,
                log_post: base.log_prior + log_lik,
                dist: base.dist.clone(),
            }
        }
        _ => ScoredHypothesis::rejected(program, canonical, base.dist.clone()),
    }
}

/// Number of cached programs after which the cache is emptied.
const CACHE_CAPACITY: usize = 200_000;

/// Scores programs against a fixed grammar and parameters, caching the
/// data-independent part of each score by canonical form. Cached values are
/// pure functions of the program, so sharing a scorer between threads does
/// not affect results.
pub struct Scorer {
    grammar: ExpressionGrammar,
    params: ScoreParams,
    seed: u64,
    cache: Mutex<HashMap<String, Base>>,
}

impl Scorer {
    pub fn new(grammar: ExpressionGrammar, params: ScoreParams, seed: u64) -> Scorer {
        Scorer {
            grammar,
            params,
            seed,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn grammar(&self) -> &ExpressionGrammar {
        &self.grammar
    }

    pub fn params(&self) -> &ScoreParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn score(&self, program: &FactorizedProgram, data: &Dataset) -> ScoredHypothesis {
        let canonical = program.canonical();
        let cached = self.cache.lock().expect("score cache").get(&canonical).cloned();
        let base = match cached {
            Some(b) => b,
            None => {
                let b = base_score(program, &canonical, &self.grammar, &self.params, self.seed);
                let mut cache = self.cache.lock().expect("score cache");
                if cache.len() >= CACHE_CAPACITY {
                    cache.clear();
                }
                cache.insert(canonical.clone(), b.clone());
                b
            }
        };
        finish(program.clone(), canonical, &base, data, &self.params)
    }

    /// Re-score a hypothesis on different data.
    pub fn rescore(&self, h: &ScoredHypothesis, data: &Dataset) -> ScoredHypothesis {
        self.score(&h.program, data)
    }

    /// Distribution used for evaluation: `eval_n_sim` simulations on a
    /// stream separate from the search-time one.
    pub fn evaluation_distribution(&self, program: &FactorizedProgram) -> StringDistribution {
        evaluation_distribution(program, &self.params, self.seed)
    }

    pub fn cache_len(&self) -> usize {
        self.cache.lock().expect("score cache").len()
    }
}

pub fn evaluation_distribution(program: &FactorizedProgram, params: &ScoreParams, seed: u64) -> StringDistribution {
    let seed = derive_seed_str(seed, "evaluation");
    crate::dist::estimate_distribution_with(program, params.eval_n_sim, seed, &params.limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::atoms;

    fn prog(s: &str) -> FactorizedProgram {
        s.parse().unwrap()
    }

    fn grammar(alpha: &[&str]) -> ExpressionGrammar {
        ExpressionGrammar::standard(&atoms(alpha).unwrap()).unwrap()
    }

    #[test]
    fn likelihood_examples() {
        let params = ScoreParams::default();
        let d = StringDistribution::from_compact(&[("ab", 0.5), ("aabb", 0.5)]);
        let l = log_likelihood(&d, &Dataset::from_compact(&["ab", "ab"]), &params);
        assert!((l - 2.0 * 0.5f64.ln()).abs() < 1e-12);
        let d = StringDistribution::from_compact(&[("ab", 1.0)]);
        assert_eq!(log_likelihood(&d, &Dataset::from_compact(&["ba"]), &params), -1000.0);
        let d = StringDistribution::from_compact(&[("a", 1.0)]);
        assert_eq!(log_likelihood(&d, &Dataset::empty(), &params), 0.0);
        // per occurrence
        let d = StringDistribution::from_compact(&[("ab", 1.0)]);
        assert_eq!(
            log_likelihood(&d, &Dataset::from_compact(&["ba", "ba", "ab"]), &params),
            -2000.0
        );
    }

    #[test]
    fn non_halting_is_rejected() {
        let h = score(
            &prog("(F1 x)"),
            &Dataset::from_compact(&["a"]),
            &grammar(&["a"]),
            &ScoreParams::default(),
            1,
        );
        assert_eq!(h.log_post, f64::NEG_INFINITY);
        assert!(h.is_rejected());
        assert_eq!(h.log_lik, 0.0);
    }

    #[test]
    fn deterministic_program_score() {
        let g = grammar(&["a", "b"]);
        let p = prog("(pair a b)");
        let h = score(&p, &Dataset::from_compact(&["ab"]), &g, &ScoreParams::default(), 1);
        assert_eq!(h.log_lik, 0.0);
        assert_eq!(h.log_post, h.log_prior);
        assert_eq!(h.log_prior, g.log_prior_program(&p).unwrap());
    }

    #[test]
    fn geometric_likelihood() {
        let expected = 2.0 * 0.7f64.ln() + 0.21f64.ln();
        let data = Dataset::from_compact(&["a", "a", "aa"]);
        for seed in 0..5 {
            let h = score(
                &prog("(pair a (if (flip 0.7) nil (F1 nil)))"),
                &data,
                &grammar(&["a"]),
                &ScoreParams::default(),
                seed,
            );
            assert!((h.log_lik - expected).abs() < 0.15, "seed {seed}: {}", h.log_lik);
        }
    }

    #[test]
    fn atoms_outside_alphabet_are_rejected() {
        let h = score(
            &prog("(pair a c)"),
            &Dataset::empty(),
            &grammar(&["a"]),
            &ScoreParams::default(),
            0,
        );
        assert!(h.is_rejected());
    }

    #[test]
    fn renormalization_excludes_bottom() {
        // a quarter of runs never halt
        let p = prog("(F1 x) | (if (flip 0.5) a (if (flip 0.5) b (F1 x)))");
        let h = score(&p, &Dataset::empty(), &grammar(&["a", "b"]), &ScoreParams::default(), 3);
        let d = h.dist.as_ref().unwrap();
        assert!(d.bottom_mass() > 0.0 && d.bottom_mass() <= 0.5);
        let total: f64 = d.renormalized().values().sum();
        assert!((total - 1.0).abs() < 1e-9);
        let la = score(
            &p,
            &Dataset::from_compact(&["a"]),
            &grammar(&["a", "b"]),
            &ScoreParams::default(),
            3,
        )
        .log_lik;
        assert!((la - (d.prob(&Str::chars("a")) / (1.0 - d.bottom_mass())).ln()).abs() < 1e-12);
    }

    #[test]
    fn cached_scorer_agrees() {
        let g = grammar(&["a", "b"]);
        let params = ScoreParams::default();
        let scorer = Scorer::new(g.clone(), params, 9);
        let data = Dataset::from_compact(&["ab", "aabb"]);
        for src in ["(pair a (pair (if (flip 0.6) nil (F1 nil)) b))", "(F1 x)", "(pair a b)"] {
            let p = prog(src);
            let direct = score(&p, &data, &g, &params, 9);
            let first = scorer.score(&p, &data);
            let second = scorer.score(&p, &data);
            for h in [&first, &second] {
                assert_eq!(h.log_post.to_bits(), direct.log_post.to_bits());
                assert_eq!(h.log_lik.to_bits(), direct.log_lik.to_bits());
            }
        }
        assert_eq!(scorer.cache_len(), 3);
    }

    #[test]
    fn dataset_helpers() {
        let d = Dataset::from_compact(&["ab", "ab", "aabb"]);
        assert_eq!(d.len(), 3);
        assert_eq!(d.counts()[&Str::chars("ab")], 2);
        assert_eq!(d.prefix(1).len(), 1);
        assert_eq!(d.alphabet(), atoms(&["a", "b"]).unwrap());
        assert_eq!(d.concat(&d).len(), 6);
    }
}
