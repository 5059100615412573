//! Precision, recall and F-scores of hypotheses against a target language.
//!
//! Precision is the share of a hypothesis' halting output mass that lies in
//! the language. Recall is the share of the target's `m` most probable
//! strings (weighted by target probability) that the hypothesis can
//! produce.

use crate::dist::StringDistribution;
use crate::expr::{Atom, FactorizedProgram, Str};
use crate::inference::{par_indexed, HypothesisStore};
use crate::languages::TargetLanguage;
use crate::scoring::{evaluation_distribution, ScoreParams, ScoredHypothesis};

pub const DEFAULT_SUPPORT_SIZE: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

impl Scores {
    pub fn new(precision: f64, recall: f64) -> Scores {
        Scores {
            precision,
            recall,
            f: f_score(precision, recall),
        }
    }
}

pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

pub fn precision(dist: &StringDistribution, lang: &TargetLanguage) -> f64 {
    let halting: f64 = dist.probs().values().sum();
    if halting <= 0.0 {
        return 0.0;
    }
    let inside: f64 = dist
        .probs()
        .iter()
        .filter(|(s, _)| lang.membership(s))
        .map(|(_, p)| p)
        .fold(0.0, |a, b| a + b);
    (inside / halting).clamp(0.0, 1.0)
}

pub fn recall(dist: &StringDistribution, lang: &TargetLanguage, m: usize) -> f64 {
    recall_against(dist, &lang.top_support(m))
}

/// Recall against a precomputed top support.
pub fn recall_against(dist: &StringDistribution, top: &[(Str, f64)]) -> f64 {
    let total: f64 = top.iter().map(|(_, p)| p).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let covered: f64 = top
        .iter()
        .filter(|(s, _)| dist.prob(s) > 0.0)
        .map(|(_, p)| p)
        .fold(0.0, |a, b| a + b);
    (covered / total).clamp(0.0, 1.0)
}

pub fn scores(dist: &StringDistribution, lang: &TargetLanguage, m: usize) -> Scores {
    Scores::new(precision(dist, lang), recall(dist, lang, m))
}

/// True if the distribution emits any string longer than `max_finite_len`.
pub fn infinite_leaning(dist: &StringDistribution, max_finite_len: usize) -> bool {
    dist.support().any(|s| s.len() > max_finite_len)
}

/// True if something halts and every halting output is a length-5 string
/// whose first and last tokens form one of `frames`.
pub fn dependency_consistent(dist: &StringDistribution, frames: &[(Atom, Atom)]) -> bool {
    let mut any = false;
    for s in dist.support() {
        any = true;
        if s.len() != 5 || !frames.contains(&(s[0], s[4])) {
            return false;
        }
    }
    any
}

pub fn posterior_mass_where<F: Fn(&ScoredHypothesis) -> bool>(store: &HypothesisStore, pred: F) -> f64 {
    store.posterior_mass_where(pred)
}

#[derive(Clone, Debug)]
pub struct EvaluatedEntry {
    pub program: FactorizedProgram,
    pub canonical: String,
    pub weight: f64,
    pub log_post: f64,
    /// Output distribution from `eval_n_sim` fresh simulations.
    pub dist: StringDistribution,
    pub scores: Scores,
}

/// A hypothesis store with every entry re-simulated and scored against a
/// target language. Entry order is the store's.
#[derive(Clone, Debug)]
pub struct EvaluatedStore {
    entries: Vec<EvaluatedEntry>,
}

impl EvaluatedStore {
    pub fn evaluate(
        store: &HypothesisStore,
        lang: &TargetLanguage,
        params: &ScoreParams,
        seed: u64,
        m: usize,
    ) -> EvaluatedStore {
        let top = lang.top_support(m);
        let entries = par_indexed(store.len(), |i| {
            let e = &store.entries()[i];
            let h = &e.hypothesis;
            let dist = evaluation_distribution(&h.program, params, seed);
            let scores = Scores::new(precision(&dist, lang), recall_against(&dist, &top));
            EvaluatedEntry {
                program: h.program.clone(),
                canonical: h.canonical.clone(),
                weight: e.weight,
                log_post: h.log_post,
                dist,
                scores,
            }
        });
        EvaluatedStore { entries }
    }

    pub fn entries(&self) -> &[EvaluatedEntry] {
        &self.entries
    }

    fn weighted(&self, f: impl Fn(&Scores) -> f64) -> f64 {
        self.entries
            .iter()
            .map(|e| e.weight * f(&e.scores))
            .fold(0.0, |a, b| a + b)
    }

    pub fn weighted_f(&self) -> f64 {
        self.weighted(|s| s.f)
    }

    pub fn weighted_precision(&self) -> f64 {
        self.weighted(|s| s.precision)
    }

    pub fn weighted_recall(&self) -> f64 {
        self.weighted(|s| s.recall)
    }

    /// Scores of the highest-posterior entry.
    pub fn map_scores(&self) -> Scores {
        self.entries.first().map(|e| e.scores).unwrap_or_default()
    }

    pub fn map_f(&self) -> f64 {
        self.map_scores().f
    }

    /// Highest F over all entries.
    pub fn best_f(&self) -> f64 {
        self.entries.iter().map(|e| e.scores.f).fold(0.0, f64::max)
    }

    /// Total weight of entries satisfying `pred`.
    pub fn mass_where<F: Fn(&EvaluatedEntry) -> bool>(&self, pred: F) -> f64 {
        self.entries
            .iter()
            .filter(|e| pred(e))
            .map(|e| e.weight)
            .fold(0.0, |a, b| a + b)
    }
}
