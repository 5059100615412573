//! The finite hypothesis set collected from a run, with posterior weights.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::expr::FactorizedProgram;
use crate::scoring::ScoredHypothesis;

#[derive(Clone, Debug)]
pub struct StoreEntry {
    pub hypothesis: ScoredHypothesis,
    /// Normalized posterior weight within the store.
    pub weight: f64,
}

/// Hypotheses deduplicated by canonical form, sorted by descending log
/// posterior (ties by canonical form), with softmax weights.
#[derive(Clone, Debug, Default)]
pub struct HypothesisStore {
    entries: Vec<StoreEntry>,
}

/// Descending log posterior, then ascending canonical form.
pub(crate) fn rank(a: &ScoredHypothesis, b: &ScoredHypothesis) -> std::cmp::Ordering {
    b.log_post
        .total_cmp(&a.log_post)
        .then_with(|| a.canonical.cmp(&b.canonical))
}

impl HypothesisStore {
    /// Build a store. The first occurrence of each canonical form wins.
    pub fn from_hypotheses<I: IntoIterator<Item = ScoredHypothesis>>(hypotheses: I) -> HypothesisStore {
        let mut seen = HashSet::new();
        let mut hs: Vec<ScoredHypothesis> = hypotheses
            .into_iter()
            .filter(|h| seen.insert(h.canonical.clone()))
            .collect();
        hs.sort_by(rank);
        let weights = softmax(&hs.iter().map(|h| h.log_post).collect::<Vec<_>>());
        HypothesisStore {
            entries: hs
                .into_iter()
                .zip(weights)
                .map(|(hypothesis, weight)| StoreEntry { hypothesis, weight })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[StoreEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The highest-posterior entry.
    pub fn map(&self) -> Option<&StoreEntry> {
        self.entries.first()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Sum of the weights of entries satisfying `pred`.
    pub fn posterior_mass_where<F: Fn(&ScoredHypothesis) -> bool>(&self, pred: F) -> f64 {
        self.entries
            .iter()
            .filter(|e| pred(&e.hypothesis))
            .map(|e| e.weight)
            .fold(0.0, |a, b| a + b)
    }

    /// Text form: `#` header lines, then one tab-separated record per entry:
    /// weight, log posterior, log prior, log likelihood, canonical form.
    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = String::new();
        for h in header {
            let _ = writeln!(out, "# {h}");
        }
        let _ = writeln!(out, "# weight\tlog_post\tlog_prior\tlog_lik\tprogram");
        for e in &self.entries {
            let h = &e.hypothesis;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                e.weight, h.log_post, h.log_prior, h.log_lik, h.canonical
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<HypothesisStore> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Config(format!("store line {}: {what}", lineno + 1));
            let fields: Vec<&str> = line.splitn(5, '\t').collect();
            if fields.len() != 5 {
                return Err(bad("expected 5 tab-separated fields"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
            let program: FactorizedProgram = fields[4].parse()?;
            let canonical = program.canonical();
            if canonical != fields[4] {
                return Err(bad("program is not in canonical form"));
            }
            entries.push(StoreEntry {
                weight: num(fields[0])?,
                hypothesis: ScoredHypothesis {
                    program,
                    canonical,
                    log_post: num(fields[1])?,
                    log_prior: num(fields[2])?,
                    log_lik: num(fields[3])?,
                    dist: None,
                },
            });
        }
        Ok(HypothesisStore { entries })
    }

    pub fn load(path: &Path) -> Result<HypothesisStore> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        HypothesisStore::parse(&text)
    }
}

/// Softmax over finite values; uniform if none is finite.
fn softmax(log_posts: &[f64]) -> Vec<f64> {
    let max = log_posts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        let n = log_posts.len() as f64;
        return log_posts.iter().map(|_| 1.0 / n).collect();
    }
    let exps: Vec<f64> = log_posts.iter().map(|&l| (l - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}
