//! Output distributions of programs.
//!
//! [`estimate_distribution`] runs a program `n_sim` times. Simulation `i`
//! draws its flips from a generator seeded by `(seed, hash(canonical form), i)`,
//! so the estimate is a deterministic function of its inputs.
//!
//! Runs are memoized in a trie over flip outcomes: a simulation walks the
//! trie drawing one uniform per flip, exactly as a fresh evaluation would,
//! and only falls back to the interpreter when it leaves the explored part.
//! The result is bit-identical to naive repeated evaluation.
//!
//! [`enumerate_distribution`] explores every flip sequence up to a depth and
//! returns exact probabilities; it is the oracle the estimator is tested
//! against.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::eval::{run, EvalLimits, FlipSource, Halt, ScriptedFlips};
use crate::expr::{FactorizedProgram, Prob, Str};
use crate::rng::{fnv1a, SplitMix64};

pub const MAX_ENUMERATION_FLIPS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    MonteCarlo { n_sim: usize, seed: u64 },
    Exact { max_flips: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StringDistribution {
    probs: BTreeMap<Str, f64>,
    bottom_mass: f64,
    method: Method,
}

impl StringDistribution {
    pub fn new(probs: BTreeMap<Str, f64>, bottom_mass: f64, method: Method) -> Self {
        StringDistribution {
            probs,
            bottom_mass,
            method,
        }
    }

    /// A hand-written distribution, e.g. for tests: `[("ab", 0.5), ("aabb", 0.5)]`
    /// with single-character tokens.
    pub fn from_compact(entries: &[(&str, f64)]) -> Self {
        let probs: BTreeMap<Str, f64> = entries.iter().map(|(s, p)| (Str::chars(s), *p)).collect();
        let total: f64 = probs.values().sum();
        StringDistribution {
            probs,
            bottom_mass: (1.0 - total).max(0.0),
            method: Method::Exact { max_flips: 0 },
        }
    }

    pub fn probs(&self) -> &BTreeMap<Str, f64> {
        &self.probs
    }

    pub fn prob(&self, s: &Str) -> f64 {
        self.probs.get(s).copied().unwrap_or(0.0)
    }

    pub fn bottom_mass(&self) -> f64 {
        self.bottom_mass
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.values().sum::<f64>() + self.bottom_mass
    }

    /// Probability of `s` conditioned on halting; 0 if nothing halts.
    pub fn conditional(&self, s: &Str) -> f64 {
        let halting = 1.0 - self.bottom_mass;
        if halting <= 0.0 {
            0.0
        } else {
            self.prob(s) / halting
        }
    }

    /// Halting outputs renormalized to sum to one. Empty if nothing halts.
    pub fn renormalized(&self) -> BTreeMap<Str, f64> {
        let total: f64 = self.probs.values().sum();
        if total <= 0.0 {
            return BTreeMap::new();
        }
        self.probs.iter().map(|(s, p)| (s.clone(), p / total)).collect()
    }

    pub fn support(&self) -> impl Iterator<Item = &Str> {
        self.probs.iter().filter(|(_, p)| **p > 0.0).map(|(s, _)| s)
    }

    /// Total-variation distance, treating non-halting as its own outcome.
    pub fn total_variation(&self, other: &StringDistribution) -> f64 {
        let mut sum = (self.bottom_mass - other.bottom_mass).abs();
        for (s, p) in &self.probs {
            sum += (p - other.prob(s)).abs();
        }
        for (s, q) in &other.probs {
            if !self.probs.contains_key(s) {
                sum += q.abs();
            }
        }
        0.5 * sum
    }
}

impl fmt::Display for StringDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut entries: Vec<_> = self.probs.iter().collect();
        entries.sort_by(|a, b| b.1.total_cmp(a.1).then_with(|| a.0.cmp(b.0)));
        for (s, p) in entries {
            writeln!(f, "{p:.6}\t{s}")?;
        }
        write!(f, "{:.6}\t⊥", self.bottom_mass)
    }
}

/// Monte Carlo estimate with the default evaluation limits.
pub fn estimate_distribution(program: &FactorizedProgram, n_sim: usize, seed: u64) -> StringDistribution {
    estimate_distribution_with(program, n_sim, seed, &EvalLimits::default())
}

pub fn estimate_distribution_with(
    program: &FactorizedProgram,
    n_sim: usize,
    seed: u64,
    limits: &EvalLimits,
) -> StringDistribution {
    let hash = fnv1a(program.canonical().as_bytes());
    estimate_counts(program, hash, n_sim, seed, limits, None)
        .expect("no early stop requested")
        .into_distribution(seed)
}

/// Outcome counts of a Monte Carlo run.
#[derive(Clone, Debug)]
pub(crate) struct Counts {
    pub strings: BTreeMap<Str, u32>,
    pub bottom: u32,
    pub n_sim: usize,
}

impl Counts {
    fn all_bottom(n_sim: usize) -> Counts {
        Counts {
            strings: BTreeMap::new(),
            bottom: n_sim as u32,
            n_sim,
        }
    }

    pub fn into_distribution(self, seed: u64) -> StringDistribution {
        let n = self.n_sim as f64;
        StringDistribution {
            probs: self.strings.into_iter().map(|(s, c)| (s, f64::from(c) / n)).collect(),
            bottom_mass: f64::from(self.bottom) / n,
            method: Method::MonteCarlo {
                n_sim: self.n_sim,
                seed,
            },
        }
    }
}

enum Node {
    Open,
    Leaf(u32),
    Flip { p: Prob, next: [u32; 2] },
}

/// Replays a known prefix, then draws fresh flips and records them.
struct Recording<'a> {
    prefix: &'a [bool],
    pos: usize,
    rng: &'a mut SplitMix64,
    fresh: Vec<(Prob, bool)>,
}

impl FlipSource for Recording<'_> {
    #[inline]
    fn flip(&mut self, p: Prob) -> Option<bool> {
        if let Some(&b) = self.prefix.get(self.pos) {
            self.pos += 1;
            return Some(b);
        }
        let b = self.rng.next_f64() < p.value();
        self.fresh.push((p, b));
        Some(b)
    }
}

/// Run the Monte Carlo estimator. With `bottom_limit = Some(k)`, gives up and
/// returns `None` as soon as more than `k` simulations have failed to halt.
pub(crate) fn estimate_counts(
    program: &FactorizedProgram,
    program_hash: u64,
    n_sim: usize,
    seed: u64,
    limits: &EvalLimits,
    bottom_limit: Option<usize>,
) -> Option<Counts> {
    if crate::eval::must_diverge(program) {
        return match bottom_limit {
            Some(k) if k < n_sim => None,
            _ => Some(Counts::all_bottom(n_sim)),
        };
    }
    let mut nodes: Vec<Node> = vec![Node::Open];
    // outcome 0 is Bottom
    let mut outcomes: Vec<Option<Str>> = vec![None];
    let mut outcome_ids: HashMap<Str, u32> = HashMap::new();
    let mut hits: Vec<u32> = vec![0];
    let mut path: Vec<bool> = Vec::new();
    let limit = bottom_limit.map_or(u32::MAX, |k| k as u32);

    let mut i = 0usize;
    while i < n_sim {
        // A flip-free program is decided after one run.
        if let Node::Leaf(o) = nodes[0] {
            hits[o as usize] += (n_sim - i) as u32;
            break;
        }
        let mut rng = SplitMix64::for_sample(seed, program_hash, i as u64);
        path.clear();
        let mut at = 0usize;
        let leaf = loop {
            match nodes[at] {
                Node::Leaf(o) => break o,
                Node::Flip { p, next } => {
                    let b = rng.next_f64() < p.value();
                    path.push(b);
                    at = next[b as usize] as usize;
                }
                Node::Open => {
                    let mut src = Recording {
                        prefix: &path,
                        pos: 0,
                        rng: &mut rng,
                        fresh: Vec::new(),
                    };
                    let result = run(program, &[], &mut src, limits);
                    let fresh = src.fresh;
                    for (p, b) in fresh {
                        let base = nodes.len() as u32;
                        nodes.push(Node::Open);
                        nodes.push(Node::Open);
                        nodes[at] = Node::Flip {
                            p,
                            next: [base, base + 1],
                        };
                        at = (base + b as u32) as usize;
                    }
                    let o = match result {
                        Ok(s) => *outcome_ids.entry(s.clone()).or_insert_with(|| {
                            outcomes.push(Some(s));
                            hits.push(0);
                            (outcomes.len() - 1) as u32
                        }),
                        Err(Halt::Bottom) => 0,
                        Err(Halt::Suspended(_)) => unreachable!("recording source never suspends"),
                    };
                    nodes[at] = Node::Leaf(o);
                    break o;
                }
            }
        };
        hits[leaf as usize] += 1;
        if hits[0] > limit {
            return None;
        }
        i += 1;
    }
    if hits[0] > limit {
        return None;
    }

    let mut strings = BTreeMap::new();
    for (o, s) in outcomes.into_iter().enumerate().skip(1) {
        if hits[o] > 0 {
            strings.insert(s.expect("non-bottom outcome"), hits[o]);
        }
    }
    Some(Counts {
        strings,
        bottom: hits[0],
        n_sim,
    })
}

/// Exact distribution over all flip sequences of length at most `max_flips`.
/// Traces that need more flips count towards the bottom mass.
pub fn enumerate_distribution(program: &FactorizedProgram, max_flips: usize) -> Result<StringDistribution> {
    enumerate_distribution_with(program, max_flips, &EvalLimits::default())
}

pub fn enumerate_distribution_with(
    program: &FactorizedProgram,
    max_flips: usize,
    limits: &EvalLimits,
) -> Result<StringDistribution> {
    if max_flips > MAX_ENUMERATION_FLIPS {
        return Err(Error::TooManyFlips(max_flips));
    }
    let mut acc = BTreeMap::new();
    let mut bottom = 0.0;
    let mut prefix = Vec::with_capacity(max_flips);
    explore(program, limits, max_flips, &mut prefix, 1.0, &mut acc, &mut bottom);
    Ok(StringDistribution {
        probs: acc,
        bottom_mass: bottom,
        method: Method::Exact { max_flips },
    })
}

fn explore(
    program: &FactorizedProgram,
    limits: &EvalLimits,
    max_flips: usize,
    prefix: &mut Vec<bool>,
    mass: f64,
    acc: &mut BTreeMap<Str, f64>,
    bottom: &mut f64,
) {
    let mut src = ScriptedFlips::new(prefix);
    match run(program, &[], &mut src, limits) {
        Ok(s) => *acc.entry(s).or_insert(0.0) += mass,
        Err(Halt::Bottom) => *bottom += mass,
        Err(Halt::Suspended(_)) if prefix.len() >= max_flips => *bottom += mass,
        Err(Halt::Suspended(p)) => {
            let pt = p.value();
            prefix.push(true);
            explore(program, limits, max_flips, prefix, mass * pt, acc, bottom);
            prefix.pop();
            prefix.push(false);
            explore(program, limits, max_flips, prefix, mass * (1.0 - pt), acc, bottom);
            prefix.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate;
    use crate::eval::EvalOutcome;

    fn prog(s: &str) -> FactorizedProgram {
        s.parse().unwrap()
    }

    /// Plain repeated evaluation, no memoization.
    fn naive(program: &FactorizedProgram, n_sim: usize, seed: u64) -> StringDistribution {
        let hash = fnv1a(program.canonical().as_bytes());
        let mut strings = BTreeMap::new();
        let mut bottom = 0u32;
        for i in 0..n_sim {
            let mut rng = SplitMix64::for_sample(seed, hash, i as u64);
            match evaluate(program, &mut rng, &EvalLimits::default()) {
                EvalOutcome::Ok(s) => *strings.entry(s).or_insert(0u32) += 1,
                EvalOutcome::Bottom => bottom += 1,
            }
        }
        Counts { strings, bottom, n_sim }.into_distribution(seed)
    }

    const PROGRAMS: &[&str] = &[
        "(pair a (if (flip 0.7) nil (F1 nil)))",
        "(pair a (pair (if (flip 0.6) nil (F1 nil)) (pair b (if (flip 0.6) nil (F1 nil)))))",
        "(if (flip 0.5) (F1 x) (pair a b))",
        "(pair (if (flip 0.5) a b) (if (flip 0.9) nil (F1 nil))) | (pair x x) | (if (empty x) (F3 (F1 nil)) (F2 x))",
        "(F1 x)",
        "(pair a b)",
    ];

    #[test]
    fn trie_matches_naive_bit_for_bit() {
        for src in PROGRAMS {
            let p = prog(src);
            for seed in [0, 1, 42] {
                assert_eq!(estimate_distribution(&p, 500, seed), naive(&p, 500, seed), "{src}");
            }
        }
    }

    #[test]
    fn empirical_mass_is_one() {
        for src in PROGRAMS {
            let d = estimate_distribution(&prog(src), 777, 3);
            assert!((d.total_mass() - 1.0).abs() < 1e-12, "{src}");
        }
    }

    #[test]
    fn deterministic_program() {
        let d = estimate_distribution(&prog("(pair a b)"), 1024, 5);
        assert_eq!(d.probs().len(), 1);
        assert_eq!(d.prob(&Str::chars("ab")), 1.0);
        assert_eq!(d.bottom_mass(), 0.0);
    }

    #[test]
    fn never_halts() {
        let d = estimate_distribution(&prog("(F1 x)"), 1024, 5);
        assert_eq!(d.bottom_mass(), 1.0);
        assert!(d.probs().is_empty());
    }

    #[test]
    fn geometric_estimate() {
        let d = estimate_distribution(&prog("(pair a (if (flip 0.7) nil (F1 nil)))"), 2048, 11);
        assert!((d.prob(&Str::chars("a")) - 0.7).abs() < 0.03);
    }

    #[test]
    fn exact_geometric_law() {
        let d = enumerate_distribution(&prog("(pair a (if (flip 0.7) nil (F1 nil)))"), 10).unwrap();
        for n in 1..=10 {
            let expected = 0.3f64.powi(n - 1) * 0.7;
            let s = Str::chars(&"a".repeat(n as usize));
            assert!((d.prob(&s) - expected).abs() < 1e-12, "n={n}");
        }
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        // the 11th flip is never made: the remaining 0.3^10 is truncated
        assert!((d.bottom_mass() - 0.3f64.powi(10)).abs() < 1e-15);
    }

    #[test]
    fn exact_small_cases() {
        let d = enumerate_distribution(&prog("(pair a nil)"), 0).unwrap();
        assert_eq!(d.prob(&Str::chars("a")), 1.0);
        let d = enumerate_distribution(&prog("(if (flip 0.5) a b)"), 4).unwrap();
        assert_eq!(d.prob(&Str::chars("a")), 0.5);
        assert_eq!(d.prob(&Str::chars("b")), 0.5);
        assert_eq!(d.bottom_mass(), 0.0);
    }

    #[test]
    fn rejects_deep_enumeration() {
        assert!(matches!(
            enumerate_distribution(&prog("(pair a b)"), 25),
            Err(Error::TooManyFlips(25))
        ));
    }

    #[test]
    fn early_stop_on_bottom() {
        let p = prog("(F1 x) | (if (flip 0.9) (F1 x) a)");
        let hash = fnv1a(p.canonical().as_bytes());
        let lim = EvalLimits::default();
        assert!(estimate_counts(&p, hash, 1024, 0, &lim, Some(512)).is_none());
        let p = prog("(F1 x) | (if (flip 0.9) a (F1 x))");
        let hash = fnv1a(p.canonical().as_bytes());
        assert!(estimate_counts(&p, hash, 1024, 0, &lim, Some(512)).is_some());
    }

    #[test]
    fn total_variation_basics() {
        let a = StringDistribution::from_compact(&[("a", 0.5), ("b", 0.5)]);
        let b = StringDistribution::from_compact(&[("a", 1.0)]);
        assert!((a.total_variation(&b) - 0.5).abs() < 1e-15);
        assert_eq!(a.total_variation(&a), 0.0);
    }
}
