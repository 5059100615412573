//! Run configuration and its flat `key = value` text format.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::expr::{atoms, Atom};
use crate::grammar::{ExpressionGrammar, Rule, DEFAULT_MAX_DEPTH};
use crate::inference::ChainConfig;
use crate::languages::{LanguageId, GOMEZ_POOL_SIZES};
use crate::metrics::DEFAULT_SUPPORT_SIZE;
use crate::rng::fnv1a;
use crate::scoring::ScoreParams;

pub const DEFAULT_SCHEDULE: [usize; 7] = [1, 2, 5, 10, 25, 50, 100];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// 4 chains of 20000 steps.
    Desk,
    /// 12 chains of 50000 steps.
    Paper,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        }
    }

    pub fn chain_config(self, seed: u64) -> ChainConfig {
        match self {
            Profile::Desk => ChainConfig::desk(seed),
            Profile::Paper => ChainConfig::paper(seed),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Profile> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            _ => Err(Error::Config(format!("unknown profile {s:?} (expected desk or paper)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentId {
    Infinite,
    Lai,
    Gomez,
    English,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 4] = [
        ExperimentId::Infinite,
        ExperimentId::Lai,
        ExperimentId::Gomez,
        ExperimentId::English,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Infinite => "infinite",
            ExperimentId::Lai => "lai",
            ExperimentId::Gomez => "gomez",
            ExperimentId::English => "english",
        }
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExperimentId> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub profile: Profile,
    pub experiment: Option<ExperimentId>,
    pub language: LanguageId,
    /// Items observed by `induce`.
    pub data_size: usize,
    /// Dataset sizes for learning curves; strictly increasing.
    pub schedule: Vec<usize>,
    pub chain: ChainConfig,
    pub score: ScoreParams,
    /// Grammar alphabet; `None` means the target language's alphabet.
    pub alphabet: Option<Vec<Atom>>,
    /// Production weight overrides.
    pub weights: Vec<(Rule, f64)>,
    pub max_depth: usize,
    /// Number of target strings recall is measured against.
    pub support_size: usize,
    /// Steps per chain after each block in the ordering experiment;
    /// `None` spreads `chain.steps` evenly over the blocks.
    pub block_steps: Option<usize>,
    pub gomez_pool_sizes: Vec<usize>,
    pub gomez_items: usize,
    /// Hypotheses emitting longer strings count as infinite.
    pub finite_max_len: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(profile: Profile) -> RunConfig {
        RunConfig {
            profile,
            experiment: None,
            language: LanguageId::An,
            data_size: 10,
            schedule: DEFAULT_SCHEDULE.to_vec(),
            chain: profile.chain_config(0),
            score: ScoreParams::default(),
            alphabet: None,
            weights: Vec::new(),
            max_depth: DEFAULT_MAX_DEPTH,
            support_size: DEFAULT_SUPPORT_SIZE,
            block_steps: None,
            gomez_pool_sizes: GOMEZ_POOL_SIZES.to_vec(),
            gomez_items: 48,
            finite_max_len: 3,
            seed: 0,
            out: PathBuf::from("out"),
        }
    }

    pub fn desk() -> RunConfig {
        RunConfig::new(Profile::Desk)
    }

    pub fn paper() -> RunConfig {
        RunConfig::new(Profile::Paper)
    }

    /// Parse config text on top of the defaults of `profile` (or of the
    /// file's own `profile` key when `profile` is `None`).
    pub fn parse(text: &str, profile: Option<Profile>) -> Result<RunConfig> {
        let pairs = parse_pairs(text)?;
        let file_profile = pairs
            .iter()
            .find(|(k, _)| k == "profile")
            .map(|(_, v)| v.parse::<Profile>())
            .transpose()?;
        let mut config = RunConfig::new(profile.or(file_profile).unwrap_or(Profile::Desk));
        for (key, value) in &pairs {
            if key != "profile" {
                config.set(key, value)?;
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, profile: Option<Profile>) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text, profile)
    }

    /// Set one key. Keys are the ones written by [`RunConfig::to_text`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::Config(format!("bad value {value:?} for {key}"));
        let int = || value.parse::<usize>().map_err(|_| bad());
        let float = || value.parse::<f64>().map_err(|_| bad());
        match key {
            "experiment" => self.experiment = Some(value.parse()?),
            "language" => self.language = value.parse()?,
            "data_size" => self.data_size = int()?,
            "schedule" => self.schedule = parse_list(value).ok_or_else(bad)?,
            "chains" => self.chain.chains = int()?,
            "steps" => self.chain.steps = int()?,
            "top_n" => self.chain.top_n = int()?,
            "factor_move_prob" => self.chain.factor_move_prob = float()?,
            "max_factors" => self.chain.max_factors = int()?,
            "temperature" => self.chain.temperature = float()?,
            "n_sim" => self.score.n_sim = int()?,
            "eval_n_sim" => self.score.eval_n_sim = int()?,
            "outlier_log_penalty" => self.score.outlier_log_penalty = float()?,
            "bottom_reject_threshold" => self.score.bottom_reject_threshold = float()?,
            "call_budget" => self.score.limits.call_budget = int()?,
            "max_len" => self.score.limits.max_len = int()?,
            "alphabet" => {
                let names: Vec<&str> = value.split_whitespace().collect();
                self.alphabet = Some(atoms(&names)?);
            }
            "max_depth" => self.max_depth = int()?,
            "support_size" => self.support_size = int()?,
            "block_steps" => self.block_steps = Some(int()?),
            "gomez_pool_sizes" => self.gomez_pool_sizes = parse_list(value).ok_or_else(bad)?,
            "gomez_items" => self.gomez_items = int()?,
            "finite_max_len" => self.finite_max_len = int()?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "out" => self.out = PathBuf::from(value),
            "profile" => {
                self.profile = value.parse()?;
                let c = self.profile.chain_config(self.seed);
                self.chain.chains = c.chains;
                self.chain.steps = c.steps;
            }
            _ => match key.strip_prefix("weight.") {
                Some(rule) => {
                    let rule =
                        Rule::from_name(rule).ok_or_else(|| Error::Config(format!("unknown production {rule:?}")))?;
                    let w = float()?;
                    self.weights.retain(|(r, _)| *r != rule);
                    self.weights.push((rule, w));
                }
                None => return Err(Error::Config(format!("unknown key {key:?}"))),
            },
        }
        if key == "seed" {
            self.chain.seed = self.seed;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        self.language.validate()?;
        self.chain.validate()?;
        if self.chain.seed != self.seed {
            return fail("chain seed differs from run seed".into());
        }
        if self.schedule.is_empty() {
            return fail("schedule is empty".into());
        }
        if self.schedule.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!("schedule {:?} is not strictly increasing", self.schedule));
        }
        if self.gomez_pool_sizes.is_empty() || self.gomez_pool_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return fail("gomez_pool_sizes must be nonempty and strictly increasing".into());
        }
        for &p in &self.gomez_pool_sizes {
            LanguageId::GomezAXB(p).validate()?;
        }
        if self.score.n_sim == 0 || self.score.eval_n_sim == 0 {
            return fail("n_sim and eval_n_sim must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.score.bottom_reject_threshold) {
            return fail("bottom_reject_threshold must be in [0, 1]".into());
        }
        if self.support_size == 0 {
            return fail("support_size must be positive".into());
        }
        if self.block_steps == Some(0) {
            return fail("block_steps must be positive".into());
        }
        self.grammar(&[])?;
        Ok(())
    }

    /// The expression grammar over the configured alphabet, or over
    /// `default_alphabet` when none is configured.
    pub fn grammar(&self, default_alphabet: &[Atom]) -> Result<ExpressionGrammar> {
        let alphabet = self.alphabet.as_deref().unwrap_or(default_alphabet);
        let mut g = if alphabet.is_empty() {
            ExpressionGrammar::base()
        } else {
            ExpressionGrammar::standard(alphabet)?
        };
        for &(rule, w) in &self.weights {
            g = g.with_weight(rule, w)?;
        }
        g.with_max_depth(self.max_depth)
    }

    /// Every setting except `out`, one `key = value` per line, in a fixed
    /// order. Parsing this text gives back the same config.
    pub fn to_text(&self) -> String {
        let mut t = String::new();
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(t, "{k} = {v}");
        };
        kv("profile", self.profile.name().into());
        if let Some(e) = self.experiment {
            kv("experiment", e.name().into());
        }
        kv("language", self.language.to_string());
        kv("data_size", self.data_size.to_string());
        kv("schedule", list(&self.schedule));
        kv("chains", self.chain.chains.to_string());
        kv("steps", self.chain.steps.to_string());
        kv("top_n", self.chain.top_n.to_string());
        kv("factor_move_prob", self.chain.factor_move_prob.to_string());
        kv("max_factors", self.chain.max_factors.to_string());
        kv("temperature", self.chain.temperature.to_string());
        kv("n_sim", self.score.n_sim.to_string());
        kv("eval_n_sim", self.score.eval_n_sim.to_string());
        kv("outlier_log_penalty", self.score.outlier_log_penalty.to_string());
        kv(
            "bottom_reject_threshold",
            self.score.bottom_reject_threshold.to_string(),
        );
        kv("call_budget", self.score.limits.call_budget.to_string());
        kv("max_len", self.score.limits.max_len.to_string());
        if let Some(a) = &self.alphabet {
            kv("alphabet", a.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" "));
        }
        for (rule, w) in &self.weights {
            kv(&format!("weight.{}", rule.name()), w.to_string());
        }
        kv("max_depth", self.max_depth.to_string());
        kv("support_size", self.support_size.to_string());
        if let Some(b) = self.block_steps {
            kv("block_steps", b.to_string());
        }
        kv("gomez_pool_sizes", list(&self.gomez_pool_sizes));
        kv("gomez_items", self.gomez_items.to_string());
        kv("finite_max_len", self.finite_max_len.to_string());
        kv("seed", self.seed.to_string());
        t
    }

    /// Hash of [`RunConfig::to_text`], printed in output headers.
    pub fn hash(&self) -> u64 {
        fnv1a(self.to_text().as_bytes())
    }

    pub fn with_seed(&self, seed: u64) -> RunConfig {
        let mut c = self.clone();
        c.seed = seed;
        c.chain.seed = seed;
        c
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::desk()
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_list(value: &str) -> Option<Vec<usize>> {
    value.split(',').map(|s| s.trim().parse().ok()).collect()
}
