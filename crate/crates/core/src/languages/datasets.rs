//! Experiment datasets and their text format.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{LanguageId, TargetLanguage};
use crate::error::{Error, Result};
use crate::expr::{Atom, Str};
use crate::rng::{derive_seed_str, SplitMix64};
use crate::scoring::Dataset;

/// (first, last) token pairs of the trained frames.
pub const GOMEZ_FRAMES: [(&str, &str); 3] = [("a", "b"), ("c", "b"), ("c", "d")];

/// Pool sizes swept by the nonadjacent-dependency experiment.
pub const GOMEZ_POOL_SIZES: [usize; 7] = [2, 4, 6, 9, 12, 18, 24];

const LAI_BLOCKS: usize = 12;
const LAI_BLOCK_SIZE: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LaiCondition {
    Skewed,
    Staged,
    Random,
}

impl LaiCondition {
    pub const ALL: [LaiCondition; 3] = [LaiCondition::Skewed, LaiCondition::Staged, LaiCondition::Random];

    pub fn name(self) -> &'static str {
        match self {
            LaiCondition::Skewed => "skewed",
            LaiCondition::Staged => "staged",
            LaiCondition::Random => "random",
        }
    }
}

/// Split `total` in proportion to `weights`, rounding by largest remainder
/// (ties to the earlier entry).
pub fn largest_remainder(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = quotas[i] - quotas[i].floor();
        let rj = quotas[j] - quotas[j].floor();
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    let short = total - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

fn anbn(n: usize) -> Str {
    let a = Atom::new("a").expect("atom");
    let b = Atom::new("b").expect("atom");
    Str::new([vec![a; n], vec![b; n]].concat())
}

/// Twelve blocks of twelve aⁿbⁿ items (n ≤ 3) for one training condition.
pub fn lai_blocks(condition: LaiCondition, seed: u64) -> Vec<Dataset> {
    let mut rng = SplitMix64::new(derive_seed_str(seed, &format!("lai/{}", condition.name())));
    (0..LAI_BLOCKS)
        .map(|block| {
            let ns: Vec<usize> = match condition {
                LaiCondition::Random => (0..LAI_BLOCK_SIZE).map(|_| rng.gen_range(1..=3)).collect(),
                LaiCondition::Skewed => {
                    let counts = largest_remainder(LAI_BLOCK_SIZE, &[4.0, 2.0, 1.0]);
                    let mut ns: Vec<usize> = counts
                        .iter()
                        .enumerate()
                        .flat_map(|(i, &c)| std::iter::repeat_n(i + 1, c))
                        .collect();
                    ns.shuffle(&mut rng);
                    ns
                }
                LaiCondition::Staged => {
                    let cap = block / 4 + 1;
                    (0..LAI_BLOCK_SIZE).map(|_| rng.gen_range(1..=cap)).collect()
                }
            };
            Dataset::new(ns.into_iter().map(anbn).collect())
        })
        .collect()
}

/// The first `size` strings of {h,i,j,k}³ in lexicographic order.
pub fn gomez_pool(size: usize) -> Result<Vec<Str>> {
    if !(2..=64).contains(&size) {
        return Err(Error::Language(format!("Gomez pool size {size} outside 2..=64")));
    }
    let letters = ["h", "i", "j", "k"].map(|c| Atom::new(c).expect("atom"));
    let mut pool = Vec::with_capacity(64);
    for x in letters {
        for y in letters {
            for z in letters {
                pool.push(Str::new(vec![x, y, z]));
            }
        }
    }
    pool.truncate(size);
    Ok(pool)
}

/// `count` items, each a uniformly chosen frame around a uniformly chosen
/// pool element.
pub fn gomez_dataset(pool_size: usize, count: usize, seed: u64) -> Result<Dataset> {
    let lang = TargetLanguage::new(LanguageId::GomezAXB(pool_size))?;
    Ok(super::generate_from(&lang, count, seed))
}

/// One string per line, tokens separated by spaces, after a `#` header.
pub fn write_dataset(path: &Path, id: LanguageId, seed: u64, data: &Dataset) -> Result<()> {
    let mut text = String::new();
    let _ = writeln!(text, "# language={id} count={} seed={seed}", data.len());
    for s in data.items() {
        let _ = writeln!(text, "{s}");
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let items = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Str>>>()?;
    Ok(Dataset::new(items))
}
