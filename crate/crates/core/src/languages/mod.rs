//! Target languages: membership oracles, reference samplers and their exact
//! laws, plus the dataset generators used by the experiments.
//!
//! Size indices follow P(n) ∝ (1/2)ⁿ for n ≥ 1, restricted to sizes whose
//! strings fit in the length cap. Samplers reject oversize draws, so each
//! sampler's law is exactly the renormalized law reported by
//! [`TargetLanguage::probability`] and [`TargetLanguage::top_support`].

mod cfg;
mod datasets;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

pub use cfg::Cfg;
pub use datasets::{
    gomez_dataset, gomez_pool, lai_blocks, largest_remainder, read_dataset, write_dataset, LaiCondition, GOMEZ_FRAMES,
    GOMEZ_POOL_SIZES,
};

use crate::error::{Error, Result};
use crate::eval::DEFAULT_MAX_LEN;
use crate::expr::{Atom, Str};
use crate::rng::{derive_seed_str, SplitMix64};
use crate::scoring::Dataset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LanguageId {
    An,
    /// aⁿ for 1 ≤ n ≤ max_n.
    AnFinite(usize),
    /// (ab)ⁿ
    AbN,
    AnBn,
    AnB2n,
    Dyck,
    AnBnCn,
    XX,
    XXR,
    AnBmCnDm,
    /// Part-of-speech strings; `if_then` wraps a fifth of items as "if S then S".
    SimpleEnglish {
        if_then: bool,
    },
    /// aⁿbⁿ with the Lai block datasets.
    LaiAnBn,
    /// Frames aXb, cXb, cXd with X from a pool of this size.
    GomezAXB(usize),
}

impl LanguageId {
    pub fn validate(self) -> Result<LanguageId> {
        match self {
            LanguageId::AnFinite(0) => Err(Error::Language("AnFinite needs max_n ≥ 1".into())),
            LanguageId::GomezAXB(p) if !(2..=64).contains(&p) => {
                Err(Error::Language(format!("Gomez pool size {p} outside 2..=64")))
            }
            id => Ok(id),
        }
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageId::An => write!(f, "an"),
            LanguageId::AnFinite(k) => write!(f, "an-finite:{k}"),
            LanguageId::AbN => write!(f, "abn"),
            LanguageId::AnBn => write!(f, "anbn"),
            LanguageId::AnB2n => write!(f, "anb2n"),
            LanguageId::Dyck => write!(f, "dyck"),
            LanguageId::AnBnCn => write!(f, "anbncn"),
            LanguageId::XX => write!(f, "xx"),
            LanguageId::XXR => write!(f, "xxr"),
            LanguageId::AnBmCnDm => write!(f, "anbmcndm"),
            LanguageId::SimpleEnglish { if_then: false } => write!(f, "english"),
            LanguageId::SimpleEnglish { if_then: true } => write!(f, "english-ifthen"),
            LanguageId::LaiAnBn => write!(f, "lai-anbn"),
            LanguageId::GomezAXB(p) => write!(f, "gomez:{p}"),
        }
    }
}

impl FromStr for LanguageId {
    type Err = Error;

    fn from_str(s: &str) -> Result<LanguageId> {
        let s = s.trim();
        let param = |prefix: &str| -> Option<Result<usize>> {
            s.strip_prefix(prefix).map(|rest| {
                rest.parse::<usize>()
                    .map_err(|_| Error::Language(format!("bad parameter in {s:?}")))
            })
        };
        if let Some(k) = param("an-finite:") {
            return LanguageId::AnFinite(k?).validate();
        }
        if let Some(p) = param("gomez:") {
            return LanguageId::GomezAXB(p?).validate();
        }
        Ok(match s {
            "an" => LanguageId::An,
            "abn" => LanguageId::AbN,
            "anbn" => LanguageId::AnBn,
            "anb2n" => LanguageId::AnB2n,
            "dyck" => LanguageId::Dyck,
            "anbncn" => LanguageId::AnBnCn,
            "xx" => LanguageId::XX,
            "xxr" => LanguageId::XXR,
            "anbmcndm" => LanguageId::AnBmCnDm,
            "english" => LanguageId::SimpleEnglish { if_then: false },
            "english-ifthen" => LanguageId::SimpleEnglish { if_then: true },
            "lai-anbn" => LanguageId::LaiAnBn,
            _ => return Err(Error::Language(format!("unknown language {s:?}"))),
        })
    }
}

/// The part-of-speech grammar, optionally with the "if S then S" wrapper.
pub fn english_grammar(if_then: bool) -> Cfg {
    let mut rules: Vec<(&'static str, &'static [&'static str], f64)> = vec![
        ("S", &["NP", "VP"], 4.0),
        ("NP", &["n"], 2.0),
        ("NP", &["d", "n"], 1.0),
        ("NP", &["d", "AP", "n"], 1.0),
        ("AP", &["a"], 3.0),
        ("AP", &["a", "AP"], 1.0),
        ("VP", &["v"], 2.0),
        ("VP", &["v", "NP"], 1.0),
        ("VP", &["v", "that", "S"], 1.0),
    ];
    if if_then {
        rules.insert(0, ("ROOT", &["S"], 4.0));
        rules.insert(1, ("ROOT", &["if", "S", "then", "S"], 1.0));
        Cfg::new("ROOT", &rules)
    } else {
        Cfg::new("S", &rules)
    }
}

fn tok(name: &str) -> Atom {
    Atom::new(name).expect("valid atom")
}

fn repeat(name: &str, n: usize) -> Vec<Atom> {
    vec![tok(name); n]
}

/// Number of leading tokens equal to `name`.
fn run_len(s: &[Atom], name: &str) -> usize {
    let a = tok(name);
    s.iter().take_while(|&&t| t == a).count()
}

/// Catalan numbers as floats.
fn catalan(k: usize) -> f64 {
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * 2.0 * (2 * i + 1) as f64 / (i + 2) as f64;
    }
    c
}

/// P(n) = 2^-n for n ≥ 1, by fair coin tosses.
fn geometric<R: Rng + ?Sized>(rng: &mut R) -> usize {
    let mut n = 1;
    while rng.gen::<bool>() {
        n += 1;
    }
    n
}

/// Geometric size index restricted to `1..=max` by rejection.
fn geometric_upto<R: Rng + ?Sized>(rng: &mut R, max: usize) -> usize {
    loop {
        let n = geometric(rng);
        if n <= max {
            return n;
        }
    }
}

/// A target language with a fixed length cap.
#[derive(Clone, Debug)]
pub struct TargetLanguage {
    id: LanguageId,
    max_len: usize,
    english: Option<Cfg>,
    /// Mass of the unrestricted law on strings within the cap.
    norm: f64,
    pool: Vec<Str>,
}

impl TargetLanguage {
    pub fn new(id: LanguageId) -> Result<TargetLanguage> {
        TargetLanguage::with_max_len(id, DEFAULT_MAX_LEN)
    }

    pub fn with_max_len(id: LanguageId, max_len: usize) -> Result<TargetLanguage> {
        let id = id.validate()?;
        let mut lang = TargetLanguage {
            id,
            max_len,
            english: None,
            norm: 1.0,
            pool: Vec::new(),
        };
        match id {
            LanguageId::SimpleEnglish { if_then } => lang.english = Some(english_grammar(if_then)),
            LanguageId::GomezAXB(p) => lang.pool = gomez_pool(p)?,
            _ => {}
        }
        lang.norm = lang.compute_norm();
        if lang.norm.is_nan() || lang.norm <= 0.0 {
            return Err(Error::Language(format!("{id}: no string fits in length {max_len}")));
        }
        Ok(lang)
    }

    pub fn id(&self) -> LanguageId {
        self.id
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn alphabet(&self) -> Vec<Atom> {
        let names: &[&str] = match self.id {
            LanguageId::An | LanguageId::AnFinite(_) => &["a"],
            LanguageId::AbN
            | LanguageId::AnBn
            | LanguageId::AnB2n
            | LanguageId::Dyck
            | LanguageId::XX
            | LanguageId::XXR
            | LanguageId::LaiAnBn => &["a", "b"],
            LanguageId::AnBnCn => &["a", "b", "c"],
            LanguageId::AnBmCnDm => &["a", "b", "c", "d"],
            LanguageId::SimpleEnglish { if_then: false } => &["d", "n", "v", "a", "that"],
            LanguageId::SimpleEnglish { if_then: true } => &["d", "n", "v", "a", "that", "if", "then"],
            LanguageId::GomezAXB(_) => &["a", "b", "c", "d", "h", "i", "j", "k"],
        };
        names.iter().map(|n| tok(n)).collect()
    }

    /// For languages with one string per size: its length per unit of size,
    /// and the string of size `n`.
    fn counting(&self) -> Option<usize> {
        match self.id {
            LanguageId::An | LanguageId::AnFinite(_) => Some(1),
            LanguageId::AbN | LanguageId::AnBn | LanguageId::LaiAnBn => Some(2),
            LanguageId::AnB2n | LanguageId::AnBnCn => Some(3),
            _ => None,
        }
    }

    fn counting_string(&self, n: usize) -> Str {
        let v = match self.id {
            LanguageId::An | LanguageId::AnFinite(_) => repeat("a", n),
            LanguageId::AbN => [tok("a"), tok("b")].repeat(n),
            LanguageId::AnBn | LanguageId::LaiAnBn => [repeat("a", n), repeat("b", n)].concat(),
            LanguageId::AnB2n => [repeat("a", n), repeat("b", 2 * n)].concat(),
            LanguageId::AnBnCn => [repeat("a", n), repeat("b", n), repeat("c", n)].concat(),
            _ => unreachable!("not a counting language"),
        };
        Str::new(v)
    }

    /// Largest size index whose string fits.
    fn max_size(&self) -> usize {
        match self.id {
            LanguageId::AnFinite(k) => k.min(self.max_len),
            _ => match self.counting() {
                Some(per) => self.max_len / per,
                None => self.max_len / 2,
            },
        }
    }

    fn compute_norm(&self) -> f64 {
        let half = 0.5f64;
        match self.id {
            LanguageId::Dyck => (1..=self.max_len / 2)
                .map(|k| catalan(k) * 0.25f64.powi(k as i32))
                .sum(),
            LanguageId::AnBmCnDm => (2..=self.max_len / 2)
                .map(|s| (s - 1) as f64 * half.powi(s as i32))
                .sum(),
            LanguageId::SimpleEnglish { .. } => {
                let law = self.english.as_ref().expect("grammar").length_law(self.max_len);
                law.iter().sum()
            }
            LanguageId::GomezAXB(_) => 1.0,
            // counting languages, XX and XXR: one class of total mass 2^-n per size n
            _ => 1.0 - half.powi(self.max_size() as i32),
        }
    }

    pub fn membership(&self, s: &[Atom]) -> bool {
        let a = tok("a");
        let b = tok("b");
        let ab_only = || s.iter().all(|&t| t == a || t == b);
        match self.id {
            LanguageId::An => !s.is_empty() && run_len(s, "a") == s.len(),
            LanguageId::AnFinite(k) => !s.is_empty() && s.len() <= k && run_len(s, "a") == s.len(),
            LanguageId::AbN => {
                !s.is_empty() && s.len().is_multiple_of(2) && s.chunks(2).all(|c| c[0] == a && c[1] == b)
            }
            LanguageId::AnBn | LanguageId::LaiAnBn => {
                let n = run_len(s, "a");
                n >= 1 && s.len() == 2 * n && run_len(&s[n..], "b") == n
            }
            LanguageId::AnB2n => {
                let n = run_len(s, "a");
                n >= 1 && s.len() == 3 * n && run_len(&s[n..], "b") == 2 * n
            }
            LanguageId::AnBnCn => {
                let n = run_len(s, "a");
                n >= 1 && s.len() == 3 * n && run_len(&s[n..], "b") == n && run_len(&s[2 * n..], "c") == n
            }
            LanguageId::Dyck => {
                if s.is_empty() || !ab_only() {
                    return false;
                }
                let mut depth = 0i64;
                for &t in s {
                    depth += if t == a { 1 } else { -1 };
                    if depth < 0 {
                        return false;
                    }
                }
                depth == 0
            }
            LanguageId::XX => {
                let h = s.len() / 2;
                !s.is_empty() && s.len().is_multiple_of(2) && ab_only() && s[..h] == s[h..]
            }
            LanguageId::XXR => {
                let h = s.len() / 2;
                !s.is_empty() && s.len().is_multiple_of(2) && ab_only() && s[..h].iter().eq(s[h..].iter().rev())
            }
            LanguageId::AnBmCnDm => {
                let n = run_len(s, "a");
                let m = run_len(&s[n..], "b");
                n >= 1
                    && m >= 1
                    && s.len() == 2 * (n + m)
                    && run_len(&s[n + m..], "c") == n
                    && run_len(&s[2 * n + m..], "d") == m
            }
            LanguageId::SimpleEnglish { .. } => self.english.as_ref().expect("grammar").recognizes(s),
            LanguageId::GomezAXB(_) => {
                s.len() == 5
                    && GOMEZ_FRAMES.iter().any(|(f, l)| s[0] == tok(f) && s[4] == tok(l))
                    && self.pool.iter().any(|x| x.tokens() == &s[1..4])
            }
        }
    }

    /// Probability of `s` under the reference sampler.
    pub fn probability(&self, s: &[Atom]) -> f64 {
        if s.len() > self.max_len || !self.membership(s) {
            return 0.0;
        }
        let half = 0.5f64;
        let p = match self.id {
            LanguageId::Dyck => 0.25f64.powi((s.len() / 2) as i32),
            LanguageId::XX | LanguageId::XXR => 0.25f64.powi((s.len() / 2) as i32),
            LanguageId::AnBmCnDm => half.powi((s.len() / 2) as i32),
            LanguageId::SimpleEnglish { .. } => self.english.as_ref().expect("grammar").inside(s),
            LanguageId::GomezAXB(p) => 1.0 / (3 * p) as f64,
            _ => {
                let per = self.counting().expect("counting language");
                half.powi((s.len() / per) as i32)
            }
        };
        p / self.norm
    }

    /// Draw one string from the reference law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Str {
        let a = tok("a");
        let b = tok("b");
        match self.id {
            LanguageId::Dyck => loop {
                if let Some(s) = sample_dyck(rng, self.max_len) {
                    return s;
                }
            },
            LanguageId::XX | LanguageId::XXR => {
                let n = geometric_upto(rng, self.max_len / 2);
                let x: Vec<Atom> = (0..n).map(|_| if rng.gen::<bool>() { b } else { a }).collect();
                let mut second = x.clone();
                if self.id == LanguageId::XXR {
                    second.reverse();
                }
                Str::new([x, second].concat())
            }
            LanguageId::AnBmCnDm => loop {
                let n = geometric(rng);
                let m = geometric(rng);
                if 2 * (n + m) <= self.max_len {
                    return Str::new([repeat("a", n), repeat("b", m), repeat("c", n), repeat("d", m)].concat());
                }
            },
            LanguageId::SimpleEnglish { .. } => {
                let g = self.english.as_ref().expect("grammar");
                loop {
                    if let Some(s) = g.sample(rng, self.max_len) {
                        return s;
                    }
                }
            }
            LanguageId::GomezAXB(_) => {
                let (f, l) = GOMEZ_FRAMES[rng.gen_range(0..GOMEZ_FRAMES.len())];
                let x = &self.pool[rng.gen_range(0..self.pool.len())];
                Str::new([vec![tok(f)], x.tokens().to_vec(), vec![tok(l)]].concat())
            }
            _ => self.counting_string(geometric_upto(rng, self.max_size())),
        }
    }

    /// The `m` most probable strings with their exact probabilities, most
    /// probable first; equal probabilities in lexicographic order.
    pub fn top_support(&self, m: usize) -> Vec<(Str, f64)> {
        let mut out: Vec<(Str, f64)> = Vec::new();
        let push_class = |mut class: Vec<Str>, out: &mut Vec<(Str, f64)>| {
            class.sort();
            for s in class {
                if out.len() >= m {
                    return false;
                }
                let p = self.probability(&s);
                out.push((s, p));
            }
            out.len() < m
        };
        match self.id {
            LanguageId::Dyck => {
                for k in 1..=self.max_len / 2 {
                    if !push_class(dyck_words(k), &mut out) {
                        break;
                    }
                }
            }
            LanguageId::XX | LanguageId::XXR => {
                for n in 1..=self.max_len / 2 {
                    let need = m - out.len();
                    let class: Vec<Str> = (0..(1u64 << n.min(63)).min(need as u64))
                        .map(|bits| {
                            let x: Vec<Atom> = (0..n)
                                .map(|i| {
                                    if bits >> (n - 1 - i) & 1 == 1 {
                                        tok("b")
                                    } else {
                                        tok("a")
                                    }
                                })
                                .collect();
                            let mut second = x.clone();
                            if self.id == LanguageId::XXR {
                                second.reverse();
                            }
                            Str::new([x, second].concat())
                        })
                        .collect();
                    if !push_class(class, &mut out) {
                        break;
                    }
                }
            }
            LanguageId::AnBmCnDm => {
                for s in 2..=self.max_len / 2 {
                    let class = (1..s)
                        .map(|n| {
                            let k = s - n;
                            Str::new([repeat("a", n), repeat("b", k), repeat("c", n), repeat("d", k)].concat())
                        })
                        .collect();
                    if !push_class(class, &mut out) {
                        break;
                    }
                }
            }
            LanguageId::SimpleEnglish { .. } => {
                let g = self.english.as_ref().expect("grammar");
                out = g
                    .most_probable(m, self.max_len)
                    .into_iter()
                    .map(|(s, p)| (s, p / self.norm))
                    .collect();
            }
            LanguageId::GomezAXB(_) => {
                let class = GOMEZ_FRAMES
                    .iter()
                    .flat_map(|(f, l)| {
                        self.pool
                            .iter()
                            .map(move |x| Str::new([vec![tok(f)], x.tokens().to_vec(), vec![tok(l)]].concat()))
                    })
                    .collect();
                push_class(class, &mut out);
            }
            _ => {
                for n in 1..=self.max_size().min(m) {
                    out.push((self.counting_string(n), 0.0));
                }
                for e in &mut out {
                    e.1 = self.probability(&e.0);
                }
            }
        }
        out
    }
}

/// S → a D b D, D → ∅ | a D b D with probability 1/2 each. `None` past `max_len`.
fn sample_dyck<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> Option<Str> {
    let a = tok("a");
    let b = tok("b");
    // pending work: true = a D slot, false = "b D"
    let mut out = vec![a];
    let mut stack = vec![false, true];
    while let Some(item) = stack.pop() {
        if item {
            if rng.gen::<bool>() {
                out.push(a);
                stack.push(false);
                stack.push(true);
            }
        } else {
            out.push(b);
            stack.push(true);
        }
        if out.len() > max_len {
            return None;
        }
    }
    Some(Str::new(out))
}

/// All balanced words with `k` pairs.
fn dyck_words(k: usize) -> Vec<Str> {
    fn go(open: usize, close: usize, cur: &mut Vec<Atom>, out: &mut Vec<Str>) {
        if open == 0 && close == 0 {
            out.push(Str::new(cur.clone()));
            return;
        }
        if open > 0 {
            cur.push(tok("a"));
            go(open - 1, close + 1, cur, out);
            cur.pop();
        }
        if close > 0 {
            cur.push(tok("b"));
            go(open, close - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, 0, &mut Vec::new(), &mut out);
    out
}

/// Membership by language id.
pub fn membership(id: LanguageId, s: &[Atom]) -> Result<bool> {
    Ok(TargetLanguage::new(id)?.membership(s))
}

/// `count` independent draws, reproducible from `seed`. Datasets of
/// different sizes from the same seed are prefixes of each other.
pub fn generate_dataset(id: LanguageId, count: usize, seed: u64) -> Result<Dataset> {
    let lang = TargetLanguage::new(id)?;
    Ok(generate_from(&lang, count, seed))
}

pub fn generate_from(lang: &TargetLanguage, count: usize, seed: u64) -> Dataset {
    let mut rng = SplitMix64::new(derive_seed_str(seed, &format!("dataset/{}", lang.id())));
    Dataset::new((0..count).map(|_| lang.sample(&mut rng)).collect())
}
