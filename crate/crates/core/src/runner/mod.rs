//! Experiment drivers behind the command-line tool.
//!
//! Every output file starts with `#` header lines giving the tool version,
//! the command, the config hash and the seed. Files are written to a
//! temporary name and renamed into place, so a failed run never leaves a
//! half-written file. Wall-clock timings go to stderr only, which keeps
//! outputs byte-identical between runs of the same config.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{ExperimentId, Profile, RunConfig, DEFAULT_SCHEDULE};

use crate::error::{Error, Result};
use crate::expr::Atom;
use crate::inference::{par_each_mut, par_indexed, run_inference, Chain, HypothesisStore};
use crate::languages::{
    generate_from, gomez_dataset, lai_blocks, LaiCondition, LanguageId, TargetLanguage, GOMEZ_FRAMES,
};
use crate::metrics::{dependency_consistent, infinite_leaning, precision, recall_against, EvaluatedStore, Scores};
use crate::scoring::{Dataset, Scorer};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One learning-curve row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub data_size: usize,
    pub weighted_f: f64,
    pub map_f: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    /// Posterior mass of an experiment-specific class of hypotheses, or 0.
    pub aux_mass: f64,
}

/// Result of inference on one dataset.
#[derive(Clone, Debug)]
pub struct Induction {
    pub data: Dataset,
    pub store: HypothesisStore,
    pub evaluated: EvaluatedStore,
}

impl Induction {
    pub fn point(&self, aux_mass: f64) -> CurvePoint {
        CurvePoint {
            data_size: self.data.len(),
            weighted_f: self.evaluated.weighted_f(),
            map_f: self.evaluated.map_f(),
            weighted_precision: self.evaluated.weighted_precision(),
            weighted_recall: self.evaluated.weighted_recall(),
            aux_mass,
        }
    }
}

/// Files written by a command, plus what went into them.
#[derive(Clone, Debug)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub points: Vec<CurvePoint>,
}

pub fn scorer_for(config: &RunConfig, lang: &TargetLanguage) -> Result<Scorer> {
    let grammar = config.grammar(&lang.alphabet())?;
    Ok(Scorer::new(grammar, config.score, config.seed))
}

/// Run inference on `data` and evaluate the resulting store against `lang`.
pub fn induce_on(config: &RunConfig, lang: &TargetLanguage, data: &Dataset, scorer: &Scorer) -> Induction {
    let store = run_inference(&config.chain, data, scorer);
    let evaluated = EvaluatedStore::evaluate(&store, lang, scorer.params(), config.seed, config.support_size);
    Induction {
        data: data.clone(),
        store,
        evaluated,
    }
}

/// The first `size` items of the run's dataset stream. Smaller sizes are
/// prefixes of larger ones.
pub fn dataset(config: &RunConfig, lang: &TargetLanguage, size: usize) -> Dataset {
    generate_from(lang, size, config.seed)
}

pub fn header(command: &str, config: &RunConfig) -> Vec<String> {
    vec![
        format!("langinduct {VERSION}"),
        format!(
            "command={command} profile={} config_hash={:016x} seed={}",
            config.profile.name(),
            config.hash(),
            config.seed
        ),
    ]
}

/// Write `text` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = PathBuf::from(format!("{}.tmp", path.display()));
    std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn file_stem(lang: LanguageId) -> String {
    lang.to_string().replace(':', "")
}

fn store_text(command: &str, config: &RunConfig, lang: LanguageId, run: &Induction) -> String {
    let mut h = header(command, config);
    h.push(format!("language={lang} data_size={}", run.data.len()));
    run.store.to_text(&h)
}

fn write_store(command: &str, config: &RunConfig, lang: LanguageId, run: &Induction) -> Result<PathBuf> {
    let path = config
        .out
        .join(format!("{}-n{}.store", file_stem(lang), run.data.len()));
    write_atomic(&path, &store_text(command, config, lang, run))?;
    Ok(path)
}

fn log_time(what: &str, start: Instant) {
    eprintln!("{what}: {:.1}s", start.elapsed().as_secs_f64());
}

/// Generate `config.data_size` items, run inference, and write the store
/// plus a summary of its scores against the target.
pub fn cmd_induce(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let lang = TargetLanguage::new(config.language)?;
    let scorer = scorer_for(config, &lang)?;
    let data = dataset(config, &lang, config.data_size);
    let start = Instant::now();
    let run = induce_on(config, &lang, &data, &scorer);
    log_time(&format!("induce {} n={}", config.language, data.len()), start);
    let store = write_store("induce", config, config.language, &run)?;

    let mut text = String::new();
    for h in header("induce", config) {
        let _ = writeln!(text, "# {h}");
    }
    let ev = &run.evaluated;
    let map = ev.entries().first();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(text, "{k} = {v}");
    };
    kv("language", config.language.to_string());
    kv("data_size", data.len().to_string());
    kv("distinct_items", data.counts().len().to_string());
    kv("store_entries", run.store.len().to_string());
    kv("weighted_f", fmt(ev.weighted_f()));
    kv("weighted_precision", fmt(ev.weighted_precision()));
    kv("weighted_recall", fmt(ev.weighted_recall()));
    kv("map_f", fmt(ev.map_scores().f));
    kv("map_precision", fmt(ev.map_scores().precision));
    kv("map_recall", fmt(ev.map_scores().recall));
    kv("map_log_post", map.map_or("nan".into(), |e| e.log_post.to_string()));
    kv("map_program", map.map_or(String::new(), |e| e.canonical.clone()));
    let summary = config
        .out
        .join(format!("{}-n{}.summary", file_stem(config.language), data.len()));
    write_atomic(&summary, &text)?;
    Ok(Report {
        files: vec![store, summary],
        points: vec![run.point(0.0)],
    })
}

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

/// Inference at every schedule size on prefixes of one dataset stream.
/// Points run in parallel; each writes its own store file.
fn curve(
    command: &str,
    config: &RunConfig,
    lang: &TargetLanguage,
    scorer: &Scorer,
    aux: &(dyn Fn(&Induction) -> f64 + Sync),
) -> Result<(Vec<PathBuf>, Vec<CurvePoint>)> {
    let largest = *config.schedule.last().expect("validated schedule");
    let full = dataset(config, lang, largest);
    let results = par_indexed(config.schedule.len(), |i| {
        let data = full.prefix(config.schedule[i]);
        let start = Instant::now();
        let run = induce_on(config, lang, &data, scorer);
        log_time(&format!("{command} {} n={}", lang.id(), data.len()), start);
        let path = write_store(command, config, lang.id(), &run)?;
        Ok((path, run.point(aux(&run))))
    });
    let results: Vec<(PathBuf, CurvePoint)> = results.into_iter().collect::<Result<_>>()?;
    Ok(results.into_iter().unzip())
}

const CURVE_COLUMNS: &str = "data_size,weighted_f,map_f,weighted_precision,weighted_recall";

fn curve_rows(points: &[CurvePoint]) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "{CURVE_COLUMNS}");
    for p in points {
        let _ = writeln!(
            t,
            "{},{},{},{},{}",
            p.data_size,
            fmt(p.weighted_f),
            fmt(p.map_f),
            fmt(p.weighted_precision),
            fmt(p.weighted_recall)
        );
    }
    t
}

fn csv_text(command: &str, config: &RunConfig, extra: &[String], body: &str) -> String {
    let mut t = String::new();
    for h in header(command, config).iter().chain(extra) {
        let _ = writeln!(t, "# {h}");
    }
    t.push_str(body);
    t
}

/// Learning curve for `config.language` over `config.schedule`.
pub fn cmd_learning_curve(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let lang = TargetLanguage::new(config.language)?;
    let scorer = scorer_for(config, &lang)?;
    let (mut files, points) = curve("curve", config, &lang, &scorer, &|_| 0.0)?;
    let path = config.out.join(format!("curve-{}.csv", file_stem(config.language)));
    let extra = [
        format!("language={}", config.language),
        "columns: data_size = observed items; weighted_f, weighted_precision, weighted_recall = \
         posterior-weighted scores; map_f = F of the highest-posterior hypothesis"
            .to_string(),
    ];
    write_atomic(&path, &csv_text("curve", config, &extra, &curve_rows(&points)))?;
    files.push(path);
    Ok(Report { files, points })
}

pub fn cmd_experiment(id: ExperimentId, config: &RunConfig) -> Result<Report> {
    config.validate()?;
    match id {
        ExperimentId::Infinite => experiment_infinite(config),
        ExperimentId::Lai => experiment_lai(config),
        ExperimentId::Gomez => experiment_gomez(config),
        ExperimentId::English => experiment_english(config),
    }
}

/// Posterior mass on hypotheses that emit strings longer than the finite
/// target allows, for a finite and an infinite aⁿ target.
fn experiment_infinite(config: &RunConfig) -> Result<Report> {
    let max = config.finite_max_len;
    let targets = [LanguageId::AnFinite(max), LanguageId::An];
    let mut files = Vec::new();
    let mut body = String::from("target,data_size,infinite_mass,weighted_f,map_f\n");
    let mut all = Vec::new();
    for id in targets {
        let lang = TargetLanguage::new(id)?;
        let scorer = scorer_for(config, &lang)?;
        let aux = |run: &Induction| run.evaluated.mass_where(|e| infinite_leaning(&e.dist, max));
        let (f, points) = curve("experiment-infinite", config, &lang, &scorer, &aux)?;
        files.extend(f);
        for p in &points {
            let _ = writeln!(
                body,
                "{id},{},{},{},{}",
                p.data_size,
                fmt(p.aux_mass),
                fmt(p.weighted_f),
                fmt(p.map_f)
            );
        }
        all.extend(points);
    }
    let extra = [format!(
        "columns: infinite_mass = posterior mass of hypotheses emitting a string longer than {max}"
    )];
    let path = config.out.join("experiment-infinite.csv");
    write_atomic(&path, &csv_text("experiment-infinite", config, &extra, &body))?;
    files.push(path);
    Ok(Report { files, points: all })
}

/// One row of the block-ordering experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockRow {
    pub condition: LaiCondition,
    pub block: usize,
    pub items_seen: usize,
    /// Steps per chain so far.
    pub steps: usize,
    pub map: Scores,
}

/// Chains that persist across blocks: after each block the data grows by
/// that block and every chain runs `block_steps` more steps.
pub fn lai_condition(config: &RunConfig, condition: LaiCondition, scorer: &Scorer) -> Result<Vec<BlockRow>> {
    let lang = TargetLanguage::new(LanguageId::LaiAnBn)?;
    let top = lang.top_support(config.support_size);
    let blocks = lai_blocks(condition, config.seed);
    let per_block = config
        .block_steps
        .unwrap_or_else(|| (config.chain.steps / blocks.len()).max(1));
    let mut data = Dataset::empty();
    let mut chains: Vec<Chain> = Vec::new();
    let mut rows = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        data = data.concat(block);
        if chains.is_empty() {
            chains = par_indexed(config.chain.chains, |i| Chain::new(&config.chain, i, &data, scorer));
        } else {
            par_each_mut(&mut chains, |c| c.set_data(&data, scorer));
        }
        par_each_mut(&mut chains, |c| c.run(per_block, &data, scorer));
        let store = HypothesisStore::from_hypotheses(chains.iter().flat_map(Chain::top));
        let map = store.map().expect("chains always report a hypothesis");
        let dist = scorer.evaluation_distribution(&map.hypothesis.program);
        rows.push(BlockRow {
            condition,
            block: b + 1,
            items_seen: data.len(),
            steps: (b + 1) * per_block,
            map: Scores::new(precision(&dist, &lang), recall_against(&dist, &top)),
        });
    }
    Ok(rows)
}

fn experiment_lai(config: &RunConfig) -> Result<Report> {
    let lang = TargetLanguage::new(LanguageId::LaiAnBn)?;
    let scorer = scorer_for(config, &lang)?;
    let mut body = String::from("condition,block,items_seen,steps,map_f,map_precision,map_recall\n");
    for condition in LaiCondition::ALL {
        let start = Instant::now();
        let rows = lai_condition(config, condition, &scorer)?;
        log_time(&format!("experiment-lai {}", condition.name()), start);
        for r in rows {
            let _ = writeln!(
                body,
                "{},{},{},{},{},{},{}",
                condition.name(),
                r.block,
                r.items_seen,
                r.steps,
                fmt(r.map.f),
                fmt(r.map.precision),
                fmt(r.map.recall)
            );
        }
    }
    let extra = ["columns: steps = MCMC steps per chain so far; map_* = scores of the \
                  highest-posterior hypothesis against aⁿbⁿ"
        .to_string()];
    let path = config.out.join("experiment-lai.csv");
    write_atomic(&path, &csv_text("experiment-lai", config, &extra, &body))?;
    Ok(Report {
        files: vec![path],
        points: Vec::new(),
    })
}

/// Posterior mass of hypotheses whose every output respects one of the
/// trained first/last token pairs.
pub fn dependency_mass(run: &Induction) -> f64 {
    let frames: Vec<(Atom, Atom)> = GOMEZ_FRAMES
        .iter()
        .map(|(a, b)| (Atom::new(a).expect("atom"), Atom::new(b).expect("atom")))
        .collect();
    run.evaluated.mass_where(|e| dependency_consistent(&e.dist, &frames))
}

fn experiment_gomez(config: &RunConfig) -> Result<Report> {
    let sizes = &config.gomez_pool_sizes;
    // all pool sizes share one alphabet, hence one scorer
    let scorer = scorer_for(config, &TargetLanguage::new(LanguageId::GomezAXB(sizes[0]))?)?;
    let runs = par_indexed(sizes.len(), |i| -> Result<(PathBuf, usize, CurvePoint)> {
        let id = LanguageId::GomezAXB(sizes[i]);
        let lang = TargetLanguage::new(id)?;
        let data = gomez_dataset(sizes[i], config.gomez_items, config.seed)?;
        let start = Instant::now();
        let run = induce_on(config, &lang, &data, &scorer);
        log_time(&format!("experiment-gomez pool={}", sizes[i]), start);
        let path = write_store("experiment-gomez", config, id, &run)?;
        Ok((path, data.counts().len(), run.point(dependency_mass(&run))))
    });
    let mut files = Vec::new();
    let mut points = Vec::new();
    let mut body = String::from("pool_size,data_size,distinct_items,dependency_mass,weighted_f,map_f\n");
    for (size, r) in sizes.iter().zip(runs) {
        let (path, distinct, p) = r?;
        let _ = writeln!(
            body,
            "{size},{},{distinct},{},{},{}",
            p.data_size,
            fmt(p.aux_mass),
            fmt(p.weighted_f),
            fmt(p.map_f)
        );
        files.push(path);
        points.push(p);
    }
    let extra = [
        "columns: dependency_mass = posterior mass of hypotheses all of whose outputs \
                  have length 5 and a trained first/last pair"
            .to_string(),
    ];
    let path = config.out.join("experiment-gomez.csv");
    write_atomic(&path, &csv_text("experiment-gomez", config, &extra, &body))?;
    files.push(path);
    Ok(Report { files, points })
}

fn experiment_english(config: &RunConfig) -> Result<Report> {
    let id = match config.language {
        LanguageId::SimpleEnglish { .. } => config.language,
        _ => LanguageId::SimpleEnglish { if_then: false },
    };
    let lang = TargetLanguage::new(id)?;
    let scorer = scorer_for(config, &lang)?;
    let (mut files, points) = curve("experiment-english", config, &lang, &scorer, &|_| 0.0)?;
    let path = config.out.join("experiment-english.csv");
    let extra = [format!("language={id}")];
    write_atomic(
        &path,
        &csv_text("experiment-english", config, &extra, &curve_rows(&points)),
    )?;
    files.push(path);
    Ok(Report { files, points })
}

/// Header values of a store file, from `key=value` words on `#` lines.
pub fn header_value(text: &str, key: &str) -> Option<String> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .flat_map(|l| l.trim_start_matches('#').split_whitespace())
        .find_map(|w| w.strip_prefix(key)?.strip_prefix('=').map(str::to_string))
}

/// A readable table of the `top` best hypotheses in a store file. When the
/// header names a language, each row also gets precision, recall and F.
pub fn cmd_inspect(path: &Path, top: usize) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let store = HypothesisStore::parse(&text)?;
    let lang = header_value(&text, "language")
        .map(|l| l.parse::<LanguageId>().and_then(TargetLanguage::new))
        .transpose()?;
    let seed = header_value(&text, "seed").and_then(|s| s.parse().ok()).unwrap_or(0);
    let params = crate::scoring::ScoreParams::default();
    let mut out = String::new();
    let _ = writeln!(out, "{} ({} hypotheses)", path.display(), store.len());
    if let Some(l) = &lang {
        let _ = writeln!(out, "target: {}", l.id());
    }
    let support = lang
        .as_ref()
        .map(|l| l.top_support(crate::metrics::DEFAULT_SUPPORT_SIZE));
    let _ = writeln!(
        out,
        "{:>4} {:>8} {:>10} {:>10} {:>10}  scores / program",
        "rank", "weight", "log_post", "log_prior", "log_lik"
    );
    for (i, e) in store.entries().iter().take(top).enumerate() {
        let h = &e.hypothesis;
        let _ = writeln!(
            out,
            "{:>4} {:>8.4} {:>10.3} {:>10.3} {:>10.3}  {}",
            i + 1,
            e.weight,
            h.log_post,
            h.log_prior,
            h.log_lik,
            h.canonical
        );
        if let (Some(l), Some(s)) = (&lang, &support) {
            let dist = crate::scoring::evaluation_distribution(&h.program, &params, seed);
            let sc = Scores::new(precision(&dist, l), recall_against(&dist, s));
            let _ = writeln!(
                out,
                "{:>47}  P={:.3} R={:.3} F={:.3}",
                "", sc.precision, sc.recall, sc.f
            );
        }
    }
    Ok(out)
}
