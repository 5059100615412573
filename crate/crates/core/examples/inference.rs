//! Learn aⁿ from ten strings with a few short Metropolis-Hastings chains.

use langinduct::inference::run_inference;
use langinduct::languages::generate_dataset;
use langinduct::metrics::EvaluatedStore;
use langinduct::{ChainConfig, ExpressionGrammar, LanguageId, ScoreParams, Scorer, TargetLanguage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lang = TargetLanguage::new(LanguageId::An)?;
    let data = generate_dataset(LanguageId::An, 10, 1)?;
    println!("data: {data}");

    let scorer = Scorer::new(
        ExpressionGrammar::standard(&lang.alphabet())?,
        ScoreParams::default(),
        1,
    );
    let config = ChainConfig {
        steps: 5_000,
        chains: 2,
        top_n: 20,
        ..ChainConfig::desk(1)
    };
    let store = run_inference(&config, &data, &scorer);
    let evaluated = EvaluatedStore::evaluate(&store, &lang, scorer.params(), 1, 25);
    println!("{} hypotheses, weighted F {:.3}\n", store.len(), evaluated.weighted_f());
    for e in evaluated.entries().iter().take(5) {
        println!(
            "{:.4}  {:>9.2}  F={:.3}  {}",
            e.weight, e.log_post, e.scores.f, e.canonical
        );
    }
    Ok(())
}
