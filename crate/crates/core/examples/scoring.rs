//! Score competing hypotheses for aⁿbⁿ data.
//!
//! The recursive program pays a larger prior cost than a list of the
//! observed strings but wins once the data contain enough distinct sizes.

use langinduct::expr::atoms;
use langinduct::languages::generate_dataset;
use langinduct::{ExpressionGrammar, LanguageId, ScoreParams, Scorer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grammar = ExpressionGrammar::standard(&atoms(&["a", "b"])?)?;
    let scorer = Scorer::new(grammar, ScoreParams::default(), 0);
    let candidates = [
        ("recursive", "(pair a (if (flip 0.5) (pair b x) (F1 (pair b x))))"),
        ("memorizer", "(if (flip 0.5) (pair a b) (pair (pair a a) (pair b b)))"),
        ("(ab)^n", "(pair (pair a b) (if (flip 0.5) nil (F1 nil)))"),
    ];
    for size in [2, 5, 20] {
        let data = generate_dataset(LanguageId::AnBn, size, 4)?;
        println!("{size} items: {data}");
        for (name, src) in candidates {
            let h = scorer.score(&src.parse()?, &data);
            println!(
                "  {name:<10} log_post {:>10.2}  prior {:>7.2}  lik {:>10.2}",
                h.log_post, h.log_prior, h.log_lik
            );
        }
    }
    Ok(())
}
