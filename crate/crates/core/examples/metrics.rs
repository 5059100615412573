//! Precision, recall and F of a few programs against aⁿbⁿ.

use langinduct::metrics::{scores, DEFAULT_SUPPORT_SIZE};
use langinduct::{estimate_distribution, LanguageId, TargetLanguage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lang = TargetLanguage::new(LanguageId::AnBn)?;
    let programs = [
        ("exact", "(pair a (if (flip 0.5) (pair b x) (F1 (pair b x))))"),
        ("only ab", "(pair a b)"),
        (
            "too general",
            "(if (flip 0.5) (pair a (F1 nil)) (if (flip 0.5) (pair b (F1 nil)) nil))",
        ),
    ];
    println!("{:<12} {:>9} {:>7} {:>6}", "program", "precision", "recall", "F");
    for (name, src) in programs {
        let dist = estimate_distribution(&src.parse()?, 2048, 0);
        let s = scores(&dist, &lang, DEFAULT_SUPPORT_SIZE);
        println!("{name:<12} {:>9.3} {:>7.3} {:>6.3}", s.precision, s.recall, s.f);
    }
    Ok(())
}
