//! The target languages: samples, membership and the most probable strings.

use langinduct::languages::{gomez_pool, lai_blocks, LaiCondition};
use langinduct::rng::SplitMix64;
use langinduct::{LanguageId, Str, TargetLanguage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ids = [
        "an", "abn", "anbn", "anb2n", "dyck", "anbncn", "xx", "xxr", "anbmcndm", "english",
    ];
    let mut rng = SplitMix64::new(5);
    for name in ids {
        let id: LanguageId = name.parse()?;
        let lang = TargetLanguage::new(id)?;
        let samples: Vec<String> = (0..4).map(|_| lang.sample(&mut rng).compact()).collect();
        let top: Vec<String> = lang
            .top_support(3)
            .iter()
            .map(|(s, p)| format!("{}:{p:.3}", s.compact()))
            .collect();
        println!(
            "{:<10} samples {:<40} top {}",
            id.to_string(),
            samples.join(" "),
            top.join(" ")
        );
    }

    println!();
    let dyck = TargetLanguage::new(LanguageId::Dyck)?;
    for w in ["aabb", "abba"] {
        println!("dyck accepts {w}: {}", dyck.membership(&Str::chars(w)));
    }

    for condition in LaiCondition::ALL {
        let sizes: Vec<usize> = lai_blocks(condition, 0).iter().map(|b| b.len()).collect();
        println!("lai {:<7} block sizes {sizes:?}", condition.name());
    }
    let pool: Vec<String> = gomez_pool(4)?.iter().map(Str::compact).collect();
    println!("gomez pool of 4: {pool:?}");
    Ok(())
}
