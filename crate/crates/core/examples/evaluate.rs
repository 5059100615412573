//! Run a stochastic program and compare sampled and exact output laws.
//!
//! `cargo run --example evaluate -- "(pair a (if (flip 0.5) (pair b x) (F1 (pair b x))))"`

use langinduct::rng::SplitMix64;
use langinduct::{enumerate_distribution, estimate_distribution, evaluate, EvalLimits, FactorizedProgram};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let src = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "(pair a (if (flip 0.7) nil (F1 nil)))".to_string());
    let program: FactorizedProgram = src.parse()?;
    println!("program: {program}");

    let mut rng = SplitMix64::new(1);
    let limits = EvalLimits::default();
    print!("five runs:");
    for _ in 0..5 {
        print!(" [{:?}]", evaluate(&program, &mut rng, &limits));
    }
    println!();

    let sampled = estimate_distribution(&program, 2048, 7);
    let exact = enumerate_distribution(&program, 12)?;
    println!("\nexact (unexplored traces count as ⊥):\n{exact}");
    println!("\nTV(2048 samples, exact) = {:.4}", sampled.total_variation(&exact));
    Ok(())
}
