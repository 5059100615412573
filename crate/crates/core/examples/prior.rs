//! Sample programs from the expression grammar and show their prior.

use langinduct::expr::atoms;
use langinduct::rng::SplitMix64;
use langinduct::{ExpressionGrammar, FactorizedProgram, Nonterminal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grammar = ExpressionGrammar::standard(&atoms(&["a", "b"])?)?;
    println!("list productions in factor 2:");
    for (name, p) in grammar.normalized(Nonterminal::List, 2) {
        println!("  {p:.4}  {name}");
    }

    let mut rng = SplitMix64::new(3);
    println!("\nsamples:");
    for _ in 0..6 {
        let body = grammar.sample_expression(Nonterminal::List, 1, &mut rng, grammar.max_depth())?;
        let p = FactorizedProgram::single(body)?;
        println!("  {:>8.3}  {p}", grammar.log_prior_program(&p)?);
    }

    // each extra factor costs its own productions plus ln(1/2)
    for src in [
        "(pair a (if (flip 0.5) nil (F1 nil)))",
        "(pair a (if (flip 0.5) nil (F1 nil))) | (F1 nil)",
    ] {
        let p: FactorizedProgram = src.parse()?;
        println!("\n{:>8.3}  {p}", grammar.log_prior_program(&p)?);
    }
    Ok(())
}
