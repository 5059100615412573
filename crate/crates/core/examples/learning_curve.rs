//! A small learning curve written to a temporary directory, the same way
//! `langinduct curve` writes one.

use langinduct::runner::{cmd_learning_curve, Profile, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("langinduct-curve-example");
    let mut config = RunConfig::parse(
        "language = abn\nschedule = 1,3,10\nsteps = 2000\nchains = 2\ntop_n = 20\n",
        Some(Profile::Desk),
    )?;
    config.out = out.clone();
    let report = cmd_learning_curve(&config)?;
    for p in &report.points {
        println!(
            "n={:<3} weighted F {:.3}  MAP F {:.3}",
            p.data_size, p.weighted_f, p.map_f
        );
    }
    let csv = out.join("curve-abn.csv");
    println!("\n{}", std::fs::read_to_string(csv)?);
    Ok(())
}
