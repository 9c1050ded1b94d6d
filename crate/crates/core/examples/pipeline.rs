//! Runs split, LDA training, recommendation and evaluation end to end and
//! prints the metric summary.
//!
//! cargo run --release --example pipeline -- [output dir]

use std::fs::File;
use std::path::PathBuf;

use longtail::dataset::write_ratings_csv;
use longtail::pipeline::{cmd_run, RunConfig};
use longtail::synthetic::{generate, SyntheticConfig};

fn main() -> longtail::Result<()> {
    let out: PathBuf = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("longtail-example"), PathBuf::from);
    std::fs::create_dir_all(&out)?;
    let input = out.join("ratings.csv");
    write_ratings_csv(&generate(&SyntheticConfig::small(21))?.records, File::create(&input)?)?;
    let config = RunConfig {
        input: Some(input),
        output_dir: out.join("run"),
        seed: 21,
        n_cases: 400,
        n_decoys: 200,
        eval_users: 150,
        topics: 6,
        sweeps: 100,
        ..RunConfig::default()
    };
    print!("{}", config.to_toml_string());
    let report = cmd_run(&config)?;
    println!("{}", report.summary());
    println!("artifacts in {}", config.output_dir.display());
    Ok(())
}
