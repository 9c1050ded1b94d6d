//! Writes a synthetic rating corpus as CSV.
//!
//! cargo run --release --example synthetic_corpus -- ratings.csv [small|movielens] [seed] [popularity exponent]

use std::fs::File;

use longtail::dataset::write_ratings_csv;
use longtail::eval::longtail_split;
use longtail::synthetic::{generate, SyntheticConfig};

fn main() -> longtail::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.first().map_or("ratings.csv", String::as_str);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut config = match args.get(1).map(String::as_str) {
        Some("movielens") => SyntheticConfig::movielens_like(seed),
        _ => SyntheticConfig::small(seed),
    };
    if let Some(e) = args.get(3).and_then(|s| s.parse().ok()) {
        config.popularity_exponent = e;
    }
    let data = generate(&config)?;
    write_ratings_csv(&data.records, File::create(path)?)?;
    let split = longtail_split(&data.records, 0.2)?;
    println!(
        "{} ratings from {} users over {} items to {path}; {:.1}% of items form the 20% tail",
        data.records.len(),
        config.users,
        config.items,
        100.0 * split.tail_fraction()
    );
    Ok(())
}
