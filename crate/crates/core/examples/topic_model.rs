//! Trains LDA by collapsed Gibbs sampling and shows the learned topics.
//!
//! cargo run --release --example topic_model -- [topics] [sweeps]

use std::collections::HashMap;

use longtail::graph::{build_graph, DuplicatePolicy};
use longtail::lda::{train, LdaConfig};
use longtail::synthetic::{generate, SyntheticConfig};

fn main() -> longtail::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let data = generate(&SyntheticConfig::small(5))?;
    let g = build_graph(&data.records, DuplicatePolicy::KeepLast)?;
    let config = LdaConfig {
        topics: args.first().copied().unwrap_or(6),
        sweeps: args.get(1).copied().unwrap_or(150),
        seed: 5,
        ..LdaConfig::default()
    };
    let model = train(&g, &config)?;
    let t = model.estimate()?;
    println!("{} tokens, {} topics, {} sweeps, alpha {:.3}", model.counts().total_tokens(), t.topics(), model.sweeps(), config.alpha());
    for z in 0..t.topics() {
        let top = t.top_items(z, 10);
        let mut genres: HashMap<usize, usize> = HashMap::new();
        for (item, _) in &top {
            *genres.entry(data.item_genre[item.parse::<usize>().unwrap() - 1]).or_default() += 1;
        }
        let (genre, hits) = genres.into_iter().max_by_key(|&(g, n)| (n, std::cmp::Reverse(g))).unwrap();
        let ids: Vec<&str> = top.iter().map(|(i, _)| *i).collect();
        println!("topic {z}: planted genre {genre} covers {hits}/10 of [{}]", ids.join(" "));
    }
    Ok(())
}
