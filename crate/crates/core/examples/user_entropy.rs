//! Item-based and topic-based user entropy on a synthetic corpus.
//!
//! cargo run --release --example user_entropy

use longtail::entropy::{build_entropy_table, EntropyKind};
use longtail::graph::{build_graph, DuplicatePolicy};
use longtail::lda::{train, LdaConfig};
use longtail::synthetic::{generate, SyntheticConfig};

fn main() -> longtail::Result<()> {
    let config = SyntheticConfig { taste_focus: 0.9, ..SyntheticConfig::small(3) };
    let data = generate(&config)?;
    let g = build_graph(&data.records, DuplicatePolicy::KeepLast)?;
    let items = build_entropy_table(&g, EntropyKind::ItemBased, None)?;
    let topics = train(&g, &LdaConfig { topics: config.genres, sweeps: 100, seed: 3, ..LdaConfig::default() })?.estimate()?;
    let by_topic = build_entropy_table(&g, EntropyKind::TopicBased, Some(&topics))?;
    println!("mean item-based entropy {:.3}, mean topic-based entropy {:.3}", items.mean(), by_topic.mean());

    let mut users: Vec<(&str, f64)> = by_topic.iter().collect();
    users.sort_by(|a, b| a.1.total_cmp(&b.1));
    println!("most focused users (topic-based):");
    for (id, e) in users.iter().take(5) {
        let genres = data.user_genres[id.parse::<usize>().unwrap() - 1].len();
        println!("  user {id:<4} entropy {e:.3}  planted genres {genres}  ratings {}", g.edge_count(g.user(id).unwrap()));
    }
    println!("broadest users (topic-based):");
    for (id, e) in users.iter().rev().take(5) {
        let genres = data.user_genres[id.parse::<usize>().unwrap() - 1].len();
        println!("  user {id:<4} entropy {e:.3}  planted genres {genres}  ratings {}", g.edge_count(g.user(id).unwrap()));
    }
    Ok(())
}
