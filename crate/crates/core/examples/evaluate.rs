//! Long-tail split, recall protocol, popularity and diversity on a
//! synthetic corpus.
//!
//! cargo run --release --example evaluate

use longtail::eval::{
    diversity_at_n, item_popularity, longtail_split, make_recall_protocol, popularity_at_n, recall_at_n,
    AlgorithmScorer, RandomScorer,
};
use longtail::graph::{build_graph, DuplicatePolicy};
use longtail::lda::{train, LdaConfig};
use longtail::recommend::{Algorithm, Params, Recommenders};
use longtail::synthetic::{generate, SyntheticConfig};

fn main() -> longtail::Result<()> {
    let data = generate(&SyntheticConfig::small(13))?;
    let split = longtail_split(&data.records, 0.2)?;
    println!(
        "{} of {} items hold 20% of the ratings ({:.1}%)",
        split.num_tail(),
        split.num_items(),
        100.0 * split.tail_fraction()
    );
    let (training, protocol) = make_recall_protocol(&data.records, &split, 300, 100, 13)?;
    let g = build_graph(&training, DuplicatePolicy::KeepLast)?;
    let topics = train(&g, &LdaConfig { topics: 6, sweeps: 100, seed: 13, ..LdaConfig::default() })?.estimate()?;
    let recs = Recommenders::new(&g, Params::default()).with_default_item_entropy(None)?.with_topics(&topics, None)?;

    let ns = [1, 10, 20, 50];
    let users: Vec<String> = protocol.users().into_iter().filter(|u| g.user(u).is_some()).collect();
    let popularity = item_popularity(&training);
    println!("{} test cases with 100 decoys, {} users for list metrics", protocol.cases.len(), users.len());
    println!("{:<7} {:>8} {:>8} {:>8} {:>8} {:>8} {:>9}", "", "R@1", "R@10", "R@20", "R@50", "Pop@10", "Div@10");
    let random = recall_at_n(&protocol, &RandomScorer { seed: 1 }, &ns);
    print!("{:<7}", "random");
    for (_, r) in random {
        print!(" {r:>8.3}");
    }
    println!();
    for a in Algorithm::ALL {
        let recall = recall_at_n(&protocol, &AlgorithmScorer { recommenders: &recs, algorithm: a }, &ns);
        let lists: Vec<_> = recs.recommend_many(a, &users, 10).into_iter().collect::<longtail::Result<_>>()?;
        let pop = popularity_at_n(&lists, &popularity, &[10])[0].1;
        let div = diversity_at_n(&lists, 10, g.num_items())?;
        print!("{:<7}", a.tag());
        for (_, r) in recall {
            print!(" {r:>8.3}");
        }
        println!(" {pop:>8.1} {div:>9.4}");
    }
    Ok(())
}
