//! Top-k lists from all seven recommenders for one user.
//!
//! cargo run --release --example recommend -- [user id] [k]

use longtail::eval::item_popularity;
use longtail::graph::{build_graph, DuplicatePolicy};
use longtail::lda::{train, LdaConfig};
use longtail::recommend::{Algorithm, Params, Recommenders};
use longtail::synthetic::{generate, SyntheticConfig};

fn main() -> longtail::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let user = args.first().cloned().unwrap_or_else(|| "17".into());
    let k = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(8);

    let data = generate(&SyntheticConfig::small(9))?;
    let g = build_graph(&data.records, DuplicatePolicy::KeepLast)?;
    let topics = train(&g, &LdaConfig { topics: 6, sweeps: 100, seed: 9, ..LdaConfig::default() })?.estimate()?;
    let recs = Recommenders::new(&g, Params::default()).with_default_item_entropy(None)?.with_topics(&topics, None)?;
    let popularity = item_popularity(&data.records);
    let (c1, c2) = recs.cost_constants();
    println!(
        "user {user} rated {} items; C = {:.3} (AC1), {:.3} (AC2)",
        g.edge_count(g.user(&user).expect("user in corpus")),
        c1.unwrap_or(f64::NAN),
        c2.unwrap_or(f64::NAN)
    );
    for a in Algorithm::ALL {
        let list = recs.recommend(a, &user, k)?;
        let mean_pop = list.item_ids().map(|i| popularity[i] as f64).sum::<f64>() / list.items.len() as f64;
        let ids: Vec<&str> = list.item_ids().collect();
        println!("{:<5} mean popularity {:>6.1}  [{}]", a.tag(), mean_pop, ids.join(" "));
    }
    Ok(())
}
