//! Hitting time, absorbing time and absorbing cost on a small graph.
//!
//! cargo run --example walk_quantities

use longtail::entropy::{build_entropy_table, EntropyKind};
use longtail::graph::{build_graph, DuplicatePolicy, RatingRecord};
use longtail::walk::{self, AbsorbingSpec};

fn main() -> longtail::Result<()> {
    let ratings = [
        ("u1", "a", 5),
        ("u1", "b", 3),
        ("u2", "b", 4),
        ("u2", "c", 4),
        ("u2", "d", 1),
        ("u3", "c", 5),
        ("u3", "e", 2),
        ("u4", "d", 3),
        ("u4", "e", 5),
    ];
    let records: Vec<RatingRecord> =
        ratings.iter().map(|&(u, i, r)| RatingRecord::new(u, i, r)).collect::<longtail::Result<_>>()?;
    let g = build_graph(&records, DuplicatePolicy::Reject)?;
    let query = g.user("u1").unwrap();
    let rated = g.rated_items(query).to_vec();

    let ht = walk::hitting_time(&g, query)?;
    let unit = AbsorbingSpec::unit(&g, rated.iter().copied())?;
    let at_exact = walk::absorbing_time_exact(&g, &unit)?;
    let at_15 = walk::absorbing_time_truncated(&g, &unit, walk::DEFAULT_TAU)?;
    let entropy = build_entropy_table(&g, EntropyKind::ItemBased, None)?;
    let biased = AbsorbingSpec::entropy_biased(&g, rated.iter().copied(), &entropy, entropy.mean())?;
    let ac = walk::absorbing_cost_exact(&g, &biased)?;

    println!("query u1 rated a and b; walks into the unrated items:");
    println!("{:<5} {:>10} {:>10} {:>10} {:>10}", "item", "HT(q|i)", "AT exact", "AT tau=15", "AC exact");
    for i in g.item_nodes().filter(|i| !rated.contains(i)) {
        println!(
            "{:<5} {:>10.3} {:>10.3} {:>10.3} {:>10.3}",
            g.label(i),
            ht.value(i),
            at_exact.value(i),
            at_15.value(i),
            ac.value(i)
        );
    }
    println!("user entropies:");
    for (id, e) in entropy.iter() {
        println!("  {id} {e:.4}");
    }
    Ok(())
}
