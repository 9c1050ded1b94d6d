//! Builds a rating graph and prints its shape and stationary distribution.
//!
//! cargo run --example build_graph

use longtail::graph::{build_graph, connected_components, stationary_distribution, transition_prob, DuplicatePolicy, RatingRecord};

fn main() -> longtail::Result<()> {
    let ratings = [
        ("alice", "Heat", 5),
        ("alice", "Ronin", 4),
        ("bob", "Heat", 4),
        ("bob", "Alien", 5),
        ("carol", "Alien", 3),
        ("carol", "Solaris", 5),
        ("dave", "Solaris", 4),
    ];
    let records: Vec<RatingRecord> =
        ratings.iter().map(|&(u, i, r)| RatingRecord::new(u, i, r)).collect::<longtail::Result<_>>()?;
    let g = build_graph(&records, DuplicatePolicy::Reject)?;
    println!(
        "{} users, {} items, {} edges, density {:.3}, {} component(s)",
        g.num_users(),
        g.num_items(),
        g.num_edges(),
        g.density(),
        connected_components(&g).len()
    );

    let pi = stationary_distribution(&g)?;
    println!("stationary distribution (degree / total weight):");
    for v in g.user_nodes().chain(g.item_nodes()) {
        println!("  {:<8} {:.4}", g.label(v), pi[v.index()]);
    }

    let (alice, heat) = (g.user("alice").unwrap(), g.item("Heat").unwrap());
    println!("p(alice -> Heat) = {:.3}", transition_prob(&g, alice, heat)?);
    println!("p(Heat -> alice) = {:.3}", transition_prob(&g, heat, alice)?);
    Ok(())
}
