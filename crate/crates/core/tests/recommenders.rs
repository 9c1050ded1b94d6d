mod common;

use common::{graph, ml_like_graph, random_bipartite};
use longtail::entropy::{EntropyKind, EntropyTable};
use longtail::graph::{BipartiteGraph, NodeId};
use longtail::lda::{train, LdaConfig, TopicEstimates};
use longtail::recommend::{
    personalized_pagerank, recommend_ac, recommend_at, recommend_dppr, recommend_ht, recommend_lda, recommend_ppr,
    score_dppr, score_lda, score_ppr, Algorithm, Params, Recommenders,
};
use proptest::prelude::*;

fn topics_for(g: &BipartiteGraph) -> TopicEstimates {
    let config = LdaConfig { topics: 3, sweeps: 10, seed: 4, ..LdaConfig::default() };
    train(g, &config).unwrap().estimate().unwrap()
}

fn rated(g: &BipartiteGraph, user: &str) -> Vec<String> {
    g.rated_items(g.user(user).unwrap()).iter().map(|&i| g.label(i).to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lists_exclude_rated_items_and_extend_as_prefixes(seed in 0u64..1000, k in 1usize..12) {
        let g = ml_like_graph(seed, 40, 60, 8.0);
        let topics = topics_for(&g);
        let recs = Recommenders::new(&g, Params { mu: Some(20), ..Params::default() })
            .with_default_item_entropy(None).unwrap()
            .with_topics(&topics, None).unwrap();
        for user in ["1", "7", "23"] {
            let own = rated(&g, user);
            for a in Algorithm::ALL {
                let short = recs.recommend(a, user, k).unwrap();
                let long = recs.recommend(a, user, k + 1).unwrap();
                prop_assert!(short.items.len() <= k);
                prop_assert!(short.items.iter().all(|(i, _)| !own.contains(i)), "{a} recommended a rated item");
                prop_assert_eq!(&long.items[..short.items.len()], &short.items[..]);
                prop_assert_eq!(&recs.recommend(a, user, k).unwrap(), &short);
                let ordered = short.items.windows(2).all(|w| match a.order() {
                    longtail::recommend::Order::Ascending => w[0].1 <= w[1].1,
                    longtail::recommend::Order::Descending => w[0].1 >= w[1].1,
                });
                prop_assert!(ordered, "{a} list out of order");
            }
        }
    }

    #[test]
    fn unit_costs_give_absorbing_time_lists(seed in 0u64..1000, tau in 1usize..25) {
        let g = random_bipartite(seed, 10, 16, 0.3);
        let params = Params { tau, ..Params::default() };
        let ones = EntropyTable::constant(&g, EntropyKind::ItemBased, 1.0);
        for user in g.user_ids().iter().take(4) {
            let at = recommend_at(&g, user, 10, &params).unwrap();
            let ac = recommend_ac(&g, user, 10, &params, &ones, 1.0).unwrap();
            prop_assert_eq!(at.items, ac.items);
        }
    }

    #[test]
    fn scaling_entropies_and_c_keeps_the_ranking(seed in 0u64..1000, scale in 0.25f64..5.0) {
        let g = random_bipartite(seed, 10, 16, 0.3);
        let table = EntropyTable::from_entries(
            EntropyKind::ItemBased,
            g.user_ids().iter().enumerate().map(|(k, id)| (id.clone(), 0.1 + (k * 7 % 5) as f64)),
        );
        let p = Params::default();
        for user in g.user_ids().iter().take(3) {
            let a = recommend_ac(&g, user, 10, &p, &table, 0.8).unwrap();
            let b = recommend_ac(&g, user, 10, &p, &table.scaled(scale), 0.8 * scale).unwrap();
            let ids_a: Vec<&str> = a.item_ids().collect();
            let ids_b: Vec<&str> = b.item_ids().collect();
            prop_assert_eq!(ids_a, ids_b);
        }
    }
}

#[test]
fn taste_specific_user_is_the_cheaper_route() {
    // q rated s; x is reached only through u4, y only through u2, and the two
    // routes are otherwise identical
    let g = graph(&[("q", "s", 5), ("u4", "s", 5), ("u4", "x", 5), ("u2", "s", 5), ("u2", "y", 5)]);
    let table = EntropyTable::from_entries(
        EntropyKind::ItemBased,
        [("q", 1.0), ("u4", 0.2), ("u2", 2.0)],
    );
    let p = Params::default();
    let at = recommend_at(&g, "q", 2, &p).unwrap();
    assert_eq!(at.items[0].1, at.items[1].1);
    assert_eq!(at.item_ids().collect::<Vec<_>>(), ["x", "y"]);
    // swap labels so the tie rule alone would favour the broad user's item
    let g2 = graph(&[("q", "s", 5), ("u4", "s", 5), ("u4", "y", 5), ("u2", "s", 5), ("u2", "x", 5)]);
    let at2 = recommend_at(&g2, "q", 2, &p).unwrap();
    assert_eq!(at2.item_ids().collect::<Vec<_>>(), ["x", "y"]);
    let ac2 = recommend_ac(&g2, "q", 2, &p, &table, 1.0).unwrap();
    assert_eq!(ac2.item_ids().collect::<Vec<_>>(), ["y", "x"]);
    assert!(ac2.items[0].1 < ac2.items[1].1);
}

#[test]
fn saturated_region_matches_whole_graph() {
    let g = ml_like_graph(3, 150, 300, 15.0);
    let bounded = Params::default();
    let whole = Params { mu: None, ..Params::default() };
    for user in ["1", "50", "149"] {
        assert_eq!(recommend_at(&g, user, 20, &bounded).unwrap(), recommend_at(&g, user, 20, &whole).unwrap());
        assert_eq!(recommend_ht(&g, user, 20, &bounded).unwrap(), recommend_ht(&g, user, 20, &whole).unwrap());
    }
}

#[test]
fn small_region_only_offers_nearby_items() {
    let g = ml_like_graph(5, 120, 300, 10.0);
    let p = Params { mu: Some(5), ..Params::default() };
    let user = "10";
    let q = g.user(user).unwrap();
    let list = recommend_at(&g, user, 500, &p).unwrap();
    let region = longtail::graph::bfs_candidate_nodes(&g, g.rated_items(q), 5).unwrap();
    for (item, _) in &list.items {
        assert!(region.contains(&g.item(item).unwrap()));
    }
    assert!(list.items.len() < g.num_items() - g.rated_items(q).len());
}

#[test]
fn oversized_k_returns_every_candidate_sorted() {
    let g = graph(&[("q", "a", 5), ("u", "a", 3), ("u", "b", 4), ("u", "c", 1), ("v", "c", 2), ("v", "d", 5)]);
    let list = recommend_at(&g, "q", 100, &Params::default()).unwrap();
    assert_eq!(list.items.len(), 3);
    assert!(list.items.windows(2).all(|w| w[0].1 <= w[1].1));
}

#[test]
fn exact_and_truncated_hitting_time_agree_on_top_items() {
    let g = random_bipartite(2, 8, 10, 0.4);
    let user = &g.user_ids()[0].to_string();
    let exact = recommend_ht(&g, user, 3, &Params { exact_hitting_time: true, ..Params::default() }).unwrap();
    let iterated = recommend_ht(&g, user, 3, &Params { tau: 20_000, ..Params::default() }).unwrap();
    assert_eq!(exact.item_ids().collect::<Vec<_>>(), iterated.item_ids().collect::<Vec<_>>());
}

#[test]
fn equal_popularity_keeps_the_pagerank_order() {
    // every item rated by exactly two users
    let g = graph(&[
        ("q", "a", 5), ("u1", "a", 2),
        ("u1", "b", 4), ("u2", "b", 1),
        ("u2", "c", 3), ("u3", "c", 5),
        ("u3", "d", 2), ("q", "d", 1),
    ]);
    let p = Params::default();
    let ppr = recommend_ppr(&g, "q", 10, &p).unwrap();
    let dppr = recommend_dppr(&g, "q", 10, &p).unwrap();
    assert_eq!(ppr.item_ids().collect::<Vec<_>>(), dppr.item_ids().collect::<Vec<_>>());
}

#[test]
fn discount_is_pagerank_over_rating_count() {
    let g = ml_like_graph(8, 60, 80, 10.0);
    let p = Params::default();
    let ppr = score_ppr(&g, "3", &p).unwrap();
    let dppr = score_dppr(&g, "3", &p).unwrap();
    for item in g.item_nodes() {
        let k = g.item_position(item);
        assert_eq!(dppr.get(k).unwrap(), ppr.get(k).unwrap() / g.edge_count(item) as f64);
    }
}

#[test]
fn restart_heavy_pagerank_stays_on_the_start_set() {
    let g = random_bipartite(4, 8, 8, 0.3);
    let start: Vec<NodeId> = g.item_nodes().take(2).collect();
    let r = personalized_pagerank(&g, &start, 0.999, 1e-13).unwrap();
    let home: f64 = start.iter().map(|s| r[s.index()]).sum();
    assert!(home > 0.998, "{home}");
    assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

fn lda_fixture() -> (BipartiteGraph, TopicEstimates) {
    let g = graph(&[("q", "a", 5), ("q", "b", 3), ("r", "c", 4), ("r", "d", 2), ("r", "e", 1), ("q", "e", 2)]);
    let users: Vec<String> = g.user_ids().iter().map(|s| s.to_string()).collect();
    let items: Vec<String> = g.item_ids().iter().map(|s| s.to_string()).collect();
    let theta = vec![vec![1.0, 0.0], vec![0.5, 0.5]];
    let phi = vec![vec![0.05, 0.05, 0.5, 0.3, 0.1], vec![0.1, 0.2, 0.1, 0.2, 0.4]];
    (g, TopicEstimates::from_rows(&users, &items, &theta, &phi).unwrap())
}

#[test]
fn one_hot_mixture_follows_its_topic() {
    let (g, t) = lda_fixture();
    let list = recommend_lda(&t, &g, "q", 5).unwrap();
    assert_eq!(list.item_ids().collect::<Vec<_>>(), ["c", "d"]);
}

#[test]
fn mixture_scores_are_convex_combinations() {
    let (g, t) = lda_fixture();
    let s = score_lda(&t, &g, "r").unwrap();
    for k in 0..g.num_items() {
        let (a, b) = (t.phi_row(0)[k], t.phi_row(1)[k]);
        let v = s.get(k).unwrap();
        assert!(v >= a.min(b) - 1e-15 && v <= a.max(b) + 1e-15);
        assert!((v - 0.5 * (a + b)).abs() < 1e-15);
    }
    assert!(score_lda(&t, &g, "nobody").is_err());
}

#[test]
fn batch_keeps_input_order() {
    let g = ml_like_graph(9, 50, 70, 8.0);
    let recs = Recommenders::new(&g, Params::default());
    let users: Vec<String> = ["5", "1", "30", "12"].iter().map(|s| s.to_string()).collect();
    let batch = recs.recommend_many(Algorithm::At, &users, 5);
    for (u, r) in users.iter().zip(batch) {
        assert_eq!(r.unwrap(), recs.recommend(Algorithm::At, u, 5).unwrap());
    }
    assert!(recs.recommend(Algorithm::Ac2, "5", 5).is_err());
}
