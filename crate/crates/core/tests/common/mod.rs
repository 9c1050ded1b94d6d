#![allow(dead_code)]

use std::path::PathBuf;

use longtail::graph::{build_graph, BipartiteGraph, DuplicatePolicy, NodeId, RatingRecord};
use longtail::synthetic::{generate, SyntheticConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const MOVIELENS_ENV: &str = "LONGTAIL_MOVIELENS_1M";

/// Path to MovieLens-1M `ratings.dat`, when provided.
pub fn movielens_path() -> Option<PathBuf> {
    let p = PathBuf::from(std::env::var_os(MOVIELENS_ENV)?);
    let p = if p.is_dir() { p.join("ratings.dat") } else { p };
    p.is_file().then_some(p)
}

pub fn records(edges: &[(&str, &str, i64)]) -> Vec<RatingRecord> {
    edges.iter().map(|&(u, i, r)| RatingRecord::new(u, i, r).unwrap()).collect()
}

pub fn graph(edges: &[(&str, &str, i64)]) -> BipartiteGraph {
    build_graph(&records(edges), DuplicatePolicy::default()).unwrap()
}

/// Connected random bipartite graph: a random spanning tree plus extra
/// edges with probability `p`, ratings uniform in 1..=5.
pub fn random_bipartite(seed: u64, users: usize, items: usize, p: f64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = std::collections::BTreeMap::new();
    // spanning tree over the interleaved node order
    let n = users + items;
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
    let is_user = |v: usize| v < users;
    let mut placed_users: Vec<usize> = Vec::new();
    let mut placed_items: Vec<usize> = Vec::new();
    // start with one of each kind so every later node has a partner
    let first_user = *order.iter().find(|&&v| is_user(v)).unwrap();
    let first_item = *order.iter().find(|&&v| !is_user(v)).unwrap();
    edges.insert((first_user, first_item), rng.random_range(1..=5));
    placed_users.push(first_user);
    placed_items.push(first_item);
    for &v in &order {
        if v == first_user || v == first_item {
            continue;
        }
        if is_user(v) {
            let i = placed_items[rng.random_range(0..placed_items.len())];
            edges.insert((v, i), rng.random_range(1..=5));
            placed_users.push(v);
        } else {
            let u = placed_users[rng.random_range(0..placed_users.len())];
            edges.insert((u, v), rng.random_range(1..=5));
            placed_items.push(v);
        }
    }
    for u in 0..users {
        for i in users..n {
            if rng.random::<f64>() < p {
                edges.entry((u, i)).or_insert_with(|| rng.random_range(1..=5));
            }
        }
    }
    let recs: Vec<RatingRecord> = edges
        .into_iter()
        .map(|((u, i), r)| RatingRecord::new(format!("u{u}"), format!("i{}", i - users), r).unwrap())
        .collect();
    build_graph(&recs, DuplicatePolicy::Reject).unwrap()
}

/// Synthetic corpus with planted tastes sized to `users + items` nodes.
pub fn ml_like_graph(seed: u64, users: usize, items: usize, mean_ratings: f64) -> BipartiteGraph {
    let config = SyntheticConfig {
        users,
        items,
        genres: 8,
        mean_ratings,
        min_ratings: 5,
        seed,
        ..SyntheticConfig::small(seed)
    };
    let data = generate(&config).unwrap();
    build_graph(&data.records, DuplicatePolicy::Reject).unwrap()
}

/// One step of the walk out of `v`.
fn step<R: Rng>(g: &BipartiteGraph, v: NodeId, rng: &mut R) -> NodeId {
    let ws = g.neighbor_weights(v);
    let mut x = rng.random::<f64>() * g.degree(v);
    for (k, w) in ws.iter().enumerate() {
        if x < *w {
            return g.neighbor_ids(v)[k];
        }
        x -= w;
    }
    *g.neighbor_ids(v).last().unwrap()
}

/// Monte-Carlo mean steps to absorption from every node, `walks` walks per
/// node. Nodes in `absorbing` get 0.
pub fn monte_carlo_absorbing_time(g: &BipartiteGraph, absorbing: &[NodeId], walks: usize, seed: u64) -> Vec<f64> {
    let mut is_abs = vec![false; g.num_nodes()];
    for a in absorbing {
        is_abs[a.index()] = true;
    }
    (0..g.num_nodes())
        .into_par_iter()
        .map(|v| {
            if is_abs[v] {
                return 0.0;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut total = 0u64;
            for _ in 0..walks {
                let mut at = NodeId(v as u32);
                let mut steps = 0u64;
                while !is_abs[at.index()] {
                    at = step(g, at, &mut rng);
                    steps += 1;
                }
                total += steps;
            }
            total as f64 / walks as f64
        })
        .collect()
}

/// Average ranks with ties sharing the mean rank.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut end = k + 1;
        while end < idx.len() && x[idx[end]] == x[idx[k]] {
            end += 1;
        }
        let mean = (k + end - 1) as f64 / 2.0 + 1.0;
        for &i in &idx[k..end] {
            r[i] = mean;
        }
        k = end;
    }
    r
}

pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
