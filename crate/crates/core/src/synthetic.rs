//! Synthetic rating corpora with planted tastes and a long-tail popularity
//! curve. Ids are numeric strings, like MovieLens.

use std::collections::{HashMap, HashSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::eval::{CategoryPath, Ontology};
use crate::graph::RatingRecord;
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub users: usize,
    pub items: usize,
    pub genres: usize,
    /// Mean ratings per user; counts are geometric above `min_ratings`.
    pub mean_ratings: f64,
    pub min_ratings: usize,
    /// Zipf exponent of item popularity within a genre.
    pub popularity_exponent: f64,
    /// Probability that a rating comes from one of the user's genres.
    pub taste_focus: f64,
    pub seed: u64,
}

impl SyntheticConfig {
    /// Roughly the shape of MovieLens-1M: 6040 users, 3706 rated items and
    /// about a million ratings.
    pub fn movielens_like(seed: u64) -> Self {
        SyntheticConfig {
            users: 6040,
            items: 3706,
            genres: 18,
            mean_ratings: 165.0,
            min_ratings: 20,
            popularity_exponent: 1.6,
            taste_focus: 0.8,
            seed,
        }
    }

    /// Same shape scaled down for tests and examples.
    pub fn small(seed: u64) -> Self {
        SyntheticConfig {
            users: 300,
            items: 400,
            genres: 6,
            mean_ratings: 40.0,
            min_ratings: 10,
            popularity_exponent: 1.6,
            taste_focus: 0.8,
            seed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticData {
    pub records: Vec<RatingRecord>,
    /// Genre of every item, indexed by item number.
    pub item_genre: Vec<usize>,
    /// Favourite genres of every user, indexed by user number.
    pub user_genres: Vec<Vec<usize>>,
}

impl SyntheticData {
    pub fn user_id(u: usize) -> String {
        (u + 1).to_string()
    }

    pub fn item_id(i: usize) -> String {
        (i + 1).to_string()
    }

    /// Three-level category paths: catalog, genre, and one of three
    /// sub-genres.
    pub fn ontology(&self) -> Ontology {
        self.item_genre
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                let path = CategoryPath::new(["Catalog".to_string(), format!("Genre {g}"), format!("Genre {g}.{}", i % 3)]);
                (Self::item_id(i), path.expect("non-empty path"))
            })
            .collect::<HashMap<_, _>>()
    }
}

pub fn generate(config: &SyntheticConfig) -> Result<SyntheticData> {
    let c = config;
    if c.users == 0 || c.items == 0 || c.genres == 0 || c.genres > c.items {
        return Err(Error::invalid("synthetic", "need users, items and 1..=items genres"));
    }
    if !(c.mean_ratings >= c.min_ratings as f64 && c.min_ratings >= 1) {
        return Err(Error::invalid("mean_ratings", "must be at least min_ratings >= 1"));
    }
    if !(0.0..=1.0).contains(&c.taste_focus) || !(c.popularity_exponent >= 0.0) {
        return Err(Error::invalid("synthetic", "taste_focus in [0, 1] and a non-negative exponent"));
    }
    let mut rng = rng::stream(c.seed, "synthetic");

    // genre of item i is i mod genres; popularity rank is a random shuffle
    let item_genre: Vec<usize> = (0..c.items).map(|i| i % c.genres).collect();
    let mut order: Vec<usize> = (0..c.items).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
    let weight: Vec<f64> = {
        let mut w = vec![0.0; c.items];
        for (rank, &i) in order.iter().enumerate() {
            w[i] = 1.0 / ((rank + 1) as f64).powf(c.popularity_exponent);
        }
        w
    };
    let mut by_genre: Vec<Vec<usize>> = vec![Vec::new(); c.genres];
    for i in 0..c.items {
        by_genre[item_genre[i]].push(i);
    }
    let genre_pick: Vec<WeightedIndex<f64>> = by_genre
        .iter()
        .map(|items| WeightedIndex::new(items.iter().map(|&i| weight[i])).expect("positive weights"))
        .collect();
    let any_pick = WeightedIndex::new(&weight).expect("positive weights");

    let extra_mean = c.mean_ratings - c.min_ratings as f64;
    let mut records = Vec::new();
    let mut user_genres = Vec::with_capacity(c.users);
    for u in 0..c.users {
        let n_fav = if c.genres > 1 && rng.random::<f64>() < 0.5 { 2 } else { 1 };
        let mut favs: Vec<usize> = rand::seq::index::sample(&mut rng, c.genres, n_fav).into_vec();
        favs.sort_unstable();
        let fav_items: usize = favs.iter().map(|&g| by_genre[g].len()).sum();
        // geometric extra count with the requested mean
        let extra = if extra_mean > 0.0 {
            let p = 1.0 / (1.0 + extra_mean);
            let x: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            (x.ln() / (1.0 - p).ln()).floor() as usize
        } else {
            0
        };
        let target = (c.min_ratings + extra).min(c.items * 9 / 10).max(1);
        let mut seen = HashSet::new();
        let mut attempts = 0;
        while seen.len() < target && attempts < target * 50 {
            attempts += 1;
            let focused = rng.random::<f64>() < c.taste_focus && seen.len() < fav_items;
            let item = if focused {
                let g = favs[rng.random_range(0..favs.len())];
                by_genre[g][genre_pick[g].sample(&mut rng)]
            } else {
                any_pick.sample(&mut rng)
            };
            if !seen.insert(item) {
                continue;
            }
            let liked = favs.contains(&item_genre[item]);
            let rating: i64 = if liked {
                [3, 4, 4, 5, 5, 5][rng.random_range(0..6)]
            } else {
                [1, 2, 2, 3, 3, 4][rng.random_range(0..6)]
            };
            records.push(RatingRecord::new(SyntheticData::user_id(u), SyntheticData::item_id(item), rating)?);
        }
        user_genres.push(favs);
    }
    Ok(SyntheticData { records, item_genre, user_genres })
}

/// Ratings drawn from an explicit two-level mixture: user `u` uses topic
/// mixture `theta[u]` and topic `z` picks items by `phi[z]`. Every token is a
/// distinct (user, item) pair with rating 1, so the graph reproduces the
/// token counts exactly.
pub fn planted_topics(theta: &[Vec<f64>], phi: &[Vec<f64>], tokens_per_user: usize, seed: u64) -> Result<Vec<RatingRecord>> {
    let items = phi.first().map_or(0, Vec::len);
    if theta.is_empty() || items == 0 || tokens_per_user > items {
        return Err(Error::invalid("planted_topics", "need users, items and at most one token per item"));
    }
    let mut rng = rng::stream(seed, "planted-topics");
    let topic_pick: Vec<WeightedIndex<f64>> = phi
        .iter()
        .map(|row| WeightedIndex::new(row).map_err(|e| Error::invalid("phi", e.to_string())))
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    for (u, mix) in theta.iter().enumerate() {
        let pick_z = WeightedIndex::new(mix).map_err(|e| Error::invalid("theta", e.to_string()))?;
        let mut seen = HashSet::new();
        let mut attempts = 0;
        while seen.len() < tokens_per_user && attempts < tokens_per_user * 1000 {
            attempts += 1;
            let z = pick_z.sample(&mut rng);
            let i = topic_pick[z].sample(&mut rng);
            if seen.insert(i) {
                records.push(RatingRecord::new(SyntheticData::user_id(u), SyntheticData::item_id(i), 1)?);
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::longtail_split;
    use crate::graph::{build_graph, connected_components, DuplicatePolicy};

    #[test]
    fn deterministic_and_valid() {
        let a = generate(&SyntheticConfig::small(4)).unwrap();
        let b = generate(&SyntheticConfig::small(4)).unwrap();
        assert_eq!(a.records, b.records);
        let pairs: HashSet<(&str, &str)> = a.records.iter().map(|r| (r.user.as_str(), r.item.as_str())).collect();
        assert_eq!(pairs.len(), a.records.len());
        let g = build_graph(&a.records, DuplicatePolicy::Reject).unwrap();
        assert_eq!(g.num_users(), 300);
        assert_eq!(connected_components(&g).len(), 1);
    }

    #[test]
    fn has_a_long_tail() {
        let d = generate(&SyntheticConfig::small(1)).unwrap();
        let s = longtail_split(&d.records, 0.2).unwrap();
        assert!(s.tail_fraction() > 0.4, "{}", s.tail_fraction());
        assert!(d.records.iter().any(|r| r.rating == 5));
    }
}
