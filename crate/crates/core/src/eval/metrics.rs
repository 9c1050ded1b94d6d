use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::graph::RatingRecord;
use crate::recommend::RecommendationList;

/// Rating count of every item in `records`.
pub fn item_popularity(records: &[RatingRecord]) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for r in records {
        *counts.entry(r.item.clone()).or_default() += 1;
    }
    counts
}

/// Mean rating count of each user's top `n` items, averaged over users with
/// a non-empty list. Items missing from `popularity` count as 0.
pub fn popularity_at_n(
    lists: &[RecommendationList],
    popularity: &HashMap<String, usize>,
    ns: &[usize],
) -> Vec<(usize, f64)> {
    ns.iter()
        .map(|&n| {
            let per_user: Vec<f64> = lists
                .iter()
                .filter(|l| !l.items.is_empty() && n > 0)
                .map(|l| {
                    let top = &l.items[..n.min(l.items.len())];
                    let sum: usize = top.iter().map(|(i, _)| popularity.get(i).copied().unwrap_or(0)).sum();
                    sum as f64 / top.len() as f64
                })
                .collect();
            let mean = if per_user.is_empty() { 0.0 } else { per_user.iter().sum::<f64>() / per_user.len() as f64 };
            (n, mean)
        })
        .collect()
}

/// Distinct items across all lists divided by `item_universe`.
pub fn diversity(lists: &[RecommendationList], item_universe: usize) -> Result<f64> {
    diversity_at_n(lists, usize::MAX, item_universe)
}

/// Diversity over each list's first `n` items.
pub fn diversity_at_n(lists: &[RecommendationList], n: usize, item_universe: usize) -> Result<f64> {
    if lists.is_empty() {
        return Err(Error::invalid("lists", "no recommendation lists"));
    }
    if item_universe == 0 {
        return Err(Error::invalid("item_universe", "must be positive"));
    }
    let union: HashSet<&str> =
        lists.iter().flat_map(|l| l.items.iter().take(n).map(|(i, _)| i.as_str())).collect();
    Ok(union.len() as f64 / item_universe as f64)
}
