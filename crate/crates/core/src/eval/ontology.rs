use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read};
use std::str::FromStr;

use log::warn;

use crate::error::{Error, Result};
use crate::recommend::RecommendationList;

/// Category labels from the catalog root down, e.g.
/// `Book:Computer & Internet:Database`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CategoryPath(Vec<String>);

impl CategoryPath {
    pub fn new<I, S>(segments: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() || segments.iter().any(|s| s.is_empty()) {
            return Err(Error::EmptyCategoryPath);
        }
        Ok(CategoryPath(segments))
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    /// Path length, not counting the root catalog segment.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FromStr for CategoryPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CategoryPath::new(s.split(':').map(str::trim))
    }
}

impl fmt::Display for CategoryPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(":"))
    }
}

/// Longest common prefix over the longer path, both measured without the
/// root segment. Paths under different roots share nothing.
pub fn category_similarity(a: &CategoryPath, b: &CategoryPath) -> f64 {
    if a == b {
        return 1.0;
    }
    let longest = a.len().max(b.len());
    if longest == 0 || a.0[0] != b.0[0] {
        return 0.0;
    }
    let common = a.0.iter().zip(&b.0).skip(1).take_while(|(x, y)| x == y).count();
    common as f64 / longest as f64
}

pub type Ontology = HashMap<String, CategoryPath>;

/// `item_id<TAB>Category:Subcategory:...` lines.
pub fn read_ontology<R: Read>(reader: R) -> Result<Ontology> {
    let mut out = HashMap::new();
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (item, path) = line
            .split_once('\t')
            .ok_or_else(|| Error::Parse { line: k + 1, message: "expected item_id<TAB>path".into() })?;
        let path = path.parse().map_err(|e: Error| Error::Parse { line: k + 1, message: e.to_string() })?;
        out.insert(item.trim().to_string(), path);
    }
    Ok(out)
}

/// Best category match between `item` and any of the user's items.
/// Unmapped favorites are skipped.
pub fn user_item_similarity<'a>(
    user: &str,
    item: &str,
    favorites: impl IntoIterator<Item = &'a str>,
    ontology: &Ontology,
) -> Result<f64> {
    let target = ontology.get(item).ok_or_else(|| Error::UnmappedItem(item.to_string()))?;
    let mut best: Option<f64> = None;
    for fav in favorites {
        match ontology.get(fav) {
            Some(path) => {
                let s = category_similarity(target, path);
                best = Some(best.map_or(s, |b| b.max(s)));
            }
            None => warn!("item {fav} has no category; skipped"),
        }
    }
    best.ok_or_else(|| Error::EmptyProfile(user.to_string()))
}

/// Mean similarity of each user's top `n` recommendations to their rated
/// items, averaged over users. Recommendations without a category, and
/// users without any categorised item, are skipped.
pub fn similarity_at_n(
    lists: &[RecommendationList],
    profiles: &HashMap<String, Vec<String>>,
    ontology: &Ontology,
    n: usize,
) -> Option<f64> {
    let per_user: Vec<f64> = lists
        .iter()
        .filter_map(|l| {
            let favs = profiles.get(&l.query_user)?;
            let sims: Vec<f64> = l
                .items
                .iter()
                .take(n)
                .filter_map(|(i, _)| user_item_similarity(&l.query_user, i, favs.iter().map(String::as_str), ontology).ok())
                .collect();
            (!sims.is_empty()).then(|| sims.iter().sum::<f64>() / sims.len() as f64)
        })
        .collect();
    (!per_user.is_empty()).then(|| per_user.iter().sum::<f64>() / per_user.len() as f64)
}
