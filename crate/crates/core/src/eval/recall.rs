use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use crate::dataset::csv_rows;

use log::warn;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use super::split::LongTailSplit;
use crate::error::{Error, Result};
use crate::graph::{dedup_records, natural_cmp, DuplicatePolicy, RatingRecord};
use crate::recommend::{compare_ranked, Algorithm, Recommenders};
use crate::rng;

pub const DEFAULT_CASES: usize = 4000;
pub const DEFAULT_DECOYS: usize = 1000;

/// One held-out rating and the decoys it is ranked against.
#[derive(Clone, Debug, PartialEq)]
pub struct TestCase {
    pub user: String,
    pub item: String,
    pub decoys: Vec<String>,
}

impl TestCase {
    /// The held-out item followed by its decoys.
    pub fn candidates(&self) -> Vec<&str> {
        std::iter::once(self.item.as_str()).chain(self.decoys.iter().map(String::as_str)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecallProtocol {
    pub seed: u64,
    pub cases: Vec<TestCase>,
}

impl RecallProtocol {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// Distinct test users in first-appearance order.
    pub fn users(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.cases.iter().filter(|c| seen.insert(c.user.as_str())).map(|c| c.user.clone()).collect()
    }

    /// `case,user_id,target_item,decoys` rows, decoys joined by `|`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["case", "user_id", "target_item", "decoys"])?;
        for (k, c) in self.cases.iter().enumerate() {
            w.write_record([k.to_string().as_str(), &c.user, &c.item, &c.decoys.join("|")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, seed: u64) -> Result<Self> {
        let mut cases = Vec::new();
        for (line, f) in csv_rows(reader)? {
            if f.len() != 4 {
                return Err(Error::Parse { line, message: "expected case,user_id,target_item,decoys".into() });
            }
            let decoys = if f[3].is_empty() { Vec::new() } else { f[3].split('|').map(str::to_string).collect() };
            cases.push(TestCase { user: f[1].to_string(), item: f[2].to_string(), decoys });
        }
        Ok(RecallProtocol { seed, cases })
    }
}

/// Holds out `n_cases` 5-star ratings of tail items, chosen uniformly, and
/// pairs each with `n_decoys` items the user never rated anywhere in
/// `records`. Returns the remaining training records and the protocol.
pub fn make_recall_protocol(
    records: &[RatingRecord],
    split: &LongTailSplit,
    n_cases: usize,
    n_decoys: usize,
    seed: u64,
) -> Result<(Vec<RatingRecord>, RecallProtocol)> {
    let records = dedup_records(records, DuplicatePolicy::KeepLast)?;
    let eligible: Vec<usize> = (0..records.len())
        .filter(|&k| records[k].rating == 5 && split.is_tail(&records[k].item))
        .collect();
    if eligible.len() < n_cases {
        return Err(Error::InsufficientCases { needed: n_cases, available: eligible.len() });
    }
    let mut rng = rng::stream(seed, "holdout");
    let mut picked: Vec<usize> = sample(&mut rng, eligible.len(), n_cases).into_iter().map(|k| eligible[k]).collect();
    picked.sort_unstable();

    let mut universe: Vec<&str> = records.iter().map(|r| r.item.as_str()).collect::<HashSet<_>>().into_iter().collect();
    universe.sort_by(|a, b| natural_cmp(a, b));
    let position: HashMap<&str, usize> = universe.iter().enumerate().map(|(k, i)| (*i, k)).collect();
    let mut rated: HashMap<&str, HashSet<usize>> = HashMap::new();
    for r in &records {
        rated.entry(r.user.as_str()).or_default().insert(position[r.item.as_str()]);
    }

    let mut rng = rng::stream(seed, "decoys");
    let mut cases = Vec::with_capacity(n_cases);
    for &k in &picked {
        let r = &records[k];
        let own = &rated[r.user.as_str()];
        let pool: Vec<usize> = (0..universe.len()).filter(|p| !own.contains(p)).collect();
        if pool.len() < n_decoys {
            return Err(Error::InsufficientDecoys { user: r.user.clone(), needed: n_decoys, available: pool.len() });
        }
        let mut decoys: Vec<usize> = sample(&mut rng, pool.len(), n_decoys).into_iter().map(|p| pool[p]).collect();
        decoys.sort_unstable();
        cases.push(TestCase {
            user: r.user.clone(),
            item: r.item.clone(),
            decoys: decoys.into_iter().map(|p| universe[p].to_string()).collect(),
        });
    }

    let held: HashSet<usize> = picked.into_iter().collect();
    let training = records.into_iter().enumerate().filter(|(k, _)| !held.contains(k)).map(|(_, r)| r).collect();
    Ok((training, RecallProtocol { seed, cases }))
}

/// Anything that can order a test case's candidates. Smaller keys rank
/// first; equal keys fall back to item id.
pub trait CandidateScorer: Sync {
    fn rank_keys(&self, user: &str, items: &[&str]) -> Result<Vec<f64>>;
}

/// A recommender algorithm as a scorer.
pub struct AlgorithmScorer<'r, 'a> {
    pub recommenders: &'r Recommenders<'a>,
    pub algorithm: Algorithm,
}

impl CandidateScorer for AlgorithmScorer<'_, '_> {
    fn rank_keys(&self, user: &str, items: &[&str]) -> Result<Vec<f64>> {
        self.recommenders.rank_keys(self.algorithm, user, items)
    }
}

/// Uniformly random order; each (user, item) key depends only on the seed.
pub struct RandomScorer {
    pub seed: u64,
}

impl CandidateScorer for RandomScorer {
    fn rank_keys(&self, user: &str, items: &[&str]) -> Result<Vec<f64>> {
        Ok(items.iter().map(|i| rng::stream(self.seed, &format!("random-scorer/{user}/{i}")).random::<f64>()).collect())
    }
}

/// Knows the held-out items and ranks them first.
pub struct OracleScorer {
    held_out: HashSet<(String, String)>,
}

impl OracleScorer {
    pub fn new(protocol: &RecallProtocol) -> Self {
        OracleScorer { held_out: protocol.cases.iter().map(|c| (c.user.clone(), c.item.clone())).collect() }
    }
}

impl CandidateScorer for OracleScorer {
    fn rank_keys(&self, user: &str, items: &[&str]) -> Result<Vec<f64>> {
        Ok(items
            .iter()
            .map(|i| if self.held_out.contains(&(user.to_string(), i.to_string())) { 0.0 } else { 1.0 })
            .collect())
    }
}

/// Zero-based position of the held-out item among a case's candidates.
pub fn target_rank(case: &TestCase, keys: &[f64]) -> usize {
    let target = (keys[0], case.item.as_str());
    case.decoys
        .iter()
        .zip(&keys[1..])
        .filter(|(d, k)| compare_ranked((**k, d.as_str()), target).is_lt())
        .count()
}

/// Ranks of every case's held-out item; `None` where the scorer failed.
/// Each user is scored once over the union of their cases' candidates.
pub fn rank_cases(protocol: &RecallProtocol, scorer: &dyn CandidateScorer) -> Vec<Option<usize>> {
    let mut by_user: Vec<(&str, Vec<usize>)> = Vec::new();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    for (k, c) in protocol.cases.iter().enumerate() {
        let s = *slot.entry(c.user.as_str()).or_insert_with(|| {
            by_user.push((c.user.as_str(), Vec::new()));
            by_user.len() - 1
        });
        by_user[s].1.push(k);
    }
    let per_user: Vec<Vec<(usize, Option<usize>)>> = by_user
        .par_iter()
        .map(|(user, cases)| {
            let mut items: Vec<&str> = Vec::new();
            let mut index: HashMap<&str, usize> = HashMap::new();
            for &k in cases {
                for i in protocol.cases[k].candidates() {
                    index.entry(i).or_insert_with(|| {
                        items.push(i);
                        items.len() - 1
                    });
                }
            }
            match scorer.rank_keys(user, &items) {
                Ok(keys) => cases
                    .iter()
                    .map(|&k| {
                        let case = &protocol.cases[k];
                        let case_keys: Vec<f64> = case.candidates().iter().map(|i| keys[index[i]]).collect();
                        (k, Some(target_rank(case, &case_keys)))
                    })
                    .collect(),
                Err(e) => {
                    warn!("user {user}: {e}; {} case(s) counted as misses", cases.len());
                    cases.iter().map(|&k| (k, None)).collect()
                }
            }
        })
        .collect();
    let mut ranks = vec![None; protocol.cases.len()];
    for (k, r) in per_user.into_iter().flatten() {
        ranks[k] = r;
    }
    ranks
}

/// Recall@N for each `n` from per-case ranks; failed cases are misses.
pub fn recall_from_ranks(ranks: &[Option<usize>], ns: &[usize]) -> Vec<(usize, f64)> {
    ns.iter()
        .map(|&n| {
            let hits = ranks.iter().filter(|r| r.is_some_and(|r| r < n)).count();
            let recall = if ranks.is_empty() { 0.0 } else { hits as f64 / ranks.len() as f64 };
            (n, recall)
        })
        .collect()
}

pub fn recall_at_n(protocol: &RecallProtocol, scorer: &dyn CandidateScorer, ns: &[usize]) -> Vec<(usize, f64)> {
    recall_from_ranks(&rank_cases(protocol, scorer), ns)
}

/// `case,user_id,target_item,rank` rows; rank is one-based, empty on failure.
pub fn write_ranks_csv<W: Write>(protocol: &RecallProtocol, ranks: &[Option<usize>], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["case", "user_id", "target_item", "rank"])?;
    for (k, (c, r)) in protocol.cases.iter().zip(ranks).enumerate() {
        let rank = r.map(|r| (r + 1).to_string()).unwrap_or_default();
        w.write_record([k.to_string().as_str(), &c.user, &c.item, &rank])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ranks_csv<R: Read>(reader: R) -> Result<Vec<Option<usize>>> {
    let mut ranks = Vec::new();
    for (line, f) in csv_rows(reader)? {
        let field = f.get(3).ok_or_else(|| Error::Parse { line, message: "expected case,user_id,target_item,rank".into() })?;
        if field.is_empty() {
            ranks.push(None);
        } else {
            let r: usize = field.parse().map_err(|_| Error::Parse { line, message: "bad rank".into() })?;
            if r == 0 {
                return Err(Error::Parse { line, message: "ranks start at 1".into() });
            }
            ranks.push(Some(r - 1));
        }
    }
    Ok(ranks)
}
