//! Top-k recommenders behind one interface.
//!
//! The walk-based algorithms (HT, AT, AC1, AC2) score the items of a
//! breadth-first candidate region around the query user's rated items and
//! rank ascending. The baselines (PPR, DPPR, LDA) score every item and rank
//! descending. Ties always fall to the smaller item id, and items the user
//! already rated are never returned.

mod pagerank;

pub use pagerank::personalized_pagerank;

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};

use crate::dataset::csv_rows;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{build_entropy_table, EntropyKind, EntropyTable};
use crate::error::{Error, Result};
use crate::graph::{bfs_candidate_nodes, natural_cmp, reachable_from, BipartiteGraph, NodeId};
use crate::lda::TopicEstimates;
use crate::walk::{self, AbsorbingSpec, WalkResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "HT")]
    Ht,
    #[serde(rename = "AT")]
    At,
    #[serde(rename = "AC1")]
    Ac1,
    #[serde(rename = "AC2")]
    Ac2,
    #[serde(rename = "PPR")]
    Ppr,
    #[serde(rename = "DPPR")]
    Dppr,
    #[serde(rename = "LDA")]
    Lda,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Ht,
        Algorithm::At,
        Algorithm::Ac1,
        Algorithm::Ac2,
        Algorithm::Ppr,
        Algorithm::Dppr,
        Algorithm::Lda,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Ht => "HT",
            Algorithm::At => "AT",
            Algorithm::Ac1 => "AC1",
            Algorithm::Ac2 => "AC2",
            Algorithm::Ppr => "PPR",
            Algorithm::Dppr => "DPPR",
            Algorithm::Lda => "LDA",
        }
    }

    /// Time and cost scores rank ascending; baseline scores descending.
    pub fn order(self) -> Order {
        match self {
            Algorithm::Ht | Algorithm::At | Algorithm::Ac1 | Algorithm::Ac2 => Order::Ascending,
            Algorithm::Ppr | Algorithm::Dppr | Algorithm::Lda => Order::Descending,
        }
    }

    pub fn needs_topics(self) -> bool {
        matches!(self, Algorithm::Ac2 | Algorithm::Lda)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownAlgorithm {
                tag: s.to_string(),
                valid: Algorithm::ALL.map(Algorithm::tag).join(", "),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Ascending,
    Descending,
}

/// Scores over the items of a graph, indexed by item position. `None` marks
/// items that are not candidates (outside the candidate region, or unknown to
/// the model).
#[derive(Clone, Debug, PartialEq)]
pub struct ItemScores {
    order: Order,
    scores: Vec<Option<f64>>,
}

impl ItemScores {
    pub fn new(order: Order, scores: Vec<Option<f64>>) -> Self {
        ItemScores { order, scores }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn get(&self, item_pos: usize) -> Option<f64> {
        self.scores.get(item_pos).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Smaller keys rank first; non-candidates map to infinity.
    pub fn rank_key(&self, item_pos: usize) -> f64 {
        match (self.get(item_pos), self.order) {
            (None, _) => f64::INFINITY,
            (Some(s), Order::Ascending) => s,
            (Some(s), Order::Descending) => -s,
        }
    }

    /// Best `k` candidates not in `exclude`, as `(item position, score)`.
    pub fn top_k(&self, exclude: &[usize], k: usize) -> Vec<(usize, f64)> {
        let excluded: HashSet<usize> = exclude.iter().copied().collect();
        let mut cands: Vec<(f64, usize)> = (0..self.scores.len())
            .filter(|p| self.scores[*p].is_some() && !excluded.contains(p))
            .map(|p| (self.rank_key(p), p))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < cands.len() {
            cands.select_nth_unstable_by(k, cmp);
            cands.truncate(k);
        }
        cands.sort_by(cmp);
        cands.into_iter().map(|(_, p)| (p, self.scores[p].unwrap())).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecommendationList {
    pub query_user: String,
    pub algorithm: Algorithm,
    pub k: usize,
    /// `(item id, score)`, best first.
    pub items: Vec<(String, f64)>,
}

impl RecommendationList {
    pub fn item_ids(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(id, _)| id.as_str())
    }
}

/// `user_id,rank,item_id,score,algorithm` rows; ranks start at 1.
pub fn write_recommendations_csv<W: Write>(lists: &[RecommendationList], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["user_id", "rank", "item_id", "score", "algorithm"])?;
    for list in lists {
        for (r, (item, score)) in list.items.iter().enumerate() {
            w.write_record([
                list.query_user.as_str(),
                &(r + 1).to_string(),
                item,
                &fmt_score(*score),
                list.algorithm.tag(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn fmt_score(s: f64) -> String {
    if s.is_finite() {
        format!("{s}")
    } else if s > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Reads lists written by [`write_recommendations_csv`], grouped by user in
/// file order. `k` is set to the number of rows read per user.
pub fn read_recommendations_csv<R: Read>(reader: R) -> Result<Vec<RecommendationList>> {
    let mut lists: Vec<RecommendationList> = Vec::new();
    for (line, f) in csv_rows(reader)? {
        let err = |m: &str| Error::Parse { line, message: m.to_string() };
        if f.len() != 5 {
            return Err(err("expected user_id,rank,item_id,score,algorithm"));
        }
        let score: f64 = f[3].parse().map_err(|_| err("bad score"))?;
        let algorithm: Algorithm = f[4].parse()?;
        match lists.last_mut() {
            Some(l) if l.query_user == f[0] && l.algorithm == algorithm => {
                l.items.push((f[2].to_string(), score));
                l.k += 1;
            }
            _ => lists.push(RecommendationList {
                query_user: f[0].to_string(),
                algorithm,
                k: 1,
                items: vec![(f[2].to_string(), score)],
            }),
        }
    }
    Ok(lists)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Candidate-region bound on item count; `None` uses the whole component.
    pub mu: Option<usize>,
    /// Sweeps for the truncated solvers.
    pub tau: usize,
    /// Solve hitting time exactly instead of by `tau` sweeps.
    pub exact_hitting_time: bool,
    /// PPR restart probability.
    pub lambda: f64,
    pub ppr_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { mu: Some(6000), tau: walk::DEFAULT_TAU, exact_hitting_time: false, lambda: 0.5, ppr_tol: 1e-10 }
    }
}

fn query_user(g: &BipartiteGraph, user: &str) -> Result<NodeId> {
    let q = g.user(user).ok_or_else(|| Error::UnknownUser(user.to_string()))?;
    if g.rated_items(q).is_empty() {
        return Err(Error::UnratedUser(user.to_string()));
    }
    Ok(q)
}

/// Candidate region around `S_q`, as a graph plus the parent node of every
/// node in it.
struct Region<'g> {
    graph: Cow<'g, BipartiteGraph>,
    parent: Option<Vec<NodeId>>,
}

impl Region<'_> {
    fn build<'g>(g: &'g BipartiteGraph, q: NodeId, mu: Option<usize>) -> Result<Region<'g>> {
        let rated = g.rated_items(q);
        let nodes = match mu {
            Some(mu) => bfs_candidate_nodes(g, rated, mu)?,
            None => {
                let seen = reachable_from(g, &[q]);
                (0..g.num_nodes()).filter(|&v| seen[v]).map(|v| NodeId(v as u32)).collect()
            }
        };
        if nodes.len() == g.num_nodes() {
            return Ok(Region { graph: Cow::Borrowed(g), parent: None });
        }
        let sub = g.induced_subgraph(&nodes);
        Ok(Region { graph: Cow::Owned(sub), parent: Some(nodes) })
    }

    fn local(&self, parent: NodeId) -> NodeId {
        match &self.parent {
            None => parent,
            Some(p) => NodeId(p.binary_search(&parent).expect("node in region") as u32),
        }
    }

    fn to_parent(&self, local: NodeId) -> NodeId {
        match &self.parent {
            None => local,
            Some(p) => p[local.index()],
        }
    }

    /// Walk values of the region's items, laid out over the parent's items.
    fn item_scores(&self, g: &BipartiteGraph, result: &WalkResult) -> ItemScores {
        let mut scores = vec![None; g.num_items()];
        for item in self.graph.item_nodes() {
            let parent = self.to_parent(item);
            scores[g.item_position(parent)] = Some(result.value(item));
        }
        ItemScores::new(Order::Ascending, scores)
    }
}

/// Hitting time from every candidate item to `q`.
pub fn score_ht(g: &BipartiteGraph, user: &str, params: &Params) -> Result<ItemScores> {
    let q = query_user(g, user)?;
    let region = Region::build(g, q, params.mu)?;
    let lq = region.local(q);
    let result = if params.exact_hitting_time {
        walk::hitting_time(&region.graph, lq)?
    } else {
        walk::hitting_time_truncated(&region.graph, lq, params.tau)?
    };
    Ok(region.item_scores(g, &result))
}

/// Truncated absorbing time to `S_q`.
pub fn score_at(g: &BipartiteGraph, user: &str, params: &Params) -> Result<ItemScores> {
    let q = query_user(g, user)?;
    let region = Region::build(g, q, params.mu)?;
    let absorbing: Vec<NodeId> = g.rated_items(q).iter().map(|&i| region.local(i)).collect();
    let spec = AbsorbingSpec::unit(&region.graph, absorbing)?;
    let result = walk::absorbing_time_truncated(&region.graph, &spec, params.tau)?;
    Ok(region.item_scores(g, &result))
}

/// Truncated absorbing cost to `S_q`; `user_entropy` is indexed by user
/// position in `g`.
fn score_ac_with(g: &BipartiteGraph, user: &str, params: &Params, user_entropy: &[f64], c: f64) -> Result<ItemScores> {
    let q = query_user(g, user)?;
    let region = Region::build(g, q, params.mu)?;
    let absorbing: Vec<NodeId> = g.rated_items(q).iter().map(|&i| region.local(i)).collect();
    let local_entropy: Vec<f64> =
        region.graph.user_nodes().map(|u| user_entropy[region.to_parent(u).index()]).collect();
    let spec = AbsorbingSpec::with_user_costs(&region.graph, absorbing, local_entropy, c)?;
    let result = walk::absorbing_cost(&region.graph, &spec, params.tau)?;
    Ok(region.item_scores(g, &result))
}

fn entropy_vector(g: &BipartiteGraph, table: &EntropyTable) -> Result<Vec<f64>> {
    g.user_ids()
        .iter()
        .map(|id| table.get(id).ok_or_else(|| Error::MissingEntropy(id.to_string())))
        .collect()
}

pub fn score_ac(g: &BipartiteGraph, user: &str, params: &Params, table: &EntropyTable, c: f64) -> Result<ItemScores> {
    score_ac_with(g, user, params, &entropy_vector(g, table)?, c)
}

fn ppr_vector(g: &BipartiteGraph, q: NodeId, params: &Params) -> Result<Vec<f64>> {
    personalized_pagerank(g, g.rated_items(q), params.lambda, params.ppr_tol)
}

pub fn score_ppr(g: &BipartiteGraph, user: &str, params: &Params) -> Result<ItemScores> {
    let q = query_user(g, user)?;
    let r = ppr_vector(g, q, params)?;
    Ok(ItemScores::new(Order::Descending, g.item_nodes().map(|i| Some(r[i.index()])).collect()))
}

/// PPR divided by the item's rating count.
pub fn score_dppr(g: &BipartiteGraph, user: &str, params: &Params) -> Result<ItemScores> {
    let q = query_user(g, user)?;
    let r = ppr_vector(g, q, params)?;
    let scores = g
        .item_nodes()
        .map(|i| match g.edge_count(i) {
            0 => None,
            pop => Some(r[i.index()] / pop as f64),
        })
        .collect();
    Ok(ItemScores::new(Order::Descending, scores))
}

/// Mixture likelihood `sum_z theta_q[z] * phi_z[i]`.
pub fn score_lda(topics: &TopicEstimates, g: &BipartiteGraph, user: &str) -> Result<ItemScores> {
    query_user(g, user)?;
    let theta = topics.theta(user).ok_or_else(|| Error::UserNotInModel(user.to_string()))?;
    let scores = g
        .item_ids()
        .iter()
        .map(|id| topics.item_position(id).map(|p| topics.mixture(theta, p)))
        .collect();
    Ok(ItemScores::new(Order::Descending, scores))
}

fn to_list(g: &BipartiteGraph, user: &str, algorithm: Algorithm, k: usize, scores: &ItemScores) -> Result<RecommendationList> {
    let q = query_user(g, user)?;
    let exclude: Vec<usize> = g.rated_items(q).iter().map(|&i| g.item_position(i)).collect();
    let items = scores
        .top_k(&exclude, k)
        .into_iter()
        .map(|(p, s)| (g.item_ids()[p].to_string(), s))
        .collect();
    Ok(RecommendationList { query_user: user.to_string(), algorithm, k, items })
}

pub fn recommend_ht(g: &BipartiteGraph, user: &str, k: usize, params: &Params) -> Result<RecommendationList> {
    to_list(g, user, Algorithm::Ht, k, &score_ht(g, user, params)?)
}

pub fn recommend_at(g: &BipartiteGraph, user: &str, k: usize, params: &Params) -> Result<RecommendationList> {
    to_list(g, user, Algorithm::At, k, &score_at(g, user, params)?)
}

/// Absorbing-cost recommendations. Tagged AC2 for topic-based tables and
/// AC1 otherwise.
pub fn recommend_ac(
    g: &BipartiteGraph,
    user: &str,
    k: usize,
    params: &Params,
    table: &EntropyTable,
    c: f64,
) -> Result<RecommendationList> {
    let tag = match table.kind() {
        EntropyKind::ItemBased => Algorithm::Ac1,
        EntropyKind::TopicBased => Algorithm::Ac2,
    };
    to_list(g, user, tag, k, &score_ac(g, user, params, table, c)?)
}

pub fn recommend_ppr(g: &BipartiteGraph, user: &str, k: usize, params: &Params) -> Result<RecommendationList> {
    to_list(g, user, Algorithm::Ppr, k, &score_ppr(g, user, params)?)
}

pub fn recommend_dppr(g: &BipartiteGraph, user: &str, k: usize, params: &Params) -> Result<RecommendationList> {
    to_list(g, user, Algorithm::Dppr, k, &score_dppr(g, user, params)?)
}

pub fn recommend_lda(topics: &TopicEstimates, g: &BipartiteGraph, user: &str, k: usize) -> Result<RecommendationList> {
    to_list(g, user, Algorithm::Lda, k, &score_lda(topics, g, user)?)
}

struct CostTable {
    per_user: Vec<f64>,
    c: f64,
}

/// Every algorithm over one training graph, with the entropy tables and topic
/// estimates they need prepared once.
pub struct Recommenders<'a> {
    graph: &'a BipartiteGraph,
    params: Params,
    item_costs: Option<CostTable>,
    topic_costs: Option<CostTable>,
    topics: Option<&'a TopicEstimates>,
}

impl<'a> Recommenders<'a> {
    pub fn new(graph: &'a BipartiteGraph, params: Params) -> Self {
        Recommenders { graph, params, item_costs: None, topic_costs: None, topics: None }
    }

    pub fn graph(&self) -> &'a BipartiteGraph {
        self.graph
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Enables AC1. `c` defaults to the table's mean entropy.
    pub fn with_item_entropy(mut self, table: &EntropyTable, c: Option<f64>) -> Result<Self> {
        let per_user = entropy_vector(self.graph, table)?;
        self.item_costs = Some(CostTable { per_user, c: c.unwrap_or_else(|| table.mean()) });
        Ok(self)
    }

    /// Item-based table computed from the graph itself.
    pub fn with_default_item_entropy(self, c: Option<f64>) -> Result<Self> {
        let table = build_entropy_table(self.graph, EntropyKind::ItemBased, None)?;
        self.with_item_entropy(&table, c)
    }

    /// Enables AC2 and LDA. `c` defaults to the mean item-based entropy.
    pub fn with_topics(mut self, topics: &'a TopicEstimates, c: Option<f64>) -> Result<Self> {
        let table = build_entropy_table(self.graph, EntropyKind::TopicBased, Some(topics))?;
        let per_user = entropy_vector(self.graph, &table)?;
        let c = match (c, &self.item_costs) {
            (Some(c), _) => c,
            (None, Some(t)) => t.per_user.iter().sum::<f64>() / t.per_user.len() as f64,
            (None, None) => build_entropy_table(self.graph, EntropyKind::ItemBased, None)?.mean(),
        };
        self.topic_costs = Some(CostTable { per_user, c });
        self.topics = Some(topics);
        Ok(self)
    }

    /// `C` in use for AC1 and AC2, when enabled.
    pub fn cost_constants(&self) -> (Option<f64>, Option<f64>) {
        (self.item_costs.as_ref().map(|t| t.c), self.topic_costs.as_ref().map(|t| t.c))
    }

    pub fn supports(&self, algorithm: Algorithm) -> bool {
        match algorithm {
            Algorithm::Ac1 => self.item_costs.is_some(),
            Algorithm::Ac2 => self.topic_costs.is_some(),
            Algorithm::Lda => self.topics.is_some(),
            _ => true,
        }
    }

    pub fn scores(&self, algorithm: Algorithm, user: &str) -> Result<ItemScores> {
        let g = self.graph;
        let p = &self.params;
        match algorithm {
            Algorithm::Ht => score_ht(g, user, p),
            Algorithm::At => score_at(g, user, p),
            Algorithm::Ac1 => {
                let t = self.item_costs.as_ref().ok_or_else(|| missing_input(algorithm))?;
                score_ac_with(g, user, p, &t.per_user, t.c)
            }
            Algorithm::Ac2 => {
                let t = self.topic_costs.as_ref().ok_or_else(|| missing_input(algorithm))?;
                score_ac_with(g, user, p, &t.per_user, t.c)
            }
            Algorithm::Ppr => score_ppr(g, user, p),
            Algorithm::Dppr => score_dppr(g, user, p),
            Algorithm::Lda => score_lda(self.topics.ok_or(Error::TopicModelRequired)?, g, user),
        }
    }

    pub fn recommend(&self, algorithm: Algorithm, user: &str, k: usize) -> Result<RecommendationList> {
        to_list(self.graph, user, algorithm, k, &self.scores(algorithm, user)?)
    }

    /// Recommends for each user in parallel; results keep input order.
    pub fn recommend_many(&self, algorithm: Algorithm, users: &[String], k: usize) -> Vec<Result<RecommendationList>> {
        users.par_iter().map(|u| self.recommend(algorithm, u, k)).collect()
    }

    /// Rank keys of arbitrary item ids for `user`: smaller is better, items
    /// outside the graph or the candidate region get infinity.
    pub fn rank_keys(&self, algorithm: Algorithm, user: &str, items: &[&str]) -> Result<Vec<f64>> {
        let scores = self.scores(algorithm, user)?;
        Ok(items
            .iter()
            .map(|id| match self.graph.item(id) {
                Some(node) => scores.rank_key(self.graph.item_position(node)),
                None => f64::INFINITY,
            })
            .collect())
    }
}

fn missing_input(algorithm: Algorithm) -> Error {
    match algorithm {
        Algorithm::Ac1 => Error::invalid("entropy", "AC1 needs an item-based entropy table"),
        _ => Error::TopicModelRequired,
    }
}

/// Total order used for every ranking: key, then natural item id.
pub fn compare_ranked(a: (f64, &str), b: (f64, &str)) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| natural_cmp(a.1, b.1))
}
