//! Rating-count LDA trained by collapsed Gibbs sampling.
//!
//! Each user is a document and each rating `(u, i, w)` contributes `w`
//! tokens of item `i`. Count arrays follow the usual layout: item×topic,
//! user×topic, per-topic totals and per-user totals.

use std::collections::HashMap;
use std::io::{BufWriter, Read, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

pub const CHECKPOINT_VERSION: &str = "longtail-lda/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub topics: usize,
    pub sweeps: usize,
    /// Defaults to `50 / topics` when unset.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig { topics: 20, sweeps: 200, alpha: None, beta: 0.1, seed: 0 }
    }
}

impl LdaConfig {
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.topics as f64)
    }
}

/// Hyperparameters and the four count arrays. Everything needed to
/// estimate theta and phi; this is what a checkpoint stores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicCounts {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub sweeps: usize,
    pub users: Vec<String>,
    pub items: Vec<String>,
    /// `items × topics`, row-major.
    pub item_topic: Vec<u32>,
    /// `users × topics`, row-major.
    pub user_topic: Vec<u32>,
    pub topic_total: Vec<u32>,
    pub user_total: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: String,
    #[serde(flatten)]
    counts: TopicCounts,
}

impl TopicCounts {
    fn zeroed(topics: usize, alpha: f64, beta: f64, users: Vec<String>, items: Vec<String>) -> Self {
        TopicCounts {
            topics,
            alpha,
            beta,
            sweeps: 0,
            item_topic: vec![0; items.len() * topics],
            user_topic: vec![0; users.len() * topics],
            topic_total: vec![0; topics],
            user_total: vec![0; users.len()],
            users,
            items,
        }
    }

    pub fn total_tokens(&self) -> u64 {
        self.topic_total.iter().map(|&c| c as u64).sum()
    }

    /// Point estimates of theta (per user) and phi (per topic).
    pub fn estimate(&self) -> Result<TopicEstimates> {
        if self.sweeps == 0 {
            return Err(Error::Untrained);
        }
        let k = self.topics;
        let n_items = self.items.len();
        let mut theta = Vec::with_capacity(self.users.len() * k);
        for u in 0..self.users.len() {
            theta.extend(smoothed_row(&self.user_topic[u * k..(u + 1) * k], self.user_total[u], self.alpha));
        }
        let mut phi = vec![0.0; k * n_items];
        for z in 0..k {
            let denom = self.topic_total[z] as f64 + n_items as f64 * self.beta;
            for i in 0..n_items {
                phi[z * n_items + i] = (self.item_topic[i * k + z] as f64 + self.beta) / denom;
            }
        }
        Ok(TopicEstimates::new(k, &self.users, &self.items, theta, phi))
    }

    pub fn write_checkpoint<W: Write>(&self, writer: W) -> Result<()> {
        let ck = Checkpoint { version: CHECKPOINT_VERSION.to_string(), counts: self.clone() };
        let mut w = BufWriter::new(writer);
        serde_json::to_writer(&mut w, &ck)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(reader: R) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_reader(reader)?;
        if ck.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "version {:?}, expected {CHECKPOINT_VERSION:?}",
                ck.version
            )));
        }
        ck.counts.validate()?;
        Ok(ck.counts)
    }

    fn validate(&self) -> Result<()> {
        let k = self.topics;
        let bad = |m: &str| Err(Error::Checkpoint(m.to_string()));
        if k == 0 || self.item_topic.len() != self.items.len() * k || self.user_topic.len() != self.users.len() * k {
            return bad("count array shapes do not match topic, user and item counts");
        }
        if self.topic_total.len() != k || self.user_total.len() != self.users.len() {
            return bad("total arrays have the wrong length");
        }
        for z in 0..k {
            let s: u64 = (0..self.items.len()).map(|i| self.item_topic[i * k + z] as u64).sum();
            if s != self.topic_total[z] as u64 {
                return bad("item-topic counts disagree with topic totals");
            }
        }
        for u in 0..self.users.len() {
            let s: u64 = self.user_topic[u * k..(u + 1) * k].iter().map(|&c| c as u64).sum();
            if s != self.user_total[u] as u64 {
                return bad("user-topic counts disagree with user totals");
            }
        }
        Ok(())
    }
}

/// `(n_z + prior) / (n + K * prior)` for each topic `z`.
pub fn smoothed_row(counts: &[u32], total: u32, prior: f64) -> impl Iterator<Item = f64> + '_ {
    let denom = total as f64 + counts.len() as f64 * prior;
    counts.iter().map(move |&c| (c as f64 + prior) / denom)
}

/// A Gibbs chain: counts plus the per-token assignments.
#[derive(Clone, Debug)]
pub struct TopicModel {
    counts: TopicCounts,
    /// token range of each user into `token_item` / `assignment`
    user_offsets: Vec<usize>,
    token_item: Vec<u32>,
    assignment: Vec<u16>,
}

/// Randomly assigns a topic to each of the `w(u, i)` replicas of every rating.
pub fn init_assignments<R: Rng>(g: &BipartiteGraph, topics: usize, alpha: f64, beta: f64, rng: &mut R) -> Result<TopicModel> {
    if topics < 2 {
        return Err(Error::invalid("topics", format!("need at least 2, got {topics}")));
    }
    init_unchecked(g, topics, alpha, beta, rng)
}

fn init_unchecked<R: Rng>(g: &BipartiteGraph, topics: usize, alpha: f64, beta: f64, rng: &mut R) -> Result<TopicModel> {
    if topics > u16::MAX as usize {
        return Err(Error::invalid("topics", format!("at most {} supported", u16::MAX)));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::invalid("alpha/beta", "Dirichlet priors must be positive"));
    }
    let users: Vec<String> = g.user_ids().iter().map(|s| s.to_string()).collect();
    let items: Vec<String> = g.item_ids().iter().map(|s| s.to_string()).collect();
    let mut counts = TopicCounts::zeroed(topics, alpha, beta, users, items);
    let mut user_offsets = Vec::with_capacity(g.num_users() + 1);
    let mut token_item = Vec::new();
    let mut assignment = Vec::new();
    user_offsets.push(0);
    for u in g.user_nodes() {
        for (i, w) in g.neighbors(u) {
            if w.fract() != 0.0 || w < 1.0 {
                return Err(Error::InvalidWeight { user: g.label(u).into(), item: g.label(i).into(), weight: w });
            }
            let item = g.item_position(i);
            for _ in 0..w as usize {
                let z = rng.random_range(0..topics);
                token_item.push(item as u32);
                assignment.push(z as u16);
                counts.item_topic[item * topics + z] += 1;
                counts.user_topic[u.index() * topics + z] += 1;
                counts.topic_total[z] += 1;
                counts.user_total[u.index()] += 1;
            }
        }
        user_offsets.push(token_item.len());
    }
    Ok(TopicModel { counts, user_offsets, token_item, assignment })
}

impl TopicModel {
    pub fn counts(&self) -> &TopicCounts {
        &self.counts
    }

    pub fn into_counts(self) -> TopicCounts {
        self.counts
    }

    pub fn topics(&self) -> usize {
        self.counts.topics
    }

    pub fn sweeps(&self) -> usize {
        self.counts.sweeps
    }

    pub fn assignments(&self) -> &[u16] {
        &self.assignment
    }

    /// Count arrays rebuilt from the assignments alone.
    pub fn recount(&self) -> TopicCounts {
        let c = &self.counts;
        let k = c.topics;
        let mut fresh = TopicCounts::zeroed(k, c.alpha, c.beta, c.users.clone(), c.items.clone());
        fresh.sweeps = c.sweeps;
        for u in 0..c.users.len() {
            for t in self.user_offsets[u]..self.user_offsets[u + 1] {
                let (i, z) = (self.token_item[t] as usize, self.assignment[t] as usize);
                fresh.item_topic[i * k + z] += 1;
                fresh.user_topic[u * k + z] += 1;
                fresh.topic_total[z] += 1;
                fresh.user_total[u] += 1;
            }
        }
        fresh
    }

    /// Resamples every token once, in (user, item, replica) order.
    pub fn gibbs_sweep<R: Rng>(&mut self, rng: &mut R) {
        let c = &mut self.counts;
        let k = c.topics;
        let beta = c.beta;
        let alpha = c.alpha;
        let item_mass = c.items.len() as f64 * beta;
        let mut cumulative = vec![0.0f64; k];
        for u in 0..c.users.len() {
            let user_row = u * k;
            for t in self.user_offsets[u]..self.user_offsets[u + 1] {
                let item_row = self.token_item[t] as usize * k;
                let old = self.assignment[t] as usize;
                c.item_topic[item_row + old] -= 1;
                c.user_topic[user_row + old] -= 1;
                c.topic_total[old] -= 1;

                // the user-length denominator is the same for every topic
                let mut acc = 0.0;
                for z in 0..k {
                    acc += (c.item_topic[item_row + z] as f64 + beta) / (c.topic_total[z] as f64 + item_mass)
                        * (c.user_topic[user_row + z] as f64 + alpha);
                    cumulative[z] = acc;
                }
                let draw = rng.random::<f64>() * acc;
                let new = cumulative.iter().position(|&x| draw < x).unwrap_or(k - 1);

                self.assignment[t] = new as u16;
                c.item_topic[item_row + new] += 1;
                c.user_topic[user_row + new] += 1;
                c.topic_total[new] += 1;
            }
        }
        c.sweeps += 1;
    }

    pub fn estimate(&self) -> Result<TopicEstimates> {
        self.counts.estimate()
    }
}

/// Initializes with `config.seed` and runs `config.sweeps` sweeps on one
/// ChaCha8 stream.
pub fn train(g: &BipartiteGraph, config: &LdaConfig) -> Result<TopicModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    train_with_rng(g, config, &mut rng)
}

pub fn train_with_rng<R: Rng>(g: &BipartiteGraph, config: &LdaConfig, rng: &mut R) -> Result<TopicModel> {
    if config.sweeps == 0 {
        return Err(Error::invalid("sweeps", "must be at least 1"));
    }
    let mut model = init_assignments(g, config.topics, config.alpha(), config.beta, rng)?;
    for _ in 0..config.sweeps {
        model.gibbs_sweep(rng);
    }
    Ok(model)
}

/// Smoothed theta (users × topics) and phi (topics × items).
#[derive(Clone, Debug, PartialEq)]
pub struct TopicEstimates {
    topics: usize,
    users: Vec<Arc<str>>,
    items: Vec<Arc<str>>,
    user_index: HashMap<Arc<str>, usize>,
    item_index: HashMap<Arc<str>, usize>,
    theta: Vec<f64>,
    phi: Vec<f64>,
}

impl TopicEstimates {
    fn new(topics: usize, users: &[String], items: &[String], theta: Vec<f64>, phi: Vec<f64>) -> Self {
        let users: Vec<Arc<str>> = users.iter().map(|s| Arc::from(s.as_str())).collect();
        let items: Vec<Arc<str>> = items.iter().map(|s| Arc::from(s.as_str())).collect();
        let user_index = users.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
        let item_index = items.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
        TopicEstimates { topics, users, items, user_index, item_index, theta, phi }
    }

    /// Estimates from explicit rows: `theta` has one row per user, `phi`
    /// one row per topic; every row must be a probability vector.
    pub fn from_rows(users: &[String], items: &[String], theta: &[Vec<f64>], phi: &[Vec<f64>]) -> Result<Self> {
        let topics = phi.len();
        if topics == 0 || theta.len() != users.len() || theta.iter().any(|r| r.len() != topics) {
            return Err(Error::invalid("theta", "need one row of length topics per user"));
        }
        if phi.iter().any(|r| r.len() != items.len()) {
            return Err(Error::invalid("phi", "need one row of length items per topic"));
        }
        for row in theta.iter().chain(phi) {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::NotNormalized { sum });
            }
        }
        Ok(Self::new(topics, users, items, theta.concat(), phi.concat()))
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn users(&self) -> &[Arc<str>] {
        &self.users
    }

    pub fn items(&self) -> &[Arc<str>] {
        &self.items
    }

    pub fn theta(&self, user: &str) -> Option<&[f64]> {
        self.user_index.get(user).map(|&u| &self.theta[u * self.topics..(u + 1) * self.topics])
    }

    pub fn theta_row(&self, user_pos: usize) -> &[f64] {
        &self.theta[user_pos * self.topics..(user_pos + 1) * self.topics]
    }

    /// phi of topic `z` over all items, in item order.
    pub fn phi_row(&self, z: usize) -> &[f64] {
        let n = self.items.len();
        &self.phi[z * n..(z + 1) * n]
    }

    pub fn item_position(&self, item: &str) -> Option<usize> {
        self.item_index.get(item).copied()
    }

    /// `sum_z theta[z] * phi[z][item]`.
    pub fn mixture(&self, theta: &[f64], item_pos: usize) -> f64 {
        let n = self.items.len();
        theta.iter().enumerate().map(|(z, t)| t * self.phi[z * n + item_pos]).sum()
    }

    /// Highest-probability items of topic `z`, best first.
    pub fn top_items(&self, z: usize, n: usize) -> Vec<(&str, f64)> {
        let row = self.phi_row(z);
        let mut order: Vec<usize> = (0..row.len()).collect();
        order.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
        order.into_iter().take(n).map(|i| (&*self.items[i], row[i])).collect()
    }

    /// `user_id,topic,probability` rows.
    pub fn write_theta_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["user_id", "topic", "probability"])?;
        for (u, id) in self.users.iter().enumerate() {
            for (z, p) in self.theta_row(u).iter().enumerate() {
                w.write_record([id.as_ref(), &z.to_string(), &p.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// `topic,item_id,probability` rows.
    pub fn write_phi_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["topic", "item_id", "probability"])?;
        for z in 0..self.topics {
            for (id, p) in self.items.iter().zip(self.phi_row(z)) {
                w.write_record([z.to_string().as_str(), id.as_ref(), &p.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
