//! Edge-weighted undirected user-item graph.
//!
//! Nodes are dense integers: users occupy `0..num_users()` and items follow
//! at `num_users()..num_nodes()`. Within each partition nodes are ordered by
//! [`natural_cmp`] on their external ids, so ascending node order is also
//! ascending id order. Adjacency is stored in CSR form with each neighbor list
//! sorted by node id.

mod markov;
mod traverse;

pub use markov::{stationary_distribution, transition_prob};
pub use traverse::{
    bfs_candidate_nodes, bfs_candidate_subgraph, connected_components,
    largest_connected_component, reachable_from,
};

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    User,
    Item,
}

/// One `(user, item, rating)` observation. Ratings are integers in 1..=5.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatingRecord {
    pub user: String,
    pub item: String,
    pub rating: u8,
}

impl RatingRecord {
    pub fn new(user: impl Into<String>, item: impl Into<String>, rating: i64) -> Result<Self> {
        let user = user.into();
        let item = item.into();
        if !(1..=5).contains(&rating) {
            return Err(Error::RatingOutOfRange { user, item, rating });
        }
        Ok(RatingRecord { user, item, rating: rating as u8 })
    }
}

/// What to do when the same `(user, item)` pair is rated more than once.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DuplicatePolicy {
    /// Later records overwrite earlier ones.
    #[default]
    KeepLast,
    /// Conflicting ratings are an error; exact repeats are collapsed.
    Reject,
}

/// Collapses repeated `(user, item)` pairs. The surviving record keeps the
/// position of the first occurrence.
pub fn dedup_records(records: &[RatingRecord], policy: DuplicatePolicy) -> Result<Vec<RatingRecord>> {
    let mut seen: HashMap<(&str, &str), usize> = HashMap::with_capacity(records.len());
    let mut out: Vec<RatingRecord> = Vec::with_capacity(records.len());
    for r in records {
        if !(1..=5).contains(&r.rating) {
            return Err(Error::RatingOutOfRange {
                user: r.user.clone(),
                item: r.item.clone(),
                rating: r.rating as i64,
            });
        }
        match seen.get(&(r.user.as_str(), r.item.as_str())) {
            Some(&pos) => {
                let prev = out[pos].rating;
                if prev != r.rating {
                    if policy == DuplicatePolicy::Reject {
                        return Err(Error::DuplicateRating {
                            user: r.user.clone(),
                            item: r.item.clone(),
                            first: prev,
                            second: r.rating,
                        });
                    }
                    out[pos].rating = r.rating;
                }
            }
            None => {
                seen.insert((r.user.as_str(), r.item.as_str()), out.len());
                out.push(r.clone());
            }
        }
    }
    Ok(out)
}

/// Orders ids numerically when both parse as unsigned integers, otherwise
/// lexicographically. Numeric ids sort before non-numeric ones.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteGraph {
    users: Vec<Arc<str>>,
    items: Vec<Arc<str>>,
    user_index: HashMap<Arc<str>, u32>,
    item_index: HashMap<Arc<str>, u32>,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
}

/// Builds the user-item graph with edge weight equal to the rating.
pub fn build_graph(records: &[RatingRecord], policy: DuplicatePolicy) -> Result<BipartiteGraph> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let records = dedup_records(records, policy)?;
    BipartiteGraph::from_weighted_edges(
        records.iter().map(|r| (r.user.as_str(), r.item.as_str(), r.rating as f64)),
    )
}

impl BipartiteGraph {
    /// Builds a graph from `(user, item, weight)` triples. Duplicate pairs and
    /// non-positive weights are rejected.
    pub fn from_weighted_edges<'a, I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)>,
    {
        let edges: Vec<(&str, &str, f64)> = edges.into_iter().collect();
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        for &(u, i, w) in &edges {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidWeight { user: u.into(), item: i.into(), weight: w });
            }
        }
        let users = sorted_unique(edges.iter().map(|e| e.0));
        let items = sorted_unique(edges.iter().map(|e| e.1));
        let user_index = index_of(&users);
        let item_index = index_of(&items);

        let mut dense: Vec<(u32, u32, f64)> = edges
            .iter()
            .map(|&(u, i, w)| (user_index[u], item_index[i], w))
            .collect();
        dense.sort_by_key(|e| (e.0, e.1));
        for pair in dense.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(Error::DuplicateEdge {
                    user: users[pair[0].0 as usize].to_string(),
                    item: items[pair[0].1 as usize].to_string(),
                });
            }
        }
        Ok(Self::assemble(users, items, &dense))
    }

    /// `edges` hold `(user index, item index, weight)` with unique pairs.
    fn assemble(users: Vec<Arc<str>>, items: Vec<Arc<str>>, edges: &[(u32, u32, f64)]) -> Self {
        let nu = users.len();
        let n = nu + items.len();
        let mut counts = vec![0usize; n];
        for &(u, i, _) in edges {
            counts[u as usize] += 1;
            counts[nu + i as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for c in &counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![NodeId(0); offsets[n]];
        let mut weights = vec![0.0; offsets[n]];
        for &(u, i, w) in edges {
            let (un, inode) = (u as usize, nu + i as usize);
            targets[cursor[un]] = NodeId(inode as u32);
            weights[cursor[un]] = w;
            cursor[un] += 1;
            targets[cursor[inode]] = NodeId(un as u32);
            weights[cursor[inode]] = w;
            cursor[inode] += 1;
        }
        for v in 0..n {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            let mut row: Vec<(NodeId, f64)> =
                targets[lo..hi].iter().copied().zip(weights[lo..hi].iter().copied()).collect();
            row.sort_by_key(|e| e.0);
            for (k, (t, w)) in row.into_iter().enumerate() {
                targets[lo + k] = t;
                weights[lo + k] = w;
            }
        }
        let degrees = (0..n).map(|v| weights[offsets[v]..offsets[v + 1]].iter().sum()).collect();
        let user_index = index_of(&users);
        let item_index = index_of(&items);
        BipartiteGraph { users, items, user_index, item_index, offsets, targets, weights, degrees }
    }

    /// The subgraph induced by `nodes`: every edge of `self` between two kept
    /// nodes is kept. Degrees are recomputed inside the subgraph.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> BipartiteGraph {
        let n = self.num_nodes();
        let mut keep = vec![false; n];
        for v in nodes {
            keep[v.index()] = true;
        }
        let nu = self.num_users();
        let mut new_index = vec![u32::MAX; n];
        let mut users = Vec::new();
        let mut items = Vec::new();
        for v in 0..n {
            if !keep[v] {
                continue;
            }
            if v < nu {
                new_index[v] = users.len() as u32;
                users.push(self.users[v].clone());
            } else {
                new_index[v] = items.len() as u32;
                items.push(self.items[v - nu].clone());
            }
        }
        let mut edges = Vec::new();
        for u in 0..nu {
            if !keep[u] {
                continue;
            }
            for (t, w) in self.neighbors(NodeId(u as u32)) {
                if keep[t.index()] {
                    edges.push((new_index[u], new_index[t.index()], w));
                }
            }
        }
        Self::assemble(users, items, &edges)
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.degrees.len()
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    /// Fraction of the user×item rating matrix that is filled.
    pub fn density(&self) -> f64 {
        self.num_edges() as f64 / (self.num_users() as f64 * self.num_items() as f64)
    }

    pub fn user_ids(&self) -> &[Arc<str>] {
        &self.users
    }

    pub fn item_ids(&self) -> &[Arc<str>] {
        &self.items
    }

    pub fn user(&self, id: &str) -> Option<NodeId> {
        self.user_index.get(id).map(|&u| NodeId(u))
    }

    pub fn item(&self, id: &str) -> Option<NodeId> {
        self.item_index.get(id).map(|&i| NodeId((self.users.len() + i as usize) as u32))
    }

    pub fn user_node(&self, user_idx: usize) -> NodeId {
        debug_assert!(user_idx < self.num_users());
        NodeId(user_idx as u32)
    }

    pub fn item_node(&self, item_idx: usize) -> NodeId {
        debug_assert!(item_idx < self.num_items());
        NodeId((self.num_users() + item_idx) as u32)
    }

    /// Position of an item node among the items, `0..num_items()`.
    pub fn item_position(&self, node: NodeId) -> usize {
        debug_assert!(self.is_item(node));
        node.index() - self.num_users()
    }

    pub fn item_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (self.num_users()..self.num_nodes()).map(|v| NodeId(v as u32))
    }

    pub fn user_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.num_users()).map(|v| NodeId(v as u32))
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.index() < self.num_nodes()
    }

    pub fn kind(&self, node: NodeId) -> NodeKind {
        if node.index() < self.num_users() {
            NodeKind::User
        } else {
            NodeKind::Item
        }
    }

    pub fn is_user(&self, node: NodeId) -> bool {
        node.index() < self.num_users()
    }

    pub fn is_item(&self, node: NodeId) -> bool {
        !self.is_user(node) && self.contains(node)
    }

    /// External id of a node.
    pub fn label(&self, node: NodeId) -> &str {
        let v = node.index();
        if v < self.num_users() {
            &self.users[v]
        } else {
            &self.items[v - self.num_users()]
        }
    }

    pub(crate) fn label_arc(&self, node: NodeId) -> &Arc<str> {
        let v = node.index();
        if v < self.num_users() {
            &self.users[v]
        } else {
            &self.items[v - self.num_users()]
        }
    }

    /// Weighted degree `d_i`.
    pub fn degree(&self, node: NodeId) -> f64 {
        self.degrees[node.index()]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Number of incident edges; for an item this is its rating count.
    pub fn edge_count(&self, node: NodeId) -> usize {
        self.offsets[node.index() + 1] - self.offsets[node.index()]
    }

    pub fn neighbor_ids(&self, node: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[node.index()]..self.offsets[node.index() + 1]]
    }

    pub fn neighbor_weights(&self, node: NodeId) -> &[f64] {
        &self.weights[self.offsets[node.index()]..self.offsets[node.index() + 1]]
    }

    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.neighbor_ids(node).iter().copied().zip(self.neighbor_weights(node).iter().copied())
    }

    /// `a(i, j)`; zero for non-adjacent pairs.
    pub fn weight(&self, i: NodeId, j: NodeId) -> f64 {
        match self.neighbor_ids(i).binary_search(&j) {
            Ok(k) => self.neighbor_weights(i)[k],
            Err(_) => 0.0,
        }
    }

    /// Items rated by `user` (the set `S_u`).
    pub fn rated_items(&self, user: NodeId) -> &[NodeId] {
        debug_assert!(self.is_user(user));
        self.neighbor_ids(user)
    }

    /// All edges as `(user, item, weight)` in user-major order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.user_nodes().flat_map(move |u| self.neighbors(u).map(move |(i, w)| (u, i, w)))
    }

    pub fn total_weight(&self) -> f64 {
        self.degrees.iter().sum()
    }
}

fn sorted_unique<'a>(ids: impl Iterator<Item = &'a str>) -> Vec<Arc<str>> {
    let mut v: Vec<&str> = ids.collect();
    v.sort_unstable_by(|a, b| natural_cmp(a, b));
    v.dedup();
    v.into_iter().map(Arc::from).collect()
}

fn index_of(ids: &[Arc<str>]) -> HashMap<Arc<str>, u32> {
    ids.iter().enumerate().map(|(k, id)| (id.clone(), k as u32)).collect()
}
