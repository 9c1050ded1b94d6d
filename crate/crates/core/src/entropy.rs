//! Per-user entropy, from rated items or from the user's topic mixture.
//! Natural logarithms throughout.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use crate::dataset::csv_rows;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, NodeId};
use crate::lda::TopicEstimates;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntropyKind {
    ItemBased,
    TopicBased,
}

impl fmt::Display for EntropyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntropyKind::ItemBased => "item_based",
            EntropyKind::TopicBased => "topic_based",
        })
    }
}

impl FromStr for EntropyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "item_based" => Ok(EntropyKind::ItemBased),
            "topic_based" => Ok(EntropyKind::TopicBased),
            other => Err(Error::Config(format!("unknown entropy kind {other:?}"))),
        }
    }
}

/// `E(u)` for a set of users.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyTable {
    kind: EntropyKind,
    ids: Vec<Arc<str>>,
    values: Vec<f64>,
    index: HashMap<Arc<str>, usize>,
}

impl EntropyTable {
    pub fn from_entries<I, S>(kind: EntropyKind, entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<Arc<str>>,
    {
        let mut table = EntropyTable { kind, ids: Vec::new(), values: Vec::new(), index: HashMap::new() };
        for (id, e) in entries {
            let id: Arc<str> = id.into();
            match table.index.get(&id) {
                Some(&k) => table.values[k] = e,
                None => {
                    table.index.insert(id.clone(), table.ids.len());
                    table.ids.push(id);
                    table.values.push(e);
                }
            }
        }
        table
    }

    /// Same value for every user of `g`.
    pub fn constant(g: &BipartiteGraph, kind: EntropyKind, value: f64) -> Self {
        Self::from_entries(kind, g.user_ids().iter().map(|id| (id.clone(), value)))
    }

    pub fn kind(&self) -> EntropyKind {
        self.kind
    }

    pub fn get(&self, user: &str) -> Option<f64> {
        self.index.get(user).map(|&k| self.values[k])
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.ids.iter().map(|id| &**id).zip(self.values.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut t = self.clone();
        t.values.iter_mut().for_each(|v| *v *= factor);
        t
    }

    /// `user_id,entropy,kind` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["user_id", "entropy", "kind"])?;
        let kind = self.kind.to_string();
        for (id, e) in self.iter() {
            w.write_record([id, &e.to_string(), &kind])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut kind = None;
        let mut entries = Vec::new();
        for (line, row) in csv_rows(reader)? {
            let parse_err = |message: String| Error::Parse { line, message };
            let fields: Vec<&str> = row.iter().collect();
            if fields.len() != 3 {
                return Err(parse_err("expected user_id,entropy,kind".into()));
            }
            let e: f64 = fields[1].parse().map_err(|_| parse_err(format!("bad entropy {:?}", fields[1])))?;
            let row_kind: EntropyKind = fields[2].parse()?;
            if kind.is_some_and(|k| k != row_kind) {
                return Err(parse_err("mixed entropy kinds".into()));
            }
            kind = Some(row_kind);
            entries.push((fields[0].to_string(), e));
        }
        Ok(Self::from_entries(kind.unwrap_or(EntropyKind::ItemBased), entries))
    }
}

/// Entropy of the user's rating-weight distribution over rated items.
pub fn item_entropy(g: &BipartiteGraph, user: NodeId) -> Result<f64> {
    if !g.is_user(user) {
        return Err(Error::UnknownNode(user.index()));
    }
    let total = g.degree(user);
    if g.edge_count(user) == 0 || total <= 0.0 {
        return Err(Error::UnratedUser(g.label(user).to_string()));
    }
    Ok(shannon(g.neighbor_weights(user).iter().map(|w| w / total)))
}

/// Entropy of a topic mixture. `theta` must be a probability vector.
pub fn topic_entropy(theta: &[f64]) -> Result<f64> {
    let sum: f64 = theta.iter().sum();
    if theta.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { sum });
    }
    Ok(shannon(theta.iter().copied()))
}

fn shannon(ps: impl Iterator<Item = f64>) -> f64 {
    let h: f64 = ps.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum();
    // -0.0 and rounding dust below zero for degenerate distributions
    h.max(0.0)
}

/// Entropy for every user of `g`.
pub fn build_entropy_table(
    g: &BipartiteGraph,
    kind: EntropyKind,
    topics: Option<&TopicEstimates>,
) -> Result<EntropyTable> {
    let mut entries = Vec::with_capacity(g.num_users());
    match kind {
        EntropyKind::ItemBased => {
            for u in g.user_nodes() {
                entries.push((g.label_arc(u).clone(), item_entropy(g, u)?));
            }
        }
        EntropyKind::TopicBased => {
            let topics = topics.ok_or(Error::TopicModelRequired)?;
            for u in g.user_nodes() {
                let id = g.label_arc(u);
                let theta = topics.theta(id).ok_or_else(|| Error::UserNotInModel(id.to_string()))?;
                entries.push((id.clone(), topic_entropy(theta)?));
            }
        }
    }
    Ok(EntropyTable::from_entries(kind, entries))
}
