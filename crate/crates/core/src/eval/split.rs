use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use crate::dataset::csv_rows;

use crate::error::{Error, Result};
use crate::graph::{natural_cmp, RatingRecord};

/// Items partitioned into a popular head and a long tail that together with
/// the head covers every rated item.
#[derive(Clone, Debug, PartialEq)]
pub struct LongTailSplit {
    r_percent: f64,
    /// `(item, rating count)`, least popular first.
    popularity: Vec<(String, usize)>,
    tail_len: usize,
    tail: HashSet<String>,
}

/// Sorts items by rating count ascending (ties by item id) and takes items
/// into the tail until their cumulative count first reaches `r_percent` of
/// all ratings. The item that crosses the threshold belongs to the tail.
pub fn longtail_split(records: &[RatingRecord], r_percent: f64) -> Result<LongTailSplit> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(r_percent > 0.0 && r_percent <= 1.0) {
        return Err(Error::invalid("r_percent", format!("must be in (0, 1], got {r_percent}")));
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for r in records {
        *counts.entry(r.item.as_str()).or_default() += 1;
    }
    let mut popularity: Vec<(String, usize)> = counts.into_iter().map(|(i, c)| (i.to_string(), c)).collect();
    popularity.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| natural_cmp(&a.0, &b.0)));
    from_popularity(popularity, r_percent)
}

fn from_popularity(popularity: Vec<(String, usize)>, r_percent: f64) -> Result<LongTailSplit> {
    let total: usize = popularity.iter().map(|p| p.1).sum();
    let threshold = r_percent * total as f64 * (1.0 - 1e-12);
    let mut cum = 0usize;
    let mut tail_len = 0;
    for (_, c) in &popularity {
        cum += c;
        tail_len += 1;
        if cum as f64 >= threshold {
            break;
        }
    }
    let tail = popularity[..tail_len].iter().map(|p| p.0.clone()).collect();
    Ok(LongTailSplit { r_percent, popularity, tail_len, tail })
}

impl LongTailSplit {
    pub fn r_percent(&self) -> f64 {
        self.r_percent
    }

    pub fn is_tail(&self, item: &str) -> bool {
        self.tail.contains(item)
    }

    pub fn num_items(&self) -> usize {
        self.popularity.len()
    }

    pub fn num_tail(&self) -> usize {
        self.tail_len
    }

    /// Share of items that fall in the tail.
    pub fn tail_fraction(&self) -> f64 {
        self.tail_len as f64 / self.popularity.len() as f64
    }

    /// Share of ratings that fall on tail items.
    pub fn tail_rating_share(&self) -> f64 {
        let total: usize = self.popularity.iter().map(|p| p.1).sum();
        let tail: usize = self.popularity[..self.tail_len].iter().map(|p| p.1).sum();
        tail as f64 / total as f64
    }

    pub fn tail_items(&self) -> impl Iterator<Item = &str> {
        self.popularity[..self.tail_len].iter().map(|p| p.0.as_str())
    }

    pub fn head_items(&self) -> impl Iterator<Item = &str> {
        self.popularity[self.tail_len..].iter().map(|p| p.0.as_str())
    }

    pub fn popularity(&self) -> &[(String, usize)] {
        &self.popularity
    }

    /// `item_id,ratings,segment` rows in popularity order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["item_id", "ratings", "segment"])?;
        for (k, (item, c)) in self.popularity.iter().enumerate() {
            let seg = if k < self.tail_len { "tail" } else { "head" };
            w.write_record([item.as_str(), &c.to_string(), seg])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a split written by [`LongTailSplit::write_csv`].
    pub fn read_csv<R: Read>(reader: R, r_percent: f64) -> Result<Self> {
        let mut popularity = Vec::new();
        let mut tail_len = 0;
        for (line, f) in csv_rows(reader)? {
            let err = |m: &str| Error::Parse { line, message: m.to_string() };
            if f.len() != 3 {
                return Err(err("expected item_id,ratings,segment"));
            }
            let c: usize = f[1].parse().map_err(|_| err("bad rating count"))?;
            match &f[2] {
                "tail" if tail_len == popularity.len() => tail_len += 1,
                "tail" => return Err(err("tail rows must come first")),
                "head" => {}
                _ => return Err(err("segment must be head or tail")),
            }
            popularity.push((f[0].to_string(), c));
        }
        if popularity.is_empty() {
            return Err(Error::EmptyInput);
        }
        let tail = popularity[..tail_len].iter().map(|p| p.0.clone()).collect();
        Ok(LongTailSplit { r_percent, popularity, tail_len, tail })
    }
}
