use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::dataset::csv_rows;

use crate::error::{Error, Result};
use crate::recommend::Algorithm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Recall,
    Popularity,
    Diversity,
    Similarity,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Recall => "recall",
            Metric::Popularity => "popularity",
            Metric::Diversity => "diversity",
            Metric::Similarity => "similarity",
        }
    }

    fn parse(s: &str) -> Option<Metric> {
        [Metric::Recall, Metric::Popularity, Metric::Diversity, Metric::Similarity].into_iter().find(|m| m.name() == s)
    }

    /// Lower popularity means more niche recommendations.
    pub fn higher_is_better(self) -> bool {
        !matches!(self, Metric::Popularity)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub metric: Metric,
    pub algorithm: Algorithm,
    pub n: usize,
    pub value: f64,
}

/// Metric rows from any number of algorithms, in a canonical order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    rows: Vec<MetricRow>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, metric: Metric, algorithm: Algorithm, n: usize, value: f64) {
        self.rows.push(MetricRow { metric, algorithm, n, value });
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    pub fn rows(&self) -> &[MetricRow] {
        &self.rows
    }

    pub fn get(&self, metric: Metric, algorithm: Algorithm, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.metric == metric && r.algorithm == algorithm && r.n == n).map(|r| r.value)
    }

    fn sort(&mut self) {
        self.rows.sort_by(|a, b| (a.metric, a.n, a.algorithm).cmp(&(b.metric, b.n, b.algorithm)));
    }

    /// `metric,algorithm,N,value` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut sorted = self.clone();
        sorted.sort();
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["metric", "algorithm", "N", "value"])?;
        for r in &sorted.rows {
            w.write_record([r.metric.name(), r.algorithm.tag(), &r.n.to_string(), &r.value.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut report = Report::new();
        for (line, f) in csv_rows(reader)? {
            let err = |m: &str| Error::Parse { line, message: m.to_string() };
            if f.len() != 4 {
                return Err(err("expected metric,algorithm,N,value"));
            }
            let metric = Metric::parse(&f[0]).ok_or_else(|| err("unknown metric"))?;
            let n = f[2].parse().map_err(|_| err("bad N"))?;
            let value = f[3].parse().map_err(|_| err("bad value"))?;
            report.push(metric, f[1].parse()?, n, value);
        }
        Ok(report)
    }

    /// One block per metric and N, algorithms ranked best first.
    pub fn summary(&self) -> String {
        let mut sorted = self.clone();
        sorted.sort();
        let mut out = String::new();
        let mut k = 0;
        let rows = &sorted.rows;
        while k < rows.len() {
            let (metric, n) = (rows[k].metric, rows[k].n);
            let end = k + rows[k..].iter().take_while(|r| r.metric == metric && r.n == n).count();
            let mut group: Vec<&MetricRow> = rows[k..end].iter().collect();
            group.sort_by(|a, b| {
                let ord = a.value.total_cmp(&b.value);
                let ord = if metric.higher_is_better() { ord.reverse() } else { ord };
                if ord == Ordering::Equal { a.algorithm.cmp(&b.algorithm) } else { ord }
            });
            let _ = writeln!(out, "{}@{}", metric.name(), n);
            for (rank, r) in group.iter().enumerate() {
                let _ = writeln!(out, "  {:>2}. {:<5} {:.6}", rank + 1, r.algorithm.tag(), r.value);
            }
            k = end;
        }
        out
    }
}
