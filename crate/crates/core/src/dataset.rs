//! Rating-file loaders and the plain-text edge-list format.
//!
//! Two rating formats are understood: MovieLens `userId::itemId::rating::timestamp`
//! (the timestamp is optional and ignored) and comma separated
//! `user,item,rating[,...]` with an optional header line.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, RatingRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatingFormat {
    /// `user::item::rating::timestamp`
    MovieLens,
    /// `user,item,rating`
    Csv,
}

impl RatingFormat {
    /// Picks a format from the file extension: `.dat` is MovieLens, anything
    /// else is CSV.
    pub fn infer(path: &Path) -> RatingFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("dat") => RatingFormat::MovieLens,
            _ => RatingFormat::Csv,
        }
    }
}

impl FromStr for RatingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "movielens" | "ml" | "dat" => Ok(RatingFormat::MovieLens),
            "csv" => Ok(RatingFormat::Csv),
            other => Err(Error::Config(format!("unknown rating format {other:?} (use movielens or csv)"))),
        }
    }
}

impl fmt::Display for RatingFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatingFormat::MovieLens => "movielens",
            RatingFormat::Csv => "csv",
        })
    }
}

pub fn load_ratings(path: &Path, format: RatingFormat) -> Result<Vec<RatingRecord>> {
    let file = File::open(path)?;
    parse_ratings(BufReader::new(file), format)
}

pub fn parse_ratings<R: Read>(reader: R, format: RatingFormat) -> Result<Vec<RatingRecord>> {
    let mut out = Vec::new();
    match format {
        RatingFormat::MovieLens => {
            for (k, line) in BufReader::new(reader).lines().enumerate() {
                let line = line?;
                let line = line.trim_end_matches('\r');
                if line.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split("::").collect();
                push_record(&fields, k + 1, false, &mut out)?;
            }
        }
        RatingFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .trim(csv::Trim::All)
                .from_reader(reader);
            let mut row = csv::StringRecord::new();
            while reader.read_record(&mut row)? {
                let line_no = row.position().map_or(0, |p| p.line() as usize);
                if row.iter().all(str::is_empty) {
                    continue;
                }
                let fields: Vec<&str> = row.iter().collect();
                push_record(&fields, line_no, line_no == 1, &mut out)?;
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

fn push_record(fields: &[&str], line_no: usize, may_be_header: bool, out: &mut Vec<RatingRecord>) -> Result<()> {
    if fields.len() < 3 {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected at least 3 fields, found {}", fields.len()),
        });
    }
    let rating = match parse_rating(fields[2]) {
        Some(r) => r,
        // a header such as `userId,movieId,rating`
        None if may_be_header => return Ok(()),
        None => {
            return Err(Error::Parse {
                line: line_no,
                message: format!("rating {:?} is not an integer", fields[2]),
            })
        }
    };
    let (user, item) = (fields[0].trim(), fields[1].trim());
    if user.is_empty() || item.is_empty() {
        return Err(Error::Parse { line: line_no, message: "empty user or item id".into() });
    }
    let record = RatingRecord::new(user, item, rating).map_err(|e| Error::Parse {
        line: line_no,
        message: e.to_string(),
    })?;
    out.push(record);
    Ok(())
}

/// Data rows of a CSV file with a header line, paired with their line numbers.
pub(crate) fn csv_rows<R: Read>(reader: R) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        rows.push((line, row));
    }
    Ok(rows)
}

/// Accepts integers and integral decimals such as `4.0`.
fn parse_rating(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Some(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v.fract() == 0.0 => Some(v as i64),
        _ => None,
    }
}

pub fn write_ratings_csv<W: Write>(records: &[RatingRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.write_record([r.user.as_str(), r.item.as_str(), &r.rating.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `user<TAB>item<TAB>weight` lines, user-major, LF terminated.
pub fn write_edge_list<W: Write>(g: &BipartiteGraph, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for (u, i, weight) in g.edges() {
        writeln!(w, "{}\t{}\t{}", g.label(u), g.label(i), weight)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_edge_list<R: Read>(reader: R) -> Result<BipartiteGraph> {
    let reader = BufReader::new(reader);
    let mut rows: Vec<(String, String, f64)> = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(u), Some(i), Some(w), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Parse { line: k + 1, message: "expected user<TAB>item<TAB>weight".into() });
        };
        let w: f64 = w.parse().map_err(|_| Error::Parse {
            line: k + 1,
            message: format!("weight {w:?} is not a number"),
        })?;
        rows.push((u.to_string(), i.to_string(), w));
    }
    BipartiteGraph::from_weighted_edges(rows.iter().map(|(u, i, w)| (u.as_str(), i.as_str(), *w)))
}

/// Graph edges back to rating records. Weights must be integral ratings.
pub fn graph_records(g: &BipartiteGraph) -> Result<Vec<RatingRecord>> {
    g.edges()
        .map(|(u, i, w)| {
            if w.fract() != 0.0 {
                return Err(Error::InvalidWeight {
                    user: g.label(u).into(),
                    item: g.label(i).into(),
                    weight: w,
                });
            }
            RatingRecord::new(g.label(u), g.label(i), w as i64)
        })
        .collect()
}
