//! Two-column tabular input.
//!
//! Reads a sensitive column `S` and a public column `X` from delimited text,
//! drops rows with a missing value in either column, and builds the joint
//! range. Repeated rows collapse into one pair; the statistics still count
//! every record.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{IngestError, Result};
use crate::range::{JointRange, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    /// Digits select a zero-based column index; anything else is a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_owned()),
        })
    }
}

impl std::fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Delimiter {
    Byte(u8),
    /// Runs of spaces and tabs; no quoting.
    Whitespace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub has_header: bool,
    pub delimiter: Delimiter,
    /// Cells equal to any of these (after trimming, or numerically) are missing.
    pub missing: Vec<String>,
    /// Fail instead of falling back to categorical when `X` is not numeric.
    pub require_numeric_x: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            has_header: true,
            delimiter: Delimiter::Byte(b','),
            missing: vec!["-9".into(), String::new(), "?".into()],
            require_numeric_x: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub record_count: usize,
    pub distinct_s: usize,
    pub distinct_x: usize,
    pub distinct_pairs: usize,
    /// Pairs that occur in exactly one record.
    pub singleton_pairs: usize,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub joint_range: JointRange,
    pub stats: DatasetStats,
    /// `(s, x)` indices of every retained record, in file order.
    pub records: Vec<(usize, usize)>,
    /// Rows dropped because of a missing value.
    pub dropped: usize,
}

pub fn load_csv(path: impl AsRef<Path>, s: &ColumnRef, x: &ColumnRef, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_owned(),
        source,
    })?;
    load_reader(file, s, x, opts)
}

pub fn load_reader<R: Read>(reader: R, s: &ColumnRef, x: &ColumnRef, opts: &LoadOptions) -> Result<Dataset> {
    let rows = read_rows(reader, opts)?;
    let (header, body) = if opts.has_header {
        match rows.split_first() {
            Some(((_, h), rest)) => (Some(h.clone()), rest),
            None => return Err(IngestError::Empty.into()),
        }
    } else {
        (None, &rows[..])
    };
    let si = resolve(s, header.as_deref())?;
    let xi = resolve(x, header.as_deref())?;

    let mut s_ids: Vec<String> = Vec::new();
    let mut x_ids: Vec<String> = Vec::new();
    let mut s_index: HashMap<String, usize> = HashMap::new();
    let mut x_index: HashMap<String, usize> = HashMap::new();
    let mut records = Vec::new();
    let mut dropped = 0;
    for (line, row) in body {
        let need = si.max(xi) + 1;
        if row.len() < need {
            return Err(IngestError::Malformed {
                row: *line,
                message: format!("expected at least {need} fields, found {}", row.len()),
            }
            .into());
        }
        let (sv, xv) = (row[si].trim(), row[xi].trim());
        if is_missing(sv, &opts.missing) || is_missing(xv, &opts.missing) {
            dropped += 1;
            continue;
        }
        let s = intern(sv, &mut s_index, &mut s_ids);
        let x = intern(xv, &mut x_index, &mut x_ids);
        records.push((s, x, *line));
    }
    if records.is_empty() {
        return Err(IngestError::Empty.into());
    }

    let x_values = numeric_values(&x_ids);
    if opts.require_numeric_x && x_values.is_none() {
        let (_, x, line) = records
            .iter()
            .find(|(_, x, _)| parse_number(&x_ids[*x]).is_none())
            .expect("a non-numeric cell exists");
        return Err(IngestError::NonNumeric {
            row: *line,
            column: column_name(header.as_deref(), xi),
            value: x_ids[*x].clone(),
        }
        .into());
    }
    let s_values = numeric_values(&s_ids);

    let s_alphabet = symbols(s_ids, s_values);
    let x_alphabet = symbols(x_ids, x_values);
    let records: Vec<(usize, usize)> = records.into_iter().map(|(s, x, _)| (s, x)).collect();

    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    let mut distinct = Vec::new();
    for &pair in &records {
        let c = counts.entry(pair).or_insert(0);
        if *c == 0 {
            distinct.push(pair);
        }
        *c += 1;
    }
    let joint_range = JointRange::new(s_alphabet, x_alphabet, distinct)?;
    let stats = stats(&joint_range, &records);
    Ok(Dataset {
        joint_range,
        stats,
        records,
        dropped,
    })
}

/// Counts for a joint range and the records it was built from.
pub fn stats(jr: &JointRange, records: &[(usize, usize)]) -> DatasetStats {
    let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
    for &pair in records {
        *counts.entry(pair).or_insert(0) += 1;
    }
    DatasetStats {
        record_count: records.len(),
        distinct_s: jr.s_len(),
        distinct_x: jr.x_len(),
        distinct_pairs: jr.pairs().len(),
        singleton_pairs: counts.values().filter(|&&c| c == 1).count(),
    }
}

/// Writes one `s,x` row per pair of the joint range, with a header.
pub fn write_pairs_csv<W: Write>(jr: &JointRange, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| IngestError::Malformed {
        row: 0,
        message: e.to_string(),
    };
    w.write_record(["s", "x"]).map_err(io)?;
    for &(s, x) in jr.pairs() {
        w.write_record([&jr.s_alphabet()[s].id, &jr.x_alphabet()[x].id])
            .map_err(io)?;
    }
    w.flush().map_err(|e| IngestError::Malformed {
        row: 0,
        message: e.to_string(),
    })?;
    Ok(())
}

type Row = (usize, Vec<String>);

fn read_rows<R: Read>(reader: R, opts: &LoadOptions) -> Result<Vec<Row>> {
    match opts.delimiter {
        Delimiter::Whitespace => {
            let mut rows = Vec::new();
            for (i, line) in BufReader::new(reader).lines().enumerate() {
                let line = line.map_err(|e| IngestError::Malformed {
                    row: i + 1,
                    message: e.to_string(),
                })?;
                if line.trim().is_empty() {
                    continue;
                }
                rows.push((i + 1, line.split_whitespace().map(str::to_owned).collect()));
            }
            Ok(rows)
        }
        Delimiter::Byte(d) => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .delimiter(d)
                .from_reader(reader);
            let mut rows = Vec::new();
            for rec in rdr.records() {
                let rec = rec.map_err(|e| IngestError::Malformed {
                    row: e.position().map_or(0, |p| p.line() as usize),
                    message: e.to_string(),
                })?;
                let line = rec.position().map_or(rows.len() + 1, |p| p.line() as usize);
                if rec.len() == 1 && rec[0].trim().is_empty() {
                    continue;
                }
                rows.push((line, rec.iter().map(str::to_owned).collect()));
            }
            Ok(rows)
        }
    }
}

fn resolve(col: &ColumnRef, header: Option<&[String]>) -> Result<usize> {
    let missing = || IngestError::MissingColumn {
        column: col.to_string(),
    };
    match (col, header) {
        (ColumnRef::Name(n), Some(h)) => h.iter().position(|c| c.trim() == n).ok_or_else(|| missing().into()),
        (ColumnRef::Name(_), None) => Err(missing().into()),
        (ColumnRef::Index(i), Some(h)) => {
            // a header cell spelled as the digits wins over the index
            if let Some(p) = h.iter().position(|c| c.trim() == i.to_string()) {
                return Ok(p);
            }
            if *i < h.len() {
                Ok(*i)
            } else {
                Err(missing().into())
            }
        }
        (ColumnRef::Index(i), None) => Ok(*i),
    }
}

fn column_name(header: Option<&[String]>, xi: usize) -> String {
    header
        .and_then(|h| h.get(xi))
        .map_or_else(|| xi.to_string(), |h| h.trim().to_owned())
}

fn is_missing(cell: &str, sentinels: &[String]) -> bool {
    sentinels.iter().any(|m| {
        cell == m.trim()
            || matches!((parse_number(cell), parse_number(m)), (Some(a), Some(b)) if a == b)
    })
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn numeric_values(ids: &[String]) -> Option<Vec<f64>> {
    ids.iter().map(|id| parse_number(id)).collect()
}

fn symbols(ids: Vec<String>, values: Option<Vec<f64>>) -> Vec<Symbol> {
    match values {
        Some(v) => ids.into_iter().zip(v).map(|(id, v)| Symbol::numeric(id, v)).collect(),
        None => ids.into_iter().map(Symbol::new).collect(),
    }
}

fn intern(id: &str, index: &mut HashMap<String, usize>, ids: &mut Vec<String>) -> usize {
    if let Some(&i) = index.get(id) {
        return i;
    }
    index.insert(id.to_owned(), ids.len());
    ids.push(id.to_owned());
    ids.len() - 1
}
