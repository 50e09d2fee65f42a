use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};
use uvpriv::ingest::{self, ColumnRef, Dataset, Delimiter, LoadOptions};
use uvpriv::{Error, JointRange, Result};

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Delimited file with one record per row.
    #[arg(long, conflicts_with = "pairs", required_unless_present = "pairs")]
    pub input: Option<PathBuf>,

    /// Sensitive column: header name or zero-based index.
    #[arg(long = "s", default_value = "0")]
    pub s_column: String,

    /// Public column: header name or zero-based index.
    #[arg(long = "x", default_value = "1")]
    pub x_column: String,

    /// Missing-value sentinel; repeat for several. Defaults to -9, empty and ?.
    #[arg(long, allow_hyphen_values = true)]
    pub missing: Vec<String>,

    /// The file has no header row.
    #[arg(long)]
    pub no_header: bool,

    /// Field separator: a single character, `tab`, or `whitespace`.
    #[arg(long, default_value = ",")]
    pub delimiter: String,

    /// Inline joint range, e.g. "s1:x1,s1:x2,s2:x1".
    #[arg(long)]
    pub pairs: Option<String>,

    /// Numeric x-values for inline pairs, in x-alphabet order or as id=value.
    #[arg(long, allow_hyphen_values = true)]
    pub x_values: Option<String>,
}

pub struct Loaded {
    pub joint_range: JointRange,
    pub dataset: Option<Dataset>,
}

impl InputArgs {
    pub fn load(&self) -> Result<Loaded> {
        let loaded = match (&self.input, &self.pairs) {
            (Some(path), _) => {
                let ds = ingest::load_csv(path, &col(&self.s_column), &col(&self.x_column), &self.options()?)?;
                Loaded {
                    joint_range: ds.joint_range.clone(),
                    dataset: Some(ds),
                }
            }
            (None, Some(pairs)) => Loaded {
                joint_range: parse_pairs(pairs)?,
                dataset: None,
            },
            (None, None) => return Err(Error::Config("either --input or --pairs is required".into())),
        };
        match &self.x_values {
            Some(v) => Ok(Loaded {
                joint_range: apply_values(loaded.joint_range, v)?,
                dataset: loaded.dataset,
            }),
            None => Ok(loaded),
        }
    }

    pub fn options(&self) -> Result<LoadOptions> {
        let delimiter = match self.delimiter.as_str() {
            "whitespace" | "ws" => Delimiter::Whitespace,
            "tab" | "\\t" => Delimiter::Byte(b'\t'),
            d if d.len() == 1 => Delimiter::Byte(d.as_bytes()[0]),
            d => return Err(Error::Config(format!("unsupported delimiter {d:?}"))),
        };
        let mut opts = LoadOptions {
            has_header: !self.no_header,
            delimiter,
            ..LoadOptions::default()
        };
        if !self.missing.is_empty() {
            opts.missing = self.missing.clone();
        }
        Ok(opts)
    }

    pub fn manifest(&self) -> Value {
        match (&self.input, &self.pairs) {
            (Some(path), _) => json!({
                "path": path,
                "s": self.s_column,
                "x": self.x_column,
                "missing": self.options().map(|o| o.missing).unwrap_or_default(),
                "header": !self.no_header,
                "delimiter": self.delimiter,
            }),
            _ => json!({ "pairs": self.pairs, "x_values": self.x_values }),
        }
    }
}

fn col(s: &str) -> ColumnRef {
    s.parse().expect("infallible")
}

pub fn parse_pairs(text: &str) -> Result<JointRange> {
    let mut pairs = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (s, x) = item
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("pair {item:?} is not of the form s:x")))?;
        pairs.push((s.trim().to_owned(), x.trim().to_owned()));
    }
    JointRange::from_id_pairs(pairs).map_err(|e| Error::Config(format!("--pairs: {e}")))
}

fn apply_values(jr: JointRange, text: &str) -> Result<JointRange> {
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("x-value {v:?} is not a number")))
    };
    let mut values = vec![None; jr.x_len()];
    if items.iter().all(|i| i.contains('=')) {
        for item in items {
            let (id, v) = item.split_once('=').expect("checked");
            let x = jr
                .x_index_of(id.trim())
                .ok_or_else(|| Error::Config(format!("unknown x-symbol {id:?}")))?;
            values[x] = Some(parse(v)?);
        }
    } else {
        if items.len() != jr.x_len() {
            return Err(Error::Config(format!(
                "expected {} x-values, got {}",
                jr.x_len(),
                items.len()
            )));
        }
        for (slot, v) in values.iter_mut().zip(items) {
            *slot = Some(parse(v)?);
        }
    }
    let values: Vec<f64> = values
        .into_iter()
        .enumerate()
        .map(|(x, v)| v.ok_or_else(|| Error::Config(format!("no value for {}", jr.x_alphabet()[x].id))))
        .collect::<Result<_>>()?;
    jr.with_x_values(&values).map_err(|e| Error::Config(e.to_string()))
}
