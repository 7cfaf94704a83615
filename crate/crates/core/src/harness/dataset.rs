//! Labeled datasets and file ingestion (CSV, TSV, JSON Lines).

use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::ClassIndex;

/// One `(text, class)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledText {
    pub text: String,
    pub label: ClassIndex,
}

impl LabeledText {
    pub fn new(text: impl Into<String>, label: ClassIndex) -> Self {
        LabeledText {
            text: text.into(),
            label,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Tsv,
    Jsonl,
}

impl DataFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(DataFormat::Csv),
            "tsv" => Some(DataFormat::Tsv),
            "jsonl" | "ndjson" => Some(DataFormat::Jsonl),
            _ => None,
        }
    }
}

/// Named train/val/test splits over `n_class` classes.
///
/// Rows without a split tag land in `train`; `val` and `test` may be empty
/// until the harness derives them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub name: String,
    pub n_class: usize,
    pub label_names: Option<Vec<String>>,
    pub train: Vec<LabeledText>,
    pub val: Vec<LabeledText>,
    pub test: Vec<LabeledText>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks that every label is in range.
    pub fn validate(&self) -> Result<()> {
        if self.n_class < 2 {
            return Err(Error::domain(format!("dataset {} has fewer than 2 classes", self.name)));
        }
        for (split, rows) in [("train", &self.train), ("val", &self.val), ("test", &self.test)] {
            if let Some(r) = rows.iter().find(|r| r.label.0 >= self.n_class) {
                return Err(Error::domain(format!(
                    "{split} example {:?} has class {} >= n_class {}",
                    r.text, r.label.0, self.n_class
                )));
            }
        }
        Ok(())
    }

    /// All rows regardless of split, train first.
    pub fn all_rows(&self) -> impl Iterator<Item = &LabeledText> {
        self.train.iter().chain(&self.val).chain(&self.test)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SplitTag {
    Train,
    Val,
    Test,
}

struct RawRow {
    location: String,
    text: String,
    label: String,
    split: SplitTag,
}

fn parse_split(s: Option<&str>, location: &str) -> Result<SplitTag> {
    match s.map(|s| s.trim().to_ascii_lowercase()).as_deref() {
        None | Some("") | Some("train") => Ok(SplitTag::Train),
        Some("val") | Some("valid") | Some("validation") | Some("dev") => Ok(SplitTag::Val),
        Some("test") => Ok(SplitTag::Test),
        Some(other) => Err(Error::Ingestion {
            location: location.into(),
            message: format!("unknown split {other:?}"),
        }),
    }
}

/// Loads a dataset file.
///
/// Classes come from `label_names` when given, else from a sidecar file
/// `<path>.labels` (one label per line) when present, else from the distinct
/// labels in the file (numeric order when all are integers, lexicographic
/// otherwise). A label outside an explicit label map is an error naming the row.
pub fn load_dataset(path: &Path, format: DataFormat, label_names: Option<&[String]>) -> Result<LabeledDataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let rows = match format {
        DataFormat::Jsonl => read_jsonl(reader)?,
        DataFormat::Csv => read_delimited(reader, b',')?,
        DataFormat::Tsv => read_delimited(reader, b'\t')?,
    };
    let sidecar = {
        let mut p = path.as_os_str().to_owned();
        p.push(".labels");
        std::path::PathBuf::from(p)
    };
    let names = match label_names {
        Some(n) => Some(n.to_vec()),
        None if sidecar.exists() => Some(read_label_file(&sidecar)?),
        None => None,
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    build_dataset(name, rows, names)
}

fn read_label_file(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

fn build_dataset(name: String, rows: Vec<RawRow>, label_names: Option<Vec<String>>) -> Result<LabeledDataset> {
    if rows.is_empty() {
        return Err(Error::Ingestion {
            location: name,
            message: "file contains no examples".into(),
        });
    }
    let explicit = label_names.is_some();
    let names = match label_names {
        Some(n) => n,
        None => infer_label_names(&rows),
    };
    let mut ds = LabeledDataset {
        name,
        n_class: names.len(),
        label_names: Some(names.clone()),
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for row in rows {
        let idx = names.iter().position(|n| *n == row.label).ok_or_else(|| Error::Ingestion {
            location: row.location.clone(),
            message: format!(
                "label {:?} not in label map{}",
                row.label,
                if explicit { "" } else { " (inferred)" }
            ),
        })?;
        let ex = LabeledText::new(row.text, ClassIndex(idx));
        match row.split {
            SplitTag::Train => ds.train.push(ex),
            SplitTag::Val => ds.val.push(ex),
            SplitTag::Test => ds.test.push(ex),
        }
    }
    if ds.n_class < 2 {
        return Err(Error::Ingestion {
            location: ds.name,
            message: format!("need at least 2 classes, found {}", ds.n_class),
        });
    }
    Ok(ds)
}

fn infer_label_names(rows: &[RawRow]) -> Vec<String> {
    let distinct: BTreeSet<&str> = rows.iter().map(|r| r.label.as_str()).collect();
    let mut names: Vec<String> = distinct.into_iter().map(str::to_owned).collect();
    if names.iter().all(|n| n.parse::<i64>().is_ok()) {
        names.sort_by_key(|n| n.parse::<i64>().unwrap_or(0));
    }
    names
}

fn label_to_string(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        serde_json::Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<RawRow>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let location = format!("line {}", i + 1);
        let line = line.map_err(|e| Error::Ingestion {
            location: location.clone(),
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let v: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Ingestion {
            location: location.clone(),
            message: format!("invalid JSON: {e}"),
        })?;
        let text = v.get("text").and_then(|t| t.as_str()).ok_or_else(|| Error::Ingestion {
            location: location.clone(),
            message: "missing string field \"text\"".into(),
        })?;
        let label = v.get("label").and_then(label_to_string).ok_or_else(|| Error::Ingestion {
            location: location.clone(),
            message: "missing field \"label\"".into(),
        })?;
        let split = parse_split(v.get("split").and_then(|s| s.as_str()), &location)?;
        rows.push(RawRow {
            location,
            text: text.to_owned(),
            label,
            split,
        });
    }
    Ok(rows)
}

fn read_delimited<R: std::io::Read>(reader: R, delimiter: u8) -> Result<Vec<RawRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Ingestion {
            location: "line 1".into(),
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let (text_col, label_col) = match (col("text"), col("label")) {
        (Some(t), Some(l)) => (t, l),
        _ => {
            return Err(Error::Ingestion {
                location: "line 1".into(),
                message: "header must contain \"text\" and \"label\" columns".into(),
            })
        }
    };
    let split_col = col("split");
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Ingestion {
            location: format!("row {}", i + 1),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(i as u64 + 2);
        let location = format!("row {} (line {line})", i + 1);
        let text = rec.get(text_col).unwrap_or_default().to_owned();
        let label = rec.get(label_col).unwrap_or_default().trim().to_owned();
        let split = parse_split(split_col.and_then(|c| rec.get(c)), &location)?;
        rows.push(RawRow {
            location,
            text,
            label,
            split,
        });
    }
    Ok(rows)
}
