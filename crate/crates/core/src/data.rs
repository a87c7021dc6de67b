//! Columnar datasets and strict CSV ingestion.
//!
//! A [`Dataset`] holds numeric and categorical feature columns plus either a
//! numeric target (regression) or a class-label target (classification).
//! Categorical columns carry a label map; codes are stored 0-based and
//! exposed on numeric axes as the contiguous integer coding `1..=K'`.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Numeric(Vec<f64>),
    Categorical {
        levels: Vec<String>,
        codes: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureColumn {
    pub name: String,
    pub values: ColumnValues,
}

impl FeatureColumn {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        FeatureColumn {
            name: name.into(),
            values: ColumnValues::Numeric(values),
        }
    }

    pub fn categorical(name: impl Into<String>, levels: Vec<String>, codes: Vec<u32>) -> Self {
        FeatureColumn {
            name: name.into(),
            values: ColumnValues::Categorical { levels, codes },
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            ColumnValues::Numeric(v) => v.len(),
            ColumnValues::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.values, ColumnValues::Categorical { .. })
    }

    pub fn n_levels(&self) -> usize {
        match &self.values {
            ColumnValues::Numeric(_) => 0,
            ColumnValues::Categorical { levels, .. } => levels.len(),
        }
    }

    /// Value of row `i` on a numeric axis: the raw value for numeric
    /// columns, the integer coding `code + 1` for categorical ones.
    pub fn numeric_coded(&self, i: usize) -> f64 {
        match &self.values {
            ColumnValues::Numeric(v) => v[i],
            ColumnValues::Categorical { codes, .. } => (codes[i] + 1) as f64,
        }
    }

    /// Display form of row `i` (level label for categorical columns).
    pub fn display(&self, i: usize) -> String {
        match &self.values {
            ColumnValues::Numeric(v) => format!("{}", v[i]),
            ColumnValues::Categorical { levels, codes } => levels[codes[i] as usize].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Numeric(Vec<f64>),
    Classes {
        labels: Vec<String>,
        codes: Vec<u32>,
    },
}

impl Target {
    pub fn len(&self) -> usize {
        match self {
            Target::Numeric(v) => v.len(),
            Target::Classes { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Target::Numeric(_) => 0,
            Target::Classes { labels, .. } => labels.len(),
        }
    }

    pub fn display(&self, i: usize) -> String {
        match self {
            Target::Numeric(v) => format!("{}", v[i]),
            Target::Classes { labels, codes } => labels[codes[i] as usize].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n_rows: usize,
    pub columns: Vec<FeatureColumn>,
    pub target: Target,
}

impl Dataset {
    pub fn new(columns: Vec<FeatureColumn>, target: Target) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::EmptyDataset("no feature columns".into()));
        }
        let n_rows = target.len();
        if n_rows == 0 {
            return Err(Error::EmptyDataset("no rows".into()));
        }
        for col in &columns {
            if col.len() != n_rows {
                return Err(Error::SchemaMismatch(format!(
                    "column '{}' has {} rows, target has {}",
                    col.name,
                    col.len(),
                    n_rows
                )));
            }
            if let ColumnValues::Categorical { levels, codes } = &col.values {
                if codes.iter().any(|&c| c as usize >= levels.len()) {
                    return Err(Error::SchemaMismatch(format!(
                        "column '{}' has a code outside its level map",
                        col.name
                    )));
                }
            }
        }
        if let Target::Classes { labels, codes } = &target {
            if codes.iter().any(|&c| c as usize >= labels.len()) {
                return Err(Error::SchemaMismatch(
                    "target has a code outside its label map".into(),
                ));
            }
        }
        Ok(Dataset {
            n_rows,
            columns,
            target,
        })
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn n_classes(&self) -> usize {
        self.target.n_classes()
    }

    pub fn numeric_target(&self) -> Option<&[f64]> {
        match &self.target {
            Target::Numeric(v) => Some(v),
            Target::Classes { .. } => None,
        }
    }

    pub fn class_codes(&self) -> Option<&[u32]> {
        match &self.target {
            Target::Numeric(_) => None,
            Target::Classes { codes, .. } => Some(codes),
        }
    }
}

/// Target parsing mode for [`load_csv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Numeric,
    Classes,
}

/// Schema hints for [`load_csv`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Name of the target column.
    pub target: String,
    pub target_kind: TargetKind,
    /// Columns forced to categorical even when every value parses as a number.
    pub categorical: Vec<String>,
    /// Columns to drop entirely.
    pub ignore: Vec<String>,
    pub delimiter: u8,
    /// Column names for headerless files; `None` reads a header row.
    pub headers: Option<Vec<String>>,
}

impl LoadOptions {
    pub fn new(target: impl Into<String>, target_kind: TargetKind) -> Self {
        LoadOptions {
            target: target.into(),
            target_kind,
            categorical: Vec::new(),
            ignore: Vec::new(),
            delimiter: b',',
            headers: None,
        }
    }
}

fn is_missing(field: &str) -> bool {
    matches!(field, "" | "NA" | "na" | "N/A" | "?" | "NaN" | "nan")
}

/// Load a strict CSV file: header (or supplied names), no missing values,
/// fixed row length. Columns whose every value parses as a number become
/// numeric unless forced categorical; anything else becomes categorical
/// with levels in first-appearance order.
pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(opts.headers.is_none())
        .flexible(true)
        .from_reader(file);

    let names: Vec<String> = match &opts.headers {
        Some(h) => h.clone(),
        None => reader
            .headers()
            .map_err(|e| Error::CsvParse {
                line: 1,
                msg: e.to_string(),
            })?
            .iter()
            .map(|s| s.trim().to_string())
            .collect(),
    };
    let n_cols = names.len();
    let header_lines = if opts.headers.is_none() { 1 } else { 0 };

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); n_cols];
    for (rec_idx, record) in reader.records().enumerate() {
        let line = rec_idx as u64 + 1 + header_lines;
        let record = record.map_err(|e| Error::CsvParse {
            line,
            msg: e.to_string(),
        })?;
        if record.len() != n_cols {
            return Err(Error::CsvParse {
                line,
                msg: format!("expected {} fields, found {}", n_cols, record.len()),
            });
        }
        for (c, field) in record.iter().enumerate() {
            let field = field.trim();
            if is_missing(field) {
                return Err(Error::MissingValue {
                    line,
                    column: names[c].clone(),
                });
            }
            cells[c].push(field.to_string());
        }
    }

    let n_rows = cells[0].len();
    if n_rows == 0 {
        return Err(Error::EmptyDataset(format!(
            "{} contains a header but no data rows",
            path.display()
        )));
    }

    let target_idx = names
        .iter()
        .position(|n| *n == opts.target)
        .ok_or_else(|| {
            Error::SchemaMismatch(format!("target column '{}' not found", opts.target))
        })?;

    let mut columns = Vec::new();
    let mut target = None;
    for (c, name) in names.iter().enumerate() {
        let raw = &cells[c];
        if c == target_idx {
            target = Some(parse_target(name, raw, opts.target_kind)?);
            continue;
        }
        if opts.ignore.iter().any(|ig| ig == name) {
            continue;
        }
        let force_cat = opts.categorical.iter().any(|cc| cc == name);
        columns.push(parse_column(name, raw, force_cat));
    }

    Dataset::new(columns, target.expect("target column consumed above"))
}

fn all_numeric(raw: &[String]) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(raw.len());
    for v in raw {
        out.push(v.parse::<f64>().ok()?);
    }
    Some(out)
}

fn encode_levels(raw: &[String]) -> (Vec<String>, Vec<u32>) {
    let mut levels: Vec<String> = Vec::new();
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut codes = Vec::with_capacity(raw.len());
    for v in raw {
        let code = match index.get(v.as_str()) {
            Some(&c) => c,
            None => {
                let c = levels.len() as u32;
                levels.push(v.clone());
                index.insert(v.clone(), c);
                c
            }
        };
        codes.push(code);
    }
    (levels, codes)
}

fn parse_column(name: &str, raw: &[String], force_categorical: bool) -> FeatureColumn {
    if !force_categorical {
        if let Some(values) = all_numeric(raw) {
            return FeatureColumn::numeric(name, values);
        }
    }
    let (levels, codes) = encode_levels(raw);
    FeatureColumn::categorical(name, levels, codes)
}

fn parse_target(name: &str, raw: &[String], kind: TargetKind) -> Result<Target> {
    match kind {
        TargetKind::Numeric => {
            let values = all_numeric(raw).ok_or_else(|| {
                Error::SchemaMismatch(format!(
                "target column '{name}' has non-numeric values but a numeric target was requested"
            ))
            })?;
            Ok(Target::Numeric(values))
        }
        TargetKind::Classes => {
            let (labels, codes) = encode_levels(raw);
            Ok(Target::Classes { labels, codes })
        }
    }
}

/// Write a dataset (plus optional extra numeric columns) as a plain CSV.
pub fn write_csv(
    path: impl AsRef<Path>,
    dataset: &Dataset,
    extras: &[(&str, &[f64])],
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let mut header: Vec<String> = dataset.columns.iter().map(|c| c.name.clone()).collect();
    header.push("target".into());
    for (name, _) in extras {
        header.push((*name).into());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..dataset.n_rows {
        let mut fields: Vec<String> = dataset.columns.iter().map(|c| c.display(i)).collect();
        fields.push(dataset.target.display(i));
        for (_, vals) in extras {
            fields.push(format!("{}", vals[i]));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}
