//! Feature-file input and output: a CSV layout for interop and a compact
//! binary layout for large pools, plus format sniffing.
//!
//! CSV files carry a `id,label,f0,...,f{d-1}` header (the `label` column is
//! optional, and may be entirely empty for unlabeled pools). Binary files
//! start with the magic `SUBSEL01`, then little-endian `u32` row count,
//! dimension, and label-presence flag, then row-major little-endian `f64`
//! features, then (if flagged) `u32` labels, then length-prefixed UTF-8 ids.
//!
//! Label values in CSV may be arbitrary class names; they are mapped to dense
//! ids at ingestion (numerically when every value is an unsigned integer,
//! lexicographically otherwise) and the mapping travels with the dataset.

use crate::data::{DataError, FeatureDataset};
use ndarray::Array2;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

pub const BINARY_MAGIC: &[u8; 8] = b"SUBSEL01";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Binary,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("row {row}, column {column}: {message}")]
    BadField {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("truncated input: {0}")]
    Truncated(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// A dataset together with the class-name mapping recorded at ingestion:
/// `label_mapping[dense_id]` is the original name of that class.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: FeatureDataset,
    pub label_mapping: Option<Vec<String>>,
}

/// Reads a feature file, sniffing the format from the leading magic bytes.
pub fn load_dataset(path: &Path) -> Result<LoadedDataset, IoError> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        read_dataset_binary(&bytes)
    } else {
        read_dataset_csv(&bytes)
    }
}

/// Writes `dataset` to `path` in the requested format. Labels are written as
/// their dense ids; use the ingestion mapping to recover original names.
pub fn save_dataset(
    path: &Path,
    dataset: &FeatureDataset,
    format: FileFormat,
) -> Result<(), IoError> {
    let mut out = Vec::new();
    match format {
        FileFormat::Csv => write_dataset_csv(dataset, &mut out)?,
        FileFormat::Binary => write_dataset_binary(dataset, &mut out)?,
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_dataset_csv<W: Write>(dataset: &FeatureDataset, writer: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    let labeled = dataset.is_labeled();
    let mut header = vec!["id".to_string()];
    if labeled {
        header.push("label".to_string());
    }
    for j in 0..dataset.dim() {
        header.push(format!("f{j}"));
    }
    w.write_record(&header)?;
    let mut field = String::new();
    for i in 0..dataset.n() {
        let mut record = vec![dataset.ids()[i].clone()];
        if let Some(labels) = dataset.labels() {
            record.push(labels[i].to_string());
        }
        for &v in dataset.row(i) {
            field.clear();
            write!(field, "{v}").expect("formatting a float cannot fail");
            record.push(field.clone());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset_binary<W: Write>(
    dataset: &FeatureDataset,
    mut writer: W,
) -> Result<(), IoError> {
    writer.write_all(BINARY_MAGIC)?;
    writer.write_all(&(dataset.n() as u32).to_le_bytes())?;
    writer.write_all(&(dataset.dim() as u32).to_le_bytes())?;
    writer.write_all(&u32::from(dataset.is_labeled()).to_le_bytes())?;
    for i in 0..dataset.n() {
        for &v in dataset.row(i) {
            writer.write_all(&v.to_le_bytes())?;
        }
    }
    if let Some(labels) = dataset.labels() {
        for &y in labels {
            writer.write_all(&y.to_le_bytes())?;
        }
    }
    for id in dataset.ids() {
        writer.write_all(&(id.len() as u32).to_le_bytes())?;
        writer.write_all(id.as_bytes())?;
    }
    Ok(())
}

/// Parses the CSV layout. Diagnostics use 1-based rows counting the header
/// line and 1-based columns.
pub fn read_dataset_csv(bytes: &[u8]) -> Result<LoadedDataset, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut records = reader.records();

    let header = match records.next() {
        Some(record) => record.map_err(|e| IoError::Malformed(e.to_string()))?,
        None => return Err(IoError::BadHeader("empty file".to_string())),
    };
    if header.get(0) != Some("id") {
        return Err(IoError::BadHeader(format!(
            "first column must be \"id\", got {:?}",
            header.get(0).unwrap_or("")
        )));
    }
    let labeled_layout = header.get(1) == Some("label");
    let feature_start = if labeled_layout { 2 } else { 1 };
    let dim = header.len() - feature_start;
    if dim == 0 {
        return Err(IoError::BadHeader("no feature columns".to_string()));
    }
    for (j, name) in header.iter().skip(feature_start).enumerate() {
        if name != format!("f{j}") {
            return Err(IoError::BadHeader(format!(
                "feature column {} must be named \"f{j}\", got {name:?}",
                feature_start + j + 1
            )));
        }
    }

    let mut ids = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut values = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| IoError::Malformed(format!("row {row}: {e}")))?;
        if record.len() != header.len() {
            return Err(IoError::Malformed(format!(
                "row {row}: expected {} fields, got {}",
                header.len(),
                record.len()
            )));
        }
        ids.push(record[0].to_string());
        if labeled_layout {
            raw_labels.push(record[1].to_string());
        }
        for (j, field) in record.iter().skip(feature_start).enumerate() {
            let v: f64 = field.parse().map_err(|_| IoError::BadField {
                row,
                column: feature_start + j + 1,
                message: format!("not a number: {field:?}"),
            })?;
            values.push(v);
        }
    }
    if ids.is_empty() {
        return Err(IoError::Malformed("no data rows".to_string()));
    }

    let features = Array2::from_shape_vec((ids.len(), dim), values)
        .expect("row-major values match the parsed shape");
    let (labels, label_mapping) = map_labels(&raw_labels, labeled_layout)?;
    let dataset = FeatureDataset::new(features, labels, ids)?;
    let label_mapping = label_mapping.or_else(|| identity_mapping(&dataset));
    Ok(LoadedDataset {
        dataset,
        label_mapping,
    })
}

/// Dense labels plus the class-name table they were mapped through, when any.
type MappedLabels = (Option<Vec<u32>>, Option<Vec<String>>);

/// Turns raw label strings into dense ids: unlabeled when the column is
/// absent or entirely empty, numeric when every value parses as `u32`,
/// otherwise lexicographic over the distinct names.
fn map_labels(raw: &[String], labeled_layout: bool) -> Result<MappedLabels, IoError> {
    if !labeled_layout || raw.iter().all(String::is_empty) {
        return Ok((None, None));
    }
    if let Some(i) = raw.iter().position(String::is_empty) {
        return Err(IoError::Malformed(format!(
            "row {}: empty label in a labeled file",
            i + 2
        )));
    }
    if raw.iter().all(|s| s.parse::<u32>().is_ok()) {
        let labels = raw.iter().map(|s| s.parse().unwrap()).collect();
        return Ok((Some(labels), None));
    }
    let mut names: Vec<String> = raw.to_vec();
    names.sort_unstable();
    names.dedup();
    let labels = raw
        .iter()
        .map(|s| names.binary_search(s).unwrap() as u32)
        .collect();
    Ok((Some(labels), Some(names)))
}

fn identity_mapping(dataset: &FeatureDataset) -> Option<Vec<String>> {
    dataset
        .num_classes()
        .map(|c| (0..c).map(|y| y.to_string()).collect())
}

/// Parses the binary layout, including the leading magic.
pub fn read_dataset_binary(bytes: &[u8]) -> Result<LoadedDataset, IoError> {
    let mut cursor = Cursor {
        bytes,
        at: 0,
    };
    let magic = cursor.take(8, "magic")?;
    if magic != BINARY_MAGIC {
        return Err(IoError::Malformed(format!(
            "bad magic {:?}, expected {:?}",
            &magic[..8.min(magic.len())],
            BINARY_MAGIC
        )));
    }
    let n = cursor.u32("row count")? as usize;
    let d = cursor.u32("dimension")? as usize;
    let flag = cursor.u32("label flag")?;
    if flag > 1 {
        return Err(IoError::Malformed(format!(
            "label flag must be 0 or 1, got {flag}"
        )));
    }
    if n == 0 || d == 0 {
        return Err(IoError::Malformed(format!(
            "need positive row count and dimension, got n = {n}, d = {d}"
        )));
    }

    let feature_bytes = cursor.take(n * d * 8, "features")?;
    let values: Vec<f64> = feature_bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let features =
        Array2::from_shape_vec((n, d), values).expect("chunk count matches the declared shape");

    let labels = if flag == 1 {
        let label_bytes = cursor.take(n * 4, "labels")?;
        Some(
            label_bytes
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect::<Vec<u32>>(),
        )
    } else {
        None
    };

    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let len = cursor.u32(&format!("length of id {i}"))? as usize;
        let raw = cursor.take(len, &format!("id {i}"))?;
        let id = std::str::from_utf8(raw)
            .map_err(|_| IoError::Malformed(format!("id {i} is not valid UTF-8")))?;
        ids.push(id.to_string());
    }
    if cursor.at != bytes.len() {
        return Err(IoError::Malformed(format!(
            "{} trailing bytes after the id table",
            bytes.len() - cursor.at
        )));
    }

    let dataset = FeatureDataset::new(features, labels, ids)?;
    let label_mapping = identity_mapping(&dataset);
    Ok(LoadedDataset {
        dataset,
        label_mapping,
    })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8], IoError> {
        let end = self.at.checked_add(len).ok_or_else(|| {
            IoError::Malformed(format!("{what}: implausible length {len}"))
        })?;
        if end > self.bytes.len() {
            return Err(IoError::Truncated(format!(
                "{what}: need {len} bytes at offset {}, file has {}",
                self.at,
                self.bytes.len()
            )));
        }
        let slice = &self.bytes[self.at..end];
        self.at = end;
        Ok(slice)
    }

    fn u32(&mut self, what: &str) -> Result<u32, IoError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}
