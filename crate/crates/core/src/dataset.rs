//! Labelled training sets and their CSV form.
//!
//! CSV layout: one row per example, feature columns followed by a final
//! label column in `{-1, +1}` (`{0, 1}` is accepted, with `0 -> -1`). A
//! header row is detected when the first row does not parse as numbers.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// A label in `{-1, +1}`.
pub type Label = i8;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    points: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl TrainingSet {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Dataset("training set must contain at least one example".into()));
        }
        if points.len() != labels.len() {
            return Err(Error::Dataset(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        let dim = points[0].len();
        if let Some(i) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::Dataset(format!(
                "example {i} has dimension {} (expected {dim})",
                points[i].len()
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y != 1 && y != -1) {
            return Err(Error::Dataset(format!("label {} at example {i} is not +-1", labels[i])));
        }
        Ok(Self { points, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Dataset(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Dataset(e.to_string()))?;
            if record.len() < 2 {
                return Err(Error::Dataset(format!(
                    "row {}: need at least one feature and a label",
                    row + 1
                )));
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            let values = match parsed {
                Ok(v) => v,
                Err(_) if row == 0 => continue,
                Err(e) => return Err(Error::Dataset(format!("row {}: {e}", row + 1))),
            };
            let (label, features) = values.split_last().expect("len >= 2");
            let label = match *label {
                1.0 => 1,
                -1.0 | 0.0 => -1,
                l => return Err(Error::Dataset(format!("row {}: label {l} not in {{-1,0,1}}", row + 1))),
            };
            points.push(features.to_vec());
            labels.push(label);
        }
        Self::new(points, labels)
    }

    /// Writes the set as headerless CSV with labels in `{-1, +1}`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for (p, y) in self.points.iter().zip(&self.labels) {
            let mut row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            row.push(y.to_string());
            wtr.write_record(&row).map_err(|e| Error::Dataset(e.to_string()))?;
        }
        wtr.flush().map_err(|e| Error::Dataset(e.to_string()))
    }
}
