//! Feature matrix plus binary labels, with a plain CSV representation.
//!
//! CSV layout: one header row naming the feature columns (`f1..fd` for
//! generated data, `pair_<a>_<b>` for tree vectors) and an optional trailing
//! `label` column holding 0 or 1. Values are written in shortest round-trip
//! decimal form.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

pub const LABEL_COLUMN: &str = "label";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    feature_names: Vec<String>,
    features: Vec<Vec<f64>>,
    labels: Option<Vec<u8>>,
    /// Generator name, seed and parameters. Not part of the CSV.
    pub provenance: BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, features: Vec<Vec<f64>>, labels: Option<Vec<u8>>) -> Result<Self> {
        let d = feature_names.len();
        if d == 0 {
            return Err(Error::invalid("dataset needs at least one feature"));
        }
        for row in &features {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("dataset features"));
            }
        }
        if let Some(l) = &labels {
            if l.len() != features.len() {
                return Err(Error::DimensionMismatch {
                    expected: features.len(),
                    found: l.len(),
                });
            }
            if l.iter().any(|&v| v > 1) {
                return Err(Error::invalid("labels must be 0 or 1"));
            }
        }
        Ok(Dataset {
            feature_names,
            features,
            labels,
            provenance: BTreeMap::new(),
        })
    }

    /// Features named `f1..fd`.
    pub fn with_default_names(features: Vec<Vec<f64>>, labels: Option<Vec<u8>>) -> Result<Self> {
        let d = features.first().map_or(0, Vec::len);
        Dataset::new(default_names(d), features, labels)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    pub fn labels(&self) -> Result<&[u8]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::invalid("dataset has no label column"))
    }

    /// Replaces all labels with `label`.
    pub fn relabel(mut self, label: u8) -> Result<Self> {
        if label > 1 {
            return Err(Error::invalid("labels must be 0 or 1"));
        }
        self.labels = Some(vec![label; self.len()]);
        Ok(self)
    }

    /// Rows of `self` followed by rows of `other`; feature names must agree.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.feature_names != other.feature_names {
            return Err(Error::invalid("datasets have different feature columns"));
        }
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            (None, None) => None,
            _ => return Err(Error::invalid("cannot concatenate labelled and unlabelled data")),
        };
        let mut out = Dataset::new(
            self.feature_names.clone(),
            self.features.iter().chain(&other.features).cloned().collect(),
            labels,
        )?;
        out.provenance = self.provenance.clone();
        Ok(out)
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            features: rows.iter().map(|&i| self.features[i].clone()).collect(),
            labels: self.labels.as_ref().map(|l| rows.iter().map(|&i| l[i]).collect()),
            provenance: self.provenance.clone(),
        }
    }

    /// Multiplies every feature by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Dataset> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid(format!("scale must be positive, got {factor}")));
        }
        let mut out = self.clone();
        for row in &mut out.features {
            row.iter_mut().for_each(|v| *v *= factor);
        }
        Ok(out)
    }

    /// Stratified seeded split; returns `(train, test)`. Each class puts
    /// `round(n_class * test_fraction)` rows in the test set.
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(0.0..1.0).contains(&test_fraction) {
            return Err(Error::invalid("test fraction must lie in [0, 1)"));
        }
        let labels = self.labels()?;
        let mut rng = rng::seeded(seed, rng::stream::SPLIT);
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for class in 0..=1u8 {
            let mut idx: Vec<usize> = (0..self.len()).filter(|&i| labels[i] == class).collect();
            idx.shuffle(&mut rng);
            let n_test = (idx.len() as f64 * test_fraction).round() as usize;
            test.extend_from_slice(&idx[..n_test]);
            train.extend_from_slice(&idx[n_test..]);
        }
        train.sort_unstable();
        test.sort_unstable();
        Ok((self.subset(&train), self.subset(&test)))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let csv_err = |e: csv::Error| Error::Csv {
            path: "<output>".into(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        if self.labels.is_some() {
            header.push(LABEL_COLUMN);
        }
        w.write_record(&header).map_err(csv_err)?;
        let mut record = Vec::with_capacity(header.len());
        for (i, row) in self.features.iter().enumerate() {
            record.clear();
            record.extend(row.iter().map(|v| v.to_string()));
            if let Some(l) = &self.labels {
                record.push(l[i].to_string());
            }
            w.write_record(&record).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<output>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv<R: Read>(reader: R, source: &Path) -> Result<Self> {
        let err = |message: String| Error::Csv {
            path: source.to_path_buf(),
            message,
        };
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = r
            .headers()
            .map_err(|e| err(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let has_label = header.last().map(String::as_str) == Some(LABEL_COLUMN);
        let names: Vec<String> = if has_label {
            header[..header.len() - 1].to_vec()
        } else {
            header.clone()
        };
        if names.iter().any(|n| n == LABEL_COLUMN) {
            return Err(err("`label` must be the last column".into()));
        }
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| err(e.to_string()))?;
            let row_no = line + 2;
            if rec.len() != header.len() {
                return Err(err(format!("row {row_no}: expected {} fields, found {}", header.len(), rec.len())));
            }
            let mut row = Vec::with_capacity(names.len());
            for (field, name) in rec.iter().zip(&names) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| err(format!("row {row_no}, column `{name}`: `{field}` is not a number")))?;
                if !v.is_finite() {
                    return Err(err(format!("row {row_no}, column `{name}`: non-finite value")));
                }
                row.push(v);
            }
            if has_label {
                let field = &rec[names.len()];
                let l = match field {
                    "0" => 0,
                    "1" => 1,
                    other => return Err(err(format!("row {row_no}: label `{other}` is not 0 or 1"))),
                };
                labels.push(l);
            }
            features.push(row);
        }
        Dataset::new(names, features, has_label.then_some(labels)).map_err(|e| err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Dataset::read_csv(std::io::BufReader::new(file), path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file)).map_err(|e| match e {
            Error::Csv { message, .. } => Error::Csv {
                path: path.to_path_buf(),
                message,
            },
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })
    }
}

pub fn default_names(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("f{i}")).collect()
}
