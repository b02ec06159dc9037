//! Flat numeric view of labeled edges shared by the rankers and learners.

use crate::error::{DecayError, Result};
use crate::features::{LabeledEdge, FEATURE_NAMES};

/// Row-major feature matrix plus binary classes. Built either from labeled
/// edges (15 fixed columns) or from arbitrary named columns, so the
/// learners also run on toy data.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    values: Vec<f64>,
    classes: Vec<u8>,
}

impl Dataset {
    pub fn from_edges(edges: &[LabeledEdge]) -> Dataset {
        let mut values = Vec::with_capacity(edges.len() * FEATURE_NAMES.len());
        let mut classes = Vec::with_capacity(edges.len());
        for e in edges {
            values.extend_from_slice(&e.features.to_array());
            classes.push(e.class);
        }
        Dataset {
            feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            values,
            classes,
        }
    }

    pub fn from_rows(
        feature_names: Vec<String>,
        rows: &[Vec<f64>],
        classes: Vec<u8>,
    ) -> Result<Dataset> {
        if rows.len() != classes.len() {
            return Err(DecayError::LengthMismatch { left: rows.len(), right: classes.len() });
        }
        let width = feature_names.len();
        let mut values = Vec::with_capacity(rows.len() * width);
        for row in rows {
            if row.len() != width {
                return Err(DecayError::LengthMismatch { left: row.len(), right: width });
            }
            values.extend_from_slice(row);
        }
        Ok(Dataset { feature_names, values, classes })
    }

    pub fn n_rows(&self) -> usize {
        self.classes.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let w = self.n_features();
        &self.values[r * w..(r + 1) * w]
    }

    pub fn value(&self, r: usize, f: usize) -> f64 {
        self.values[r * self.n_features() + f]
    }

    pub fn column(&self, f: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|r| self.value(r, f)).collect()
    }

    pub fn classes(&self) -> &[u8] {
        &self.classes
    }

    /// (n_persist, n_decay).
    pub fn class_counts(&self) -> (usize, usize) {
        let persist = self.classes.iter().filter(|&&c| c == 1).count();
        (persist, self.classes.len() - persist)
    }

    /// New dataset holding the given rows, in the given order.
    pub fn select(&self, rows: &[usize]) -> Dataset {
        let w = self.n_features();
        let mut values = Vec::with_capacity(rows.len() * w);
        let mut classes = Vec::with_capacity(rows.len());
        for &r in rows {
            values.extend_from_slice(self.row(r));
            classes.push(self.classes[r]);
        }
        Dataset { feature_names: self.feature_names.clone(), values, classes }
    }
}
