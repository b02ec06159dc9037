//! Descriptive statistics over extracted features: ranges, medians,
//! empirical CDFs, and the tie-aware Spearman correlation matrix.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{DecayError, Result};

/// One empirical-CDF sample point: the fraction of values ≤ `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub value: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStat {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub mean: f64,
    pub cdf: Vec<CdfPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSummary {
    pub n_edges: usize,
    pub features: Vec<FeatureStat>,
}

/// Median with the lower-of-the-two convention for even counts; keeps
/// count features integral.
pub fn lower_median(sorted: &[f64]) -> f64 {
    debug_assert!(!sorted.is_empty());
    sorted[(sorted.len() - 1) / 2]
}

/// Empirical CDF over the distinct values of a sorted sample.
fn full_ecdf(sorted: &[f64]) -> Vec<CdfPoint> {
    let n = sorted.len() as f64;
    let mut points = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        points.push(CdfPoint { value: v, fraction: j as f64 / n });
        i = j;
    }
    points
}

/// ECDF downsampled to at most `max_points` (always keeping the first and
/// last distinct values), for plot-ready output.
pub fn ecdf_points(values: &[f64], max_points: usize) -> Vec<CdfPoint> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let full = full_ecdf(&sorted);
    if full.len() <= max_points || max_points < 2 {
        return full;
    }
    let m = full.len();
    let mut out = Vec::with_capacity(max_points);
    for k in 0..max_points {
        let idx = (k * (m - 1)) / (max_points - 1);
        out.push(full[idx]);
    }
    out.dedup_by(|a, b| a.value == b.value);
    out
}

pub const DEFAULT_CDF_POINTS: usize = 200;

pub fn summarize(ds: &Dataset, max_cdf_points: usize) -> Result<FeatureSummary> {
    if ds.is_empty() {
        return Err(DecayError::EmptyInput("summarize needs at least one edge".into()));
    }
    let mut features = Vec::with_capacity(ds.n_features());
    for f in 0..ds.n_features() {
        let col = ds.column(f);
        let mut sorted = col.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        features.push(FeatureStat {
            name: ds.feature_names()[f].clone(),
            min: sorted[0],
            max: *sorted.last().unwrap(),
            median: lower_median(&sorted),
            mean: col.iter().sum::<f64>() / col.len() as f64,
            cdf: ecdf_points(&col, max_cdf_points),
        });
    }
    Ok(FeatureSummary { n_edges: ds.n_rows(), features })
}

/// 1-based ranks with ties getting the average rank of their run.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share the average of ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None; // zero variance: correlation undefined, not 0
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Tie-aware Spearman ρ: Pearson correlation of average ranks. `None`
/// marks the undefined case (a constant input).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(DecayError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(DecayError::EmptyInput("spearman needs at least 2 observations".into()));
    }
    Ok(pearson(&average_ranks(x), &average_ranks(y)))
}

/// Pairwise Spearman ρ over all feature columns. Entries are `None` where
/// the correlation is undefined (zero-variance column); the diagonal is 1
/// whenever defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub feature_names: Vec<String>,
    values: Vec<Option<f64>>,
}

impl CorrelationMatrix {
    pub fn n(&self) -> usize {
        self.feature_names.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.n() + j]
    }

    pub fn by_name(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.feature_names.iter().position(|n| n == a)?;
        let j = self.feature_names.iter().position(|n| n == b)?;
        self.get(i, j)
    }
}

pub fn spearman_matrix(ds: &Dataset) -> Result<CorrelationMatrix> {
    if ds.n_rows() < 2 {
        return Err(DecayError::EmptyInput(format!(
            "correlation needs at least 2 edges, got {}",
            ds.n_rows()
        )));
    }
    let k = ds.n_features();
    let ranks: Vec<Vec<f64>> = (0..k).map(|f| average_ranks(&ds.column(f))).collect();
    let mut values = vec![None; k * k];
    for i in 0..k {
        for j in i..k {
            let rho = if i == j {
                // exact unit diagonal when the column varies at all
                pearson(&ranks[i], &ranks[i]).map(|_| 1.0)
            } else {
                pearson(&ranks[i], &ranks[j])
            };
            values[i * k + j] = rho;
            values[j * k + i] = rho;
        }
    }
    Ok(CorrelationMatrix { feature_names: ds.feature_names().to_vec(), values })
}

pub fn write_summary_json(summary: &FeatureSummary, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), summary)?;
    Ok(())
}

/// Matrix as CSV with a leading name column; undefined entries are "NA".
pub fn write_matrix_csv(m: &CorrelationMatrix, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["feature".to_string()];
    header.extend(m.feature_names.iter().cloned());
    w.write_record(&header)?;
    for i in 0..m.n() {
        let mut row = vec![m.feature_names[i].clone()];
        for j in 0..m.n() {
            row.push(match m.get(i, j) {
                Some(v) => v.to_string(),
                None => "NA".to_string(),
            });
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-feature CDF point files (`<feature>.csv` with value,fraction rows).
pub fn write_cdf_files(summary: &FeatureSummary, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for stat in &summary.features {
        let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", stat.name)))?;
        w.write_record(["value", "fraction"])?;
        for p in &stat.cdf {
            w.write_record([p.value.to_string(), p.fraction.to_string()])?;
        }
        w.flush()?;
    }
    Ok(())
}
