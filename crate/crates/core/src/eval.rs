//! Seeded train/test splitting and per-class evaluation reports
//! (accuracy, precision, recall, F-measure from the confusion counts).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DecayError, Result};
use crate::features::LabeledEdge;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
    /// Split each class separately so both sides keep the base rate.
    pub stratify: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { train_fraction: 2.0 / 3.0, seed: 0, stratify: false }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(DecayError::InvalidConfig(format!(
                "train_fraction must be in (0,1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

fn take_train(count: usize, fraction: f64) -> usize {
    ((count as f64 * fraction).round() as usize).clamp(1, count - 1)
}

/// Disjoint, exhaustive, seeded-deterministic (train, test) index sets.
pub fn split_indices(n: usize, classes: &[u8], cfg: &SplitConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    cfg.validate()?;
    if n < 2 {
        return Err(DecayError::EmptyInput(format!("cannot split {n} edges into two sets")));
    }
    if classes.len() != n {
        return Err(DecayError::LengthMismatch { left: classes.len(), right: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if cfg.stratify {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in [1u8, 0u8] {
            let mut idx: Vec<usize> = (0..n).filter(|&i| classes[i] == class).collect();
            if idx.is_empty() {
                continue;
            }
            idx.shuffle(&mut rng);
            let k = if idx.len() == 1 { 1 } else { take_train(idx.len(), cfg.train_fraction) };
            test.extend_from_slice(&idx[k.min(idx.len())..]);
            idx.truncate(k);
            train.extend(idx);
        }
        if test.is_empty() {
            return Err(DecayError::EmptyInput("stratified split left an empty test set".into()));
        }
        Ok((train, test))
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let k = take_train(n, cfg.train_fraction);
        let test = idx.split_off(k);
        Ok((idx, test))
    }
}

pub fn split_edges(
    edges: &[LabeledEdge],
    cfg: &SplitConfig,
) -> Result<(Vec<LabeledEdge>, Vec<LabeledEdge>)> {
    let classes: Vec<u8> = edges.iter().map(|e| e.class).collect();
    let (train, test) = split_indices(edges.len(), &classes, cfg)?;
    Ok((
        train.into_iter().map(|i| edges[i].clone()).collect(),
        test.into_iter().map(|i| edges[i].clone()).collect(),
    ))
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Metrics with one class treated as the positive label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub n: usize,
    pub persist: ClassMetrics,
    pub decay: ClassMetrics,
    pub warnings: Vec<String>,
}

fn metrics_for(tp: u64, fp: u64, tn: u64, fn_: u64, label: &str, warnings: &mut Vec<String>) -> ClassMetrics {
    let n = (tp + fp + tn + fn_) as f64;
    let mut rate = |num: u64, den: u64, what: &str| -> f64 {
        if den == 0 {
            warnings.push(format!("{label} {what} has a zero denominator; reported as 0"));
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = rate(tp, tp + fp, "precision");
    let recall = rate(tp, tp + fn_, "recall");
    ClassMetrics {
        accuracy: (tp + tn) as f64 / n,
        precision,
        recall,
        f_measure: f_measure(precision, recall),
        tp,
        fp,
        tn,
        fn_,
    }
}

pub fn evaluate(model: &str, predictions: &[u8], truth: &[u8]) -> Result<EvalReport> {
    if predictions.len() != truth.len() {
        return Err(DecayError::LengthMismatch { left: predictions.len(), right: truth.len() });
    }
    if predictions.is_empty() {
        return Err(DecayError::EmptyInput("evaluation over no predictions".into()));
    }
    let mut counts = [0u64; 4]; // [pred][true] flattened: 11, 10, 01, 00
    for (&p, &t) in predictions.iter().zip(truth) {
        let slot = match (p == 1, t == 1) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        counts[slot] += 1;
    }
    let [tp, fp, fn_, tn] = counts;
    let mut warnings = Vec::new();
    let persist = metrics_for(tp, fp, tn, fn_, "persist", &mut warnings);
    // decay as positive: the confusion matrix transposes roles
    let decay = metrics_for(tn, fn_, tp, fp, "decay", &mut warnings);
    Ok(EvalReport { model: model.to_string(), n: predictions.len(), persist, decay, warnings })
}

impl EvalReport {
    pub fn save_json(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn load_json(path: &std::path::Path) -> Result<EvalReport> {
        let f = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
    }
}

/// Side-by-side table: one row per metric, one column per model × class.
pub fn render_compare(reports: &[EvalReport]) -> String {
    let mut header = format!("{:<12}", "metric");
    for r in reports {
        header.push_str(&format!(" {:<18} {:<18}", format!("{}/persist", r.model), format!("{}/decay", r.model)));
    }
    let mut lines = vec![header];
    let metric = |m: &ClassMetrics, pick: usize| match pick {
        0 => m.accuracy,
        1 => m.precision,
        2 => m.recall,
        _ => m.f_measure,
    };
    for (pick, name) in ["accuracy", "precision", "recall", "f-measure"].iter().enumerate() {
        let mut line = format!("{name:<12}");
        for r in reports {
            line.push_str(&format!(
                " {:<18.3} {:<18.3}",
                metric(&r.persist, pick),
                metric(&r.decay, pick)
            ));
        }
        lines.push(line);
    }
    lines.join("\n") + "\n"
}
