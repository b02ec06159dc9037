//! Decision-tree induction in the C4.5 style: greedy recursive
//! partitioning on the numeric split with the largest weighted
//! information gain, axis-parallel thresholds, majority-class leaves with
//! empirical persist probabilities, no post-pruning.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{DecayError, Result};
use crate::infogain::{entropy, ClassDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// A split is admissible only if both children hold at least this
    /// many training instances.
    pub min_leaf_size: usize,
    /// `None` = growth bounded only by the other criteria.
    pub max_depth: Option<usize>,
    /// Minimum weighted info gain (bits) for a split to be worth making.
    pub min_gain: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { min_leaf_size: 2, max_depth: None, min_gain: 0.001 }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf_size < 1 {
            return Err(DecayError::InvalidConfig("min_leaf_size must be >= 1".into()));
        }
        if !self.min_gain.is_finite() || self.min_gain < 0.0 {
            return Err(DecayError::InvalidConfig(format!(
                "min_gain must be finite and >= 0, got {}",
                self.min_gain
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "kebab-case")]
pub enum TreeNode {
    Split {
        feature: usize,
        feature_name: String,
        /// Values ≤ threshold go left, > goes right.
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        n_persist: u64,
        n_decay: u64,
        /// Majority class (persist wins exact ties).
        predicted: u8,
        p_persist: f64,
    },
}

impl TreeNode {
    fn leaf(dist: &ClassDistribution) -> TreeNode {
        TreeNode::Leaf {
            n_persist: dist.n_persist,
            n_decay: dist.n_decay,
            predicted: (dist.n_persist >= dist.n_decay) as u8,
            p_persist: dist.n_persist as f64 / dist.total() as f64,
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub feature_names: Vec<String>,
    pub config: TreeConfig,
    pub root: TreeNode,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Highest weighted-gain admissible split over all (feature, midpoint)
/// candidates; ties keep the earliest feature, then the lowest threshold.
fn best_split(ds: &Dataset, rows: &[usize], cfg: &TreeConfig) -> Option<BestSplit> {
    let total = ClassDistribution::from_classes(
        &rows.iter().map(|&r| ds.classes()[r]).collect::<Vec<u8>>(),
    );
    let n = total.total() as f64;
    let h_class = entropy(&total).ok()?;
    if h_class == 0.0 {
        return None;
    }

    let h2 = |p: u64, d: u64| -> f64 {
        let t = (p + d) as f64;
        let term = |k: u64| {
            if k == 0 {
                0.0
            } else {
                let q = k as f64 / t;
                -q * q.log2()
            }
        };
        term(p) + term(d)
    };

    let mut best: Option<BestSplit> = None;
    let mut pairs: Vec<(f64, u8)> = Vec::with_capacity(rows.len());
    for f in 0..ds.n_features() {
        pairs.clear();
        pairs.extend(rows.iter().map(|&r| (ds.value(r, f), ds.classes()[r])));
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let mut left = ClassDistribution::default();
        let mut k = 0;
        while k < pairs.len() {
            // absorb the whole run of one distinct value
            let v = pairs[k].0;
            while k < pairs.len() && pairs[k].0 == v {
                left.add(pairs[k].1);
                k += 1;
            }
            if k == pairs.len() {
                break;
            }
            let nl = left.total() as usize;
            let nr = rows.len() - nl;
            if nl < cfg.min_leaf_size || nr < cfg.min_leaf_size {
                continue;
            }
            let right = ClassDistribution::new(
                total.n_persist - left.n_persist,
                total.n_decay - left.n_decay,
            );
            let cond = nl as f64 / n * h2(left.n_persist, left.n_decay)
                + nr as f64 / n * h2(right.n_persist, right.n_decay);
            let gain = h_class - cond;
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit { feature: f, threshold: (v + pairs[k].0) / 2.0, gain });
            }
        }
    }
    best.filter(|b| b.gain >= cfg.min_gain)
}

fn grow(ds: &Dataset, rows: Vec<usize>, depth: usize, cfg: &TreeConfig) -> TreeNode {
    let dist = ClassDistribution::from_classes(
        &rows.iter().map(|&r| ds.classes()[r]).collect::<Vec<u8>>(),
    );
    let depth_reached = cfg.max_depth.is_some_and(|d| depth >= d);
    if depth_reached || dist.n_persist == 0 || dist.n_decay == 0 {
        return TreeNode::leaf(&dist);
    }
    let Some(split) = best_split(ds, &rows, cfg) else {
        return TreeNode::leaf(&dist);
    };
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
        rows.into_iter().partition(|&r| ds.value(r, split.feature) <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        feature_name: ds.feature_names()[split.feature].clone(),
        threshold: split.threshold,
        left: Box::new(grow(ds, left_rows, depth + 1, cfg)),
        right: Box::new(grow(ds, right_rows, depth + 1, cfg)),
    }
}

impl DecisionTree {
    pub fn train(ds: &Dataset, config: TreeConfig) -> Result<DecisionTree> {
        config.validate()?;
        if ds.is_empty() {
            return Err(DecayError::EmptyInput("tree training needs a non-empty set".into()));
        }
        let rows: Vec<usize> = (0..ds.n_rows()).collect();
        Ok(DecisionTree {
            feature_names: ds.feature_names().to_vec(),
            config,
            root: grow(ds, rows, 0, &config),
        })
    }

    /// (class, persist probability) for one feature row.
    pub fn predict_row(&self, row: &[f64]) -> (u8, f64) {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { predicted, p_persist, .. } => return (*predicted, *p_persist),
                TreeNode::Split { feature, threshold, left, right, .. } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, ds: &Dataset) -> Vec<u8> {
        (0..ds.n_rows()).map(|r| self.predict_row(ds.row(r)).0).collect()
    }

    /// Root split feature index, if the tree has any split.
    pub fn root_feature(&self) -> Option<&str> {
        match &self.root {
            TreeNode::Split { feature_name, .. } => Some(feature_name),
            TreeNode::Leaf { .. } => None,
        }
    }

    /// One line per leaf: the split path, instance count, and persist
    /// probability. `max_leaves` truncates the listing.
    pub fn describe(&self, max_leaves: Option<usize>) -> String {
        fn walk(node: &TreeNode, path: Vec<String>, out: &mut Vec<String>) {
            match node {
                TreeNode::Leaf { n_persist, n_decay, predicted, p_persist } => {
                    let cond = if path.is_empty() { "(root)".to_string() } else { path.join(" AND ") };
                    let label = if *predicted == 1 { "persist" } else { "decay" };
                    out.push(format!(
                        "{cond} -> {label} (p_persist={p_persist:.3}, n={})",
                        n_persist + n_decay
                    ));
                }
                TreeNode::Split { feature_name, threshold, left, right, .. } => {
                    let mut lp = path.clone();
                    lp.push(format!("{feature_name} <= {threshold}"));
                    walk(left, lp, out);
                    let mut rp = path;
                    rp.push(format!("{feature_name} > {threshold}"));
                    walk(right, rp, out);
                }
            }
        }
        let mut lines = Vec::new();
        walk(&self.root, Vec::new(), &mut lines);
        let total = lines.len();
        if let Some(m) = max_leaves {
            if lines.len() > m {
                lines.truncate(m);
                lines.push(format!("... ({} more leaves)", total - m));
            }
        }
        lines.join("\n")
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<DecisionTree> {
        let f = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
    }
}
