//! Class entropy, information gain, and gain-based feature ranking,
//! including discretization of numeric features.
//!
//! All logarithms are base 2, so entropies are in bits and the binary
//! class entropy lives in [0, 1].

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{DecayError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub n_persist: u64,
    pub n_decay: u64,
}

impl ClassDistribution {
    pub fn new(n_persist: u64, n_decay: u64) -> Self {
        ClassDistribution { n_persist, n_decay }
    }

    pub fn from_classes(classes: &[u8]) -> Self {
        let mut d = ClassDistribution::default();
        for &c in classes {
            d.add(c);
        }
        d
    }

    pub fn add(&mut self, class: u8) {
        if class == 1 {
            self.n_persist += 1;
        } else {
            self.n_decay += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.n_persist + self.n_decay
    }
}

fn h2(n_persist: u64, n_decay: u64) -> f64 {
    let n = (n_persist + n_decay) as f64;
    let term = |k: u64| {
        if k == 0 {
            0.0 // 0·log 0 ≡ 0
        } else {
            let p = k as f64 / n;
            -p * p.log2()
        }
    };
    term(n_persist) + term(n_decay)
}

/// Binary class entropy in bits.
pub fn entropy(dist: &ClassDistribution) -> Result<f64> {
    if dist.total() == 0 {
        return Err(DecayError::EmptyInput("entropy of an empty distribution".into()));
    }
    Ok(h2(dist.n_persist, dist.n_decay))
}

/// How bucket entropies are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainMode {
    /// Buckets weighted by their population share: Σ_k (n_k/N)·H_k.
    /// The standard (C4.5) form and the default.
    Weighted,
    /// Unweighted bucket average: (Σ_k H_k) / |K|. Coincides with
    /// `Weighted` on equal-size buckets; gains may be negative.
    Paper,
}

/// Entropy of the class conditioned on a bucketing of the data.
pub fn conditional_entropy(buckets: &[ClassDistribution], mode: GainMode) -> Result<f64> {
    if buckets.is_empty() {
        return Err(DecayError::EmptyInput("conditional entropy over no buckets".into()));
    }
    let total: u64 = buckets.iter().map(|b| b.total()).sum();
    if buckets.iter().any(|b| b.total() == 0) || total == 0 {
        return Err(DecayError::EmptyInput("conditional entropy with an empty bucket".into()));
    }
    Ok(match mode {
        GainMode::Weighted => buckets
            .iter()
            .map(|b| b.total() as f64 / total as f64 * h2(b.n_persist, b.n_decay))
            .sum(),
        GainMode::Paper => {
            buckets.iter().map(|b| h2(b.n_persist, b.n_decay)).sum::<f64>() / buckets.len() as f64
        }
    })
}

fn gain_over_buckets(buckets: &[ClassDistribution], mode: GainMode) -> Result<f64> {
    let mut overall = ClassDistribution::default();
    for b in buckets {
        overall.n_persist += b.n_persist;
        overall.n_decay += b.n_decay;
    }
    Ok(entropy(&overall)? - conditional_entropy(buckets, mode)?)
}

/// Information gain of an already-discrete feature (bucket keys).
pub fn info_gain_discrete<K: Ord>(keys: &[K], classes: &[u8], mode: GainMode) -> Result<f64> {
    if keys.len() != classes.len() {
        return Err(DecayError::LengthMismatch { left: keys.len(), right: classes.len() });
    }
    let mut buckets: std::collections::BTreeMap<&K, ClassDistribution> =
        std::collections::BTreeMap::new();
    for (k, &c) in keys.iter().zip(classes) {
        buckets.entry(k).or_default().add(c);
    }
    let dists: Vec<ClassDistribution> = buckets.into_values().collect();
    gain_over_buckets(&dists, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscretizeStrategy {
    /// Single threshold maximizing weighted info gain over all midpoints
    /// between adjacent distinct values (the C4.5 treatment).
    BestBinarySplit,
    /// k equal-population quantile bins.
    EqualFrequency(usize),
}

/// How a numeric feature was bucketed; recorded alongside every reported
/// gain so rankings are reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Discretization {
    /// All values identical; one bucket, gain 0.
    SingleBucket,
    /// Two buckets: v ≤ threshold and v > threshold.
    Threshold { threshold: f64 },
    /// Upper-inclusive bin edges; bucket(v) = #{e : v > e}.
    Bins { edges: Vec<f64> },
}

impl Discretization {
    pub fn bucket_of(&self, v: f64) -> usize {
        match self {
            Discretization::SingleBucket => 0,
            Discretization::Threshold { threshold } => usize::from(v > *threshold),
            Discretization::Bins { edges } => edges.iter().filter(|&&e| v > e).count(),
        }
    }

    pub fn n_buckets(&self) -> usize {
        match self {
            Discretization::SingleBucket => 1,
            Discretization::Threshold { .. } => 2,
            Discretization::Bins { edges } => edges.len() + 1,
        }
    }
}

/// Distinct sorted values with per-value class counts.
fn value_groups(values: &[f64], classes: &[u8]) -> Vec<(f64, ClassDistribution)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut groups: Vec<(f64, ClassDistribution)> = Vec::new();
    for idx in order {
        match groups.last_mut() {
            Some((v, d)) if *v == values[idx] => d.add(classes[idx]),
            _ => {
                let mut d = ClassDistribution::default();
                d.add(classes[idx]);
                groups.push((values[idx], d));
            }
        }
    }
    groups
}

/// The threshold between adjacent distinct values that maximizes weighted
/// info gain; ties resolved toward the lower threshold. Returns the
/// descriptor and that gain.
pub fn best_binary_split(values: &[f64], classes: &[u8]) -> Result<(Discretization, f64)> {
    if values.len() != classes.len() {
        return Err(DecayError::LengthMismatch { left: values.len(), right: classes.len() });
    }
    if values.is_empty() {
        return Err(DecayError::EmptyInput("split search over no values".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(DecayError::NonFinite("feature value in split search".into()));
    }
    let groups = value_groups(values, classes);
    if groups.len() < 2 {
        return Ok((Discretization::SingleBucket, 0.0));
    }
    let total = ClassDistribution::from_classes(classes);
    let h_class = entropy(&total)?;
    let n = total.total() as f64;

    let mut left = ClassDistribution::default();
    let mut best_gain = f64::NEG_INFINITY;
    let mut best_threshold = 0.0;
    for w in groups.windows(2) {
        let (v_lo, d) = (&w[0].0, &w[0].1);
        let v_hi = w[1].0;
        left.n_persist += d.n_persist;
        left.n_decay += d.n_decay;
        let right = ClassDistribution::new(
            total.n_persist - left.n_persist,
            total.n_decay - left.n_decay,
        );
        let cond = left.total() as f64 / n * h2(left.n_persist, left.n_decay)
            + right.total() as f64 / n * h2(right.n_persist, right.n_decay);
        let gain = h_class - cond;
        if gain > best_gain {
            best_gain = gain;
            best_threshold = (v_lo + v_hi) / 2.0;
        }
    }
    Ok((Discretization::Threshold { threshold: best_threshold }, best_gain))
}

fn equal_frequency_edges(values: &[f64], k: usize) -> Result<Discretization> {
    if k < 2 {
        return Err(DecayError::InvalidConfig(format!(
            "equal-frequency needs at least 2 bins, got {k}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let mut edges = Vec::new();
    for i in 1..k {
        let idx = i * n / k;
        if idx == 0 || idx >= n {
            continue;
        }
        if sorted[idx - 1] < sorted[idx] {
            edges.push((sorted[idx - 1] + sorted[idx]) / 2.0);
        }
    }
    edges.dedup();
    if edges.is_empty() {
        Ok(Discretization::SingleBucket)
    } else {
        Ok(Discretization::Bins { edges })
    }
}

pub fn discretize_numeric(
    values: &[f64],
    classes: &[u8],
    strategy: DiscretizeStrategy,
) -> Result<Discretization> {
    match strategy {
        DiscretizeStrategy::BestBinarySplit => Ok(best_binary_split(values, classes)?.0),
        DiscretizeStrategy::EqualFrequency(k) => {
            if values.is_empty() {
                return Err(DecayError::EmptyInput("discretize over no values".into()));
            }
            equal_frequency_edges(values, k)
        }
    }
}

/// Info gain of a numeric feature under the given discretization strategy
/// and combining mode. Returns the gain with the descriptor it was
/// computed under.
pub fn info_gain_numeric(
    values: &[f64],
    classes: &[u8],
    strategy: DiscretizeStrategy,
    mode: GainMode,
) -> Result<(f64, Discretization)> {
    if values.len() != classes.len() {
        return Err(DecayError::LengthMismatch { left: values.len(), right: classes.len() });
    }
    let disc = discretize_numeric(values, classes, strategy)?;
    if disc == Discretization::SingleBucket {
        return Ok((0.0, disc));
    }
    let mut buckets = vec![ClassDistribution::default(); disc.n_buckets()];
    for (&v, &c) in values.iter().zip(classes) {
        buckets[disc.bucket_of(v)].add(c);
    }
    buckets.retain(|b| b.total() > 0);
    Ok((gain_over_buckets(&buckets, mode)?, disc))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub name: String,
    pub gain: f64,
    pub discretization: Discretization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub mode: GainMode,
    pub strategy: DiscretizeStrategy,
    pub class_entropy: f64,
    /// Descending by gain; ties keep the canonical feature order.
    pub features: Vec<RankedFeature>,
}

pub fn rank_features(
    ds: &Dataset,
    strategy: DiscretizeStrategy,
    mode: GainMode,
) -> Result<FeatureRanking> {
    if ds.is_empty() {
        return Err(DecayError::EmptyInput("ranking needs a non-empty edge set".into()));
    }
    let class_entropy = entropy(&ClassDistribution::from_classes(ds.classes()))?;
    let mut features = Vec::with_capacity(ds.n_features());
    for f in 0..ds.n_features() {
        let (gain, discretization) =
            info_gain_numeric(&ds.column(f), ds.classes(), strategy, mode)?;
        features.push(RankedFeature { name: ds.feature_names()[f].clone(), gain, discretization });
    }
    features.sort_by(|a, b| b.gain.partial_cmp(&a.gain).unwrap());
    Ok(FeatureRanking { mode, strategy, class_entropy, features })
}

pub fn write_ranking_json(r: &FeatureRanking, path: &std::path::Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), r)?;
    Ok(())
}
