//! Synthetic call-record corpora with a planted, fully known decay
//! mechanism.
//!
//! Generation runs in four deterministic passes: (1) a heavy-tailed
//! directed contact graph with a triangle-boosting rewiring pass and
//! explicit reciprocal additions, (2) per-arc call volumes and τ₁
//! timestamps, (3) a logistic persistence rule evaluated on the *actual*
//! pipeline features of the τ₁ graph, (4) τ₂ calls for the arcs that
//! persisted. Every random draw comes from a per-entity substream of the
//! corpus seed, so output is byte-identical across runs and machines.
//!
//! The planted rule (with its per-edge persistence probabilities) goes to
//! a sidecar, making the Bayes-optimal accuracy on the corpus a known
//! quantity.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{DecayError, Result};
use crate::features::{self, FeatureConfig, LabeledEdge};
use crate::graph::{build_window_graph, WindowConfig};
use crate::ingest::{write_records_csv, CallRecord, CallType};
use crate::logit::sigmoid;

/// Lognormal out-degree model, rounded and clamped to [1, max_out_degree].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeModel {
    /// Median of the underlying lognormal.
    pub median: f64,
    /// Log-scale sigma; larger = heavier tail.
    pub sigma: f64,
    /// Hard cap, keeping everything under the robot filter.
    pub max_out_degree: usize,
}

/// Lognormal per-arc call volume, rounded and clamped to [1, max_calls].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CallVolumeModel {
    pub median: f64,
    pub sigma: f64,
    pub max_calls: u64,
}

/// Logistic persistence rule over named pipeline features:
/// P(persist) = σ(intercept + Σ w_f · x_f).
///
/// Leave `intercept` unset to have it solved so the expected persist share
/// hits `target_persist_share`. If both are set, the implied share must
/// lie within `balance_tolerance` of the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRule {
    pub weights: BTreeMap<String, f64>,
    pub intercept: Option<f64>,
    pub target_persist_share: Option<f64>,
    pub balance_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_vertices: usize,
    pub degrees: DegreeModel,
    /// Probability that an arc (i,j) gets a reciprocal arc (j,i). Phases
    /// 1–2 never create mutual dyads, so this is the only source of
    /// reciprocity: 0 means c_ji = 0 on every edge, by construction.
    pub reciprocity: f64,
    /// Per-slot probability of rewiring a contact to a friend-of-friend,
    /// which raises clustering and the embeddedness features.
    pub triangle_boost: f64,
    pub calls: CallVolumeModel,
    pub window: WindowConfig,
    pub rule: DecayRule,
    pub seed: u64,
}

pub const TRUTH_MARKER: &str = "decaygraph-synth-truth-v1";
pub const RECORDS_FILE: &str = "records.csv";
pub const TRUTH_FILE: &str = "truth.json";
pub const EDGE_TRUTH_FILE: &str = "truth_edges.csv";

/// The planted ground truth for one τ₁ arc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeTruth {
    pub source: String,
    pub target: String,
    pub p_persist: f64,
    pub persisted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub marker: String,
    pub seed: u64,
    pub window: WindowConfig,
    /// The rule as actually applied (intercept resolved).
    pub weights: BTreeMap<String, f64>,
    pub intercept: f64,
    /// Mean planted persist probability.
    pub expected_persist_share: f64,
    /// Realized persist share after the Bernoulli draws.
    pub observed_persist_share: f64,
    /// Accuracy of the Bayes-optimal classifier: mean over edges of
    /// max(p, 1−p). The ceiling for any learned model on this corpus.
    pub bayes_accuracy: f64,
    pub n_tau1_arcs: usize,
    pub config: SynthConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    /// τ₁ + τ₂ records sorted by (timestamp, caller, callee).
    pub records: Vec<CallRecord>,
    pub truth: SynthTruth,
    /// Per-arc truth sorted by (source, target).
    pub edge_truth: Vec<EdgeTruth>,
}

/// Paper-shaped preset: heavy-tailed degrees with median 3, moderate
/// reciprocity and clustering, and a five-feature rule whose signs follow
/// the published coefficient table (+c_ij, +c_ji, +edate, −fdate, −d_i),
/// balanced to 57% persist / 43% decay.
pub fn paperlike(seed: u64) -> SynthConfig {
    let mut weights = BTreeMap::new();
    weights.insert("c_ij".to_string(), 0.35);
    weights.insert("c_ji".to_string(), 0.25);
    weights.insert("edate".to_string(), 2.0);
    weights.insert("fdate".to_string(), -1.5);
    weights.insert("d_i".to_string(), -0.09);
    SynthConfig {
        n_vertices: 10_000,
        degrees: DegreeModel { median: 3.0, sigma: 0.82, max_out_degree: 49 },
        reciprocity: 0.2,
        triangle_boost: 0.15,
        calls: CallVolumeModel { median: 2.0, sigma: 1.0, max_calls: 200 },
        window: WindowConfig { t0: 0, delta1: 2_419_200, delta2: 2_419_200 }, // 4 weeks each
        rule: DecayRule {
            weights,
            intercept: None,
            target_persist_share: Some(0.57),
            balance_tolerance: 0.02,
        },
        seed,
    }
}

/// Decay driven by the directed edge weight alone, with a steep slope:
/// the planted-mechanism recovery corpus. Sized to put the τ₁ graph
/// around 10⁵ arcs.
pub fn cij_steep(seed: u64) -> SynthConfig {
    let mut weights = BTreeMap::new();
    weights.insert("c_ij".to_string(), 1.5);
    let mut cfg = paperlike(seed);
    cfg.n_vertices = 22_000;
    cfg.rule = DecayRule {
        weights,
        intercept: None,
        target_persist_share: Some(0.57),
        balance_tolerance: 0.02,
    };
    cfg
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent deterministic substream for one (pass, entity) pair.
fn substream(seed: u64, pass: u64, entity: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(splitmix64(seed ^ pass.wrapping_mul(0xA5A5_5A5A)) ^ entity))
}

const PASS_DEGREE: u64 = 1;
const PASS_TRIANGLE: u64 = 2;
const PASS_RECIPROCITY: u64 = 3;
const PASS_CALLS: u64 = 4;
const PASS_PERSIST: u64 = 5;

fn pair_id(i: u32, j: u32) -> u64 {
    (u64::from(i) << 32) | u64::from(j)
}

fn vertex_name(v: u32) -> String {
    format!("v{v:06}")
}

fn validate(cfg: &SynthConfig) -> Result<()> {
    cfg.window.validate()?;
    if cfg.n_vertices < 3 {
        return Err(DecayError::InvalidConfig("n_vertices must be at least 3".into()));
    }
    if cfg.n_vertices > 1_000_000 {
        return Err(DecayError::InvalidConfig("n_vertices above 1e6 is unsupported".into()));
    }
    for (name, p) in [("reciprocity", cfg.reciprocity), ("triangle_boost", cfg.triangle_boost)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(DecayError::InvalidConfig(format!("{name} must be in [0,1], got {p}")));
        }
    }
    if cfg.degrees.median < 1.0 || cfg.degrees.sigma < 0.0 || cfg.degrees.max_out_degree < 1 {
        return Err(DecayError::InvalidConfig("bad degree model".into()));
    }
    if cfg.degrees.max_out_degree > 49 {
        return Err(DecayError::InvalidConfig(
            "max_out_degree above 49 would not survive the robot filter".into(),
        ));
    }
    if cfg.calls.median < 1.0 || cfg.calls.sigma < 0.0 || cfg.calls.max_calls < 1 {
        return Err(DecayError::InvalidConfig("bad call volume model".into()));
    }
    if cfg.rule.weights.is_empty() {
        return Err(DecayError::InvalidConfig("decay rule has no feature weights".into()));
    }
    for name in cfg.rule.weights.keys() {
        if features::feature_index(name).is_none() {
            return Err(DecayError::InvalidConfig(format!(
                "decay rule references unknown feature {name:?}"
            )));
        }
    }
    if cfg.rule.intercept.is_none() && cfg.rule.target_persist_share.is_none() {
        return Err(DecayError::InvalidConfig(
            "decay rule needs an intercept or a target_persist_share".into(),
        ));
    }
    if let Some(t) = cfg.rule.target_persist_share {
        if !(t > 0.0 && t < 1.0) {
            return Err(DecayError::Infeasible(format!(
                "target persist share {t} is unreachable: σ stays strictly inside (0,1)"
            )));
        }
    }
    if cfg.rule.balance_tolerance <= 0.0 {
        return Err(DecayError::InvalidConfig("balance_tolerance must be positive".into()));
    }
    Ok(())
}

fn draw_count(rng: &mut ChaCha8Rng, median: f64, sigma: f64, max: u64) -> u64 {
    let dist = LogNormal::new(median.ln(), sigma).expect("validated lognormal params");
    (dist.sample(rng).round() as u64).clamp(1, max)
}

/// Directed adjacency as sorted target sets; phases 1–2 keep dyads
/// one-directional so reciprocity stays an explicit, separate knob.
fn build_adjacency(cfg: &SynthConfig) -> Vec<BTreeSet<u32>> {
    let n = cfg.n_vertices as u32;
    let mut out: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); cfg.n_vertices];

    // Pass 1: degrees and uniform target choice.
    for v in 0..n {
        let mut rng = substream(cfg.seed, PASS_DEGREE, u64::from(v));
        let want = draw_count(&mut rng, cfg.degrees.median, cfg.degrees.sigma, cfg.degrees.max_out_degree as u64)
            .min(n as u64 - 1) as usize;
        let mut attempts = 0;
        while out[v as usize].len() < want && attempts < want * 50 {
            attempts += 1;
            let u = rng.random_range(0..n);
            if u == v || out[u as usize].contains(&v) {
                continue;
            }
            out[v as usize].insert(u);
        }
    }

    // Pass 2: rewire some slots to friends-of-friends to close triangles.
    if cfg.triangle_boost > 0.0 {
        for v in 0..n {
            let mut rng = substream(cfg.seed, PASS_TRIANGLE, u64::from(v));
            let slots: Vec<u32> = out[v as usize].iter().copied().collect();
            for t in slots {
                if rng.random::<f64>() >= cfg.triangle_boost || !out[v as usize].contains(&t) {
                    continue;
                }
                let vias: Vec<u32> = out[v as usize].iter().copied().collect();
                let via = vias[rng.random_range(0..vias.len())];
                let cands: Vec<u32> = out[via as usize].iter().copied().collect();
                if cands.is_empty() {
                    continue;
                }
                let u = cands[rng.random_range(0..cands.len())];
                if u != v && !out[v as usize].contains(&u) && !out[u as usize].contains(&v) {
                    out[v as usize].remove(&t);
                    out[v as usize].insert(u);
                }
            }
        }
    }

    // Pass 3: explicit reciprocal arcs, capped by the degree bound.
    if cfg.reciprocity > 0.0 {
        let arcs: Vec<(u32, u32)> = (0..n as usize)
            .flat_map(|v| out[v].iter().map(move |&t| (v as u32, t)))
            .collect();
        for (v, t) in arcs {
            let mut rng = substream(cfg.seed, PASS_RECIPROCITY, pair_id(v, t));
            if rng.random::<f64>() < cfg.reciprocity
                && out[t as usize].len() < cfg.degrees.max_out_degree
                && !out[t as usize].contains(&v)
            {
                out[t as usize].insert(v);
            }
        }
    }

    out
}

fn tau1_records(cfg: &SynthConfig, adjacency: &[BTreeSet<u32>]) -> Vec<CallRecord> {
    let w = cfg.window.tau1();
    let mut records = Vec::new();
    for (v, targets) in adjacency.iter().enumerate() {
        for &t in targets {
            let mut rng = substream(cfg.seed, PASS_CALLS, pair_id(v as u32, t));
            let k = draw_count(&mut rng, cfg.calls.median, cfg.calls.sigma, cfg.calls.max_calls);
            for _ in 0..k {
                records.push(CallRecord {
                    caller: vertex_name(v as u32),
                    callee: vertex_name(t),
                    timestamp: rng.random_range(w.start..w.end),
                    duration: rng.random_range(10..=600),
                    call_type: CallType::Voice,
                });
            }
        }
    }
    records
}

/// Per-edge raw rule scores (Σ w_f·x_f), aligned with `edges`.
fn rule_scores(edges: &[LabeledEdge], weights: &BTreeMap<String, f64>) -> Vec<f64> {
    let ds = Dataset::from_edges(edges);
    let idx: Vec<(usize, f64)> = weights
        .iter()
        .map(|(name, &w)| (features::feature_index(name).expect("validated feature"), w))
        .collect();
    (0..ds.n_rows())
        .map(|r| {
            let row = ds.row(r);
            idx.iter().map(|&(f, w)| w * row[f]).sum()
        })
        .collect()
}

/// Solve σ-mean(intercept) = target by bisection; the mean is strictly
/// increasing in the intercept, so this always converges.
fn solve_intercept(scores: &[f64], target: f64) -> f64 {
    let mean_p = |a: f64| scores.iter().map(|&s| sigmoid(a + s)).sum::<f64>() / scores.len() as f64;
    let (mut lo, mut hi) = (-60.0, 60.0);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if mean_p(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / 2.0
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    validate(cfg)?;

    let adjacency = build_adjacency(cfg);
    let mut records = tau1_records(cfg, &adjacency);

    // Features of the τ₁ graph exactly as the pipeline will see them.
    let g1 = build_window_graph(records.iter(), cfg.window.tau1());
    let g2_empty = build_window_graph([].iter(), cfg.window.tau2());
    let edges = features::label_edges(&g1, &g2_empty, &FeatureConfig::default());
    if edges.is_empty() {
        return Err(DecayError::Internal("generator produced an empty τ₁ graph".into()));
    }

    let scores = rule_scores(&edges, &cfg.rule.weights);
    let intercept = match (cfg.rule.intercept, cfg.rule.target_persist_share) {
        (Some(a), None) => a,
        (None, Some(t)) => solve_intercept(&scores, t),
        (Some(a), Some(t)) => {
            let mean =
                scores.iter().map(|&s| sigmoid(a + s)).sum::<f64>() / scores.len() as f64;
            if (mean - t).abs() > cfg.rule.balance_tolerance {
                return Err(DecayError::Infeasible(format!(
                    "intercept {a} implies persist share {mean:.4}, \
                     outside {t} ± {}; drop the intercept to have it solved",
                    cfg.rule.balance_tolerance
                )));
            }
            a
        }
        (None, None) => unreachable!("validated"),
    };

    // Bernoulli persistence draws and τ₂ calls for the survivors.
    let w2 = cfg.window.tau2();
    let mut edge_truth = Vec::with_capacity(edges.len());
    let mut expected = 0.0;
    let mut bayes = 0.0;
    let mut observed = 0usize;
    for edge in &edges {
        let i = g1.vertex_id(&edge.source).expect("edge endpoint");
        let j = g1.vertex_id(&edge.target).expect("edge endpoint");
        let p = sigmoid(intercept + scores[edge_truth.len()]);
        expected += p;
        bayes += p.max(1.0 - p);
        let mut rng = substream(cfg.seed, PASS_PERSIST, pair_id(i, j));
        let persisted = rng.random::<f64>() < p;
        if persisted {
            observed += 1;
            let k = draw_count(&mut rng, cfg.calls.median, cfg.calls.sigma, cfg.calls.max_calls);
            for _ in 0..k {
                records.push(CallRecord {
                    caller: edge.source.clone(),
                    callee: edge.target.clone(),
                    timestamp: rng.random_range(w2.start..w2.end),
                    duration: rng.random_range(10..=600),
                    call_type: CallType::Voice,
                });
            }
        }
        edge_truth.push(EdgeTruth {
            source: edge.source.clone(),
            target: edge.target.clone(),
            p_persist: p,
            persisted,
        });
    }

    records.sort_by(|a, b| {
        (a.timestamp, &a.caller, &a.callee, a.duration).cmp(&(
            b.timestamp,
            &b.caller,
            &b.callee,
            b.duration,
        ))
    });

    let n = edge_truth.len();
    let truth = SynthTruth {
        marker: TRUTH_MARKER.to_string(),
        seed: cfg.seed,
        window: cfg.window,
        weights: cfg.rule.weights.clone(),
        intercept,
        expected_persist_share: expected / n as f64,
        observed_persist_share: observed as f64 / n as f64,
        bayes_accuracy: bayes / n as f64,
        n_tau1_arcs: n,
        config: cfg.clone(),
    };
    Ok(SynthOutput { records, truth, edge_truth })
}

/// Writes `records.csv`, `truth.json`, and `truth_edges.csv` into `dir`.
pub fn write_corpus(out: &SynthOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_records_csv(&dir.join(RECORDS_FILE), &out.records)?;
    let f = std::fs::File::create(dir.join(TRUTH_FILE))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), &out.truth)?;
    let mut w = csv::Writer::from_path(dir.join(EDGE_TRUTH_FILE))?;
    w.write_record(["source", "target", "p_persist", "persisted"])?;
    for e in &out.edge_truth {
        w.write_record([
            e.source.as_str(),
            e.target.as_str(),
            &e.p_persist.to_string(),
            &(e.persisted as u8).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn truth_path(corpus: &Path) -> PathBuf {
    if corpus.is_dir() {
        corpus.join(TRUTH_FILE)
    } else {
        corpus.to_path_buf()
    }
}

/// Reads back the planted rule of a corpus generated by this module.
/// Anything else (missing or unmarked truth file) is rejected.
pub fn describe_truth(corpus: &Path) -> Result<SynthTruth> {
    let path = truth_path(corpus);
    let foreign = |reason: String| DecayError::Format {
        path: path.display().to_string(),
        reason,
    };
    let f = std::fs::File::open(&path)
        .map_err(|e| foreign(format!("not a synth corpus (no readable truth file): {e}")))?;
    let value: serde_json::Value = serde_json::from_reader(std::io::BufReader::new(f))
        .map_err(|e| foreign(format!("truth file is not valid JSON: {e}")))?;
    if value.get("marker").and_then(|m| m.as_str()) != Some(TRUTH_MARKER) {
        return Err(foreign(format!(
            "truth file lacks the {TRUTH_MARKER} marker; corpus was not produced by this generator"
        )));
    }
    let truth: SynthTruth = serde_json::from_value(value)
        .map_err(|e| foreign(format!("marked truth file failed to parse: {e}")))?;
    Ok(truth)
}
