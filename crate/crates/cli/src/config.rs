//! Declarative pipeline configuration.
//!
//! A `run` invocation is driven by one TOML file. Every section is
//! optional except the window (which may instead be inherited from the
//! synth section); sections hold overrides on top of library defaults so
//! a minimal config stays minimal.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use decaygraph_core::eval::SplitConfig;
use decaygraph_core::features::{FeatureConfig, InjnMode, PersistMode};
use decaygraph_core::graph::{NeighborMode, RobotFilter, WindowConfig};
use decaygraph_core::infogain::{DiscretizeStrategy, GainMode};
use decaygraph_core::ingest::CallType;
use decaygraph_core::logit::LogitConfig;
use decaygraph_core::synth::{self, SynthConfig};
use decaygraph_core::tree::TreeConfig;

/// Errors at this layer are the user's: a file that does not parse or a
/// combination of keys that makes no sense. They map to the usage exit code.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    /// Raw call records; optional when a synth section provides them.
    pub records: Option<PathBuf>,
    /// Log level for the run: error/warn/info/debug/trace.
    pub verbosity: Option<String>,
    pub window: Option<WindowSection>,
    #[serde(default)]
    pub ingest: IngestSection,
    #[serde(default)]
    pub filter: FilterSection,
    #[serde(default)]
    pub features: FeatureSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub tree: TreeSection,
    #[serde(default)]
    pub logit: LogitSection,
    #[serde(default)]
    pub rank: RankSection,
    pub synth: Option<SynthSection>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub t0: i64,
    pub delta1: i64,
    pub delta2: i64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestSection {
    /// Call types to keep (default: voice only).
    pub types: Option<Vec<String>>,
    pub strict: Option<bool>,
    pub min_duration: Option<u64>,
    /// Defaults to true: both the synth generator and the ingest stage
    /// itself write records with a header row.
    pub has_header: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub max_neighbors: Option<usize>,
    /// "out" (default) or "total".
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSection {
    /// "arcs" (default) or "calls".
    pub injn_mode: Option<String>,
    /// "directed" (default) or "either".
    pub persist_mode: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub train_fraction: Option<f64>,
    pub stratify: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeSection {
    pub min_leaf_size: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_gain: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogitSection {
    pub max_iter: Option<usize>,
    pub tolerance: Option<f64>,
    pub ridge: Option<f64>,
    pub standardize: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankSection {
    /// "weighted" (default) or "paper".
    pub mode: Option<String>,
    /// "best-binary-split" (default) or "equal-frequency".
    pub strategy: Option<String>,
    /// Bucket count for equal-frequency discretization.
    pub bins: Option<usize>,
}

/// Overrides applied on top of a named preset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    /// "paperlike" (default) or "cij-steep".
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub n_vertices: Option<usize>,
    pub reciprocity: Option<f64>,
    pub triangle_boost: Option<f64>,
    /// Planted logistic weights by feature name; replaces the preset's rule.
    pub weights: Option<BTreeMap<String, f64>>,
    pub intercept: Option<f64>,
    pub target_persist_share: Option<f64>,
}

/// Fully resolved settings for one pipeline run.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Raw records to ingest; produced by the synth stage when absent.
    pub records: Option<PathBuf>,
    pub verbosity: Option<String>,
    pub window: WindowConfig,
    pub ingest: ResolvedIngest,
    pub filter: RobotFilter,
    pub features: FeatureConfig,
    pub split: SplitConfig,
    pub tree: TreeConfig,
    pub logit: LogitConfig,
    pub rank_mode: GainMode,
    pub rank_strategy: DiscretizeStrategy,
    pub synth: Option<SynthConfig>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedIngest {
    pub keep_call_types: Vec<CallType>,
    pub strict: bool,
    pub min_duration: u64,
    pub has_header: bool,
}

pub fn parse_call_type(s: &str) -> Result<CallType, ConfigError> {
    s.parse::<CallType>().map_err(ConfigError)
}

pub fn parse_neighbor_mode(s: &str) -> Result<NeighborMode, ConfigError> {
    match s {
        "out" => Ok(NeighborMode::Out),
        "total" => Ok(NeighborMode::Total),
        other => err(format!("unknown neighbor mode {other:?} (expected out|total)")),
    }
}

pub fn parse_injn_mode(s: &str) -> Result<InjnMode, ConfigError> {
    match s {
        "arcs" => Ok(InjnMode::Arcs),
        "calls" => Ok(InjnMode::Calls),
        other => err(format!("unknown injn mode {other:?} (expected arcs|calls)")),
    }
}

pub fn parse_persist_mode(s: &str) -> Result<PersistMode, ConfigError> {
    match s {
        "directed" => Ok(PersistMode::Directed),
        "either" => Ok(PersistMode::Either),
        other => err(format!("unknown persist mode {other:?} (expected directed|either)")),
    }
}

pub fn parse_gain_mode(s: &str) -> Result<GainMode, ConfigError> {
    match s {
        "weighted" => Ok(GainMode::Weighted),
        "paper" => Ok(GainMode::Paper),
        other => err(format!("unknown gain mode {other:?} (expected weighted|paper)")),
    }
}

pub fn parse_strategy(name: &str, bins: Option<usize>) -> Result<DiscretizeStrategy, ConfigError> {
    match name {
        "best-binary-split" => Ok(DiscretizeStrategy::BestBinarySplit),
        "equal-frequency" => Ok(DiscretizeStrategy::EqualFrequency(bins.unwrap_or(10))),
        other => {
            err(format!("unknown strategy {other:?} (expected best-binary-split|equal-frequency)"))
        }
    }
}

impl SynthSection {
    /// Resolve against the named preset, with `fallback_seed` as the seed of
    /// last resort.
    pub fn resolve(&self, fallback_seed: u64) -> Result<SynthConfig, ConfigError> {
        let seed = self.seed.unwrap_or(fallback_seed);
        let mut cfg = match self.preset.as_deref().unwrap_or("paperlike") {
            "paperlike" => synth::paperlike(seed),
            "cij-steep" => synth::cij_steep(seed),
            other => return err(format!("unknown preset {other:?} (expected paperlike|cij-steep)")),
        };
        if let Some(n) = self.n_vertices {
            cfg.n_vertices = n;
        }
        if let Some(r) = self.reciprocity {
            cfg.reciprocity = r;
        }
        if let Some(t) = self.triangle_boost {
            cfg.triangle_boost = t;
        }
        if let Some(w) = &self.weights {
            cfg.rule.weights = w.clone();
        }
        if self.intercept.is_some() {
            cfg.rule.intercept = self.intercept;
            if self.target_persist_share.is_none() {
                cfg.rule.target_persist_share = None;
            }
        }
        if self.target_persist_share.is_some() {
            cfg.rule.target_persist_share = self.target_persist_share;
        }
        Ok(cfg)
    }
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<RawConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// Validate and fill in defaults. `seed_flag`/`out_flag` are command-line
    /// overrides, which beat the file.
    pub fn resolve(
        &self,
        seed_flag: Option<u64>,
        out_flag: Option<PathBuf>,
    ) -> Result<PipelineConfig, ConfigError> {
        let seed = seed_flag.or(self.seed).unwrap_or(0);
        let Some(out_dir) = out_flag.or_else(|| self.out_dir.clone()) else {
            return err("out_dir is required (set it in the file or pass --out-dir)");
        };

        let synth = match &self.synth {
            Some(s) => Some(s.resolve(seed)?),
            None => None,
        };
        if self.records.is_none() && synth.is_none() {
            return err("either records or a [synth] section is required");
        }

        let window = match (&self.window, &synth) {
            (Some(w), Some(s)) => {
                let w = WindowConfig { t0: w.t0, delta1: w.delta1, delta2: w.delta2 };
                if w != s.window {
                    return err(format!(
                        "[window] {w:?} conflicts with the synth window {:?}; drop one",
                        s.window
                    ));
                }
                w
            }
            (Some(w), None) => WindowConfig { t0: w.t0, delta1: w.delta1, delta2: w.delta2 },
            (None, Some(s)) => s.window,
            (None, None) => return err("a [window] section is required without [synth]"),
        };
        if window.delta1 <= 0 || window.delta2 <= 0 {
            return err("window.delta1 and window.delta2 must be positive");
        }

        let types = match &self.ingest.types {
            Some(raw) if raw.is_empty() => return err("ingest.types must not be empty"),
            Some(raw) => raw.iter().map(|s| parse_call_type(s)).collect::<Result<Vec<_>, _>>()?,
            None => vec![CallType::Voice],
        };
        let ingest = ResolvedIngest {
            keep_call_types: types,
            strict: self.ingest.strict.unwrap_or(false),
            min_duration: self.ingest.min_duration.unwrap_or(0),
            has_header: self.ingest.has_header.unwrap_or(true),
        };

        let default_filter = RobotFilter::default();
        let filter = RobotFilter {
            max_neighbors: self.filter.max_neighbors.unwrap_or(default_filter.max_neighbors),
            mode: match &self.filter.mode {
                Some(m) => parse_neighbor_mode(m)?,
                None => default_filter.mode,
            },
        };

        let default_features = FeatureConfig::default();
        let features = FeatureConfig {
            injn_mode: match &self.features.injn_mode {
                Some(m) => parse_injn_mode(m)?,
                None => default_features.injn_mode,
            },
            persist_mode: match &self.features.persist_mode {
                Some(m) => parse_persist_mode(m)?,
                None => default_features.persist_mode,
            },
        };

        let default_split = SplitConfig::default();
        let split = SplitConfig {
            train_fraction: self.split.train_fraction.unwrap_or(default_split.train_fraction),
            stratify: self.split.stratify.unwrap_or(default_split.stratify),
            seed,
        };
        split.validate().map_err(|e| ConfigError(e.to_string()))?;

        let default_tree = TreeConfig::default();
        let tree = TreeConfig {
            min_leaf_size: self.tree.min_leaf_size.unwrap_or(default_tree.min_leaf_size),
            max_depth: self.tree.max_depth.or(default_tree.max_depth),
            min_gain: self.tree.min_gain.unwrap_or(default_tree.min_gain),
        };
        tree.validate().map_err(|e| ConfigError(e.to_string()))?;

        let default_logit = LogitConfig::default();
        let logit = LogitConfig {
            max_iter: self.logit.max_iter.unwrap_or(default_logit.max_iter),
            tolerance: self.logit.tolerance.unwrap_or(default_logit.tolerance),
            ridge: self.logit.ridge.unwrap_or(default_logit.ridge),
            standardize: self.logit.standardize.unwrap_or(default_logit.standardize),
        };

        let rank_mode = match &self.rank.mode {
            Some(m) => parse_gain_mode(m)?,
            None => GainMode::Weighted,
        };
        let rank_strategy =
            parse_strategy(self.rank.strategy.as_deref().unwrap_or("best-binary-split"), self.rank.bins)?;

        Ok(PipelineConfig {
            seed,
            out_dir,
            records: self.records.clone(),
            verbosity: self.verbosity.clone(),
            window,
            ingest,
            filter,
            features,
            split,
            tree,
            logit,
            rank_mode,
            rank_strategy,
            synth,
        })
    }
}
