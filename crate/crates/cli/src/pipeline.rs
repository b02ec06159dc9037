//! Sequential stage orchestration for `decaygraph run`.
//!
//! Stages communicate through files only, so every step of a pipeline run
//! is identical to invoking the matching subcommand by hand. Each stage is
//! recorded in the manifest with content hashes of its inputs and outputs,
//! and is skipped on re-runs while those hashes and its parameters still
//! match.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use decaygraph_core::dataset::Dataset;
use decaygraph_core::error::{DecayError, Result};
use decaygraph_core::eval::{evaluate, split_edges, EvalReport};
use decaygraph_core::features::{label_edges, read_features_csv, write_features_csv, LabeledEdge};
use decaygraph_core::graph::{load_graph_csv, save_graph_csv, split_windows};
use decaygraph_core::infogain::{rank_features, write_ranking_json};
use decaygraph_core::ingest::{parse_records_file, write_records_csv, IngestConfig};
use decaygraph_core::logit::train_logit;
use decaygraph_core::model::Model;
use decaygraph_core::stats::{spearman_matrix, write_matrix_csv};
use decaygraph_core::synth;
use decaygraph_core::tree::DecisionTree;

use crate::config::PipelineConfig;
use crate::manifest::{self, FileStamp, Manifest, StageRecord};

/// A stage failure, tagged with the stage that raised it.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: &'static str,
    pub source: DecayError,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} failed: {}", self.stage, self.source)
    }
}

impl std::error::Error for PipelineError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOutcome {
    pub name: &'static str,
    pub executed: bool,
}

#[derive(Debug)]
pub struct RunSummary {
    pub outcomes: Vec<StageOutcome>,
    pub manifest_path: PathBuf,
    /// The rendered model comparison, for printing.
    pub comparison: String,
}

impl RunSummary {
    pub fn executed(&self) -> Vec<&'static str> {
        self.outcomes.iter().filter(|o| o.executed).map(|o| o.name).collect()
    }

    pub fn skipped(&self) -> Vec<&'static str> {
        self.outcomes.iter().filter(|o| !o.executed).map(|o| o.name).collect()
    }
}

#[derive(Serialize)]
struct GraphSummary {
    vertices: usize,
    arcs: usize,
}

/// Sidecar report for the build stage: what the robot filter did.
#[derive(Serialize)]
struct BuildReport {
    removed_vertices: Vec<String>,
    tau1: GraphSummary,
    tau2: GraphSummary,
}

struct Driver {
    out_dir: PathBuf,
    previous: Option<Manifest>,
    manifest: Manifest,
    force: bool,
    outcomes: Vec<StageOutcome>,
}

impl Driver {
    fn fail(stage: &'static str) -> impl FnOnce(DecayError) -> PipelineError {
        move |source| PipelineError { stage, source }
    }

    /// Run one stage, or skip it when the manifest proves it is current.
    fn stage(
        &mut self,
        name: &'static str,
        params: serde_json::Value,
        inputs: &[PathBuf],
        outputs: &[PathBuf],
        run: impl FnOnce() -> Result<()>,
    ) -> std::result::Result<(), PipelineError> {
        let input_stamps: Vec<FileStamp> = inputs
            .iter()
            .map(|p| manifest::stamp(&self.out_dir, p))
            .collect::<Result<_>>()
            .map_err(Self::fail(name))?;

        if !self.force && manifest::up_to_date(self.previous.as_ref(), &self.out_dir, name, &params, &input_stamps)
        {
            let record = self.previous.as_ref().unwrap().stage(name).unwrap().clone();
            self.manifest.upsert(record);
            self.manifest.save(&self.out_dir).map_err(Self::fail(name))?;
            self.outcomes.push(StageOutcome { name, executed: false });
            log::info!("stage {name}: up to date, skipped");
            return Ok(());
        }

        // While the marker exists the stage's outputs are not to be trusted.
        let marker = self.out_dir.join(format!("{name}.partial"));
        fs::write(&marker, format!("stage {name} did not finish\n"))
            .map_err(|e| PipelineError { stage: name, source: e.into() })?;

        log::info!("stage {name}: running");
        run().map_err(Self::fail(name))?;

        let output_stamps: Vec<FileStamp> = outputs
            .iter()
            .map(|p| manifest::stamp(&self.out_dir, p))
            .collect::<Result<_>>()
            .map_err(Self::fail(name))?;

        fs::remove_file(&marker).map_err(|e| PipelineError { stage: name, source: e.into() })?;
        self.manifest.upsert(StageRecord {
            name: name.to_string(),
            params,
            inputs: input_stamps,
            outputs: output_stamps,
        });
        self.manifest.save(&self.out_dir).map_err(Self::fail(name))?;
        self.outcomes.push(StageOutcome { name, executed: true });
        Ok(())
    }
}

fn load_dataset(path: &Path) -> Result<(Dataset, Vec<LabeledEdge>)> {
    let edges = read_features_csv(path)?;
    Ok((Dataset::from_edges(&edges), edges))
}

pub fn run_pipeline(
    cfg: &PipelineConfig,
    force: bool,
) -> std::result::Result<RunSummary, PipelineError> {
    let out = cfg.out_dir.clone();
    fs::create_dir_all(&out).map_err(|e| PipelineError { stage: "setup", source: e.into() })?;

    let mut driver = Driver {
        previous: Manifest::load(&out),
        manifest: Manifest::new(cfg.seed),
        out_dir: out.clone(),
        force,
        outcomes: Vec::new(),
    };

    // --- synth (optional) --------------------------------------------------
    let raw_records = match (&cfg.synth, &cfg.records) {
        (Some(synth_cfg), _) => {
            let path = out.join(synth::RECORDS_FILE);
            let outputs = [
                path.clone(),
                out.join(synth::TRUTH_FILE),
                out.join(synth::EDGE_TRUTH_FILE),
            ];
            let params = serde_json::to_value(synth_cfg)
                .map_err(|e| PipelineError { stage: "synth", source: e.into() })?;
            let dir = out.clone();
            let synth_cfg = synth_cfg.clone();
            driver.stage("synth", params, &[], &outputs, move || {
                let corpus = synth::generate(&synth_cfg)?;
                synth::write_corpus(&corpus, &dir)
            })?;
            path
        }
        (None, Some(records)) => records.clone(),
        (None, None) => unreachable!("config resolution guarantees records or synth"),
    };

    // --- ingest ------------------------------------------------------------
    let ingested = out.join("ingested.csv");
    let ingest_report = out.join("ingest_report.json");
    let horizon = (cfg.window.t0, cfg.window.t0 + cfg.window.delta1 + cfg.window.delta2);
    {
        let params = json!({
            "horizon_start": horizon.0,
            "horizon_end": horizon.1,
            "types": cfg.ingest.keep_call_types,
            "strict": cfg.ingest.strict,
            "min_duration": cfg.ingest.min_duration,
            "has_header": cfg.ingest.has_header,
        });
        let (src, dst, rpt) = (raw_records.clone(), ingested.clone(), ingest_report.clone());
        let icfg = ingest_config(cfg, horizon)?;
        driver.stage(
            "ingest",
            params,
            &[raw_records.clone()],
            &[ingested.clone(), ingest_report.clone()],
            move || {
                let (records, report) = parse_records_file(&src, &icfg)?;
                write_records_csv(&dst, &records)?;
                write_json(&rpt, &report)
            },
        )?;
    }

    // --- build -------------------------------------------------------------
    let tau1 = out.join("tau1.csv");
    let tau2 = out.join("tau2.csv");
    let build_report = out.join("build_report.json");
    let build_outputs = [
        tau1.clone(),
        sidecar(&tau1),
        tau2.clone(),
        sidecar(&tau2),
        build_report.clone(),
    ];
    {
        let params = json!({ "window": cfg.window, "filter": cfg.filter });
        let (src, w, f) = (ingested.clone(), cfg.window, cfg.filter);
        let (t1, t2, rpt) = (tau1.clone(), tau2.clone(), build_report.clone());
        driver.stage("build", params, &[ingested.clone()], &build_outputs, move || {
            // the horizon filter already ran; reparse verbatim
            let mut icfg = IngestConfig::new(w.t0, w.t0 + w.delta1 + w.delta2)?;
            icfg.has_header = true;
            let (records, _) = parse_records_file(&src, &icfg)?;
            let (g1, g2, removed) = split_windows(&records, &w, &f)?;
            save_graph_csv(&g1, &t1)?;
            save_graph_csv(&g2, &t2)?;
            write_json(
                &rpt,
                &BuildReport {
                    removed_vertices: removed,
                    tau1: GraphSummary { vertices: g1.vertex_count(), arcs: g1.arc_count() },
                    tau2: GraphSummary { vertices: g2.vertex_count(), arcs: g2.arc_count() },
                },
            )
        })?;
    }

    // --- features ----------------------------------------------------------
    let features = out.join("features.csv");
    {
        let params = serde_json::to_value(cfg.features)
            .map_err(|e| PipelineError { stage: "features", source: e.into() })?;
        let inputs = [tau1.clone(), sidecar(&tau1), tau2.clone(), sidecar(&tau2)];
        let (t1, t2, dst, fcfg) = (tau1.clone(), tau2.clone(), features.clone(), cfg.features);
        driver.stage("features", params, &inputs, &[features.clone()], move || {
            let g1 = load_graph_csv(&t1)?;
            let g2 = load_graph_csv(&t2)?;
            let edges = label_edges(&g1, &g2, &fcfg);
            if edges.is_empty() {
                return Err(DecayError::EmptyInput("no arcs in the first window".into()));
            }
            write_features_csv(&edges, &dst)
        })?;
    }

    // --- correlate ----------------------------------------------------------
    let correlations = out.join("correlations.csv");
    {
        let (src, dst) = (features.clone(), correlations.clone());
        driver.stage("correlate", json!({}), &[features.clone()], &[correlations.clone()], move || {
            let (ds, _) = load_dataset(&src)?;
            write_matrix_csv(&spearman_matrix(&ds)?, &dst)
        })?;
    }

    // --- rank ----------------------------------------------------------------
    let ranking = out.join("ranking.json");
    {
        let params = json!({ "mode": cfg.rank_mode, "strategy": cfg.rank_strategy });
        let (src, dst) = (features.clone(), ranking.clone());
        let (mode, strategy) = (cfg.rank_mode, cfg.rank_strategy);
        driver.stage("rank", params, &[features.clone()], &[ranking.clone()], move || {
            let (ds, _) = load_dataset(&src)?;
            write_ranking_json(&rank_features(&ds, strategy, mode)?, &dst)
        })?;
    }

    // --- split ----------------------------------------------------------------
    let train_csv = out.join("train.csv");
    let test_csv = out.join("test.csv");
    {
        let params = serde_json::to_value(cfg.split)
            .map_err(|e| PipelineError { stage: "split", source: e.into() })?;
        let (src, tr, te, scfg) =
            (features.clone(), train_csv.clone(), test_csv.clone(), cfg.split);
        driver.stage(
            "split",
            params,
            &[features.clone()],
            &[train_csv.clone(), test_csv.clone()],
            move || {
                let edges = read_features_csv(&src)?;
                let (train, test) = split_edges(&edges, &scfg)?;
                write_features_csv(&train, &tr)?;
                write_features_csv(&test, &te)
            },
        )?;
    }

    // --- train ----------------------------------------------------------------
    let tree_model = out.join("tree.json");
    let logit_model = out.join("logit.json");
    {
        let params = json!({ "tree": cfg.tree, "logit": cfg.logit });
        let (src, tp, lp) = (train_csv.clone(), tree_model.clone(), logit_model.clone());
        let (tcfg, lcfg) = (cfg.tree, cfg.logit);
        driver.stage(
            "train",
            params,
            &[train_csv.clone()],
            &[tree_model.clone(), logit_model.clone()],
            move || {
                let (ds, _) = load_dataset(&src)?;
                Model::Tree(DecisionTree::train(&ds, tcfg)?).save_json(&tp)?;
                Model::Logit(train_logit(&ds, lcfg)?).save_json(&lp)
            },
        )?;
    }

    // --- evaluate ----------------------------------------------------------------
    let eval_tree = out.join("eval_tree.json");
    let eval_logit = out.join("eval_logit.json");
    {
        let inputs = [tree_model.clone(), logit_model.clone(), test_csv.clone()];
        let (te, tm, lm) = (test_csv.clone(), tree_model.clone(), logit_model.clone());
        let (et, el) = (eval_tree.clone(), eval_logit.clone());
        driver.stage(
            "evaluate",
            json!({}),
            &inputs,
            &[eval_tree.clone(), eval_logit.clone()],
            move || {
                let (ds, edges) = load_dataset(&te)?;
                let truth: Vec<u8> = edges.iter().map(|e| e.class).collect();
                for (model_path, report_path) in [(tm, et), (lm, el)] {
                    let model = Model::load_json(&model_path)?;
                    let report = evaluate(model.name(), &model.predict(&ds), &truth)?;
                    report.save_json(&report_path)?;
                }
                Ok(())
            },
        )?;
    }

    // --- compare ----------------------------------------------------------------
    let compare_txt = out.join("compare.txt");
    {
        let inputs = [eval_tree.clone(), eval_logit.clone()];
        let (a, b, dst) = (eval_tree.clone(), eval_logit.clone(), compare_txt.clone());
        driver.stage("compare", json!({}), &inputs, &[compare_txt.clone()], move || {
            let reports = [EvalReport::load_json(&a)?, EvalReport::load_json(&b)?];
            fs::write(&dst, decaygraph_core::eval::render_compare(&reports))?;
            Ok(())
        })?;
    }

    let comparison = fs::read_to_string(&compare_txt)
        .map_err(|e| PipelineError { stage: "compare", source: e.into() })?;

    Ok(RunSummary {
        outcomes: driver.outcomes,
        manifest_path: out.join(manifest::MANIFEST_FILE),
        comparison,
    })
}

fn ingest_config(
    cfg: &PipelineConfig,
    horizon: (i64, i64),
) -> std::result::Result<IngestConfig, PipelineError> {
    let mut icfg = IngestConfig::new(horizon.0, horizon.1)
        .map_err(|source| PipelineError { stage: "ingest", source })?;
    icfg.keep_call_types = cfg.ingest.keep_call_types.clone();
    icfg.strict = cfg.ingest.strict;
    icfg.min_duration = cfg.ingest.min_duration;
    icfg.has_header = cfg.ingest.has_header;
    Ok(icfg)
}

/// `x.csv` -> `x.meta.json`, the window/count sidecar of a graph file.
fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
