//! Common interface over the two trained classifier kinds, so evaluation
//! and the CLI can load either from the same JSON file slot.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::logit::LogitModel;
use crate::tree::DecisionTree;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    Tree(DecisionTree),
    Logit(LogitModel),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Tree(_) => "tree",
            Model::Logit(_) => "logit",
        }
    }

    pub fn feature_names(&self) -> &[String] {
        match self {
            Model::Tree(t) => &t.feature_names,
            Model::Logit(l) => &l.feature_names,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        match self {
            Model::Tree(t) => t.predict_row(row).0,
            Model::Logit(l) => l.predict_row(row, 0.5),
        }
    }

    pub fn predict_proba_row(&self, row: &[f64]) -> f64 {
        match self {
            Model::Tree(t) => t.predict_row(row).1,
            Model::Logit(l) => l.predict_proba_row(row),
        }
    }

    pub fn predict(&self, ds: &Dataset) -> Vec<u8> {
        (0..ds.n_rows()).map(|r| self.predict_row(ds.row(r))).collect()
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Model> {
        let f = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logit::{train_logit, LogitConfig};
    use crate::tree::{DecisionTree, TreeConfig};

    fn toy() -> Dataset {
        let rows: Vec<Vec<f64>> = (-10..=10).filter(|&x| x != 0).map(|x| vec![x as f64]).collect();
        let classes: Vec<u8> = rows.iter().map(|r| (r[0] > 0.0) as u8).collect();
        Dataset::from_rows(vec!["x".into()], &rows, classes).unwrap()
    }

    #[test]
    fn either_kind_round_trips_through_one_slot() {
        let ds = toy();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");

        let tree = Model::Tree(DecisionTree::train(&ds, TreeConfig::default()).unwrap());
        tree.save_json(&path).unwrap();
        let loaded = Model::load_json(&path).unwrap();
        assert_eq!(loaded, tree);
        assert_eq!(loaded.name(), "tree");

        let logit = Model::Logit(train_logit(&ds, LogitConfig::default()).unwrap());
        logit.save_json(&path).unwrap();
        let loaded = Model::load_json(&path).unwrap();
        assert_eq!(loaded.name(), "logit");
        assert_eq!(loaded.predict_row(&[4.0]), 1);
        assert_eq!(loaded.predict_row(&[-4.0]), 0);
    }

    #[test]
    fn wrapped_predictions_match_the_inner_model() {
        let ds = toy();
        let inner = DecisionTree::train(&ds, TreeConfig::default()).unwrap();
        let wrapped = Model::Tree(inner.clone());
        assert_eq!(wrapped.predict(&ds), inner.predict(&ds));
    }
}
