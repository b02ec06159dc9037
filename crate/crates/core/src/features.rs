//! Per-arc feature extraction and persist/decay labeling.
//!
//! For every directed arc i→j of the filtered τ₁ graph we compute fifteen
//! features in four groups — vertex activity (d, c), dyadic strength (c_ij,
//! c_ji, p_ij, p_ji), neighborhood embeddedness (cn, in, jn, injn, jnin)
//! and arc timing (fdate, edate) — and attach a binary class: 1 when the
//! same directed pair is connected again in τ₂, else 0.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DecayError, Result};
use crate::graph::{VertexId, WindowGraph};

/// Canonical feature order; every matrix, ranking, and CSV column layout
/// in this crate follows it.
pub const FEATURE_NAMES: [&str; 15] = [
    "d_i", "d_j", "c_i", "c_j", "c_ij", "c_ji", "p_ij", "p_ji", "cn", "in", "jn", "injn",
    "jnin", "fdate", "edate",
];

pub const N_FEATURES: usize = FEATURE_NAMES.len();

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|&n| n == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeFeatureVector {
    /// Out-degree of the caller / callee.
    pub d_i: u32,
    pub d_j: u32,
    /// Total calls made by the caller / callee.
    pub c_i: u64,
    pub c_j: u64,
    /// Calls i→j (the directed edge weight) and the return count j→i.
    pub c_ij: u64,
    pub c_ji: u64,
    /// Share of i's calls going to j; share of j's calls going to i
    /// (0 when j made no calls).
    pub p_ij: f64,
    pub p_ji: f64,
    /// Common neighbors of i and j (either-direction contacts, excluding
    /// i and j themselves).
    pub cn: u32,
    /// i's neighbors that call j / j's neighbors that call i.
    pub in_: u32,
    pub jn: u32,
    /// Second-order embeddedness: arcs (or calls, per `InjnMode`) from i's
    /// neighborhood into j's, and the reverse.
    pub injn: u64,
    pub jnin: u64,
    /// First and last i→j call times, normalized to [0,1] over the window.
    pub fdate: f64,
    pub edate: f64,
}

impl EdgeFeatureVector {
    /// Values in `FEATURE_NAMES` order.
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.d_i as f64,
            self.d_j as f64,
            self.c_i as f64,
            self.c_j as f64,
            self.c_ij as f64,
            self.c_ji as f64,
            self.p_ij,
            self.p_ji,
            self.cn as f64,
            self.in_ as f64,
            self.jn as f64,
            self.injn as f64,
            self.jnin as f64,
            self.fdate,
            self.edate,
        ]
    }
}

/// One τ₁ arc with features and its τ₂ outcome: 1 = persisted, 0 = decayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledEdge {
    pub source: String,
    pub target: String,
    pub features: EdgeFeatureVector,
    pub class: u8,
}

/// What injn/jnin count. Glossed both ways in different places; arcs is
/// the default, calls sums the arc weights instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InjnMode {
    Arcs,
    Calls,
}

/// What counts as persistence in τ₂: the same directed pair (default) or
/// a call in either direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PersistMode {
    Directed,
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub injn_mode: InjnMode,
    pub persist_mode: PersistMode,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { injn_mode: InjnMode::Arcs, persist_mode: PersistMode::Directed }
    }
}

/// (d_i, d_j, c_i, c_j) for the endpoints of an arc.
pub fn vertex_features(g: &WindowGraph, i: VertexId, j: VertexId) -> (u32, u32, u64, u64) {
    (
        g.out_degree(i) as u32,
        g.out_degree(j) as u32,
        g.out_call_count(i),
        g.out_call_count(j),
    )
}

/// (c_ij, c_ji, p_ij, p_ji). Panics if the arc i→j is absent.
pub fn dyad_features(g: &WindowGraph, i: VertexId, j: VertexId) -> (u64, u64, f64, f64) {
    let c_ij = g.arc(i, j).expect("dyad_features: arc i->j must exist").call_count;
    let c_ji = g.arc(j, i).map_or(0, |s| s.call_count);
    let c_i = g.out_call_count(i);
    let c_j = g.out_call_count(j);
    let p_ij = c_ij as f64 / c_i as f64;
    let p_ji = if c_j == 0 { 0.0 } else { c_ji as f64 / c_j as f64 };
    (c_ij, c_ji, p_ij, p_ji)
}

/// Neighbor set of `v` (either-direction contacts) with the focal dyad
/// removed; input slices are sorted, output stays sorted.
fn dyad_free_contacts(g: &WindowGraph, v: VertexId, i: VertexId, j: VertexId) -> Vec<VertexId> {
    g.contacts(v).iter().copied().filter(|&u| u != i && u != j).collect()
}

fn sorted_intersection_len(a: &[VertexId], b: &[VertexId]) -> usize {
    let (mut x, mut y, mut n) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                x += 1;
                y += 1;
            }
        }
    }
    n
}

/// Arcs (or total calls) going from the set `from` into the set `to`.
fn cross_arc_mass(g: &WindowGraph, from: &[VertexId], to: &[VertexId], mode: InjnMode) -> u64 {
    let mut total = 0u64;
    for &u in from {
        let outs = g.out_neighbors(u);
        let (mut x, mut y) = (0, 0);
        while x < outs.len() && y < to.len() {
            match outs[x].cmp(&to[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    total += match mode {
                        InjnMode::Arcs => 1,
                        InjnMode::Calls => g.arc(u, outs[x]).unwrap().call_count,
                    };
                    x += 1;
                    y += 1;
                }
            }
        }
    }
    total
}

/// (cn, in_, jn, injn, jnin) for the arc i→j.
pub fn neighborhood_features(
    g: &WindowGraph,
    i: VertexId,
    j: VertexId,
    mode: InjnMode,
) -> (u32, u32, u32, u64, u64) {
    let ni = dyad_free_contacts(g, i, i, j);
    let nj = dyad_free_contacts(g, j, i, j);
    let cn = sorted_intersection_len(&ni, &nj) as u32;
    let in_ = ni.iter().filter(|&&v| g.arc(v, j).is_some()).count() as u32;
    let jn = nj.iter().filter(|&&v| g.arc(v, i).is_some()).count() as u32;
    let injn = cross_arc_mass(g, &ni, &nj, mode);
    let jnin = cross_arc_mass(g, &nj, &ni, mode);
    (cn, in_, jn, injn, jnin)
}

/// (fdate, edate): first/last i→j call time normalized over the window.
/// Panics if the arc is absent.
pub fn temporal_features(g: &WindowGraph, i: VertexId, j: VertexId) -> (f64, f64) {
    let s = g.arc(i, j).expect("temporal_features: arc i->j must exist");
    let w = g.window();
    let len = w.length() as f64;
    let fdate = (s.first_call - w.start) as f64 / len;
    let edate = (s.last_call - w.start) as f64 / len;
    (fdate, edate)
}

/// All fifteen features for the arc i→j. Panics if the arc is absent.
pub fn edge_features(
    g: &WindowGraph,
    i: VertexId,
    j: VertexId,
    cfg: &FeatureConfig,
) -> EdgeFeatureVector {
    let (d_i, d_j, c_i, c_j) = vertex_features(g, i, j);
    let (c_ij, c_ji, p_ij, p_ji) = dyad_features(g, i, j);
    let (cn, in_, jn, injn, jnin) = neighborhood_features(g, i, j, cfg.injn_mode);
    let (fdate, edate) = temporal_features(g, i, j);
    EdgeFeatureVector {
        d_i,
        d_j,
        c_i,
        c_j,
        c_ij,
        c_ji,
        p_ij,
        p_ji,
        cn,
        in_,
        jn,
        injn,
        jnin,
        fdate,
        edate,
    }
}

fn persists(g2: &WindowGraph, i: &str, j: &str, mode: PersistMode) -> bool {
    match mode {
        PersistMode::Directed => g2.has_arc_by_name(i, j),
        PersistMode::Either => g2.has_arc_by_name(i, j) || g2.has_arc_by_name(j, i),
    }
}

/// One labeled edge per τ₁ arc, sorted by (source, target) names.
///
/// Both graphs must already be robot-filtered consistently. Per-edge work
/// is independent, so extraction runs in parallel while keeping the sorted
/// output order.
pub fn label_edges(g1: &WindowGraph, g2: &WindowGraph, cfg: &FeatureConfig) -> Vec<LabeledEdge> {
    let mut ids: Vec<(VertexId, VertexId)> = g1.arcs().map(|(i, j, _)| (i, j)).collect();
    ids.sort_unstable_by(|&(a, b), &(c, d)| {
        (g1.vertex_name(a), g1.vertex_name(b)).cmp(&(g1.vertex_name(c), g1.vertex_name(d)))
    });
    ids.into_par_iter()
        .map(|(i, j)| {
            let source = g1.vertex_name(i).to_string();
            let target = g1.vertex_name(j).to_string();
            let class = persists(g2, &source, &target, cfg.persist_mode) as u8;
            LabeledEdge { source, target, features: edge_features(g1, i, j, cfg), class }
        })
        .collect()
}

pub const FEATURES_CSV_HEADER: [&str; 18] = [
    "source", "target", "d_i", "d_j", "c_i", "c_j", "c_ij", "c_ji", "p_ij", "p_ji", "cn",
    "in", "jn", "injn", "jnin", "fdate", "edate", "class",
];

pub fn write_features_csv(edges: &[LabeledEdge], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(FEATURES_CSV_HEADER)?;
    for e in edges {
        let f = &e.features;
        w.write_record([
            e.source.as_str(),
            e.target.as_str(),
            &f.d_i.to_string(),
            &f.d_j.to_string(),
            &f.c_i.to_string(),
            &f.c_j.to_string(),
            &f.c_ij.to_string(),
            &f.c_ji.to_string(),
            &f.p_ij.to_string(),
            &f.p_ji.to_string(),
            &f.cn.to_string(),
            &f.in_.to_string(),
            &f.jn.to_string(),
            &f.injn.to_string(),
            &f.jnin.to_string(),
            &f.fdate.to_string(),
            &f.edate.to_string(),
            &e.class.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features_csv(path: &Path) -> Result<Vec<LabeledEdge>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let bad = |reason: String| DecayError::Format { path: path.display().to_string(), reason };
    let mut edges = Vec::new();
    for row in rdr.records() {
        let row = row?;
        if row.len() != FEATURES_CSV_HEADER.len() {
            return Err(bad(format!(
                "expected {} columns, got {}",
                FEATURES_CSV_HEADER.len(),
                row.len()
            )));
        }
        fn field<T: std::str::FromStr>(
            row: &csv::StringRecord,
            idx: usize,
            bad: impl Fn(String) -> DecayError,
        ) -> Result<T> {
            row[idx]
                .parse()
                .map_err(|_| bad(format!("bad value {:?} in column {}", &row[idx], FEATURES_CSV_HEADER[idx])))
        }
        let class: u8 = field(&row, 17, bad)?;
        if class > 1 {
            return Err(bad(format!("class must be 0 or 1, got {class}")));
        }
        edges.push(LabeledEdge {
            source: row[0].to_string(),
            target: row[1].to_string(),
            features: EdgeFeatureVector {
                d_i: field(&row, 2, bad)?,
                d_j: field(&row, 3, bad)?,
                c_i: field(&row, 4, bad)?,
                c_j: field(&row, 5, bad)?,
                c_ij: field(&row, 6, bad)?,
                c_ji: field(&row, 7, bad)?,
                p_ij: field(&row, 8, bad)?,
                p_ji: field(&row, 9, bad)?,
                cn: field(&row, 10, bad)?,
                in_: field(&row, 11, bad)?,
                jn: field(&row, 12, bad)?,
                injn: field(&row, 13, bad)?,
                jnin: field(&row, 14, bad)?,
                fdate: field(&row, 15, bad)?,
                edate: field(&row, 16, bad)?,
            },
            class,
        });
    }
    if edges.is_empty() {
        return Err(DecayError::EmptyInput(format!("no feature rows in {}", path.display())));
    }
    Ok(edges)
}
