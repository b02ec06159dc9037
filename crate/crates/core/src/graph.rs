//! Windowed directed weighted call graphs.
//!
//! A `WindowGraph` is induced by the calls falling inside one half-open
//! observation window: an arc i→j exists iff i placed at least one retained
//! call to j in the window, and carries exact per-arc aggregates. The robot
//! filter removes vertices whose neighbor count reaches a cap (distinct
//! callees by default), together with all their incident arcs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{DecayError, Result};
use crate::ingest::CallRecord;

pub type VertexId = u32;

/// Half-open time interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: i64,
    pub end: i64,
}

impl TimeWindow {
    pub fn new(start: i64, end: i64) -> Result<Self> {
        if start >= end {
            return Err(DecayError::InvalidConfig(format!(
                "window start ({start}) must be < end ({end})"
            )));
        }
        Ok(TimeWindow { start, end })
    }

    pub fn contains(&self, t: i64) -> bool {
        t >= self.start && t < self.end
    }

    pub fn length(&self) -> i64 {
        self.end - self.start
    }
}

/// Two adjacent observation windows τ₁ = [t0, t0+delta1) and
/// τ₂ = [t0+delta1, t0+delta1+delta2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub t0: i64,
    pub delta1: i64,
    pub delta2: i64,
}

impl WindowConfig {
    pub fn new(t0: i64, delta1: i64, delta2: i64) -> Result<Self> {
        let cfg = WindowConfig { t0, delta1, delta2 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta1 <= 0 || self.delta2 <= 0 {
            return Err(DecayError::InvalidConfig(format!(
                "window lengths must be positive (delta1={}, delta2={})",
                self.delta1, self.delta2
            )));
        }
        Ok(())
    }

    pub fn tau1(&self) -> TimeWindow {
        TimeWindow { start: self.t0, end: self.t0 + self.delta1 }
    }

    pub fn tau2(&self) -> TimeWindow {
        TimeWindow { start: self.t0 + self.delta1, end: self.t0 + self.delta1 + self.delta2 }
    }
}

/// Exact aggregates for one directed arc within a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcStats {
    /// Number of calls i→j in the window (the directed edge weight).
    pub call_count: u64,
    pub first_call: i64,
    pub last_call: i64,
    pub total_duration: u64,
}

impl ArcStats {
    fn from_record(r: &CallRecord) -> ArcStats {
        ArcStats {
            call_count: 1,
            first_call: r.timestamp,
            last_call: r.timestamp,
            total_duration: r.duration,
        }
    }

    fn absorb(&mut self, r: &CallRecord) {
        self.call_count += 1;
        self.first_call = self.first_call.min(r.timestamp);
        self.last_call = self.last_call.max(r.timestamp);
        self.total_duration += r.duration;
    }
}

/// Which alters count as "neighbors" for the robot filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborMode {
    /// Distinct callees (out-neighbors).
    Out,
    /// Distinct alters over arcs in either direction.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotFilter {
    /// Vertices with at least this many neighbors are removed.
    pub max_neighbors: usize,
    pub mode: NeighborMode,
}

impl Default for RobotFilter {
    fn default() -> Self {
        RobotFilter { max_neighbors: 50, mode: NeighborMode::Out }
    }
}

/// Directed weighted graph induced by the calls inside one window.
///
/// Vertices are interned to dense ids; only endpoints of retained arcs are
/// kept (no isolates). Adjacency lists are sorted by id.
#[derive(Debug, Clone)]
pub struct WindowGraph {
    window: TimeWindow,
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    arcs: HashMap<(VertexId, VertexId), ArcStats>,
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    /// Undirected contact sets (union of out- and in-neighbors), sorted.
    contacts: Vec<Vec<VertexId>>,
    /// Total outgoing calls per vertex.
    out_calls: Vec<u64>,
}

impl WindowGraph {
    pub fn window(&self) -> TimeWindow {
        self.window
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn vertex_name(&self, id: VertexId) -> &str {
        &self.names[id as usize]
    }

    pub fn vertex_names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| s.as_str())
    }

    pub fn arc(&self, i: VertexId, j: VertexId) -> Option<&ArcStats> {
        self.arcs.get(&(i, j))
    }

    pub fn arc_by_name(&self, i: &str, j: &str) -> Option<&ArcStats> {
        let (i, j) = (self.vertex_id(i)?, self.vertex_id(j)?);
        self.arc(i, j)
    }

    pub fn has_arc_by_name(&self, i: &str, j: &str) -> bool {
        self.arc_by_name(i, j).is_some()
    }

    /// Distinct callees of `v`, sorted by id.
    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out_adj[v as usize]
    }

    /// Distinct callers of `v`, sorted by id.
    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.in_adj[v as usize]
    }

    /// Distinct alters of `v` over arcs in either direction, sorted by id.
    pub fn contacts(&self, v: VertexId) -> &[VertexId] {
        &self.contacts[v as usize]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_adj[v as usize].len()
    }

    /// Total calls made by `v` in the window.
    pub fn out_call_count(&self, v: VertexId) -> u64 {
        self.out_calls[v as usize]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId, &ArcStats)> {
        self.arcs.iter().map(|(&(i, j), s)| (i, j, s))
    }

    /// Arcs sorted by endpoint names; the canonical order for files and
    /// order-independent comparisons.
    pub fn arcs_sorted_by_name(&self) -> Vec<(&str, &str, &ArcStats)> {
        let mut v: Vec<(&str, &str, &ArcStats)> = self
            .arcs
            .iter()
            .map(|(&(i, j), s)| (self.vertex_name(i), self.vertex_name(j), s))
            .collect();
        v.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        v
    }

    fn canonical(&self) -> BTreeMap<(&str, &str), ArcStats> {
        self.arcs
            .iter()
            .map(|(&(i, j), s)| ((self.vertex_name(i), self.vertex_name(j)), *s))
            .collect()
    }

    /// Neighbor count under the given mode, for the robot filter.
    pub fn neighbor_count(&self, v: VertexId, mode: NeighborMode) -> usize {
        match mode {
            NeighborMode::Out => self.out_adj[v as usize].len(),
            NeighborMode::Total => self.contacts[v as usize].len(),
        }
    }
}

impl PartialEq for WindowGraph {
    fn eq(&self, other: &Self) -> bool {
        self.window == other.window && self.canonical() == other.canonical()
    }
}

/// Incremental builder; arc aggregates merge associatively, so records may
/// arrive in any order.
#[derive(Debug)]
struct GraphBuilder {
    window: TimeWindow,
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    arcs: HashMap<(VertexId, VertexId), ArcStats>,
}

impl GraphBuilder {
    fn new(window: TimeWindow) -> Self {
        GraphBuilder { window, names: Vec::new(), index: HashMap::new(), arcs: HashMap::new() }
    }

    fn intern(&mut self, name: &str) -> VertexId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as VertexId;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    fn add(&mut self, r: &CallRecord) {
        if !self.window.contains(r.timestamp) {
            return;
        }
        let i = self.intern(&r.caller);
        let j = self.intern(&r.callee);
        self.arcs
            .entry((i, j))
            .and_modify(|s| s.absorb(r))
            .or_insert_with(|| ArcStats::from_record(r));
    }

    fn add_arc(&mut self, i: &str, j: &str, stats: ArcStats) {
        let i = self.intern(i);
        let j = self.intern(j);
        self.arcs.insert((i, j), stats);
    }

    fn finish(self) -> WindowGraph {
        // Drop vertices that ended up with no incident arcs (interned by
        // out-of-window or removed records).
        let mut incident = vec![false; self.names.len()];
        for &(i, j) in self.arcs.keys() {
            incident[i as usize] = true;
            incident[j as usize] = true;
        }
        let mut remap: Vec<Option<VertexId>> = vec![None; self.names.len()];
        let mut names = Vec::new();
        for (old, name) in self.names.into_iter().enumerate() {
            if incident[old] {
                remap[old] = Some(names.len() as VertexId);
                names.push(name);
            }
        }
        let n = names.len();
        let index: HashMap<String, VertexId> =
            names.iter().enumerate().map(|(i, s)| (s.clone(), i as VertexId)).collect();
        let arcs: HashMap<(VertexId, VertexId), ArcStats> = self
            .arcs
            .into_iter()
            .map(|((i, j), s)| ((remap[i as usize].unwrap(), remap[j as usize].unwrap()), s))
            .collect();

        let mut out_adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        let mut in_adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        let mut out_calls = vec![0u64; n];
        for (&(i, j), s) in &arcs {
            out_adj[i as usize].push(j);
            in_adj[j as usize].push(i);
            out_calls[i as usize] += s.call_count;
        }
        let mut contacts: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for v in 0..n {
            out_adj[v].sort_unstable();
            in_adj[v].sort_unstable();
            let mut c: Vec<VertexId> = out_adj[v].iter().chain(in_adj[v].iter()).copied().collect();
            c.sort_unstable();
            c.dedup();
            contacts[v] = c;
        }

        WindowGraph { window: self.window, names, index, arcs, out_adj, in_adj, contacts, out_calls }
    }
}

/// Builds the graph of all calls falling inside `window`.
pub fn build_window_graph<'a, I>(records: I, window: TimeWindow) -> WindowGraph
where
    I: IntoIterator<Item = &'a CallRecord>,
{
    let mut b = GraphBuilder::new(window);
    for r in records {
        b.add(r);
    }
    b.finish()
}

/// Removes every vertex whose neighbor count in `g` reaches the cap, along
/// with all incident arcs. Returns the filtered graph and the removed
/// vertex names (sorted).
pub fn apply_robot_filter(g: &WindowGraph, filter: &RobotFilter) -> (WindowGraph, Vec<String>) {
    let robots: HashSet<VertexId> = (0..g.vertex_count() as VertexId)
        .filter(|&v| g.neighbor_count(v, filter.mode) >= filter.max_neighbors)
        .collect();
    let mut removed: Vec<String> =
        robots.iter().map(|&v| g.vertex_name(v).to_string()).collect();
    removed.sort_unstable();

    let mut b = GraphBuilder::new(g.window);
    for (i, j, stats) in g.arcs() {
        if !robots.contains(&i) && !robots.contains(&j) {
            b.add_arc(g.vertex_name(i), g.vertex_name(j), *stats);
        }
    }
    (b.finish(), removed)
}

/// Drops the named vertices and their incident arcs.
pub fn remove_vertices(g: &WindowGraph, names: &HashSet<String>) -> WindowGraph {
    let mut b = GraphBuilder::new(g.window);
    for (i, j, stats) in g.arcs() {
        let (ni, nj) = (g.vertex_name(i), g.vertex_name(j));
        if !names.contains(ni) && !names.contains(nj) {
            b.add_arc(ni, nj, *stats);
        }
    }
    b.finish()
}

/// Splits records into the two adjacent windows and builds both graphs.
///
/// The robot filter runs on τ₁; the removed vertex set is excluded from τ₂
/// as well, so labels are never computed against robot vertices. Returns
/// (τ₁ graph, τ₂ graph, removed names).
pub fn split_windows(
    records: &[CallRecord],
    cfg: &WindowConfig,
    filter: &RobotFilter,
) -> Result<(WindowGraph, WindowGraph, Vec<String>)> {
    cfg.validate()?;
    let g1 = build_window_graph(records.iter(), cfg.tau1());
    let g2 = build_window_graph(records.iter(), cfg.tau2());
    let (g1, removed) = apply_robot_filter(&g1, filter);
    let removed_set: HashSet<String> = removed.iter().cloned().collect();
    let g2 = remove_vertices(&g2, &removed_set);
    Ok((g1, g2, removed))
}

fn meta_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

#[derive(Serialize, Deserialize)]
struct GraphMeta {
    window: TimeWindow,
    vertex_count: usize,
    arc_count: usize,
}

/// Writes the arc list as CSV (`i,j,count,first,last,duration`, sorted by
/// endpoint names) plus a `.meta.json` sidecar carrying the window bounds.
pub fn save_graph_csv(g: &WindowGraph, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["i", "j", "count", "first", "last", "duration"])?;
    for (i, j, s) in g.arcs_sorted_by_name() {
        w.write_record([
            i,
            j,
            &s.call_count.to_string(),
            &s.first_call.to_string(),
            &s.last_call.to_string(),
            &s.total_duration.to_string(),
        ])?;
    }
    w.flush()?;
    let meta = GraphMeta {
        window: g.window,
        vertex_count: g.vertex_count(),
        arc_count: g.arc_count(),
    };
    let f = std::fs::File::create(meta_path(path))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(f), &meta)?;
    Ok(())
}

pub fn load_graph_csv(path: &Path) -> Result<WindowGraph> {
    let meta_file = meta_path(path);
    let meta: GraphMeta = serde_json::from_reader(std::io::BufReader::new(
        std::fs::File::open(&meta_file).map_err(|e| DecayError::Format {
            path: meta_file.display().to_string(),
            reason: format!("missing window metadata sidecar: {e}"),
        })?,
    ))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut b = GraphBuilder::new(meta.window);
    for row in rdr.records() {
        let row = row?;
        let bad = |reason: String| DecayError::Format {
            path: path.display().to_string(),
            reason,
        };
        if row.len() != 6 {
            return Err(bad(format!("expected 6 columns, got {}", row.len())));
        }
        let stats = ArcStats {
            call_count: row[2].parse().map_err(|_| bad(format!("bad count {:?}", &row[2])))?,
            first_call: row[3].parse().map_err(|_| bad(format!("bad first {:?}", &row[3])))?,
            last_call: row[4].parse().map_err(|_| bad(format!("bad last {:?}", &row[4])))?,
            total_duration: row[5].parse().map_err(|_| bad(format!("bad duration {:?}", &row[5])))?,
        };
        b.add_arc(&row[0], &row[1], stats);
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CallType;

    fn call(i: &str, j: &str, t: i64) -> CallRecord {
        CallRecord {
            caller: i.into(),
            callee: j.into(),
            timestamp: t,
            duration: 30,
            call_type: CallType::Voice,
        }
    }

    #[test]
    fn aggregates_counts_and_extremes() {
        let recs = vec![call("A", "B", 10), call("A", "B", 20), call("B", "A", 15)];
        let g = build_window_graph(recs.iter(), TimeWindow::new(0, 100).unwrap());
        let ab = g.arc_by_name("A", "B").unwrap();
        assert_eq!(ab.call_count, 2);
        assert_eq!(ab.first_call, 10);
        assert_eq!(ab.last_call, 20);
        assert_eq!(ab.total_duration, 60);
        let ba = g.arc_by_name("B", "A").unwrap();
        assert_eq!(ba.call_count, 1);
        assert_eq!(g.arc_count(), 2);
    }

    #[test]
    fn out_of_window_records_are_excluded() {
        let recs = vec![call("A", "B", 10)];
        let g = build_window_graph(recs.iter(), TimeWindow::new(20, 100).unwrap());
        assert_eq!(g.arc_count(), 0);
        assert_eq!(g.vertex_count(), 0);
    }

    #[test]
    fn empty_record_set_gives_empty_graph() {
        let g = build_window_graph([].iter(), TimeWindow::new(0, 10).unwrap());
        assert_eq!(g.arc_count(), 0);
    }

    // Independent per-pair tally over the same window.
    fn brute_force_counts(recs: &[CallRecord], w: TimeWindow) -> BTreeMap<(String, String), u64> {
        let mut m = BTreeMap::new();
        for r in recs {
            if r.timestamp >= w.start && r.timestamp < w.end {
                *m.entry((r.caller.clone(), r.callee.clone())).or_insert(0) += 1;
            }
        }
        m
    }

    #[test]
    fn random_calls_match_brute_force_tally() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let names: Vec<String> = (0..20).map(|i| format!("v{i}")).collect();
        let mut recs = Vec::new();
        for _ in 0..1000 {
            let a = rng.random_range(0..names.len());
            let mut b = rng.random_range(0..names.len());
            while b == a {
                b = rng.random_range(0..names.len());
            }
            recs.push(call(&names[a], &names[b], rng.random_range(-50..150)));
        }
        let w = TimeWindow::new(0, 100).unwrap();
        let g = build_window_graph(recs.iter(), w);
        let expected = brute_force_counts(&recs, w);
        let got: BTreeMap<(String, String), u64> = g
            .arcs_sorted_by_name()
            .into_iter()
            .map(|(i, j, s)| ((i.to_string(), j.to_string()), s.call_count))
            .collect();
        assert_eq!(got, expected);
        let total: u64 = g.arcs().map(|(_, _, s)| s.call_count).sum();
        let retained = recs.iter().filter(|r| w.contains(r.timestamp)).count() as u64;
        assert_eq!(total, retained);
    }

    fn star(hub_leaves: usize, extra: &[(&str, &str)]) -> Vec<CallRecord> {
        let mut recs: Vec<CallRecord> =
            (0..hub_leaves).map(|k| call("hub", &format!("leaf{k}"), 10 + k as i64)).collect();
        for &(a, b) in extra {
            recs.push(call(a, b, 5));
        }
        recs
    }

    #[test]
    fn robot_filter_removes_fifty_neighbor_vertex() {
        let recs = star(50, &[("x", "y")]);
        let g = build_window_graph(recs.iter(), TimeWindow::new(0, 100).unwrap());
        let (fg, removed) = apply_robot_filter(&g, &RobotFilter::default());
        assert_eq!(removed, vec!["hub".to_string()]);
        assert!(fg.vertex_id("hub").is_none());
        assert_eq!(fg.arc_count(), 1);
    }

    #[test]
    fn robot_filter_retains_forty_nine_neighbor_vertex() {
        let recs = star(49, &[]);
        let g = build_window_graph(recs.iter(), TimeWindow::new(0, 100).unwrap());
        let (fg, removed) = apply_robot_filter(&g, &RobotFilter::default());
        assert!(removed.is_empty());
        assert_eq!(fg.out_degree(fg.vertex_id("hub").unwrap()), 49);
    }

    #[test]
    fn filtered_star_equals_rebuild_without_hub() {
        let recs = star(60, &[("x", "y"), ("y", "x"), ("x", "leaf0")]);
        let w = TimeWindow::new(0, 100).unwrap();
        let g = build_window_graph(recs.iter(), w);
        let (fg, _) = apply_robot_filter(&g, &RobotFilter::default());
        let survivors: Vec<CallRecord> = recs
            .iter()
            .filter(|r| r.caller != "hub" && r.callee != "hub")
            .cloned()
            .collect();
        let rebuilt = build_window_graph(survivors.iter(), w);
        assert_eq!(fg, rebuilt);
    }

    #[test]
    fn robot_filter_is_idempotent() {
        let recs = star(55, &[("x", "y"), ("y", "z")]);
        let g = build_window_graph(recs.iter(), TimeWindow::new(0, 100).unwrap());
        let (once, _) = apply_robot_filter(&g, &RobotFilter::default());
        let (twice, removed) = apply_robot_filter(&once, &RobotFilter::default());
        assert!(removed.is_empty());
        assert_eq!(once, twice);
    }

    #[test]
    fn total_mode_counts_both_directions() {
        // 3 callees + 2 extra callers = 5 total neighbors.
        let recs = vec![
            call("v", "a", 1),
            call("v", "b", 1),
            call("v", "c", 1),
            call("d", "v", 1),
            call("e", "v", 1),
        ];
        let g = build_window_graph(recs.iter(), TimeWindow::new(0, 100).unwrap());
        let filter = RobotFilter { max_neighbors: 5, mode: NeighborMode::Total };
        let (_, removed) = apply_robot_filter(&g, &filter);
        assert_eq!(removed, vec!["v".to_string()]);
        let filter_out = RobotFilter { max_neighbors: 5, mode: NeighborMode::Out };
        let (_, removed) = apply_robot_filter(&g, &filter_out);
        assert!(removed.is_empty());
    }

    #[test]
    fn split_assigns_boundary_record_to_tau2() {
        let cfg = WindowConfig::new(0, 100, 100).unwrap();
        let recs = vec![call("A", "B", 100), call("A", "B", 99), call("A", "B", 199)];
        let (g1, g2, _) = split_windows(&recs, &cfg, &RobotFilter::default()).unwrap();
        assert_eq!(g1.arc_by_name("A", "B").unwrap().call_count, 1);
        assert_eq!(g2.arc_by_name("A", "B").unwrap().call_count, 2);
    }

    #[test]
    fn split_is_order_independent() {
        let cfg = WindowConfig::new(0, 50, 50).unwrap();
        let mut recs = vec![
            call("A", "B", 10),
            call("B", "C", 60),
            call("C", "A", 30),
            call("A", "B", 70),
            call("B", "A", 45),
        ];
        let (g1a, g2a, _) = split_windows(&recs, &cfg, &RobotFilter::default()).unwrap();
        recs.reverse();
        let (g1b, g2b, _) = split_windows(&recs, &cfg, &RobotFilter::default()).unwrap();
        assert_eq!(g1a, g1b);
        assert_eq!(g2a, g2b);
    }

    #[test]
    fn tau1_robots_are_excluded_from_tau2() {
        let cfg = WindowConfig::new(0, 100, 100).unwrap();
        let mut recs = star(50, &[("x", "y")]);
        recs.push(call("hub", "x", 150)); // τ₂ call by the robot
        recs.push(call("x", "y", 150));
        let (g1, g2, removed) = split_windows(&recs, &cfg, &RobotFilter::default()).unwrap();
        assert_eq!(removed, vec!["hub".to_string()]);
        assert!(g1.vertex_id("hub").is_none());
        assert!(g2.vertex_id("hub").is_none());
        assert!(g2.has_arc_by_name("x", "y"));
    }

    #[test]
    fn filtered_arc_endpoints_all_survive() {
        let recs = star(52, &[("x", "y"), ("leaf0", "leaf1")]);
        let g = build_window_graph(recs.iter(), TimeWindow::new(0, 100).unwrap());
        let (fg, removed) = apply_robot_filter(&g, &RobotFilter::default());
        let removed: HashSet<String> = removed.into_iter().collect();
        for (i, j, _) in fg.arcs() {
            assert!(!removed.contains(fg.vertex_name(i)));
            assert!(!removed.contains(fg.vertex_name(j)));
        }
    }

    #[test]
    fn graph_csv_round_trip() {
        let recs = vec![call("A", "B", 10), call("A", "B", 20), call("B", "C", 30)];
        let g = build_window_graph(recs.iter(), TimeWindow::new(0, 100).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tau1.csv");
        save_graph_csv(&g, &path).unwrap();
        let loaded = load_graph_csv(&path).unwrap();
        assert_eq!(g, loaded);
        assert_eq!(loaded.window(), TimeWindow::new(0, 100).unwrap());
    }
}
