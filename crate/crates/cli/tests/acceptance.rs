//! Acceptance checks, one test per criterion.
//!
//! Every test funnels through [`criterion`], which prints exactly one
//! `PASS`/`FAIL` line (run with `--nocapture` to see the PASS lines; FAIL
//! output surfaces automatically because the test panics). Tolerances are
//! pinned in the assertions rather than computed, so a regression cannot
//! silently loosen them.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use decaygraph_core::eval::{evaluate, f_measure, split_edges, SplitConfig};
use decaygraph_core::features::{feature_index, label_edges, FeatureConfig, FEATURE_NAMES};
use decaygraph_core::graph::{split_windows, RobotFilter, TimeWindow, WindowConfig};
use decaygraph_core::infogain::{
    entropy, info_gain_discrete, rank_features, ClassDistribution, DiscretizeStrategy, GainMode,
};
use decaygraph_core::ingest::{CallRecord, CallType};
use decaygraph_core::logit::{nll, nll_gradient, train_logit, LogitConfig};
use decaygraph_core::stats::{lower_median, spearman_matrix};
use decaygraph_core::synth::{cij_steep, generate, paperlike};
use decaygraph_core::tree::{DecisionTree, TreeConfig, TreeNode};
use decaygraph_core::Dataset;

/// Runs one criterion body, prints a single verdict line, and enforces an
/// optional wall-clock budget. The budget check happens before the verdict
/// is printed, so "correct but too slow" is reported as FAIL.
fn criterion(name: &str, budget_secs: Option<u64>, body: impl FnOnce()) {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = started.elapsed().as_secs_f64();
    let over_budget = budget_secs.is_some_and(|b| elapsed > b as f64);
    if outcome.is_ok() && !over_budget {
        println!("PASS  {name}  ({elapsed:.2}s)");
        return;
    }
    println!("FAIL  {name}  ({elapsed:.2}s)");
    match outcome {
        Err(cause) => std::panic::resume_unwind(cause),
        Ok(()) => panic!(
            "{name}: assertions held but the run took {elapsed:.2}s, over the {}s budget",
            budget_secs.unwrap()
        ),
    }
}

// ---------------------------------------------------------------------------
// 1. The worked info-gain example.
// ---------------------------------------------------------------------------

#[test]
fn c01_worked_infogain_example() {
    criterion("[ 1] worked info-gain example to printed precision", Some(1), || {
        // Two equal buckets: one 90/10 persist-heavy, one 10/90 decay-heavy.
        // Class entropy is exactly 1 bit, so gain = 1 - H(0.9, 0.1).
        let mut keys = Vec::new();
        let mut classes = Vec::new();
        for k in 0..2u8 {
            for n in 0..100u8 {
                keys.push(k);
                let heavy = u8::from(n < 90);
                classes.push(if k == 0 { heavy } else { 1 - heavy });
            }
        }
        let h90 = entropy(&ClassDistribution::new(90, 10)).unwrap();
        assert!(
            (h90 - 0.468_995_593_589_281_1).abs() < 1e-12,
            "H(90/10) drifted: {h90}"
        );

        let gain = info_gain_discrete(&keys, &classes, GainMode::Weighted).unwrap();
        assert!(
            (gain - 0.531_004_406_410_718_9).abs() < 1e-9,
            "worked-example gain drifted: {gain}"
        );

        // The figure this example is usually quoted at is 0.530, which is
        // mis-rounded in its last digit (the true value rounds to 0.531).
        // Printed-precision agreement therefore allows exactly one unit in
        // the third decimal, compared in integer milli-bits so float dust
        // cannot tip the verdict either way.
        let printed_milli = (gain * 1000.0).round() as i64;
        assert_eq!(printed_milli, 531);
        assert!(
            (printed_milli - 530).abs() <= 1,
            "rounded gain {printed_milli} milli-bits, quoted figure 530"
        );

        // Both averaging conventions coincide on equal-size buckets.
        let paper_mode = info_gain_discrete(&keys, &classes, GainMode::Paper).unwrap();
        assert!((gain - paper_mode).abs() < 1e-15);
    });
}

// ---------------------------------------------------------------------------
// 2. Entropy endpoints.
// ---------------------------------------------------------------------------

#[test]
fn c02_entropy_endpoints() {
    criterion("[ 2] entropy endpoints are exact", None, || {
        assert_eq!(entropy(&ClassDistribution::new(50, 50)).unwrap(), 1.0);
        assert_eq!(entropy(&ClassDistribution::new(1, 1)).unwrap(), 1.0);
        assert_eq!(entropy(&ClassDistribution::new(7, 0)).unwrap(), 0.0);
        assert_eq!(entropy(&ClassDistribution::new(0, 13)).unwrap(), 0.0);
    });
}

// ---------------------------------------------------------------------------
// 3. F-measure identity.
// ---------------------------------------------------------------------------

#[test]
fn c03_f_measure_identity() {
    criterion("[ 3] f-measure spot value and harmonic-mean identity", None, || {
        let f = f_measure(0.780, 0.754);
        assert!((f - 0.766_779_661_016_949).abs() < 1e-12, "F(0.780,0.754) = {f}");
        assert!((f - 0.767).abs() <= 0.0005);

        // 1000 random confusion matrices: the evaluation report must agree
        // with 2PR/(P+R) recomputed from raw counts, for both class rows.
        let mut rng = ChaCha8Rng::seed_from_u64(3303);
        let mut checked = 0;
        while checked < 1000 {
            let tp = rng.random_range(0..=40u64);
            let fp = rng.random_range(0..=40u64);
            let fn_ = rng.random_range(0..=40u64);
            let tn = rng.random_range(0..=40u64);
            if tp + fp + fn_ + tn == 0 {
                continue;
            }
            checked += 1;

            let mut preds = Vec::new();
            let mut truth = Vec::new();
            let mut push = |n: u64, p: u8, t: u8| {
                for _ in 0..n {
                    preds.push(p);
                    truth.push(t);
                }
            };
            push(tp, 1, 1);
            push(fp, 1, 0);
            push(fn_, 0, 1);
            push(tn, 0, 0);

            let report = evaluate("check", &preds, &truth).unwrap();
            let brute = |tp: u64, fp: u64, fn_: u64| -> f64 {
                let p = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
                let r = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
                if p + r == 0.0 {
                    0.0
                } else {
                    2.0 * p * r / (p + r)
                }
            };
            assert!(
                (report.persist.f_measure - brute(tp, fp, fn_)).abs() <= 1e-12,
                "persist f-measure mismatch at tp={tp} fp={fp} fn={fn_} tn={tn}"
            );
            // Decay as positive: predicted-decay-and-was-persist is the
            // false positive, predicted-persist-and-was-decay the miss.
            assert!(
                (report.decay.f_measure - brute(tn, fn_, fp)).abs() <= 1e-12,
                "decay f-measure mismatch at tp={tp} fp={fp} fn={fn_} tn={tn}"
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 4. The toy rectangle tree.
// ---------------------------------------------------------------------------

#[test]
fn c04_toy_rectangle_tree() {
    criterion("[ 4] toy tree recovers the rectangle rule exactly", None, || {
        // Integer grid with the split values themselves left out, so the
        // midpoint thresholds land exactly on x = 5 and y = 10 and "> 5"
        // means the same thing for the tree as for the generating rule.
        let mut rows = Vec::new();
        let mut classes = Vec::new();
        for x in (0..=10).filter(|&x| x != 5) {
            for y in (0..=20).filter(|&y| y != 10) {
                rows.push(vec![x as f64, y as f64]);
                classes.push(u8::from(x > 5 && y > 10));
            }
        }
        let ds = Dataset::from_rows(vec!["x".into(), "y".into()], &rows, classes).unwrap();
        let tree = DecisionTree::train(&ds, TreeConfig::default()).unwrap();

        let TreeNode::Split { feature_name, threshold, left, right, .. } = &tree.root else {
            panic!("root must be a split");
        };
        assert_eq!(feature_name, "x");
        assert_eq!(*threshold, 5.0);
        assert!(
            matches!(**left, TreeNode::Leaf { predicted: 0, .. }),
            "x <= 5 side must be a pure decay leaf"
        );
        let TreeNode::Split { feature_name: f2, threshold: t2, .. } = &**right else {
            panic!("x > 5 side must split again");
        };
        assert_eq!(f2, "y");
        assert_eq!(*t2, 10.0);

        // Exact region match over a 100x100 evaluation grid.
        for gx in 0..100 {
            for gy in 0..100 {
                let x = 10.0 * gx as f64 / 99.0;
                let y = 20.0 * gy as f64 / 99.0;
                let want = u8::from(x > 5.0 && y > 10.0);
                let (got, _) = tree.predict_row(&[x, y]);
                assert_eq!(got, want, "disagreement at ({x}, {y})");
            }
        }
    });
}

// ---------------------------------------------------------------------------
// Shared helpers: random corpora and an independent feature computation.
// ---------------------------------------------------------------------------

fn random_records(seed: u64, n_vertices: usize, n_calls: usize, lo: i64, hi: i64) -> Vec<CallRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_calls);
    for _ in 0..n_calls {
        let a = rng.random_range(0..n_vertices);
        let mut b = rng.random_range(0..n_vertices - 1);
        if b >= a {
            b += 1;
        }
        out.push(CallRecord {
            caller: format!("v{a}"),
            callee: format!("v{b}"),
            timestamp: rng.random_range(lo..hi),
            duration: rng.random_range(10..600),
            call_type: CallType::Voice,
        });
    }
    out
}

/// Feature computation written against plain name-keyed maps, sharing no
/// code with the graph layer. Used as the ground truth in criterion 5.
struct BruteGraph {
    window: TimeWindow,
    /// (caller, callee) -> call timestamps.
    arcs: BTreeMap<(String, String), Vec<i64>>,
}

impl BruteGraph {
    fn build(records: &[CallRecord], window: TimeWindow) -> BruteGraph {
        let mut arcs: BTreeMap<(String, String), Vec<i64>> = BTreeMap::new();
        for r in records {
            if r.timestamp >= window.start && r.timestamp < window.end {
                arcs.entry((r.caller.clone(), r.callee.clone()))
                    .or_default()
                    .push(r.timestamp);
            }
        }
        BruteGraph { window, arcs }
    }

    fn callees(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut m: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (i, j) in self.arcs.keys() {
            m.entry(i).or_default().insert(j);
        }
        m
    }

    fn callers(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut m: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for (i, j) in self.arcs.keys() {
            m.entry(j).or_default().insert(i);
        }
        m
    }

    /// Drop every arc touching a vertex with >= `max` distinct callees,
    /// mirroring the robot filter's single pass in out-neighbor mode.
    fn without_robots(&self, max: usize) -> (BruteGraph, BTreeSet<String>) {
        let robots: BTreeSet<String> = self
            .callees()
            .iter()
            .filter(|(_, outs)| outs.len() >= max)
            .map(|(v, _)| v.to_string())
            .collect();
        let arcs = self
            .arcs
            .iter()
            .filter(|((i, j), _)| !robots.contains(i) && !robots.contains(j))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        (BruteGraph { window: self.window, arcs }, robots)
    }

    fn features(&self, i: &str, j: &str) -> [f64; 15] {
        let callees = self.callees();
        let callers = self.callers();
        let empty = BTreeSet::new();
        let outs = |v: &str| callees.get(v).unwrap_or(&empty);
        let ins = |v: &str| callers.get(v).unwrap_or(&empty);
        let contacts = |v: &str| -> BTreeSet<&str> {
            outs(v)
                .iter()
                .chain(ins(v).iter())
                .copied()
                .filter(|&u| u != i && u != j)
                .collect()
        };
        let calls = |a: &str, b: &str| -> u64 {
            self.arcs
                .get(&(a.to_string(), b.to_string()))
                .map_or(0, |ts| ts.len() as u64)
        };
        let calls_made = |v: &str| -> u64 { outs(v).iter().map(|&u| calls(v, u)).sum() };

        let d_i = outs(i).len() as f64;
        let d_j = outs(j).len() as f64;
        let c_i = calls_made(i);
        let c_j = calls_made(j);
        let c_ij = calls(i, j);
        let c_ji = calls(j, i);
        let p_ij = c_ij as f64 / c_i as f64;
        let p_ji = if c_j == 0 { 0.0 } else { c_ji as f64 / c_j as f64 };

        let ni = contacts(i);
        let nj = contacts(j);
        let cn = ni.intersection(&nj).count() as f64;
        let in_ = ni.iter().filter(|&&v| calls(v, j) > 0).count() as f64;
        let jn = nj.iter().filter(|&&v| calls(v, i) > 0).count() as f64;
        let cross = |from: &BTreeSet<&str>, to: &BTreeSet<&str>| -> u64 {
            let mut n = 0;
            for &u in from {
                for &v in to {
                    if calls(u, v) > 0 {
                        n += 1;
                    }
                }
            }
            n
        };
        let injn = cross(&ni, &nj) as f64;
        let jnin = cross(&nj, &ni) as f64;

        let ts = &self.arcs[&(i.to_string(), j.to_string())];
        let len = (self.window.end - self.window.start) as f64;
        let fdate = (*ts.iter().min().unwrap() - self.window.start) as f64 / len;
        let edate = (*ts.iter().max().unwrap() - self.window.start) as f64 / len;

        [
            d_i, d_j, c_i as f64, c_j as f64, c_ij as f64, c_ji as f64, p_ij, p_ji, cn, in_, jn,
            injn, jnin, fdate, edate,
        ]
    }
}

// ---------------------------------------------------------------------------
// 5. Features against brute force.
// ---------------------------------------------------------------------------

#[test]
fn c05_features_match_brute_force() {
    criterion("[ 5] features match brute force on 50 random graphs", Some(30), || {
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(9000 + seed);
            let n_vertices = rng.random_range(5..=50);
            let n_calls = rng.random_range(20..=400);
            let records = random_records(7000 + seed, n_vertices, n_calls, 800, 2200);
            let cfg = WindowConfig::new(1000, 600, 400).unwrap();

            let (g1, g2, _) =
                split_windows(&records, &cfg, &RobotFilter::default()).unwrap();
            let edges = label_edges(&g1, &g2, &FeatureConfig::default());

            let (b1, robots) = BruteGraph::build(&records, cfg.tau1()).without_robots(50);
            assert!(robots.is_empty(), "<=50 vertices cannot trip the filter");
            let b2 = BruteGraph::build(&records, cfg.tau2());

            let keys: BTreeSet<(String, String)> =
                edges.iter().map(|e| (e.source.clone(), e.target.clone())).collect();
            let brute_keys: BTreeSet<(String, String)> = b1.arcs.keys().cloned().collect();
            assert_eq!(keys, brute_keys, "arc sets differ at seed {seed}");

            for e in &edges {
                let got = e.features.to_array();
                let want = b1.features(&e.source, &e.target);
                for (f, (g, w)) in got.iter().zip(want.iter()).enumerate() {
                    assert!(
                        g == w,
                        "seed {seed} edge {}->{} feature {}: got {g}, brute force {w}",
                        e.source,
                        e.target,
                        FEATURE_NAMES[f]
                    );
                }
                let persisted = b2.arcs.contains_key(&(e.source.clone(), e.target.clone()));
                assert_eq!(e.class, u8::from(persisted), "label mismatch at seed {seed}");
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 6. Normalization identities and the degree cap.
// ---------------------------------------------------------------------------

#[test]
fn c06_share_date_and_degree_invariants() {
    criterion("[ 6] p-shares sum to 1, dates stay in [0,1], degrees stay under 50", None, || {
        // A mid-sized random corpus with two planted heavy dialers, one
        // just past the robot threshold and one well past it.
        let mut records = random_records(41, 120, 3000, 0, 10_000);
        for (name, fanout) in [("etl-dialer", 55usize), ("spam-blaster", 70)] {
            for k in 0..fanout {
                records.push(CallRecord {
                    caller: name.to_string(),
                    callee: format!("v{k}"),
                    timestamp: 10 + k as i64,
                    duration: 5,
                    call_type: CallType::Voice,
                });
            }
        }
        let cfg = WindowConfig::new(0, 6000, 4000).unwrap();
        let (g1, g2, removed) =
            split_windows(&records, &cfg, &RobotFilter::default()).unwrap();

        assert!(removed.iter().any(|v| v == "etl-dialer"));
        assert!(removed.iter().any(|v| v == "spam-blaster"));
        for v in 0..g1.vertex_count() as u32 {
            assert!(g1.out_degree(v) <= 49, "out-degree cap violated after filtering");
        }

        let edges = label_edges(&g1, &g2, &FeatureConfig::default());
        assert!(!edges.is_empty());

        let mut share_by_source: BTreeMap<&str, f64> = BTreeMap::new();
        for e in &edges {
            let f = &e.features;
            assert!((1..=49).contains(&f.d_i), "edge source degree {} out of range", f.d_i);
            assert!(f.d_j <= 49);
            assert!((0.0..=1.0).contains(&f.p_ij));
            assert!((0.0..=1.0).contains(&f.p_ji));
            assert!(
                 0.0 <= f.fdate && f.fdate <= f.edate && f.edate <= 1.0,
                "date bounds violated: fdate={} edate={}",
                f.fdate,
                f.edate
            );
            *share_by_source.entry(&e.source).or_default() += f.p_ij;
        }
        for (source, total) in share_by_source {
            assert!(
                (total - 1.0).abs() <= 1e-12,
                "p_ij over {source}'s edges sums to {total}, not 1"
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 7. Spearman matrix against an independent oracle.
// ---------------------------------------------------------------------------

fn oracle_average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut ranks = vec![0.0; xs.len()];
    let mut s = 0;
    while s < order.len() {
        let mut e = s;
        while e + 1 < order.len() && xs[order[e + 1]] == xs[order[s]] {
            e += 1;
        }
        let avg = (s + e) as f64 / 2.0 + 1.0;
        for k in s..=e {
            ranks[order[k]] = avg;
        }
        s = e + 1;
    }
    ranks
}

fn oracle_pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for k in 0..a.len() {
        let (da, db) = (a[k] - ma, b[k] - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        None
    } else {
        Some(sab / (saa * sbb).sqrt())
    }
}

#[test]
fn c07_spearman_matches_oracle() {
    criterion("[ 7] spearman matrix matches rank-then-pearson to 1e-12", None, || {
        let records = random_records(77, 300, 6000, 0, 8000);
        let cfg = WindowConfig::new(0, 5000, 3000).unwrap();
        let (g1, g2, _) = split_windows(&records, &cfg, &RobotFilter::default()).unwrap();
        let edges = label_edges(&g1, &g2, &FeatureConfig::default());
        assert!(edges.len() >= 200, "need at least 200 edges, got {}", edges.len());

        let sample = Dataset::from_edges(&edges[..200]);
        let matrix = spearman_matrix(&sample).unwrap();

        let ranks: Vec<Vec<f64>> =
            (0..15).map(|f| oracle_average_ranks(&sample.column(f))).collect();
        for i in 0..15 {
            for j in 0..15 {
                assert_eq!(matrix.get(i, j), matrix.get(j, i), "asymmetry at ({i},{j})");
                let want = if i == j {
                    oracle_pearson(&ranks[i], &ranks[i]).map(|_| 1.0)
                } else {
                    oracle_pearson(&ranks[i], &ranks[j])
                };
                match (matrix.get(i, j), want) {
                    (Some(got), Some(want)) => assert!(
                        (got - want).abs() <= 1e-12,
                        "rho({}, {}) = {got}, oracle {want}",
                        FEATURE_NAMES[i],
                        FEATURE_NAMES[j]
                    ),
                    (None, None) => {}
                    (got, want) => panic!(
                        "definedness mismatch at ({}, {}): {got:?} vs {want:?}",
                        FEATURE_NAMES[i], FEATURE_NAMES[j]
                    ),
                }
                if i == j && matrix.get(i, j).is_some() {
                    assert_eq!(matrix.get(i, j), Some(1.0), "diagonal must be exactly 1");
                }
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 8. The steep single-feature corpus end to end.
// ---------------------------------------------------------------------------

#[test]
fn c08_steep_rule_corpus() {
    criterion("[ 8] steep corpus: c_ij tops ranking, roots the tree, near-Bayes accuracy", Some(120), || {
        let out = generate(&cij_steep(42)).unwrap();
        let cfg = &out.truth.config;
        let (g1, g2, _) =
            split_windows(&out.records, &cfg.window, &RobotFilter::default()).unwrap();
        let edges = label_edges(&g1, &g2, &FeatureConfig::default());
        assert_eq!(edges.len(), out.truth.n_tau1_arcs);
        assert!(edges.len() >= 100_000, "corpus too small: {} arcs", edges.len());

        let ds = Dataset::from_edges(&edges);
        let ranking =
            rank_features(&ds, DiscretizeStrategy::BestBinarySplit, GainMode::Weighted).unwrap();
        assert_eq!(ranking.features[0].name, "c_ij", "c_ij must rank first");

        let split = SplitConfig { train_fraction: 2.0 / 3.0, seed: 9, stratify: true };
        let (train, test) = split_edges(&edges, &split).unwrap();
        let train_ds = Dataset::from_edges(&train);
        let test_ds = Dataset::from_edges(&test);

        let tree_cfg = TreeConfig { min_leaf_size: 50, ..TreeConfig::default() };
        let tree = DecisionTree::train(&train_ds, tree_cfg).unwrap();
        assert_eq!(tree.root_feature(), Some("c_ij"), "tree must split on c_ij first");

        let logit = train_logit(
            &train_ds,
            LogitConfig { standardize: true, ..LogitConfig::default() },
        )
        .unwrap();

        let bayes = out.truth.bayes_accuracy;
        for (name, preds) in [("tree", tree.predict(&test_ds)), ("logit", logit.predict(&test_ds))]
        {
            let report = evaluate(name, &preds, test_ds.classes()).unwrap();
            let acc = report.persist.accuracy;
            assert!(
                (acc - bayes).abs() <= 0.03,
                "{name} accuracy {acc:.4} not within 3pp of Bayes {bayes:.4}"
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 9. Sign recovery and monotone-transform invariance.
// ---------------------------------------------------------------------------

fn with_column_mapped(ds: &Dataset, col: usize, f: impl Fn(f64) -> f64) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..ds.n_rows())
        .map(|r| {
            let mut row = ds.row(r).to_vec();
            row[col] = f(row[col]);
            row
        })
        .collect();
    Dataset::from_rows(ds.feature_names().to_vec(), &rows, ds.classes().to_vec()).unwrap()
}

#[test]
fn c09_signs_and_monotone_invariance() {
    criterion("[ 9] planted signs recovered; tree invariant to monotone rescaling", Some(120), || {
        let out = generate(&paperlike(11)).unwrap();
        let (g1, g2, _) = split_windows(
            &out.records,
            &out.truth.config.window,
            &RobotFilter::default(),
        )
        .unwrap();
        let edges = label_edges(&g1, &g2, &FeatureConfig::default());
        let ds = Dataset::from_edges(&edges);

        let logit =
            train_logit(&ds, LogitConfig { standardize: true, ..LogitConfig::default() }).unwrap();
        assert!(logit.meta.converged, "logit must converge on the planted corpus");
        for (name, expected_sign) in
            [("c_ij", 1.0), ("c_ji", 1.0), ("edate", 1.0), ("fdate", -1.0), ("d_i", -1.0)]
        {
            let beta = logit.coefficients[feature_index(name).unwrap()];
            assert!(
                beta * expected_sign > 0.0,
                "coefficient for {name} is {beta}, expected sign {expected_sign}"
            );
        }

        // Strictly increasing rescalings of a single column must leave the
        // tree's training-set predictions untouched: split candidates map
        // one-to-one, gains are functions of counts alone, and ties still
        // resolve the same way. Cubing is exact for these small integer
        // counts; scaling by 4 is exact for the binary fractions in edate.
        let tree = DecisionTree::train(&ds, TreeConfig::default()).unwrap();
        let baseline = tree.predict(&ds);
        for (name, f) in [
            ("c_ij", Box::new(|x: f64| x * x * x) as Box<dyn Fn(f64) -> f64>),
            ("edate", Box::new(|x: f64| 4.0 * x)),
        ] {
            let col = feature_index(name).unwrap();
            let mapped = with_column_mapped(&ds, col, f);
            let tree2 = DecisionTree::train(&mapped, TreeConfig::default()).unwrap();
            assert_eq!(
                tree2.predict(&mapped),
                baseline,
                "tree predictions changed under a monotone rescale of {name}"
            );
        }
    });
}

// ---------------------------------------------------------------------------
// 10. Analytic gradient vs central differences.
// ---------------------------------------------------------------------------

#[test]
fn c10_gradient_matches_finite_differences() {
    criterion("[10] analytic gradient within 1e-6 of central differences", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(606);
        for case in 0..20 {
            let n = 40;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..5).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let mut classes: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.5))).collect();
            classes[0] = 0;
            classes[1] = 1; // both classes always present
            let names = (0..5).map(|k| format!("f{k}")).collect();
            let ds = Dataset::from_rows(names, &rows, classes).unwrap();

            let intercept: f64 = rng.random_range(-1.5..1.5);
            let coefs: Vec<f64> = (0..5).map(|_| rng.random_range(-1.5..1.5)).collect();
            let ridge = if case % 2 == 0 { 0.0 } else { 0.05 };

            let (g0, g) = nll_gradient(&ds, intercept, &coefs, ridge).unwrap();
            let check = |analytic: f64, numeric: f64, what: &str| {
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1.0);
                assert!(
                    rel <= 1e-6,
                    "case {case} {what}: analytic {analytic}, numeric {numeric}, rel {rel:e}"
                );
            };

            let h0 = 1e-5 * intercept.abs().max(1.0);
            let plus = nll(&ds, intercept + h0, &coefs, ridge).unwrap();
            let minus = nll(&ds, intercept - h0, &coefs, ridge).unwrap();
            check(g0, (plus - minus) / (2.0 * h0), "intercept");

            for k in 0..5 {
                let h = 1e-5 * coefs[k].abs().max(1.0);
                let mut up = coefs.clone();
                up[k] += h;
                let mut down = coefs.clone();
                down[k] -= h;
                let plus = nll(&ds, intercept, &up, ridge).unwrap();
                let minus = nll(&ds, intercept, &down, ridge).unwrap();
                check(g[k], (plus - minus) / (2.0 * h), &format!("beta[{k}]"));
            }
        }
    });
}

// ---------------------------------------------------------------------------
// 11. Byte-identical reruns through the real binary.
// ---------------------------------------------------------------------------

#[test]
fn c11_reruns_are_byte_identical() {
    criterion("[11] same seed, fresh directory: byte-identical artifacts", None, || {
        let base = tempfile::tempdir().unwrap();
        let config = base.path().join("pipeline.toml");
        std::fs::write(
            &config,
            "seed = 5\nout_dir = \"unused\"\n\n[synth]\npreset = \"paperlike\"\nn_vertices = 800\n",
        )
        .unwrap();

        for dir in ["a", "b"] {
            let output = Command::new(env!("CARGO_BIN_EXE_decaygraph"))
                .arg("run")
                .arg("--config")
                .arg(&config)
                .arg("--out-dir")
                .arg(base.path().join(dir))
                .output()
                .unwrap();
            assert!(
                output.status.success(),
                "pipeline run into {dir} failed:\n{}",
                String::from_utf8_lossy(&output.stderr)
            );
        }

        for file in [
            "records.csv",
            "truth.json",
            "truth_edges.csv",
            "ingested.csv",
            "ingest_report.json",
            "tau1.csv",
            "tau1.meta.json",
            "tau2.csv",
            "tau2.meta.json",
            "build_report.json",
            "features.csv",
            "correlations.csv",
            "ranking.json",
            "train.csv",
            "test.csv",
            "tree.json",
            "logit.json",
            "eval_tree.json",
            "eval_logit.json",
            "compare.txt",
            "manifest.json",
        ] {
            let a = std::fs::read(base.path().join("a").join(file)).unwrap();
            let b = std::fs::read(base.path().join("b").join(file)).unwrap();
            assert!(a == b, "{file} differs between identically-seeded runs");
        }
    });
}

// ---------------------------------------------------------------------------
// 12. The paper-shaped preset's class balance and degree median.
// ---------------------------------------------------------------------------

#[test]
fn c12_preset_balance_and_degrees() {
    criterion("[12] preset corpus: 43% +/- 2pp decay share, median out-degree 3 +/- 1", None, || {
        let out = generate(&paperlike(7)).unwrap();
        let (g1, g2, _) = split_windows(
            &out.records,
            &out.truth.config.window,
            &RobotFilter::default(),
        )
        .unwrap();
        let edges = label_edges(&g1, &g2, &FeatureConfig::default());
        assert!(!edges.is_empty());

        let decayed = edges.iter().filter(|e| e.class == 0).count() as f64;
        let share = decayed / edges.len() as f64;
        assert!(
            (share - 0.43).abs() <= 0.02,
            "decayed share {share:.4} outside 0.43 +/- 0.02"
        );

        let mut degrees: Vec<f64> =
            (0..g1.vertex_count() as u32).map(|v| g1.out_degree(v) as f64).collect();
        degrees.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = lower_median(&degrees);
        assert!(
            (2.0..=4.0).contains(&median),
            "median out-degree {median} outside 3 +/- 1"
        );
    });
}
