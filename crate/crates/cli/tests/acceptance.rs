//! Acceptance gate: one integration test per release criterion. Every test
//! ends with a single `criterion N (...): PASS` line; the assertions carry
//! the tolerances, so a red test means the criterion itself is not met.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use deanon_core::generators::{generate_chung_lu, generate_gnp, GnpParams, PowerLawParams};
use deanon_core::graph::Attribute;
use deanon_core::knowledge::{
    self, analytic_point, probabilistic_config_sum, AttributeMode, Completeness,
};
use deanon_core::matching::{
    color_coding_count, count_matches, monte_carlo_expected_matches, recommended_iterations,
    star_match_count, CountOptions, EdgeSemantics, MatchSemantics, TrialMeasure,
};
use deanon_core::querygen::uniform_confidence;
use deanon_core::rng::{derive_seed, tag, SplitMix64};
use deanon_core::sweep::{find_critical_points, grid, sweep, SweepAxis};
use deanon_core::{AttributeSchema, DagStatus, EdgeMode, Graph, KnowledgeSpec, Query};
use deanon_gain::experiments::{bound_check_table, random_tree};
use tempfile::TempDir;

fn edges_only_spec(edge_mode: EdgeMode) -> KnowledgeSpec {
    KnowledgeSpec { edge_mode, attribute_mode: AttributeMode::Ignored }
}

/// Four-value attribute with a +-1 band kernel: p_same = 0.30,
/// p_similar = 0.70 under independent draws from the marginal.
fn banded_schema() -> AttributeSchema {
    let marginal = vec![0.1, 0.2, 0.3, 0.4];
    let mut kernel = vec![0.0; 16];
    for i in 0..4i32 {
        for j in 0..4i32 {
            if (i - j).abs() <= 1 {
                kernel[(i * 4 + j) as usize] = 1.0;
            }
        }
    }
    let attr = Attribute::new("band", marginal).unwrap().with_similarity(kernel).unwrap();
    AttributeSchema::new(vec![attr])
}

fn all_pairs(n_q: u32) -> Vec<(u32, u32)> {
    (0..n_q).flat_map(|a| ((a + 1)..n_q).map(move |b| (a, b))).collect()
}

/// Mapping-level mismatch: query edges absent under the image, and image
/// edges between mapped nodes that the query lacks.
fn mismatch(g: &Graph, q: &Query, image: &[u32]) -> (u32, u32) {
    let n_q = q.node_count() as u32;
    let mut missed = 0;
    let mut extra = 0;
    for a in 0..n_q {
        for b in (a + 1)..n_q {
            let present = g.has_edge(image[a as usize], image[b as usize]);
            if q.has_edge(a, b) {
                if !present {
                    missed += 1;
                }
            } else if present {
                extra += 1;
            }
        }
    }
    (missed, extra)
}

/// Reference counter: enumerate every ordered injective mapping and apply
/// the acceptance predicate to its mismatch counts. Exponential, so only
/// for tiny instances.
fn naive_count(g: &Graph, q: &Query, accept: &dyn Fn(u32, u32) -> bool) -> u64 {
    fn rec(
        g: &Graph,
        q: &Query,
        accept: &dyn Fn(u32, u32) -> bool,
        image: &mut Vec<u32>,
        used: &mut [bool],
        total: &mut u64,
    ) {
        if image.len() == q.node_count() {
            let (missed, extra) = mismatch(g, q, image);
            if accept(missed, extra) {
                *total += 1;
            }
            return;
        }
        for w in 0..g.node_count() as u32 {
            if !used[w as usize] {
                used[w as usize] = true;
                image.push(w);
                rec(g, q, accept, image, used, total);
                image.pop();
                used[w as usize] = false;
            }
        }
    }
    let mut total = 0;
    rec(g, q, accept, &mut Vec::new(), &mut vec![false; g.node_count()], &mut total);
    total
}

/// Random connected query on up to 4 nodes, by rejection.
fn random_query(rng: &mut SplitMix64) -> Query {
    loop {
        let n_q = 2 + rng.next_range(3) as usize;
        let p_q = [0.4, 0.7, 1.0][rng.next_range(3) as usize];
        let mut edges = Vec::new();
        for a in 0..n_q as u32 {
            for b in (a + 1)..n_q as u32 {
                if rng.next_unit() < p_q {
                    edges.push((a, b));
                }
            }
        }
        if let Ok(q) = Query::connected(n_q, &edges) {
            return q;
        }
    }
}

#[test]
fn criterion_1_exact_counts_match_naive_enumeration() {
    let start = Instant::now();
    type Accept = fn(u32, u32) -> bool;
    let semantics: [(EdgeSemantics, Accept); 7] = [
        (EdgeSemantics::ExactPartial, |m, _| m == 0),
        (EdgeSemantics::ExactComplete, |m, e| m == 0 && e == 0),
        (EdgeSemantics::NoisyPartial { epsilon: 0 }, |m, _| m == 0),
        (EdgeSemantics::NoisyPartial { epsilon: 1 }, |m, _| m <= 1),
        (EdgeSemantics::NoisyPartial { epsilon: 2 }, |m, _| m <= 2),
        (EdgeSemantics::NoisyComplete { epsilon: 0 }, |m, e| m == 0 && e == 0),
        (EdgeSemantics::NoisyComplete { epsilon: 1 }, |m, e| m <= 1 && e <= 1),
    ];
    let mut rng = SplitMix64::new(0xACC1);
    let mut cases = 0u64;
    for graph_index in 0..80u64 {
        let n = 4 + (graph_index % 5) as usize;
        let p = [0.2, 0.5, 0.8][(graph_index % 3) as usize];
        let g = generate_gnp(&GnpParams { n, p, seed: rng.next_u64() }).unwrap();
        let q = random_query(&mut rng);
        for (edge, accept) in &semantics {
            let got = count_matches(
                &g,
                &q,
                &MatchSemantics::edges_only(*edge),
                None,
                &CountOptions::default(),
            )
            .unwrap()
            .match_count;
            let want = naive_count(&g, &q, accept);
            assert_eq!(
                got, want,
                "graph {graph_index} (n={n}, p={p}), n_q={}, semantics {edge:?}",
                q.node_count()
            );
            cases += 1;
        }
    }
    assert!(cases >= 500, "need at least 500 oracle cases, ran {cases}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "oracle sweep took {elapsed:?}");
    println!("criterion 1 (search count equals naive enumeration, {cases} cases): PASS");
}

#[test]
fn criterion_2_analytic_expectation_matches_monte_carlo() {
    let q = Query::path(3);
    let schema = banded_schema();
    let with_attrs = |attribute_mode| KnowledgeSpec { edge_mode: EdgeMode::ExactPartial, attribute_mode };
    // Expected counts on (8)_3 = 336 ordered mappings at p = 0.5, frozen
    // from the closed forms: the path has m_Q = 2 of m0 = 3 pairs, and the
    // banded attribute contributes per-node factors 0.3 / 0.7.
    let rows: Vec<(&str, KnowledgeSpec, f64)> = vec![
        ("exact-partial", edges_only_spec(EdgeMode::ExactPartial), 84.0),
        ("exact-complete", edges_only_spec(EdgeMode::ExactComplete), 42.0),
        ("noisy-partial(1)", edges_only_spec(EdgeMode::NoisyPartial { epsilon: 1 }), 252.0),
        ("noisy-partial(2)", edges_only_spec(EdgeMode::NoisyPartial { epsilon: 2 }), 336.0),
        ("noisy-complete(1)", edges_only_spec(EdgeMode::NoisyComplete { epsilon: 1 }), 252.0),
        ("noisy-complete(2)", edges_only_spec(EdgeMode::NoisyComplete { epsilon: 2 }), 336.0),
        ("attrs-exact", with_attrs(AttributeMode::Exact), 2.268),
        ("attrs-almost-nodes(1)", with_attrs(AttributeMode::AlmostNodes { epsilon: 1 }), 18.144),
        ("attrs-approximate", with_attrs(AttributeMode::Approximate), 28.812),
    ];
    let trials = 20_000;
    for (label, spec, frozen) in rows {
        let point = analytic_point(&spec, 8, 3, 2, 0.5, Some(&schema), None).unwrap();
        let analytic = point.match_count.value();
        assert!(
            (analytic - frozen).abs() <= 1e-9 * frozen,
            "{label}: analytic {analytic} drifted from frozen {frozen}"
        );
        let sem = MatchSemantics::from_spec(&spec).expect("deterministic modes only");
        let est = monte_carlo_expected_matches(
            8,
            0.5,
            &q,
            &TrialMeasure::Count(sem),
            Some(&schema),
            trials,
            0xC2,
        )
        .unwrap();
        assert!(
            est.covers(analytic),
            "{label}: Monte-Carlo {} +- {} misses analytic {analytic}",
            est.mean,
            est.half_width_99
        );
    }
    println!("criterion 2 (analytic expectation within MC 99% interval, 9 modes x {trials} trials): PASS");
}

#[test]
fn criterion_3_probabilistic_closed_forms() {
    // Graph-conditional Monte Carlo against the two uniform-confidence
    // closed forms on the complete 4-node query over G(6, p): per pair,
    // partial contributes 1 - p_e + p p_e and complete
    // 1 - p - p_e + 2 p p_e, to the sixth power, times (6)_4 = 360.
    let pairs = all_pairs(4);
    for &p in &[0.2, 0.5] {
        for &p_e in &[0.2, 0.5] {
            let q =
                Query::with_confidence(4, &pairs, uniform_confidence(4, p_e).unwrap()).unwrap();
            for (completeness, factor) in [
                (Completeness::Partial, 1.0 - p_e + p * p_e),
                (Completeness::Complete, 1.0 - p - p_e + 2.0 * p * p_e),
            ] {
                let closed = 360.0 * factor.powi(6);
                let est = monte_carlo_expected_matches(
                    6,
                    p,
                    &q,
                    &TrialMeasure::GraphConditional(completeness),
                    None,
                    20_000,
                    0xC3,
                )
                .unwrap();
                assert!(
                    est.covers(closed),
                    "p={p}, p_e={p_e}, {completeness:?}: MC {} +- {} misses {closed}",
                    est.mean,
                    est.half_width_99
                );
            }
        }
    }
    // Frozen spot value for the partial form at p = p_e = 0.2.
    assert!((360.0 * 0.84f64.powi(6) - 126.46729138176).abs() < 1e-9);

    // Exhaustive configuration sums against the same closed forms to ten
    // significant digits, for every m0 up to 15.
    for n_q in 2..=6u32 {
        let m0 = (n_q * (n_q - 1) / 2) as f64;
        let pairs = all_pairs(n_q);
        for &p in &[0.2, 0.5] {
            for &p_e in &[0.2, 0.5, 0.9] {
                let q = Query::with_confidence(
                    n_q as usize,
                    &pairs,
                    uniform_confidence(n_q as usize, p_e).unwrap(),
                )
                .unwrap();
                for (completeness, factor) in [
                    (Completeness::Partial, 1.0 - p_e + p * p_e),
                    (Completeness::Complete, 1.0 - p - p_e + 2.0 * p * p_e),
                ] {
                    let sum = probabilistic_config_sum(&q, p, completeness).unwrap();
                    let expected_ln = m0 * factor.ln();
                    assert!(
                        (sum.ln() - expected_ln).abs() <= 1e-10,
                        "n_q={n_q}, p={p}, p_e={p_e}, {completeness:?}: \
                         ln sum {} vs closed {expected_ln}",
                        sum.ln()
                    );
                }
            }
        }
    }
    println!("criterion 3 (probabilistic closed forms: 8 MC checks, 60 config sums to 10 digits): PASS");
}

#[test]
fn criterion_4_valley_then_vanish_transition() {
    let start = Instant::now();
    let xs = grid(2.0, 200.0, 1.0);
    let bare = sweep(
        &edges_only_spec(EdgeMode::ExactPartial),
        1_000_000,
        0.2,
        SweepAxis::QuerySize { p_q: 0.3 },
        &xs,
        1.0,
        None,
    );
    let crit = find_critical_points(&bare);
    let (valley, vanish) = (crit.valley.expect("valley"), crit.vanish.expect("vanish"));
    assert!(valley < vanish, "valley {valley} must precede vanish {vanish}");
    assert_eq!((valley, vanish), (30.0, 59.0), "frozen transition for the default parameters");

    // One-in-a-hundred per-node attribute knowledge pulls the whole
    // transition toward smaller queries.
    let schema =
        AttributeSchema::new(vec![Attribute::new("id100", vec![0.01; 100]).unwrap()]);
    let spec =
        KnowledgeSpec { edge_mode: EdgeMode::ExactPartial, attribute_mode: AttributeMode::Exact };
    let attrs = sweep(&spec, 1_000_000, 0.2, SweepAxis::QuerySize { p_q: 0.3 }, &xs, 1.0, Some(&schema));
    let crit = find_critical_points(&attrs);
    let (valley_a, vanish_a) = (crit.valley.expect("valley"), crit.vanish.expect("vanish"));
    assert!(valley_a < vanish_a);
    assert!(vanish_a < vanish, "attribute knowledge must shrink the vanish point");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "two 199-point sweeps took {elapsed:?}");
    println!(
        "criterion 4 (valley-then-vanish: bare ({valley}, {vanish}), \
         with attributes ({valley_a}, {vanish_a})): PASS"
    );
}

#[test]
fn criterion_5_gain_monotone_in_knowledge_quality() {
    let start = Instant::now();
    let xs = grid(0.0, 1.0, 0.05);
    let curve = sweep(
        &edges_only_spec(EdgeMode::ExactPartial),
        1_000_000,
        0.2,
        SweepAxis::KnownRatio { n_q: 50, p1: 0.9, p0: 0.1 },
        &xs,
        0.05,
        None,
    );
    assert!(curve.skipped.is_empty(), "skipped grid points: {:?}", curve.skipped);
    assert_eq!(curve.points.len(), 21);
    for w in curve.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(
            b.dag.value >= a.dag.value * (1.0 - 1e-12),
            "gain fell from {} at r={} to {} at r={}",
            a.dag.value,
            a.x,
            b.dag.value,
            b.x
        );
    }
    let (first, last) = (curve.points.first().unwrap(), curve.points.last().unwrap());
    assert!(last.dag.value > first.dag.value, "full-range increase must be strict");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "quality sweep took {elapsed:?}");
    println!("criterion 5 (gain nondecreasing in known-pair ratio, 21 points): PASS");
}

#[test]
fn criterion_6_powerlaw_lower_bound_by_simulation() {
    let (table, failures) =
        bound_check_table(200, &[2.3, 2.5, 2.9], 4, 10, 400, 0xB6).unwrap();
    // Full diagnostics first, so a red assertion arrives with its data.
    println!("{}", table.to_aligned());
    assert_eq!(failures, 0, "{failures} (beta, shape) rows fell below bound - 3 stderr");
    println!("criterion 6 (power-law lower bound, 3 betas x 10 tree shapes x 400 trials): PASS");
}

#[test]
fn criterion_7_star_gain_monotone_to_max_degree() {
    let start = Instant::now();
    let generated =
        generate_chung_lu(&PowerLawParams { n: 10_000, beta: 2.5, seed: 0xC7 }).unwrap();
    let g = &generated.graph;
    let n = g.node_count() as u64;
    let d = g.max_degree() as u64;
    assert!(d >= 30, "need a heavy tail for a meaningful curve, got max degree {d}");
    let mut prev = f64::INFINITY;
    for n_q in 2..=d {
        let stars = star_match_count(g, n_q - 1);
        let point = knowledge::dag(n, n_q, stars.count);
        assert_ne!(point.status, DagStatus::NoMatch, "a hub still matches at d_c = {}", n_q - 1);
        assert!(
            point.value <= prev * (1.0 + 1e-9),
            "gain rose inside [2, {d}]: DAG({n_q}) = {} > DAG({}) = {prev}",
            point.value,
            n_q - 1
        );
        prev = point.value;
    }
    // The top hub still matches the (d+1)-node star, and ordering d
    // neighbors out of d is no rarer than ordering d - 1, so the count
    // plateaus and the gain ticks up once at n_Q = d + 1. The monotone
    // claim therefore stops at n_Q = d; past d + 1 nothing matches.
    assert!(star_match_count(g, d).count.value() > 0.0);
    for n_q in (d + 2)..=(d + 4) {
        let stars = star_match_count(g, n_q - 1);
        let point = knowledge::dag(n, n_q, stars.count);
        assert_eq!(point.status, DagStatus::NoMatch);
        assert_eq!(point.value, 0.0);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "star curve took {elapsed:?}");
    println!(
        "criterion 7 (star gain nonincreasing for n_Q in [2, {d}], zero past {}): PASS",
        d + 1
    );
}

#[test]
fn criterion_8_color_coding_accuracy_and_unbiasedness() {
    let exact_count = |g: &Graph, q: &Query| {
        count_matches(
            g,
            q,
            &MatchSemantics::edges_only(EdgeSemantics::ExactPartial),
            None,
            &CountOptions::default(),
        )
        .unwrap()
        .match_count as f64
    };
    // Recommended iterations (epsilon = delta = 0.1) must land within 10%
    // of the exact count for every tree size the estimator targets.
    let cases: [(usize, usize, f64, u64); 4] =
        [(3, 200, 0.05, 0x81), (4, 200, 0.05, 0x82), (5, 100, 0.10, 0x83), (6, 50, 0.12, 0x84)];
    for (k, n, p, seed) in cases {
        let g = generate_gnp(&GnpParams { n, p, seed }).unwrap();
        let q = random_tree(k, seed ^ 0x55);
        let exact = exact_count(&g, &q);
        assert!(exact > 0.0, "k={k}: ground truth must be nonzero");
        let iterations = recommended_iterations(k as u32, 0.1, 0.1);
        let est = color_coding_count(&g, &q, iterations, seed ^ 0xAA).unwrap();
        let rel = (est.estimate - exact).abs() / exact;
        assert!(
            rel <= 0.10,
            "k={k}: estimate {} vs exact {exact} is {:.2}% off after {iterations} iterations",
            est.estimate,
            100.0 * rel
        );
    }
    // Unbiasedness: the mean of 500 independent short runs must sit within
    // three standard errors of the exact count.
    let g = generate_gnp(&GnpParams { n: 60, p: 0.15, seed: 0x88 }).unwrap();
    let q = random_tree(4, 0x99);
    let exact = exact_count(&g, &q);
    assert!(exact > 0.0);
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for rep in 0..500u64 {
        let est = color_coding_count(&g, &q, 150, derive_seed(0x8B, tag::COLORING, rep))
            .unwrap()
            .estimate;
        let delta = est - mean;
        mean += delta / (rep + 1) as f64;
        m2 += delta * (est - mean);
    }
    let stderr = (m2 / 499.0 / 500.0).sqrt();
    assert!(
        (mean - exact).abs() <= 3.0 * stderr,
        "rep mean {mean} vs exact {exact} exceeds 3 stderr = {}",
        3.0 * stderr
    );
    println!(
        "criterion 8 (color coding within 10% for k=3..6; 500-rep mean within 3 stderr): PASS"
    );
}

#[test]
fn criterion_9_real_edge_list_end_to_end() {
    let karate = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/karate.txt");
    let config = format!(
        r#"{{
  "seed": 7,
  "experiments": [{{
    "name": "karate-curve",
    "kind": "RealDataCurve",
    "graph": {},
    "spec": {{"edge_mode": "ExactPartial", "attribute_mode": "Ignored"}},
    "p_q": 0.3, "from": 2, "to": 34, "step": 1,
    "out": "karate.csv"
  }}]
}}
"#,
        serde_json::to_string(karate.to_str().unwrap()).unwrap()
    );
    let dirs = [TempDir::new().unwrap(), TempDir::new().unwrap()];
    for dir in &dirs {
        fs::write(dir.path().join("cfg.json"), &config).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_deanon-gain"))
            .current_dir(dir.path())
            .env_remove("DEANON_GAIN_OUT")
            .args(["run", "--config", "cfg.json"])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "exit {:?}, stderr: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in ["karate.csv", "karate.critical.json", "manifest.json"] {
        let a = fs::read(dirs[0].path().join(name)).unwrap();
        let b = fs::read(dirs[1].path().join(name)).unwrap();
        assert_eq!(a, b, "{name} must be byte-identical across runs");
    }
    let csv = fs::read_to_string(dirs[0].path().join("karate.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 33, "header plus one row per n_Q in [2, 34]");
    assert!(csv.lines().nth(1).unwrap().starts_with("2,"), "first data row is n_Q = 2");
    println!("criterion 9 (real edge list through the binary, byte-reproducible): PASS");
}
