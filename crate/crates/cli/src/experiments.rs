//! Reproducible experiment driver: a JSON config in, CSV/JSON artifacts and
//! a manifest out. Re-running an identical config reproduces identical
//! bytes; sub-experiments run concurrently and their failures are recorded
//! per task instead of aborting the batch.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::{env, fs};

use anyhow::{bail, Context, Result};
use deanon_core::generators::{generate_chung_lu, PowerLawParams};
use deanon_core::knowledge::{self, AttributeMode, KnowledgeError};
use deanon_core::matching::{
    count_matches, monte_carlo_expected_matches, star_match_count, CountOptions, EdgeSemantics,
    MatchSemantics, TrialMeasure,
};
use deanon_core::querygen::{synthetic_query, QuerySource, QuerySpec};
use deanon_core::rng::{derive_seed, tag, SplitMix64};
use deanon_core::sweep::{
    critical_points_of, find_critical_points, grid, sweep, CriticalPoints, SweepAxis, SweepCurve,
    SweepPoint,
};
use deanon_core::{DagStatus, DagValue, EdgeMode, KnowledgeSpec, LogScalar, Query};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::csvout::{fmt_f64, parse_csv, Table};
use crate::io::{atomic_write, build_schema, read_graph, to_json_pretty, AttributeConfig};

/// Environment variable naming the default output directory for `run`.
pub const OUT_ENV: &str = "DEANON_GAIN_OUT";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Global seed; experiments may override with their own.
    pub seed: u64,
    /// Output directory; default is `$DEANON_GAIN_OUT`, then `.`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    pub experiments: Vec<Experiment>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Experiment {
    /// Unique name; manifest entries and progress lines key on it.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

/// The sweep variable of an analytic sweep and its fixed companions.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum AxisConfig {
    /// x = query size n_Q at fixed density p_q.
    #[serde(rename = "nq")]
    Nq { p_q: f64 },
    /// x = query density p_q at fixed size n_Q.
    #[serde(rename = "pq")]
    Pq { n_q: u64 },
    /// x = known-pair ratio r of the three-level confidence model.
    #[serde(rename = "r")]
    R { n_q: u64, p1: f64, p0: f64 },
}

impl AxisConfig {
    pub fn to_axis(&self) -> SweepAxis {
        match *self {
            AxisConfig::Nq { p_q } => SweepAxis::QuerySize { p_q },
            AxisConfig::Pq { n_q } => SweepAxis::QueryDensity { n_q },
            AxisConfig::R { n_q, p1, p0 } => SweepAxis::KnownRatio { n_q, p1, p0 },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ExperimentKind {
    /// Closed-form DAG curve over one axis, plus critical points.
    AnalyticSweep {
        n: u64,
        p: f64,
        spec: KnowledgeSpec,
        axis: AxisConfig,
        from: f64,
        to: f64,
        step: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        attributes: Vec<AttributeConfig>,
        /// Assert that the curve has a valley strictly before a vanish
        /// point; a miss counts as an assertion failure (exit 1).
        #[serde(default)]
        expect_transition: bool,
        out: String,
    },
    /// Analytic expected match counts vs Monte-Carlo means on G(n, p),
    /// one row per knowledge mode; rows outside the 99% CI count as
    /// assertion failures.
    EmpiricalValidate {
        n: usize,
        p: f64,
        n_q: usize,
        p_q: f64,
        trials: u64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        attributes: Vec<AttributeConfig>,
        out: String,
    },
    /// DAG of star queries on a generated power-law graph, swept over the
    /// star size via the closed-form star count.
    StarCurve {
        n: usize,
        beta: f64,
        /// Last n_Q row; default is max degree + 2, where the count hits 0.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_n_q: Option<u64>,
        out: String,
    },
    /// DAG-vs-n_Q curve for a real edge-list graph, using its empirical
    /// edge density as p.
    RealDataCurve {
        graph: String,
        spec: KnowledgeSpec,
        p_q: f64,
        from: f64,
        to: f64,
        step: f64,
        out: String,
    },
    /// Monte-Carlo check of the power-law lower bound on Chung-Lu graphs
    /// across random tree query shapes; a shape whose MC mean falls more
    /// than 3 stderr below the bound counts as an assertion failure.
    PowerLawBoundCheck {
        n: usize,
        betas: Vec<f64>,
        n_q: usize,
        shapes: u32,
        trials: u64,
        out: String,
    },
}

impl ExperimentKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ExperimentKind::AnalyticSweep { .. } => "AnalyticSweep",
            ExperimentKind::EmpiricalValidate { .. } => "EmpiricalValidate",
            ExperimentKind::StarCurve { .. } => "StarCurve",
            ExperimentKind::RealDataCurve { .. } => "RealDataCurve",
            ExperimentKind::PowerLawBoundCheck { .. } => "PowerLawBoundCheck",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubReport {
    pub name: String,
    pub kind: &'static str,
    pub outputs: Vec<String>,
    pub assertion_failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    pub experiments: Vec<SubReport>,
}

pub struct RunOutcome {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    /// 0 all green, 1 assertion failures, 2 any sub-task error.
    pub exit_code: u8,
}

pub fn run_config_file(path: &Path, jobs: Option<usize>) -> Result<RunOutcome> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    run_config(&raw, jobs)
}

pub fn run_config(raw: &[u8], jobs: Option<usize>) -> Result<RunOutcome> {
    let config: ExperimentConfig =
        serde_json::from_slice(raw).context("parsing experiment config")?;
    let out_dir = match &config.out_dir {
        Some(dir) => PathBuf::from(dir),
        None => env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
    };
    let mut seen = BTreeSet::new();
    for e in &config.experiments {
        if !seen.insert(e.name.as_str()) {
            bail!("duplicate experiment name {:?}", e.name);
        }
    }
    let digest = Sha256::digest(raw);
    let config_sha256: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .context("building thread pool")?;
    let reports: Vec<SubReport> = pool.install(|| {
        config
            .experiments
            .par_iter()
            .map(|e| run_experiment(e, e.seed.unwrap_or(config.seed), &out_dir))
            .collect()
    });
    let any_error = reports.iter().any(|r| r.error.is_some());
    let failures: u64 = reports.iter().map(|r| r.assertion_failures).sum();
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config_sha256,
        seed: config.seed,
        experiments: reports,
    };
    let manifest_path = out_dir.join("manifest.json");
    atomic_write(&manifest_path, &to_json_pretty(&manifest)?)?;
    let exit_code = if any_error {
        2
    } else if failures > 0 {
        1
    } else {
        0
    };
    Ok(RunOutcome { manifest, manifest_path, exit_code })
}

fn run_experiment(e: &Experiment, seed: u64, out_dir: &Path) -> SubReport {
    let mut report = SubReport {
        name: e.name.clone(),
        kind: e.kind.kind_name(),
        outputs: Vec::new(),
        assertion_failures: 0,
        error: None,
    };
    match execute(&e.kind, seed, out_dir) {
        Ok((outputs, failures)) => {
            report.outputs = outputs.iter().map(|p| p.display().to_string()).collect();
            report.assertion_failures = failures;
        }
        Err(err) => report.error = Some(format!("{err:#}")),
    }
    report
}

fn resolve(out_dir: &Path, out: &str) -> PathBuf {
    let p = Path::new(out);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out_dir.join(p)
    }
}

fn execute(kind: &ExperimentKind, seed: u64, out_dir: &Path) -> Result<(Vec<PathBuf>, u64)> {
    match kind {
        ExperimentKind::AnalyticSweep {
            n,
            p,
            spec,
            axis,
            from,
            to,
            step,
            attributes,
            expect_transition,
            out,
        } => {
            let schema = build_schema(attributes)?;
            let xs = grid(*from, *to, *step);
            if xs.is_empty() {
                bail!("empty grid: from {from} to {to} step {step}");
            }
            let curve = sweep(spec, *n, *p, axis.to_axis(), &xs, *step, schema.as_ref());
            let crit = find_critical_points(&curve);
            let outputs = write_curve(&curve, &crit, &resolve(out_dir, out))?;
            let failures = match (crit.valley, crit.vanish) {
                _ if !expect_transition => 0,
                (Some(valley), Some(vanish)) if valley < vanish => 0,
                _ => 1,
            };
            Ok((outputs, failures))
        }
        ExperimentKind::EmpiricalValidate { n, p, n_q, p_q, trials, attributes, out } => {
            let (table, failures) = validate_table(*n, *p, *n_q, *p_q, *trials, attributes, seed)?;
            let path = resolve(out_dir, out);
            atomic_write(&path, &table.to_csv())?;
            Ok((vec![path], failures))
        }
        ExperimentKind::StarCurve { n, beta, max_n_q, out } => {
            let table = star_curve_table(*n, *beta, *max_n_q, seed)?;
            let path = resolve(out_dir, out);
            atomic_write(&path, &table.to_csv())?;
            Ok((vec![path], 0))
        }
        ExperimentKind::RealDataCurve { graph, spec, p_q, from, to, step, out } => {
            let loaded = read_graph(Path::new(graph))?;
            let g = loaded.graph;
            let n = g.node_count() as u64;
            if n < 2 {
                bail!("graph needs at least 2 nodes");
            }
            let p = 2.0 * g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0));
            let xs = grid(*from, *to, *step);
            if xs.is_empty() {
                bail!("empty grid: from {from} to {to} step {step}");
            }
            let axis = SweepAxis::QuerySize { p_q: *p_q };
            let curve = sweep(spec, n, p, axis, &xs, *step, None);
            let crit = find_critical_points(&curve);
            let outputs = write_curve(&curve, &crit, &resolve(out_dir, out))?;
            Ok((outputs, 0))
        }
        ExperimentKind::PowerLawBoundCheck { n, betas, n_q, shapes, trials, out } => {
            let (table, failures) = bound_check_table(*n, betas, *n_q, *shapes, *trials, seed)?;
            let path = resolve(out_dir, out);
            atomic_write(&path, &table.to_csv())?;
            Ok((vec![path], failures))
        }
    }
}

pub fn status_str(status: DagStatus) -> &'static str {
    match status {
        DagStatus::Normal => "normal",
        DagStatus::NoMatch => "no-match",
        DagStatus::BeyondVanish => "beyond-vanish",
    }
}

pub fn parse_status(s: &str) -> Result<DagStatus> {
    match s {
        "normal" => Ok(DagStatus::Normal),
        "no-match" => Ok(DagStatus::NoMatch),
        "beyond-vanish" => Ok(DagStatus::BeyondVanish),
        _ => bail!("unknown status {s:?}"),
    }
}

pub fn axis_column(axis: &SweepAxis) -> &'static str {
    match axis {
        SweepAxis::QuerySize { .. } => "n_q",
        SweepAxis::QueryDensity { .. } => "p_q",
        SweepAxis::KnownRatio { .. } => "r",
    }
}

/// Curve CSV: the first column is the axis value (named after the axis);
/// the rest are fixed. The redundant n_q column is skipped when the axis
/// already is n_q, keeping headers unique.
pub fn curve_table(curve: &SweepCurve) -> Table {
    let x_name = axis_column(&curve.axis);
    let mut header = vec![x_name];
    if x_name != "n_q" {
        header.push("n_q");
    }
    header.extend_from_slice(&[
        "m_q",
        "ln_candidates",
        "ln_match_probability",
        "ln_MQ",
        "dag",
        "status",
    ]);
    let mut table = Table::new(&header);
    for pt in &curve.points {
        let mut row = vec![fmt_f64(pt.x)];
        if x_name != "n_q" {
            row.push(pt.n_q.to_string());
        }
        row.extend([
            pt.m_q.to_string(),
            fmt_f64(pt.ln_candidates),
            fmt_f64(pt.ln_match_probability),
            fmt_f64(pt.match_count.ln()),
            fmt_f64(pt.dag.value),
            status_str(pt.dag.status).to_string(),
        ]);
        table.push(row);
    }
    table
}

/// Reads curve points back from the CSV written by [`curve_table`].
pub fn parse_curve_csv(text: &str) -> Result<Vec<SweepPoint>> {
    let csv = parse_csv(text)?;
    if csv.header.is_empty() {
        bail!("empty CSV header");
    }
    let n_q_col = if csv.header[0] == "n_q" { 0 } else { csv.column("n_q")? };
    let m_q_col = csv.column("m_q")?;
    let lnc_col = csv.column("ln_candidates")?;
    let lnp_col = csv.column("ln_match_probability")?;
    let lnm_col = csv.column("ln_MQ")?;
    let dag_col = csv.column("dag")?;
    let status_col = csv.column("status")?;
    let f = |row: &[String], col: usize| -> Result<f64> {
        row[col].parse().with_context(|| format!("bad number {:?}", row[col]))
    };
    let mut points = Vec::with_capacity(csv.rows.len());
    for row in &csv.rows {
        points.push(SweepPoint {
            x: f(row, 0)?,
            n_q: row[n_q_col].parse().with_context(|| format!("bad n_q {:?}", row[n_q_col]))?,
            m_q: row[m_q_col].parse().with_context(|| format!("bad m_q {:?}", row[m_q_col]))?,
            ln_candidates: f(row, lnc_col)?,
            ln_match_probability: f(row, lnp_col)?,
            match_count: LogScalar::from_ln(f(row, lnm_col)?),
            dag: DagValue { value: f(row, dag_col)?, status: parse_status(&row[status_col])? },
        });
    }
    Ok(points)
}

pub fn critical_json(crit: &CriticalPoints) -> serde_json::Value {
    serde_json::json!({ "valley": crit.valley, "vanish": crit.vanish })
}

/// Finds critical points of a stored curve CSV.
pub fn critical_of_csv(text: &str) -> Result<CriticalPoints> {
    Ok(critical_points_of(&parse_curve_csv(text)?))
}

/// Writes the curve CSV plus a `<stem>.critical.json` companion.
pub fn write_curve(
    curve: &SweepCurve,
    crit: &CriticalPoints,
    csv_path: &Path,
) -> Result<Vec<PathBuf>> {
    atomic_write(csv_path, &curve_table(curve).to_csv())?;
    let crit_path = csv_path.with_extension("critical.json");
    atomic_write(&crit_path, &to_json_pretty(&critical_json(crit))?)?;
    Ok(vec![csv_path.to_path_buf(), crit_path])
}

/// One row per knowledge mode: analytic expectation vs the Monte-Carlo mean
/// with its 99% interval. Returns the table and the number of rows whose
/// interval misses the analytic value.
pub fn validate_table(
    n: usize,
    p: f64,
    n_q: usize,
    p_q: f64,
    trials: u64,
    attributes: &[AttributeConfig],
    seed: u64,
) -> Result<(Table, u64)> {
    let schema = build_schema(attributes)?;
    let generated = synthetic_query(&QuerySpec::new(QuerySource::SyntheticGnp { n_q, p_q }, seed))?;
    let q = generated.query;
    let m_q = q.edge_count() as u64;
    let mut modes: Vec<(String, KnowledgeSpec)> = [
        ("exact-partial", EdgeMode::ExactPartial),
        ("exact-complete", EdgeMode::ExactComplete),
        ("noisy-partial(1)", EdgeMode::NoisyPartial { epsilon: 1 }),
        ("noisy-partial(2)", EdgeMode::NoisyPartial { epsilon: 2 }),
        ("noisy-complete(1)", EdgeMode::NoisyComplete { epsilon: 1 }),
        ("noisy-complete(2)", EdgeMode::NoisyComplete { epsilon: 2 }),
    ]
    .into_iter()
    .map(|(label, mode)| (label.to_string(), KnowledgeSpec::edges_only(mode)))
    .collect();
    if schema.is_some() {
        for (label, mode) in [
            ("attrs-exact", AttributeMode::Exact),
            ("attrs-almost-nodes(1)", AttributeMode::AlmostNodes { epsilon: 1 }),
            ("attrs-approximate", AttributeMode::Approximate),
        ] {
            modes.push((
                label.to_string(),
                KnowledgeSpec { edge_mode: EdgeMode::ExactPartial, attribute_mode: mode },
            ));
        }
    }
    let mut table =
        Table::new(&["mode", "analytic", "mc_mean", "stderr", "ci99_low", "ci99_high", "pass"]);
    let mut failures = 0u64;
    for (label, spec) in modes {
        let point = knowledge::analytic_point(
            &spec,
            n as u64,
            q.node_count() as u64,
            m_q,
            p,
            schema.as_ref(),
            None,
        )?;
        let analytic = point.match_count.value();
        let sem = MatchSemantics::from_spec(&spec).expect("deterministic modes only");
        let est = monte_carlo_expected_matches(
            n,
            p,
            &q,
            &TrialMeasure::Count(sem),
            schema.as_ref(),
            trials,
            seed,
        )?;
        let pass = est.covers(analytic);
        if !pass {
            failures += 1;
        }
        table.push(vec![
            label,
            fmt_f64(analytic),
            fmt_f64(est.mean),
            fmt_f64(est.stderr),
            fmt_f64(est.mean - est.half_width_99),
            fmt_f64(est.mean + est.half_width_99),
            if pass { "pass" } else { "fail" }.to_string(),
        ]);
    }
    Ok((table, failures))
}

/// Star-count DAG rows on a generated Chung-Lu graph, one per star size.
pub fn star_curve_table(n: usize, beta: f64, max_n_q: Option<u64>, seed: u64) -> Result<Table> {
    let generated = generate_chung_lu(&PowerLawParams { n, beta, seed })?;
    let g = &generated.graph;
    let d_max = g.max_degree() as u64;
    let top = max_n_q.unwrap_or(d_max + 2).min(n as u64);
    let mut table = Table::new(&["n_q", "d_c", "ln_MQ", "exact", "dag", "status"]);
    for n_q in 2..=top {
        let d_c = n_q - 1;
        let stars = star_match_count(g, d_c);
        let dag = knowledge::dag(n as u64, n_q, stars.count);
        table.push(vec![
            n_q.to_string(),
            d_c.to_string(),
            fmt_f64(stars.count.ln()),
            stars.exact.map(|e| e.to_string()).unwrap_or_default(),
            fmt_f64(dag.value),
            status_str(dag.status).to_string(),
        ]);
    }
    Ok(table)
}

/// Uniform random labeled tree on `n_q` nodes from a sequence decode; every
/// labeled tree is equally likely.
pub fn random_tree(n_q: usize, seed: u64) -> Query {
    assert!(n_q >= 1, "tree needs a node");
    if n_q <= 2 {
        let edges: &[(u32, u32)] = if n_q == 2 { &[(0, 1)] } else { &[] };
        return Query::connected(n_q, edges).expect("fixed tiny tree");
    }
    let mut rng = SplitMix64::new(seed);
    let seq: Vec<u32> = (0..n_q - 2).map(|_| rng.next_range(n_q as u64) as u32).collect();
    let mut degree = vec![1u32; n_q];
    for &s in &seq {
        degree[s as usize] += 1;
    }
    let mut leaves: BTreeSet<u32> =
        (0..n_q as u32).filter(|&v| degree[v as usize] == 1).collect();
    let mut edges = Vec::with_capacity(n_q - 1);
    for &s in &seq {
        let leaf = *leaves.iter().next().expect("a tree always has a leaf");
        leaves.remove(&leaf);
        edges.push((leaf, s));
        degree[s as usize] -= 1;
        if degree[s as usize] == 1 {
            leaves.insert(s);
        }
    }
    let mut last = leaves.into_iter();
    let (a, b) = (last.next().expect("two leaves remain"), last.next().expect("two leaves remain"));
    edges.push((a, b));
    Query::connected(n_q, &edges).expect("decoded sequence is a spanning tree")
}

/// Monte-Carlo means of the exact match count per tree shape vs the
/// analytic power-law lower bound. All shapes are trees on `n_q` nodes, so
/// they share one bound per beta; the graphs are shared across shapes
/// within a trial. Returns rows and the count failing `mean >= bound -
/// 3 stderr`.
pub fn bound_check_table(
    n: usize,
    betas: &[f64],
    n_q: usize,
    shapes: u32,
    trials: u64,
    seed: u64,
) -> Result<(Table, u64)> {
    if n_q < 2 {
        bail!("need n_q >= 2");
    }
    if trials < 2 {
        bail!("need at least 2 trials for a stderr");
    }
    if shapes == 0 {
        bail!("need at least one shape");
    }
    let queries: Vec<Query> = (0..shapes)
        .map(|s| random_tree(n_q, derive_seed(seed, tag::QUERY_GEN, s as u64)))
        .collect();
    let m_q = (n_q - 1) as u64;
    let sem = MatchSemantics::edges_only(EdgeSemantics::ExactPartial);
    let opts = CountOptions { track_communities: false, ..CountOptions::default() };
    let mut table = Table::new(&[
        "beta", "shape", "edges", "mc_mean", "stderr", "bound", "ln_bound", "pass",
    ]);
    let mut failures = 0u64;
    for (bi, &beta) in betas.iter().enumerate() {
        let (bound, _) = knowledge::powerlaw_match_lower_bound(n as u64, beta, n_q as u64, m_q)
            .map_err(|e: KnowledgeError| anyhow::anyhow!("beta {beta}: {e}"))?;
        let bound_value = bound.value();
        let beta_seed = derive_seed(seed, tag::MC_TRIAL, bi as u64);
        // Welford accumulators (count, mean, sum of squared deviations).
        let mut stats = vec![(0u64, 0f64, 0f64); queries.len()];
        for t in 0..trials {
            let params =
                PowerLawParams { n, beta, seed: derive_seed(beta_seed, tag::MC_TRIAL, t) };
            let g = generate_chung_lu(&params)?.graph;
            for (qi, q) in queries.iter().enumerate() {
                let count = count_matches(&g, q, &sem, None, &opts)?.match_count as f64;
                let (ref mut cnt, ref mut mean, ref mut m2) = stats[qi];
                *cnt += 1;
                let delta = count - *mean;
                *mean += delta / *cnt as f64;
                *m2 += delta * (count - *mean);
            }
        }
        for (qi, q) in queries.iter().enumerate() {
            let (cnt, mean, m2) = stats[qi];
            let stderr = (m2 / (cnt as f64 - 1.0) / cnt as f64).sqrt();
            let pass = mean >= bound_value - 3.0 * stderr;
            if !pass {
                failures += 1;
            }
            let edges: Vec<String> =
                q.edges().iter().map(|&(u, v)| format!("{u}-{v}")).collect();
            table.push(vec![
                fmt_f64(beta),
                qi.to_string(),
                edges.join(";"),
                fmt_f64(mean),
                fmt_f64(stderr),
                fmt_f64(bound_value),
                fmt_f64(bound.ln()),
                if pass { "pass" } else { "fail" }.to_string(),
            ]);
        }
    }
    Ok((table, failures))
}
