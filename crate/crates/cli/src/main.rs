//! `deanon-gain`: quantify user re-identification gain from adversarial
//! background knowledge against an anonymized social graph.
//!
//! Exit codes: 0 success, 1 assertion failure (validation row outside its
//! interval, missing expected transition), 2 config or IO error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use deanon_core::generators::{generate_chung_lu, generate_gnp, GnpParams, PowerLawParams};
use deanon_core::knowledge::{self, AttributeMode};
use deanon_core::logspace::round_ties_even;
use deanon_core::matching::{
    color_coding_count, count_matches, recommended_iterations, CountOptions, MatchSemantics,
};
use deanon_core::querygen::{generate_query, is_star, synthetic_query, Provenance, QuerySource, QuerySpec};
use deanon_core::sweep::{find_critical_points, grid, sweep};
use deanon_core::EdgeMode;
use deanon_gain::csvout::fmt_f64;
use deanon_gain::experiments::{
    critical_json, critical_of_csv, run_config_file, status_str, validate_table, write_curve,
    AxisConfig,
};
use deanon_gain::io::{
    atomic_write, read_graph, read_query, read_schema, read_spec, write_graph, write_query,
    AttributeConfig,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "deanon-gain", version, about = "De-anonymization gain toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded random graph as an edge-list file.
    Gen {
        #[command(subcommand)]
        model: GenModel,
    },
    /// Normalize a foreign edge list (arbitrary ids, duplicates, self-loops).
    Ingest {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form expected match count and DAG at one parameter point.
    Analytic {
        /// Knowledge spec JSON ({"edge_mode": ..., "attribute_mode": ...}).
        #[arg(long)]
        spec: PathBuf,
        /// Anonymized graph size n.
        #[arg(long)]
        n: u64,
        /// Edge probability p of the G(n, p) model.
        #[arg(long)]
        p: f64,
        /// Query size n_Q.
        #[arg(long)]
        nq: u64,
        /// Known edge count m_Q (alternative to --pq).
        #[arg(long, conflicts_with = "pq")]
        mq: Option<u64>,
        /// Query density; m_Q = round(pq * nq(nq-1)/2).
        #[arg(long)]
        pq: Option<f64>,
        /// Attribute schema JSON (array of {name, marginal, similarity?}).
        #[arg(long)]
        attrs: Option<PathBuf>,
    },
    /// Sweep the analytic DAG along one axis and write the curve CSV.
    Sweep {
        /// Sweep variable: nq (needs --pq), pq (needs --nq), or r (needs
        /// --nq, --p1, --p0).
        #[arg(long)]
        axis: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        pq: Option<f64>,
        #[arg(long)]
        nq: Option<u64>,
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long)]
        p0: Option<f64>,
        #[arg(long)]
        attrs: Option<PathBuf>,
        /// Curve CSV path; critical points go to <out stem>.critical.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Locate valley and vanish points of a stored curve CSV; prints JSON.
    Critical {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Count matches of a query in a graph; prints JSON.
    Count {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Query sidecar JSON; defaults to <query>.json when present.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Knowledge spec JSON selecting the match semantics.
        #[arg(long)]
        sem: PathBuf,
        /// Attribute schema JSON (needed for attribute semantics).
        #[arg(long)]
        schema: Option<PathBuf>,
        /// Exact backtracking count (the default).
        #[arg(long, conflicts_with = "colorcoding")]
        exact: bool,
        /// Color-coding estimate with this many iterations (0 = the
        /// recommended count for 10% error at 90% confidence). Tree
        /// queries under exact-partial edge semantics only.
        #[arg(long)]
        colorcoding: Option<u64>,
        /// Abort after this many candidate inspections.
        #[arg(long)]
        budget: Option<u64>,
        /// Coloring seed (color coding only).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare analytic expectations against Monte-Carlo counts on G(n, p).
    Validate {
        /// Graph model; only "gnp" is supported.
        #[arg(long)]
        gen: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        nq: usize,
        #[arg(long)]
        pq: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        attrs: Option<PathBuf>,
        /// Also write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a background-knowledge query graph.
    Query {
        #[command(subcommand)]
        source: QueryCmd,
    },
    /// Run a reproducible experiment config (JSON). Artifacts land in the
    /// config's out_dir, else $DEANON_GAIN_OUT, else the working directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for concurrent sub-experiments (default: cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Subcommand)]
enum GenModel {
    /// G(n, p) with keyed per-pair randomness.
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Chung-Lu graph with power-law expected degrees.
    Chunglu {
        #[arg(long)]
        n: usize,
        /// Power-law exponent; must exceed 2.
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum QueryCmd {
    /// Ego network of a random (or given) center node.
    Ego {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed center node; random when omitted.
        #[arg(long)]
        center: Option<u32>,
        /// Adjust the query to this density after extraction.
        #[arg(long)]
        pq: Option<f64>,
        /// Attribute schema JSON; node values are sampled from marginals.
        #[arg(long)]
        attrs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Connected G(nq, pq) sample.
    Synth {
        #[arg(long)]
        nq: usize,
        #[arg(long)]
        pq: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        attrs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen { model } => {
            match model {
                GenModel::Gnp { n, p, seed, out } => {
                    let g = generate_gnp(&GnpParams { n, p, seed })?;
                    write_graph(&out, &g)?;
                    println!(
                        "wrote {} ({} nodes, {} edges)",
                        out.display(),
                        g.node_count(),
                        g.edge_count()
                    );
                }
                GenModel::Chunglu { n, beta, seed, out } => {
                    let generated = generate_chung_lu(&PowerLawParams { n, beta, seed })?;
                    let g = &generated.graph;
                    write_graph(&out, g)?;
                    println!(
                        "wrote {} ({} nodes, {} edges, max degree {}, clamped pairs {})",
                        out.display(),
                        g.node_count(),
                        g.edge_count(),
                        g.max_degree(),
                        generated.clamped_pairs
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Ingest { input, out } => {
            let loaded = read_graph(&input)?;
            write_graph(&out, &loaded.graph)?;
            println!(
                "wrote {} ({} nodes, {} edges; dropped {} self-loops, {} duplicates; ids remapped: {})",
                out.display(),
                loaded.graph.node_count(),
                loaded.graph.edge_count(),
                loaded.stats.self_loops_dropped,
                loaded.stats.duplicates_dropped,
                if loaded.id_map.is_some() { "yes" } else { "no" }
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Analytic { spec, n, p, nq, mq, pq, attrs } => {
            let spec = read_spec(&spec)?;
            let schema = match &attrs {
                Some(path) => read_schema(path)?,
                None => None,
            };
            let pairs = nq * nq.saturating_sub(1) / 2;
            let m_q = match (mq, pq) {
                (Some(m), _) => m,
                (None, Some(p_q)) => round_ties_even(p_q * pairs as f64),
                (None, None) => bail!("give --mq or --pq to fix the known edge count"),
            };
            let point = knowledge::analytic_point(&spec, n, nq, m_q, p, schema.as_ref(), None)?;
            println!(
                "{}",
                json!({
                    "n_q": nq,
                    "m_q": m_q,
                    "ln_candidates": point.ln_candidates,
                    "ln_match_probability": point.ln_match_probability,
                    "ln_MQ": point.match_count.ln(),
                    "MQ": point.match_count.value(),
                    "dag": point.dag.value,
                    "status": status_str(point.dag.status),
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sweep { axis, from, to, step, spec, n, p, pq, nq, p1, p0, attrs, out } => {
            let spec = read_spec(&spec)?;
            let schema = match &attrs {
                Some(path) => read_schema(path)?,
                None => None,
            };
            let axis_config = match axis.as_str() {
                "nq" => AxisConfig::Nq { p_q: pq.context("--axis nq needs --pq")? },
                "pq" => AxisConfig::Pq { n_q: nq.context("--axis pq needs --nq")? },
                "r" => AxisConfig::R {
                    n_q: nq.context("--axis r needs --nq")?,
                    p1: p1.context("--axis r needs --p1")?,
                    p0: p0.context("--axis r needs --p0")?,
                },
                other => bail!("unknown axis {other:?}; use nq, pq, or r"),
            };
            let xs = grid(from, to, step);
            if xs.is_empty() {
                bail!("empty grid: from {from} to {to} step {step}");
            }
            let curve = sweep(&spec, n, p, axis_config.to_axis(), &xs, step, schema.as_ref());
            let crit = find_critical_points(&curve);
            let outputs = write_curve(&curve, &crit, &out)?;
            for path in &outputs {
                println!("wrote {}", path.display());
            }
            println!("{}", critical_json(&crit));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Critical { input } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let crit = critical_of_csv(&text)?;
            println!("{}", critical_json(&crit));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Count { graph, query, sidecar, sem, schema, exact: _, colorcoding, budget, seed } => {
            let loaded = read_graph(&graph)?;
            let q = read_query(&query, sidecar.as_deref())?;
            let spec = read_spec(&sem)?;
            let schema = match &schema {
                Some(path) => read_schema(path)?,
                None => None,
            };
            if let Some(requested) = colorcoding {
                if spec.edge_mode != EdgeMode::ExactPartial
                    || spec.attribute_mode != AttributeMode::Ignored
                {
                    bail!("color coding estimates exact-partial edge counts only");
                }
                let iterations = if requested == 0 {
                    recommended_iterations(q.node_count() as u32, 0.1, 0.1)
                } else {
                    requested
                };
                let est = color_coding_count(&loaded.graph, &q, iterations, seed)?;
                println!(
                    "{}",
                    json!({
                        "estimate": est.estimate,
                        "stderr": est.stderr,
                        "iterations": est.iterations,
                    })
                );
            } else {
                let sem = MatchSemantics::from_spec(&spec)
                    .context("probabilistic spec: exact counting needs deterministic semantics")?;
                let opts = CountOptions { budget, ..CountOptions::default() };
                let result = count_matches(&loaded.graph, &q, &sem, schema.as_ref(), &opts)?;
                println!(
                    "{}",
                    json!({
                        "match_count": result.match_count,
                        "community_count": result.community_count,
                        "visited": result.visited,
                    })
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Validate { gen, n, p, nq, pq, trials, seed, attrs, out } => {
            if gen != "gnp" {
                bail!("unknown generator {gen:?}; only gnp is supported");
            }
            let configs: Vec<AttributeConfig> = match &attrs {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text)
                        .with_context(|| format!("parsing {}", path.display()))?
                }
                None => Vec::new(),
            };
            let (table, failures) = validate_table(n, p, nq, pq, trials, &configs, seed)?;
            print!("{}", table.to_aligned());
            if let Some(out) = out {
                atomic_write(&out, &table.to_csv())?;
                println!("wrote {}", out.display());
            }
            if failures > 0 {
                println!("{failures} mode(s) outside the 99% interval");
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Cmd::Query { source } => {
            let (generated, out) = match source {
                QueryCmd::Ego { graph, seed, center, pq, attrs, out } => {
                    let loaded = read_graph(&graph)?;
                    let mut spec = QuerySpec::new(
                        match center {
                            Some(c) => QuerySource::EgoGivenCenter(c),
                            None => QuerySource::EgoRandomCenter,
                        },
                        seed,
                    );
                    spec.target_density = pq;
                    spec.schema = match &attrs {
                        Some(path) => read_schema(path)?,
                        None => None,
                    };
                    (generate_query(&loaded.graph, &spec)?, out)
                }
                QueryCmd::Synth { nq, pq, seed, attrs, out } => {
                    let mut spec =
                        QuerySpec::new(QuerySource::SyntheticGnp { n_q: nq, p_q: pq }, seed);
                    spec.schema = match &attrs {
                        Some(path) => read_schema(path)?,
                        None => None,
                    };
                    (synthetic_query(&spec)?, out)
                }
            };
            let q = &generated.query;
            let sidecar = write_query(&out, q, generated.node_map.as_deref())?;
            let provenance = match generated.provenance {
                Provenance::Ego { center } => format!("ego center {center}"),
                Provenance::Synthetic { n_q, p_q, attempt } => {
                    format!("synthetic n_q={n_q} p_q={} attempt={attempt}", fmt_f64(p_q))
                }
            };
            println!(
                "wrote {} ({} nodes, {} edges, star: {}, {})",
                out.display(),
                q.node_count(),
                q.edge_count(),
                is_star(q),
                provenance
            );
            if let Some(path) = sidecar {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Run { config, jobs } => {
            let outcome = run_config_file(&config, jobs)?;
            for report in &outcome.manifest.experiments {
                let state = match (&report.error, report.assertion_failures) {
                    (Some(err), _) => format!("error: {err}"),
                    (None, 0) => format!("ok ({} outputs)", report.outputs.len()),
                    (None, k) => format!("{k} assertion failure(s)"),
                };
                println!("{} [{}]: {}", report.name, report.kind, state);
            }
            println!("manifest: {}", outcome.manifest_path.display());
            Ok(ExitCode::from(outcome.exit_code))
        }
    }
}
