//! File formats: whitespace edge lists with an optional node-count header,
//! JSON knowledge specs, attribute schemas, and query sidecars.
//!
//! Edge-list format: one `u v` pair per line, `#` starts a comment line,
//! blank lines are skipped. A `# nodes: N` header fixes the node count and
//! requires ids in `0..N`; without it, ids are arbitrary u64 labels and are
//! remapped to dense indices in sorted order (the map is returned so
//! results can be reported against the original labels).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use deanon_core::graph::{Attribute, GraphBuilder, IngestStats, PairConfidence};
use deanon_core::{AttributeSchema, Graph, KnowledgeSpec, Query};
use serde::{Deserialize, Serialize};

/// Header comment fixing the node count of an edge-list file.
pub const NODES_HEADER: &str = "# nodes:";

#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub stats: IngestStats,
    /// Dense index -> original file id, present when ids were remapped.
    pub id_map: Option<Vec<u64>>,
}

/// Reads and normalizes an edge-list graph file.
pub fn read_graph(path: &Path) -> Result<LoadedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_graph(text: &str) -> Result<LoadedGraph> {
    let (nodes_hint, pairs) = parse_edge_lines(text)?;
    let (n, edges, id_map) = match nodes_hint {
        Some(n) => {
            if n > u32::MAX as usize {
                bail!("node count {n} exceeds the supported range");
            }
            let mut edges = Vec::with_capacity(pairs.len());
            for &(a, b, line) in &pairs {
                if a >= n as u64 || b >= n as u64 {
                    bail!("line {line}: node id out of range for {NODES_HEADER} {n}");
                }
                edges.push((a as u32, b as u32));
            }
            (n, edges, None)
        }
        None => {
            let mut ids: BTreeSet<u64> = BTreeSet::new();
            for &(a, b, _) in &pairs {
                ids.insert(a);
                ids.insert(b);
            }
            if ids.is_empty() {
                bail!("no edges and no {NODES_HEADER} header; node count unknown");
            }
            if ids.len() > u32::MAX as usize {
                bail!("too many distinct node ids");
            }
            let id_map: Vec<u64> = ids.into_iter().collect();
            let index: BTreeMap<u64, u32> =
                id_map.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect();
            let edges = pairs.iter().map(|&(a, b, _)| (index[&a], index[&b])).collect();
            (id_map.len(), edges, Some(id_map))
        }
    };
    let mut builder = GraphBuilder::new(n);
    for (u, v) in edges {
        builder.add_edge(u, v).expect("ids validated above");
    }
    let stats = builder.stats();
    Ok(LoadedGraph { graph: builder.build(), stats, id_map })
}

fn parse_edge_lines(text: &str) -> Result<(Option<usize>, Vec<(u64, u64, usize)>)> {
    let mut nodes_hint = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(count) = rest.trim().strip_prefix("nodes:") {
                let n = count
                    .trim()
                    .parse()
                    .with_context(|| format!("line {line}: bad node count in header"))?;
                nodes_hint = Some(n);
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            bail!("line {line}: expected two whitespace-separated node ids");
        };
        let a = a.parse().with_context(|| format!("line {line}: bad node id {a:?}"))?;
        let b = b.parse().with_context(|| format!("line {line}: bad node id {b:?}"))?;
        pairs.push((a, b, line));
    }
    Ok((nodes_hint, pairs))
}

pub fn graph_to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{NODES_HEADER} {}", g.node_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    atomic_write(path, graph_to_edge_list(g).as_bytes())
}

/// Node data accompanying a query edge list: per-pair confidences (in the
/// query's canonical pair order), per-node attribute rows, per-node belief
/// distributions, and the ego provenance map.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct QuerySidecar {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<Vec<PairConfidence>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attributes: Option<Vec<Vec<u16>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beliefs: Option<Vec<Vec<Vec<f64>>>>,
    /// Original graph node behind each query node (ego queries only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_map: Option<Vec<u32>>,
}

/// The sidecar path for a query file: the same name with `.json` appended.
pub fn sidecar_path(query_path: &Path) -> PathBuf {
    let mut os = query_path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

/// Reads a query edge list plus its sidecar. Query node ids are positions
/// (never remapped); without a header the count is `max id + 1`. The
/// sidecar is taken from `sidecar` when given, else from the default
/// sidecar path if that file exists.
pub fn read_query(path: &Path, sidecar: Option<&Path>) -> Result<Query> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (hint, pairs) =
        parse_edge_lines(&text).with_context(|| format!("parsing {}", path.display()))?;
    let n_q = match hint {
        Some(n) => n,
        None => pairs
            .iter()
            .map(|&(a, b, _)| a.max(b) as usize + 1)
            .max()
            .with_context(|| format!("{}: empty query needs a {NODES_HEADER} header", path.display()))?,
    };
    if n_q > u32::MAX as usize {
        bail!("{}: node count {n_q} exceeds the supported range", path.display());
    }
    let mut edges = Vec::with_capacity(pairs.len());
    for &(a, b, line) in &pairs {
        if a >= n_q as u64 || b >= n_q as u64 {
            bail!("{}: line {line}: node id out of range for {n_q} nodes", path.display());
        }
        edges.push((a as u32, b as u32));
    }
    let side: QuerySidecar = {
        let default_path = sidecar_path(path);
        let chosen = sidecar.or_else(|| default_path.exists().then_some(default_path.as_path()));
        match chosen {
            Some(p) => {
                let text =
                    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => QuerySidecar::default(),
        }
    };
    let query = match side.confidence {
        Some(conf) => Query::with_confidence(n_q, &edges, conf)?,
        None => Query::connected(n_q, &edges)?,
    };
    let query = match side.attributes {
        Some(rows) => query.with_attributes(rows)?,
        None => query,
    };
    let query = match side.beliefs {
        Some(beliefs) => query.with_beliefs(beliefs)?,
        None => query,
    };
    Ok(query)
}

/// Writes a query edge list; node data goes to the sidecar path, which is
/// returned when written.
pub fn write_query(path: &Path, q: &Query, node_map: Option<&[u32]>) -> Result<Option<PathBuf>> {
    let mut text = String::new();
    let _ = writeln!(text, "{NODES_HEADER} {}", q.node_count());
    for &(u, v) in q.edges() {
        let _ = writeln!(text, "{u} {v}");
    }
    atomic_write(path, text.as_bytes())?;
    let side = QuerySidecar {
        confidence: q.confidence().map(<[_]>::to_vec),
        attributes: q.attributes().map(<[_]>::to_vec),
        beliefs: q.beliefs().map(<[_]>::to_vec),
        node_map: node_map.map(<[_]>::to_vec),
    };
    if side.confidence.is_none()
        && side.attributes.is_none()
        && side.beliefs.is_none()
        && side.node_map.is_none()
    {
        return Ok(None);
    }
    let sp = sidecar_path(path);
    atomic_write(&sp, &to_json_pretty(&side)?)?;
    Ok(Some(sp))
}

pub fn read_spec(path: &Path) -> Result<KnowledgeSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// JSON mirror of one attribute: a name, a marginal distribution over the
/// value domain, and an optional row-major similarity kernel (identity when
/// omitted).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttributeConfig {
    pub name: String,
    pub marginal: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<Vec<Vec<f64>>>,
}

impl AttributeConfig {
    pub fn build(&self) -> Result<Attribute> {
        let attr = Attribute::new(&self.name, self.marginal.clone())
            .with_context(|| format!("attribute {:?}", self.name))?;
        let Some(rows) = &self.similarity else {
            return Ok(attr);
        };
        let d = self.marginal.len();
        if rows.len() != d {
            bail!("attribute {:?}: similarity has {} rows, expected {d}", self.name, rows.len());
        }
        let mut flat = Vec::with_capacity(d * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                bail!(
                    "attribute {:?}: similarity row {i} has {} entries, expected {d}",
                    self.name,
                    row.len()
                );
            }
            flat.extend_from_slice(row);
        }
        attr.with_similarity(flat).with_context(|| format!("attribute {:?}", self.name))
    }
}

/// Builds a schema from configs; an empty list means no attributes.
pub fn build_schema(configs: &[AttributeConfig]) -> Result<Option<AttributeSchema>> {
    if configs.is_empty() {
        return Ok(None);
    }
    let attrs = configs.iter().map(AttributeConfig::build).collect::<Result<Vec<_>>>()?;
    Ok(Some(AttributeSchema::new(attrs)))
}

/// Reads a JSON array of [`AttributeConfig`] into a schema.
pub fn read_schema(path: &Path) -> Result<Option<AttributeSchema>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let configs: Vec<AttributeConfig> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    build_schema(&configs)
}

/// Pretty JSON with a trailing newline, for stable on-disk artifacts.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes via a sibling `.tmp` file and rename, so concurrent sub-tasks
/// never expose a half-written artifact.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    let mut name = path.file_name().with_context(|| format!("bad path {}", path.display()))?.to_owned();
    name.push(".tmp");
    let tmp = path.with_file_name(name);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}
