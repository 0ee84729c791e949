//! Empirical ground truth for the analytic formulas: exact match counting,
//! graph-conditional expectations for probabilistic knowledge, Monte-Carlo
//! validation, color-coding estimation for tree queries, the star closed
//! form, and l-indistinguishability.
//!
//! A match is an ORDERED injective mapping from query nodes to graph nodes
//! satisfying the knowledge semantics. Automorphic images of the same node
//! set count separately; that multiplicity is exactly what makes highly
//! symmetric queries (stars) weak, so it must never be optimized away. The
//! distinct image node-sets are the matched communities, counted as `C_Q`.

use crate::graph::{AttributeSchema, Graph, GraphError, PairConfidence, Query};
use crate::generators::{generate_gnp, GnpParams};
use crate::knowledge::{AttributeMode, Completeness, EdgeMode, KnowledgeSpec};
use crate::logspace::{ln_falling_factorial, LogScalar, LogSum};
use crate::rng::{derive_seed, tag, SplitMix64};
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
// Live only in pure no-std builds: whenever any crate in the graph links
// std (tests via proptest, or a std consumer), the inherent f64 methods
// shadow the trait and the import goes quiet.
#[allow(unused_imports)]
use num_traits::Float;

/// Normal quantile for a two-sided 99% interval.
const Z_99: f64 = 2.5758293035489004;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchError {
    /// The configured work budget was hit before the search finished.
    BudgetExhausted { visited: u64, budget: u64 },
    MissingAttributes { side: &'static str },
    /// Attribute vectors of graph and query (and schema, when present)
    /// disagree in length.
    AttributeArity { graph: usize, query: usize },
    MissingSchema,
    MissingConfidence,
    NotATree { n_q: usize, m_q: usize },
    QueryTooLarge { n_q: usize, limit: usize },
    TooFewTrials { trials: u64 },
    BadParams(&'static str),
}

impl fmt::Display for MatchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchError::BudgetExhausted { visited, budget } => {
                write!(f, "search budget {budget} exhausted after {visited} candidate visits")
            }
            MatchError::MissingAttributes { side } => {
                write!(f, "attribute semantics require attributes on the {side}")
            }
            MatchError::AttributeArity { graph, query } => {
                write!(f, "attribute arity mismatch: graph rows {graph}, query rows {query}")
            }
            MatchError::MissingSchema => {
                write!(f, "approximate semantics require a schema with similarity kernels")
            }
            MatchError::MissingConfidence => {
                write!(f, "probabilistic semantics require a query confidence table")
            }
            MatchError::NotATree { n_q, m_q } => write!(
                f,
                "color coding needs a tree query (connected, m = n-1); got n = {n_q}, m = {m_q}; \
                 use count_matches instead"
            ),
            MatchError::QueryTooLarge { n_q, limit } => {
                write!(f, "query size {n_q} exceeds the limit {limit} for this algorithm")
            }
            MatchError::TooFewTrials { trials } => {
                write!(f, "{trials} trials are too few for a normal-approximation interval (need 30)")
            }
            MatchError::BadParams(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for MatchError {}

/// Edge predicate applied to a full candidate mapping. With `delta(Q, I)`
/// the number of query edges absent in the image and `delta(I, Q)` the
/// number of image-induced edges absent in the query (the relation is not
/// symmetric):
///
/// * `ExactPartial`: delta(Q, I) = 0 (subset matching; extra image edges
///   are free).
/// * `ExactComplete`: delta(Q, I) = delta(I, Q) = 0 (induced equality).
/// * `NoisyPartial`: delta(Q, I) <= epsilon.
/// * `NoisyComplete`: delta(Q, I) <= epsilon and delta(I, Q) <= epsilon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeSemantics {
    ExactPartial,
    ExactComplete,
    NoisyPartial { epsilon: u32 },
    NoisyComplete { epsilon: u32 },
}

/// Per-node attribute predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttrSemantics {
    Ignored,
    /// Every node's attribute vector equals its image's.
    Exact,
    /// Up to `epsilon` nodes may differ (in any number of attributes).
    AlmostNodes { epsilon: u32 },
    /// Each node may differ in up to `epsilon` attributes.
    AlmostAttrs { epsilon: u32 },
    /// Values match through the schema's similarity kernel; a pair counts
    /// as matching when the kernel reports full similarity (fractional
    /// kernels belong to the probabilistic expectation path).
    Approximate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchSemantics {
    pub edge: EdgeSemantics,
    pub attr: AttrSemantics,
}

impl MatchSemantics {
    pub fn edges_only(edge: EdgeSemantics) -> MatchSemantics {
        MatchSemantics { edge, attr: AttrSemantics::Ignored }
    }

    /// The deterministic counting semantics of a knowledge spec, or `None`
    /// when either side is probabilistic (handled by
    /// [`expected_matches_given_graph`] instead).
    pub fn from_spec(spec: &KnowledgeSpec) -> Option<MatchSemantics> {
        let edge = match spec.edge_mode {
            EdgeMode::ExactPartial => EdgeSemantics::ExactPartial,
            EdgeMode::ExactComplete => EdgeSemantics::ExactComplete,
            EdgeMode::NoisyPartial { epsilon } => EdgeSemantics::NoisyPartial { epsilon },
            EdgeMode::NoisyComplete { epsilon } => EdgeSemantics::NoisyComplete { epsilon },
            EdgeMode::ProbUniform { .. }
            | EdgeMode::ProbThreeLevel { .. }
            | EdgeMode::ProbGeneral { .. } => return None,
        };
        let attr = match spec.attribute_mode {
            AttributeMode::Ignored => AttrSemantics::Ignored,
            AttributeMode::Exact => AttrSemantics::Exact,
            AttributeMode::AlmostNodes { epsilon } => AttrSemantics::AlmostNodes { epsilon },
            AttributeMode::AlmostAttrs { epsilon } => AttrSemantics::AlmostAttrs { epsilon },
            AttributeMode::Approximate => AttrSemantics::Approximate,
            AttributeMode::Probabilistic => return None,
        };
        Some(MatchSemantics { edge, attr })
    }
}

/// Search controls. The budget counts candidate inspections (one per
/// (partial mapping, candidate node) pair) and aborts the run when hit.
#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub budget: Option<u64>,
    /// Track matched communities (distinct image node-sets) as `C_Q`.
    pub track_communities: bool,
    /// Collect every mapping (image per query node, in query-node order).
    pub enumerate: bool,
    /// Stop once this many matches are found (the result is then a lower
    /// bound, flagged `truncated`).
    pub stop_after: Option<u64>,
}

impl Default for CountOptions {
    fn default() -> CountOptions {
        CountOptions { budget: None, track_communities: true, enumerate: false, stop_after: None }
    }
}

#[derive(Clone, Debug)]
pub struct MatchResult {
    /// Ordered injective mappings satisfying the semantics, `M_Q`.
    pub match_count: u64,
    /// Distinct image node-sets, `C_Q` (when tracked).
    pub community_count: Option<u64>,
    pub mappings: Option<Vec<Vec<u32>>>,
    /// Candidate inspections performed.
    pub visited: u64,
    /// True when `stop_after` cut the search short.
    pub truncated: bool,
}

/// Exact match count by pruned backtracking.
///
/// Query nodes are mapped in a static order: highest degree first, then by
/// connectivity to already-mapped nodes (ties toward higher degree, then
/// smaller index). The order only affects speed, never the result. When the
/// remaining miss budget is zero the candidate set collapses to the
/// neighborhood of an already-mapped image, which is what makes tree and
/// star queries cheap.
pub fn count_matches(
    g: &Graph,
    q: &Query,
    sem: &MatchSemantics,
    schema: Option<&AttributeSchema>,
    opts: &CountOptions,
) -> Result<MatchResult, MatchError> {
    let (q_attrs, g_attrs) = attr_tables(g, q, sem.attr, schema)?;
    let order = search_order(q);
    let (nbrs, non_nbrs) = mapped_positions(q, &order);
    let (miss_budget, extra_budget) = edge_budgets(sem.edge);
    let mut dfs = Dfs {
        g,
        q_attrs,
        g_attrs,
        schema,
        attr: sem.attr,
        node_budget: match sem.attr {
            AttrSemantics::AlmostNodes { epsilon } => epsilon as u64,
            _ => 0,
        },
        order,
        nbrs,
        non_nbrs,
        miss_budget,
        extra_budget,
        image: alloc::vec![0; q.node_count()],
        used: alloc::vec![false; g.node_count()],
        budget: opts.budget.unwrap_or(u64::MAX),
        visited: 0,
        count: 0,
        communities: if opts.track_communities { Some(BTreeSet::new()) } else { None },
        mappings: if opts.enumerate { Some(Vec::new()) } else { None },
        stop_after: opts.stop_after,
        truncated: false,
    };
    match dfs.run(0, 0, 0, 0) {
        Ok(()) | Err(Halt::Stop) => {}
        Err(Halt::Budget) => {
            return Err(MatchError::BudgetExhausted { visited: dfs.visited, budget: dfs.budget })
        }
    }
    // Mappings are recorded image-per-search-position; report them in
    // query-node order.
    let mappings = dfs.mappings.map(|ms| {
        ms.into_iter()
            .map(|m| {
                let mut by_query = alloc::vec![0u32; dfs.order.len()];
                for (pos, &img) in m.iter().enumerate() {
                    by_query[dfs.order[pos] as usize] = img;
                }
                by_query
            })
            .collect()
    });
    Ok(MatchResult {
        match_count: dfs.count,
        community_count: dfs.communities.map(|c| c.len() as u64),
        mappings,
        visited: dfs.visited,
        truncated: dfs.truncated,
    })
}

fn attr_tables<'a>(
    g: &'a Graph,
    q: &'a Query,
    attr: AttrSemantics,
    schema: Option<&AttributeSchema>,
) -> Result<(Option<&'a [Vec<u16>]>, Option<&'a [Vec<u16>]>), MatchError> {
    if attr == AttrSemantics::Ignored {
        return Ok((None, None));
    }
    let q_attrs = q.attributes().ok_or(MatchError::MissingAttributes { side: "query" })?;
    let g_attrs = g.attributes().ok_or(MatchError::MissingAttributes { side: "graph" })?;
    let arity = q_attrs.first().map_or(0, Vec::len);
    if q_attrs.iter().any(|r| r.len() != arity) || g_attrs.iter().any(|r| r.len() != arity) {
        return Err(MatchError::AttributeArity {
            graph: g_attrs.first().map_or(0, Vec::len),
            query: arity,
        });
    }
    if attr == AttrSemantics::Approximate {
        let schema = schema.ok_or(MatchError::MissingSchema)?;
        if schema.len() != arity {
            return Err(MatchError::AttributeArity { graph: schema.len(), query: arity });
        }
    }
    Ok((Some(q_attrs), Some(g_attrs)))
}

/// Highest-degree node first, then most mapped neighbors (result-invariant,
/// pure performance).
fn search_order(q: &Query) -> Vec<u32> {
    let n = q.node_count();
    let mut order = Vec::with_capacity(n);
    let mut placed = alloc::vec![false; n];
    for _ in 0..n {
        let mut best: Option<(usize, usize, u32)> = None;
        for v in 0..n as u32 {
            if placed[v as usize] {
                continue;
            }
            let conn = q.neighbors(v).iter().filter(|&&u| placed[u as usize]).count();
            let key = (conn, q.degree(v));
            if best.map_or(true, |(bc, bd, _)| key > (bc, bd)) {
                best = Some((conn, q.degree(v), v));
            }
        }
        let (_, _, v) = best.expect("one unplaced node remains");
        placed[v as usize] = true;
        order.push(v);
    }
    order
}

/// For each search position: earlier positions that are query-neighbors of
/// the node mapped there, and those that are not.
fn mapped_positions(q: &Query, order: &[u32]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut nbrs = Vec::with_capacity(order.len());
    let mut non = Vec::with_capacity(order.len());
    for (d, &v) in order.iter().enumerate() {
        let mut here = Vec::new();
        let mut there = Vec::new();
        for (j, &u) in order.iter().enumerate().take(d) {
            if q.has_edge(v, u) {
                here.push(j);
            } else {
                there.push(j);
            }
        }
        nbrs.push(here);
        non.push(there);
    }
    (nbrs, non)
}

fn edge_budgets(edge: EdgeSemantics) -> (u64, Option<u64>) {
    match edge {
        EdgeSemantics::ExactPartial => (0, None),
        EdgeSemantics::ExactComplete => (0, Some(0)),
        EdgeSemantics::NoisyPartial { epsilon } => (epsilon as u64, None),
        EdgeSemantics::NoisyComplete { epsilon } => (epsilon as u64, Some(epsilon as u64)),
    }
}

enum Halt {
    Budget,
    Stop,
}

struct Dfs<'a> {
    g: &'a Graph,
    q_attrs: Option<&'a [Vec<u16>]>,
    g_attrs: Option<&'a [Vec<u16>]>,
    schema: Option<&'a AttributeSchema>,
    attr: AttrSemantics,
    node_budget: u64,
    order: Vec<u32>,
    nbrs: Vec<Vec<usize>>,
    non_nbrs: Vec<Vec<usize>>,
    miss_budget: u64,
    extra_budget: Option<u64>,
    image: Vec<u32>,
    used: Vec<bool>,
    budget: u64,
    visited: u64,
    count: u64,
    communities: Option<BTreeSet<Vec<u32>>>,
    mappings: Option<Vec<Vec<u32>>>,
    stop_after: Option<u64>,
    truncated: bool,
}

impl Dfs<'_> {
    fn run(&mut self, depth: usize, miss: u64, extra: u64, attr_misses: u64) -> Result<(), Halt> {
        if depth == self.order.len() {
            return self.record();
        }
        let g = self.g;
        let nbr_positions = core::mem::take(&mut self.nbrs[depth]);
        let result = (|| {
            if !nbr_positions.is_empty() && miss == self.miss_budget {
                // No miss budget left: the candidate must be adjacent to
                // every mapped neighbor image; scan the smallest such
                // neighborhood.
                let pivot = nbr_positions
                    .iter()
                    .map(|&j| self.image[j])
                    .min_by_key(|&img| g.degree(img))
                    .expect("nonempty");
                for &w in g.neighbors(pivot) {
                    self.candidate(depth, &nbr_positions, w, miss, extra, attr_misses)?;
                }
            } else {
                for w in 0..g.node_count() as u32 {
                    self.candidate(depth, &nbr_positions, w, miss, extra, attr_misses)?;
                }
            }
            Ok(())
        })();
        self.nbrs[depth] = nbr_positions;
        result
    }

    fn candidate(
        &mut self,
        depth: usize,
        nbr_positions: &[usize],
        w: u32,
        miss: u64,
        extra: u64,
        attr_misses: u64,
    ) -> Result<(), Halt> {
        if self.used[w as usize] {
            return Ok(());
        }
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Halt::Budget);
        }
        let mut miss_now = miss;
        for &j in nbr_positions {
            if !self.g.has_edge(self.image[j], w) {
                miss_now += 1;
                if miss_now > self.miss_budget {
                    return Ok(());
                }
            }
        }
        let mut extra_now = extra;
        if let Some(extra_budget) = self.extra_budget {
            for &j in &self.non_nbrs[depth] {
                if self.g.has_edge(self.image[j], w) {
                    extra_now += 1;
                    if extra_now > extra_budget {
                        return Ok(());
                    }
                }
            }
        }
        let attr_now = match self.attr_miss(self.order[depth], w) {
            Some(flag) => attr_misses + flag,
            None => return Ok(()),
        };
        if attr_now > self.node_budget {
            return Ok(());
        }
        self.image[depth] = w;
        self.used[w as usize] = true;
        let r = self.run(depth + 1, miss_now, extra_now, attr_now);
        self.used[w as usize] = false;
        r
    }

    /// `Some(0)` = node matches, `Some(1)` = consumes one AlmostNodes
    /// mismatch, `None` = rejected.
    fn attr_miss(&self, qn: u32, w: u32) -> Option<u64> {
        if self.attr == AttrSemantics::Ignored {
            return Some(0);
        }
        let qa = &self.q_attrs.expect("validated")[qn as usize];
        let ga = &self.g_attrs.expect("validated")[w as usize];
        match self.attr {
            AttrSemantics::Ignored => Some(0),
            AttrSemantics::Exact => (qa == ga).then_some(0),
            AttrSemantics::AlmostNodes { .. } => Some(u64::from(qa != ga)),
            AttrSemantics::AlmostAttrs { epsilon } => {
                let mismatches = qa.iter().zip(ga).filter(|(a, b)| a != b).count();
                (mismatches <= epsilon as usize).then_some(0)
            }
            AttrSemantics::Approximate => {
                let schema = self.schema.expect("validated");
                qa.iter()
                    .zip(ga)
                    .zip(schema.attributes())
                    .all(|((&a, &b), attr)| attr.sim(a, b) == 1.0)
                    .then_some(0)
            }
        }
    }

    fn record(&mut self) -> Result<(), Halt> {
        self.count += 1;
        if let Some(set) = &mut self.communities {
            let mut key = self.image.clone();
            key.sort_unstable();
            set.insert(key);
        }
        if let Some(ms) = &mut self.mappings {
            ms.push(self.image.clone());
        }
        if let Some(stop) = self.stop_after {
            if self.count >= stop {
                self.truncated = true;
                return Err(Halt::Stop);
            }
        }
        Ok(())
    }
}

/// Graph-conditional expected match count for probabilistic edge knowledge:
/// the sum over all ordered injective candidates of the per-candidate
/// probability
///
/// ```text
/// partial:  prod over known pairs not in E(I) of (1 - p(e))
/// complete: prod over known pairs in E(I) of p(e)
///           * prod over known pairs not in E(I) of (1 - p(e))
/// ```
///
/// Medium pairs carry no information and contribute no factor.
pub fn expected_matches_given_graph(
    g: &Graph,
    q: &Query,
    completeness: Completeness,
    opts: &CountOptions,
) -> Result<f64, MatchError> {
    let confidence = q.confidence().ok_or(MatchError::MissingConfidence)?;
    let order = search_order(q);
    // Known confidences between each search position and all earlier ones.
    let mut known: Vec<Vec<(usize, f64)>> = Vec::with_capacity(order.len());
    for (d, &v) in order.iter().enumerate() {
        let mut here = Vec::new();
        for (j, &u) in order.iter().enumerate().take(d) {
            if let PairConfidence::Known(c) = confidence[q.pair_index(v, u)] {
                here.push((j, c));
            }
        }
        known.push(here);
    }
    let budget = opts.budget.unwrap_or(u64::MAX);
    let mut visited = 0u64;
    let mut image = alloc::vec![0u32; order.len()];
    let mut used = alloc::vec![false; g.node_count()];
    let mut total = 0.0f64;
    let mut comp = 0.0f64;
    fn rec(
        g: &Graph,
        known: &[Vec<(usize, f64)>],
        completeness: Completeness,
        image: &mut [u32],
        used: &mut [bool],
        depth: usize,
        weight: f64,
        visited: &mut u64,
        budget: u64,
        total: &mut f64,
        comp: &mut f64,
    ) -> Result<(), MatchError> {
        if depth == image.len() {
            // Kahan compensation keeps the candidate sum exact enough to
            // compare against the closed forms at 10 significant digits.
            let y = weight - *comp;
            let t = *total + y;
            *comp = (t - *total) - y;
            *total = t;
            return Ok(());
        }
        for w in 0..g.node_count() as u32 {
            if used[w as usize] {
                continue;
            }
            *visited += 1;
            if *visited > budget {
                return Err(MatchError::BudgetExhausted { visited: *visited, budget });
            }
            let mut weight_now = weight;
            for &(j, c) in &known[depth] {
                let present = g.has_edge(image[j], w);
                weight_now *= match (completeness, present) {
                    (_, false) => 1.0 - c,
                    (Completeness::Complete, true) => c,
                    (Completeness::Partial, true) => 1.0,
                };
                if weight_now == 0.0 {
                    break;
                }
            }
            if weight_now == 0.0 {
                continue;
            }
            image[depth] = w;
            used[w as usize] = true;
            let r = rec(
                g, known, completeness, image, used, depth + 1, weight_now, visited, budget,
                total, comp,
            );
            used[w as usize] = false;
            r?;
        }
        Ok(())
    }
    rec(
        g,
        &known,
        completeness,
        &mut image,
        &mut used,
        0,
        1.0,
        &mut visited,
        budget,
        &mut total,
        &mut comp,
    )?;
    Ok(total)
}

/// What a Monte-Carlo trial measures on each sampled graph.
#[derive(Clone, Debug)]
pub enum TrialMeasure {
    /// Exact count under deterministic semantics.
    Count(MatchSemantics),
    /// Graph-conditional expectation; the query must carry confidences.
    GraphConditional(Completeness),
}

#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Normal-approximation 99% half width, `2.576 * stderr`.
    pub half_width_99: f64,
    pub trials: u64,
}

impl McEstimate {
    pub fn covers(&self, value: f64) -> bool {
        (self.mean - value).abs() <= self.half_width_99
    }
}

/// Samples `trials` graphs from G(n, p) and measures the query on each;
/// returns the mean with a normal-approximation 99% interval.
///
/// Trial `t` uses the derived seed `(seed, MC_TRIAL, t)`, so the estimate
/// is independent of evaluation order. When a schema is supplied and the
/// semantics read attributes, both graph and query labels are resampled
/// from the marginals each trial (the analytic formulas model both sides
/// as random).
pub fn monte_carlo_expected_matches(
    n: usize,
    p: f64,
    q: &Query,
    measure: &TrialMeasure,
    schema: Option<&AttributeSchema>,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, MatchError> {
    if trials < 30 {
        return Err(MatchError::TooFewTrials { trials });
    }
    if n == 0 || !(0.0..=1.0).contains(&p) {
        return Err(MatchError::BadParams("need n >= 1 and p in [0, 1]"));
    }
    let needs_attrs = matches!(
        measure,
        TrialMeasure::Count(MatchSemantics { attr, .. }) if *attr != AttrSemantics::Ignored
    );
    if needs_attrs && schema.is_none() {
        return Err(MatchError::MissingSchema);
    }
    let opts = CountOptions {
        budget: None,
        track_communities: false,
        enumerate: false,
        stop_after: None,
    };
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for t in 0..trials {
        let trial_seed = derive_seed(seed, tag::MC_TRIAL, t);
        let mut g = generate_gnp(&GnpParams { n, p, seed: trial_seed })
            .map_err(|_| MatchError::BadParams("invalid G(n,p) parameters"))?;
        let mut q_t = None;
        if needs_attrs {
            let schema = schema.expect("checked above");
            g = g
                .with_attributes(crate::querygen::sample_attributes(
                    schema,
                    n,
                    derive_seed(trial_seed, tag::ATTRIBUTES, 0),
                ))
                .expect("row count matches n");
            q_t = Some(
                q.clone()
                    .with_attributes(crate::querygen::sample_attributes(
                        schema,
                        q.node_count(),
                        derive_seed(trial_seed, tag::ATTRIBUTES, 1),
                    ))
                    .expect("row count matches n_q"),
            );
        }
        let value = match measure {
            TrialMeasure::Count(sem) => {
                count_matches(&g, q_t.as_ref().unwrap_or(q), sem, schema, &opts)?.match_count
                    as f64
            }
            TrialMeasure::GraphConditional(completeness) => {
                expected_matches_given_graph(&g, q, *completeness, &opts)?
            }
        };
        // Welford update.
        let delta = value - mean;
        mean += delta / (t + 1) as f64;
        m2 += delta * (value - mean);
    }
    let variance = m2 / (trials - 1) as f64;
    let stderr = (variance / trials as f64).sqrt();
    Ok(McEstimate { mean, stderr, half_width_99: Z_99 * stderr, trials })
}

#[derive(Clone, Copy, Debug)]
pub struct ColorCodingEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub iterations: u64,
}

/// Iterations for relative error `epsilon` with failure probability
/// `delta`: `ceil(k^k / (k! epsilon^2 delta))`. The `k^k / k!` factor is
/// the reciprocal of the colorful-hit probability.
pub fn recommended_iterations(k: u32, epsilon: f64, delta: f64) -> u64 {
    debug_assert!(k >= 1 && epsilon > 0.0 && delta > 0.0);
    let mut ratio = 1.0f64; // k^k / k!
    for i in 1..=k {
        ratio *= k as f64 / i as f64;
    }
    (ratio / (epsilon * epsilon * delta)).ceil() as u64
}

const COLOR_CODING_MAX_NODES: usize = 12;

/// Unbiased color-coding estimate of the ExactPartial (non-induced) ordered
/// match count of a tree query.
///
/// Each iteration colors the graph uniformly with `k = n_Q` colors and
/// counts colorful tree embeddings exactly by dynamic programming over
/// (node, color subset); a fixed injective embedding is colorful with
/// probability `k!/k^k`, so the count scaled by `k^k/k!` estimates `M_Q`.
pub fn color_coding_count(
    g: &Graph,
    q: &Query,
    iterations: u64,
    seed: u64,
) -> Result<ColorCodingEstimate, MatchError> {
    let k = q.node_count();
    if !q.is_connected() || q.edge_count() != k - 1 {
        return Err(MatchError::NotATree { n_q: k, m_q: q.edge_count() });
    }
    if k > COLOR_CODING_MAX_NODES {
        return Err(MatchError::QueryTooLarge { n_q: k, limit: COLOR_CODING_MAX_NODES });
    }
    if iterations == 0 {
        return Err(MatchError::BadParams("need at least one iteration"));
    }
    let n = g.node_count();
    // Root at the highest-degree query node; children + post-order by BFS.
    let root = (0..k as u32).max_by_key(|&v| (q.degree(v), core::cmp::Reverse(v))).unwrap();
    let mut parent = alloc::vec![u32::MAX; k];
    let mut bfs = alloc::vec![root];
    let mut seen = alloc::vec![false; k];
    seen[root as usize] = true;
    let mut head = 0;
    while head < bfs.len() {
        let v = bfs[head];
        head += 1;
        for &u in q.neighbors(v) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                parent[u as usize] = v;
                bfs.push(u);
            }
        }
    }
    let mut children: Vec<Vec<u32>> = alloc::vec![Vec::new(); k];
    for v in 0..k as u32 {
        if parent[v as usize] != u32::MAX {
            children[parent[v as usize] as usize].push(v);
        }
    }
    let mut subtree = alloc::vec![1usize; k];
    for &v in bfs.iter().rev() {
        for &c in &children[v as usize] {
            subtree[v as usize] += subtree[c as usize];
        }
    }
    let masks = 1usize << k;
    let full = masks - 1;
    let correction = {
        let mut ratio = 1.0f64;
        for i in 1..=k {
            ratio *= k as f64 / i as f64;
        }
        ratio
    };

    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut colors = alloc::vec![0u8; n];
    // Masks grouped by popcount: the DP only ever touches masks whose size
    // equals the (partial) subtree size.
    let mut by_count: Vec<Vec<usize>> = alloc::vec![Vec::new(); k + 1];
    for mask in 1..masks {
        let c = mask.count_ones() as usize;
        if c <= k {
            by_count[c].push(mask);
        }
    }
    for iter in 0..iterations {
        let mut rng = SplitMix64::new(derive_seed(seed, tag::COLORING, iter));
        for c in colors.iter_mut() {
            *c = rng.next_range(k as u64) as u8;
        }
        // dp[t][v][mask]: embeddings of t's subtree, t at v, colors = mask.
        let mut dp: Vec<Option<Vec<f64>>> = alloc::vec![None; k];
        for &t in bfs.iter().rev() {
            let mut cur = alloc::vec![0.0f64; masks * n];
            for v in 0..n {
                cur[v * masks + (1 << colors[v])] = 1.0;
            }
            let mut size = 1usize;
            for &ch in &children[t as usize] {
                let child_dp = dp[ch as usize].take().expect("post-order");
                let ch_size = subtree[ch as usize];
                // neigh[v][mask] = sum over G-neighbors u of child dp at u.
                let mut neigh = alloc::vec![0.0f64; masks * n];
                for v in 0..n {
                    let row = &mut neigh[v * masks..(v + 1) * masks];
                    for &u in g.neighbors(v as u32) {
                        let crow = &child_dp[u as usize * masks..(u as usize + 1) * masks];
                        for &m in &by_count[ch_size] {
                            row[m] += crow[m];
                        }
                    }
                }
                let mut next = alloc::vec![0.0f64; masks * n];
                for v in 0..n {
                    let crow = &cur[v * masks..(v + 1) * masks];
                    let nrow = &neigh[v * masks..(v + 1) * masks];
                    let orow = &mut next[v * masks..(v + 1) * masks];
                    for &s in &by_count[size] {
                        let a = crow[s];
                        if a == 0.0 {
                            continue;
                        }
                        for &m in &by_count[ch_size] {
                            if s & m == 0 {
                                orow[s | m] += a * nrow[m];
                            }
                        }
                    }
                }
                cur = next;
                size += ch_size;
            }
            dp[t as usize] = Some(cur);
        }
        let root_dp = dp[root as usize].take().expect("root computed");
        let mut colorful = 0.0f64;
        for v in 0..n {
            colorful += root_dp[v * masks + full];
        }
        let estimate = colorful * correction;
        let delta = estimate - mean;
        mean += delta / (iter + 1) as f64;
        m2 += delta * (estimate - mean);
    }
    let stderr = if iterations > 1 {
        (m2 / (iterations - 1) as f64 / iterations as f64).sqrt()
    } else {
        0.0
    };
    Ok(ColorCodingEstimate { estimate: mean, stderr, iterations })
}

/// Star match count, exact in log space (and as an integer when it fits):
/// matches of the (d_c + 1)-node star are a center of degree >= d_c plus an
/// ordered choice of d_c distinct neighbors, so
/// `M = sum over deg(v) >= d_c of deg(v) * (deg(v)-1) * .. * (deg(v)-d_c+1)`.
#[derive(Clone, Copy, Debug)]
pub struct StarMatches {
    pub count: LogScalar,
    /// Exact integer value when representable in u64.
    pub exact: Option<u64>,
}

pub fn star_match_count(g: &Graph, d_c: u64) -> StarMatches {
    debug_assert!(d_c >= 1);
    let mut acc = LogSum::new();
    let mut exact: Option<u64> = Some(0);
    for v in 0..g.node_count() as u32 {
        let deg = g.degree(v) as u64;
        if deg < d_c {
            continue;
        }
        acc.add(LogScalar::from_ln(ln_falling_factorial(deg, d_c)));
        exact = exact.and_then(|sum| {
            (0..d_c)
                .try_fold(1u64, |acc, i| acc.checked_mul(deg - i))
                .and_then(|f| sum.checked_add(f))
        });
    }
    StarMatches { count: acc.total(), exact }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndistMode {
    /// At least `l` matches of Q exist.
    Weak,
    /// At least one match of `l` node-disjoint copies of Q exists.
    Strong,
}

/// Whether the published graph leaves the query's users hidden among at
/// least `l` alternatives.
pub fn ell_indistinguishability(
    g: &Graph,
    q: &Query,
    sem: &MatchSemantics,
    ell: u64,
    mode: IndistMode,
    schema: Option<&AttributeSchema>,
    budget: Option<u64>,
) -> Result<bool, MatchError> {
    if ell == 0 {
        return Ok(true);
    }
    let opts = |stop| CountOptions {
        budget,
        track_communities: false,
        enumerate: false,
        stop_after: Some(stop),
    };
    match mode {
        IndistMode::Weak => {
            let result = count_matches(g, q, sem, schema, &opts(ell))?;
            Ok(result.match_count >= ell)
        }
        IndistMode::Strong => {
            let n_q = q.node_count();
            let copies = n_q.checked_mul(ell as usize);
            match copies {
                Some(total) if total <= g.node_count() => {
                    let composite = disjoint_copies(q, ell as usize)
                        .map_err(|_| MatchError::BadParams("invalid composite query"))?;
                    let result = count_matches(g, &composite, sem, schema, &opts(1))?;
                    Ok(result.match_count >= 1)
                }
                // More pattern nodes than graph nodes: no injection exists.
                _ => Ok(false),
            }
        }
    }
}

/// `l` node-disjoint copies of a query as one (disconnected) pattern.
fn disjoint_copies(q: &Query, ell: usize) -> Result<Query, GraphError> {
    let n_q = q.node_count();
    let mut edges = Vec::with_capacity(q.edge_count() * ell);
    for copy in 0..ell {
        let shift = (copy * n_q) as u32;
        for &(u, v) in q.edges() {
            edges.push((u + shift, v + shift));
        }
    }
    let pattern = Query::pattern(n_q * ell, &edges)?;
    match q.attributes() {
        Some(rows) => {
            let mut all = Vec::with_capacity(rows.len() * ell);
            for _ in 0..ell {
                all.extend(rows.iter().cloned());
            }
            pattern.with_attributes(all)
        }
        None => Ok(pattern),
    }
}
