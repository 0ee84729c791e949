//! Background-knowledge query generation: ego-network extraction, synthetic
//! G(n_Q, p_q) queries, star classification, density control, attribute
//! attachment, and confidence-table builders for the validation harness.

use crate::graph::{
    ego_subgraph, AttributeSchema, Graph, GraphError, PairConfidence, Query,
};
use crate::generators::{generate_gnp, GnpParams};
use crate::logspace::round_ties_even;
use crate::rng::{derive_seed, keyed_unit, tag, SplitMix64};
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

/// Resample attempts before giving up on a connected query at the target
/// density.
const REJECTION_LIMIT: u32 = 1000;

#[derive(Clone, Debug, PartialEq)]
pub enum QueryGenError {
    /// Query density must lie in (0, 1].
    BadDensity(f64),
    CenterOutOfRange { center: u32, n: usize },
    EmptyQuery,
    /// No connected query at the target density after the resample limit.
    RejectionLimit { attempts: u32 },
    /// Fewer target edges than any spanning tree needs.
    UnachievableDensity { m_target: u64, n_q: usize },
    /// More confidence entries than node pairs.
    ConfidenceOverflow { requested: u64, pairs: u64 },
    Graph(GraphError),
}

impl fmt::Display for QueryGenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryGenError::BadDensity(p) => write!(f, "query density {p} outside (0, 1]"),
            QueryGenError::CenterOutOfRange { center, n } => {
                write!(f, "ego center {center} out of range for {n} nodes")
            }
            QueryGenError::EmptyQuery => write!(f, "query needs at least one node"),
            QueryGenError::RejectionLimit { attempts } => {
                write!(f, "no connected query at the target density after {attempts} attempts")
            }
            QueryGenError::UnachievableDensity { m_target, n_q } => write!(
                f,
                "target of {m_target} edges cannot keep {n_q} nodes connected (need n_q - 1)"
            ),
            QueryGenError::ConfidenceOverflow { requested, pairs } => {
                write!(f, "{requested} confidence entries requested but only {pairs} pairs exist")
            }
            QueryGenError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for QueryGenError {}

impl From<GraphError> for QueryGenError {
    fn from(e: GraphError) -> QueryGenError {
        QueryGenError::Graph(e)
    }
}

/// Where a query comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuerySource {
    /// Ego network of a uniformly random center.
    EgoRandomCenter,
    /// Ego network of a fixed center.
    EgoGivenCenter(u32),
    /// Connected sample of G(n_Q, p_q) (resampled until connected).
    SyntheticGnp { n_q: usize, p_q: f64 },
}

/// Full query recipe. Generation is deterministic in `(graph, spec)`.
#[derive(Clone, Debug)]
pub struct QuerySpec {
    pub source: QuerySource,
    /// Adjust the query to this density after extraction.
    pub target_density: Option<f64>,
    /// Sample per-node attribute values from these marginals.
    pub schema: Option<AttributeSchema>,
    pub seed: u64,
}

impl QuerySpec {
    pub fn new(source: QuerySource, seed: u64) -> QuerySpec {
        QuerySpec { source, target_density: None, schema: None, seed }
    }
}

/// How the query was obtained, for experiment logs.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Ego { center: u32 },
    Synthetic { n_q: usize, p_q: f64, attempt: u32 },
}

#[derive(Clone, Debug)]
pub struct GeneratedQuery {
    pub query: Query,
    pub provenance: Provenance,
    /// Original graph node behind each query node (ego sources only;
    /// index 0 is the center).
    pub node_map: Option<Vec<u32>>,
}

/// Generates a connected query from `g` per the spec, resampling up to the
/// rejection limit when the draw is disconnected or the density target
/// cannot be reached from it.
pub fn generate_query(g: &Graph, spec: &QuerySpec) -> Result<GeneratedQuery, QueryGenError> {
    generate_impl(Some(g), spec)
}

/// Generates from a synthetic source, which needs no host graph. Panics on
/// an ego source; use `generate_query` for those.
pub fn synthetic_query(spec: &QuerySpec) -> Result<GeneratedQuery, QueryGenError> {
    assert!(
        matches!(spec.source, QuerySource::SyntheticGnp { .. }),
        "synthetic_query needs a synthetic source"
    );
    generate_impl(None, spec)
}

fn generate_impl(g: Option<&Graph>, spec: &QuerySpec) -> Result<GeneratedQuery, QueryGenError> {
    if let Some(p_q) = spec.target_density {
        if !(p_q > 0.0 && p_q <= 1.0) {
            return Err(QueryGenError::BadDensity(p_q));
        }
    }
    if let QuerySource::SyntheticGnp { n_q, p_q } = spec.source {
        if n_q == 0 {
            return Err(QueryGenError::EmptyQuery);
        }
        if !(p_q > 0.0 && p_q <= 1.0) {
            return Err(QueryGenError::BadDensity(p_q));
        }
    }
    if let QuerySource::EgoGivenCenter(center) = spec.source {
        let n = g.expect("ego sources need a host graph").node_count();
        if center as usize >= n {
            return Err(QueryGenError::CenterOutOfRange { center, n });
        }
    }
    for attempt in 0..REJECTION_LIMIT {
        let attempt_seed = derive_seed(spec.seed, tag::QUERY_GEN, attempt as u64);
        let (query, provenance, node_map) = match spec.source {
            QuerySource::EgoRandomCenter => {
                let g = g.expect("ego sources need a host graph");
                let mut rng = SplitMix64::new(attempt_seed);
                let center = rng.next_range(g.node_count() as u64) as u32;
                let ego = ego_subgraph(g, center);
                (ego.query, Provenance::Ego { center }, Some(ego.node_map))
            }
            QuerySource::EgoGivenCenter(center) => {
                let ego = ego_subgraph(g.expect("ego sources need a host graph"), center);
                (ego.query, Provenance::Ego { center }, Some(ego.node_map))
            }
            QuerySource::SyntheticGnp { n_q, p_q } => {
                let sample = generate_gnp(&GnpParams { n: n_q, p: p_q, seed: attempt_seed })
                    .expect("parameters validated above");
                let query = match Query::connected(n_q, sample.edges()) {
                    Ok(q) => q,
                    Err(GraphError::Disconnected) => continue,
                    Err(e) => return Err(e.into()),
                };
                (query, Provenance::Synthetic { n_q, p_q, attempt }, None)
            }
        };
        let query = match spec.target_density {
            Some(p_q) => {
                match adjust_density(&query, p_q, derive_seed(attempt_seed, tag::DENSITY_ADJUST, 0))
                {
                    Ok(q) => q,
                    Err(QueryGenError::UnachievableDensity { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
            None => query,
        };
        let query = match &spec.schema {
            Some(schema) => {
                let rows = sample_attributes(
                    schema,
                    query.node_count(),
                    derive_seed(spec.seed, tag::ATTRIBUTES, attempt as u64),
                );
                query.with_attributes(rows)?
            }
            None => query,
        };
        return Ok(GeneratedQuery { query, provenance, node_map });
    }
    Err(QueryGenError::RejectionLimit { attempts: REJECTION_LIMIT })
}

/// True iff one node (the center) is adjacent to all others and no other
/// edges exist. A star has at least one leaf, so single-node queries do not
/// qualify; the two-node query is the one-leaf star.
pub fn is_star(q: &Query) -> bool {
    let n_q = q.node_count();
    n_q >= 2
        && q.edge_count() == n_q - 1
        && (0..n_q as u32).any(|v| q.degree(v) == n_q - 1)
}

/// Adds or removes uniformly random edges until the edge count hits
/// `round(p_q * n_q (n_q - 1) / 2)`, keeping the query connected (removals
/// that would disconnect it are rejected and redrawn; a connected graph
/// above tree size always has a removable cycle edge, so the redraw loop
/// terminates). Attributes, beliefs, and confidence tables carry over
/// unchanged since the node set is untouched.
pub fn adjust_density(q: &Query, p_q: f64, seed: u64) -> Result<Query, QueryGenError> {
    if !(p_q > 0.0 && p_q <= 1.0) {
        return Err(QueryGenError::BadDensity(p_q));
    }
    let n_q = q.node_count();
    if n_q == 0 {
        return Err(QueryGenError::EmptyQuery);
    }
    let m0 = q.pair_count() as u64;
    let m_target = round_ties_even(p_q * m0 as f64);
    if m_target < (n_q - 1) as u64 {
        return Err(QueryGenError::UnachievableDensity { m_target, n_q });
    }
    let mut edges: BTreeSet<(u32, u32)> = q.edges().iter().copied().collect();
    let mut rng = SplitMix64::new(derive_seed(seed, tag::DENSITY_ADJUST, 0));
    while (edges.len() as u64) < m_target {
        let (u, v) = q.pair_at(rng.next_range(m0) as usize);
        edges.insert((u, v));
    }
    while (edges.len() as u64) > m_target {
        let pick = rng.next_range(edges.len() as u64) as usize;
        let &edge = edges.iter().nth(pick).expect("index in range");
        edges.remove(&edge);
        if !connected(n_q, &edges) {
            edges.insert(edge);
        }
    }
    let edge_list: Vec<(u32, u32)> = edges.into_iter().collect();
    let mut out = match q.confidence() {
        Some(table) => Query::with_confidence(n_q, &edge_list, table.to_vec())?,
        None => Query::connected(n_q, &edge_list)?,
    };
    if let Some(rows) = q.attributes() {
        out = out.with_attributes(rows.to_vec())?;
    }
    if let Some(beliefs) = q.beliefs() {
        out = out.with_beliefs(beliefs.to_vec())?;
    }
    Ok(out)
}

fn connected(n: usize, edges: &BTreeSet<(u32, u32)>) -> bool {
    if n == 0 {
        return false;
    }
    let mut adj = alloc::vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    let mut seen = alloc::vec![false; n];
    let mut stack = alloc::vec![0u32];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// One attribute-value row per node, each value drawn independently from
/// its marginal by inverse CDF. Keyed on `(seed, node, attribute)`, so the
/// labeling is order-independent and reproducible.
pub fn sample_attributes(schema: &AttributeSchema, nodes: usize, seed: u64) -> Vec<Vec<u16>> {
    (0..nodes)
        .map(|node| {
            schema
                .attributes()
                .iter()
                .enumerate()
                .map(|(a, attr)| {
                    let u = keyed_unit(seed, tag::ATTRIBUTES, node as u64, a as u64);
                    let marginal = attr.marginal();
                    let mut acc = 0.0;
                    let mut value = marginal.len() - 1;
                    for (i, &p) in marginal.iter().enumerate() {
                        acc += p;
                        if u < acc {
                            value = i;
                            break;
                        }
                    }
                    value as u16
                })
                .collect()
        })
        .collect()
}

/// Star share among ego networks of uniformly random centers; a reporting
/// statistic for generated corpora, not an assertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarReport {
    pub samples: u64,
    pub stars: u64,
}

impl StarReport {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        self.stars as f64 / self.samples as f64
    }
}

pub fn star_fraction(g: &Graph, samples: u64, seed: u64) -> StarReport {
    let mut rng = SplitMix64::new(derive_seed(seed, tag::QUERY_GEN, 0));
    let mut stars = 0;
    for _ in 0..samples {
        let center = rng.next_range(g.node_count() as u64) as u32;
        if is_star(&ego_subgraph(g, center).query) {
            stars += 1;
        }
    }
    StarReport { samples, stars }
}

/// Uniform confidence table: every pair Known(p_e).
pub fn uniform_confidence(n_q: usize, p_e: f64) -> Result<Vec<PairConfidence>, QueryGenError> {
    if !(0.0..=1.0).contains(&p_e) {
        return Err(QueryGenError::Graph(GraphError::BadDistribution {
            context: "pair confidence",
            sum: p_e,
        }));
    }
    let m0 = n_q * n_q.saturating_sub(1) / 2;
    Ok(alloc::vec![PairConfidence::Known(p_e); m0])
}

/// Three-level confidence table: `x1` uniformly random pairs at the high
/// confidence `p1`, `x0` further pairs at the low confidence `p0`, the
/// rest Medium (no knowledge).
pub fn three_level_confidence(
    n_q: usize,
    p1: f64,
    p0: f64,
    x1: u64,
    x0: u64,
    seed: u64,
) -> Result<Vec<PairConfidence>, QueryGenError> {
    let m0 = (n_q * n_q.saturating_sub(1) / 2) as u64;
    let requested = x1.checked_add(x0).filter(|&t| t <= m0);
    let picks = match requested {
        Some(t) => t,
        None => {
            return Err(QueryGenError::ConfidenceOverflow {
                requested: x1.saturating_add(x0),
                pairs: m0,
            })
        }
    };
    for p in [p1, p0] {
        if !(0.0..=1.0).contains(&p) {
            return Err(QueryGenError::Graph(GraphError::BadDistribution {
                context: "pair confidence",
                sum: p,
            }));
        }
    }
    // Partial Fisher-Yates over the pair indices: the first x1 positions
    // get p1, the next x0 get p0.
    let mut indices: Vec<u64> = (0..m0).collect();
    let mut rng = SplitMix64::new(derive_seed(seed, tag::QUERY_GEN, 1));
    for i in 0..picks {
        let j = i + rng.next_range(m0 - i);
        indices.swap(i as usize, j as usize);
    }
    let mut table = alloc::vec![PairConfidence::Medium; m0 as usize];
    for (slot, &pair) in indices.iter().enumerate().take(picks as usize) {
        table[pair as usize] =
            PairConfidence::Known(if (slot as u64) < x1 { p1 } else { p0 });
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Attribute;
    use proptest::prelude::*;

    #[test]
    fn ego_given_center_on_c4_is_a_two_leaf_star() {
        let g = Graph::cycle(4);
        let spec = QuerySpec::new(QuerySource::EgoGivenCenter(0), 7);
        let out = generate_query(&g, &spec).unwrap();
        assert_eq!(out.query.node_count(), 3);
        assert_eq!(out.query.edges(), &[(0, 1), (0, 2)]);
        assert_eq!(out.node_map, Some(alloc::vec![0, 1, 3]));
        assert_eq!(out.provenance, Provenance::Ego { center: 0 });
        assert!(is_star(&out.query));
    }

    #[test]
    fn synthetic_full_density_is_a_clique() {
        let g = Graph::cycle(4);
        let spec = QuerySpec::new(QuerySource::SyntheticGnp { n_q: 5, p_q: 1.0 }, 3);
        let out = generate_query(&g, &spec).unwrap();
        assert_eq!(out.query.node_count(), 5);
        assert_eq!(out.query.edge_count(), 10);
        assert!(matches!(
            out.provenance,
            Provenance::Synthetic { n_q: 5, attempt: 0, .. }
        ));
        assert!(!is_star(&out.query));
    }

    #[test]
    fn unreachable_density_hits_the_rejection_limit() {
        // C4 egos have 3 nodes and 3 pairs; round(0.2 * 3) = 1 < 2 edges
        // can never stay connected, whatever the draw.
        let g = Graph::cycle(4);
        let mut spec = QuerySpec::new(QuerySource::EgoGivenCenter(0), 5);
        spec.target_density = Some(0.2);
        assert!(matches!(
            generate_query(&g, &spec),
            Err(QueryGenError::RejectionLimit { attempts: 1000 })
        ));
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let g = crate::generators::generate_gnp(&GnpParams { n: 40, p: 0.15, seed: 9 }).unwrap();
        let spec = QuerySpec::new(QuerySource::EgoRandomCenter, 11);
        let (a, b) = (generate_query(&g, &spec).unwrap(), generate_query(&g, &spec).unwrap());
        assert_eq!(a.query, b.query);
        assert_eq!(a.provenance, b.provenance);
        assert_eq!(a.node_map, b.node_map);
        let synth = QuerySpec::new(QuerySource::SyntheticGnp { n_q: 6, p_q: 0.5 }, 13);
        assert_eq!(
            generate_query(&g, &synth).unwrap().query,
            generate_query(&g, &synth).unwrap().query
        );
    }

    #[test]
    fn bad_parameters_are_rejected_up_front() {
        let g = Graph::cycle(4);
        assert!(matches!(
            generate_query(&g, &QuerySpec::new(QuerySource::EgoGivenCenter(4), 1)),
            Err(QueryGenError::CenterOutOfRange { center: 4, n: 4 })
        ));
        assert!(matches!(
            generate_query(&g, &QuerySpec::new(QuerySource::SyntheticGnp { n_q: 3, p_q: 0.0 }, 1)),
            Err(QueryGenError::BadDensity(p)) if p == 0.0
        ));
        let mut spec = QuerySpec::new(QuerySource::EgoGivenCenter(0), 1);
        spec.target_density = Some(1.5);
        assert!(matches!(
            generate_query(&g, &spec),
            Err(QueryGenError::BadDensity(p)) if p == 1.5
        ));
    }

    #[test]
    fn star_classification_examples() {
        assert!(is_star(&Query::star(5)));
        assert!(!is_star(&Query::clique(3)));
        // A path of three nodes is the two-leaf star.
        assert!(is_star(&Query::path(3)));
        assert!(is_star(&Query::path(2)));
        assert!(!is_star(&Query::connected(1, &[]).unwrap()));
        // Ego net whose neighbors share a mutual edge: a triangle, not a star.
        let g = Graph::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert!(!is_star(&ego_subgraph(&g, 0).query));
        // Cycle of four: center sees 2 of 3 others.
        assert!(!is_star(&Query::connected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()));
    }

    #[test]
    fn density_adjustment_examples() {
        // Identity at the current density.
        let q = Query::path(3);
        let same = adjust_density(&q, 2.0 / 3.0, 1).unwrap();
        assert_eq!(same.edges(), q.edges());

        // 5-clique down to p_q = 0.4: round(0.4 * 10) = 4 edges, a spanning
        // tree, still connected.
        let down = adjust_density(&Query::clique(5), 0.4, 2).unwrap();
        assert_eq!(down.edge_count(), 4);
        assert!(down.is_connected());

        // Path up to full density: the triangle.
        let up = adjust_density(&Query::path(3), 1.0, 3).unwrap();
        assert_eq!(up.edges(), &[(0, 1), (0, 2), (1, 2)]);

        // Below tree size is unachievable.
        assert_eq!(
            adjust_density(&Query::path(3), 0.2, 4),
            Err(QueryGenError::UnachievableDensity { m_target: 1, n_q: 3 })
        );
    }

    #[test]
    fn density_adjustment_carries_node_data() {
        let q = Query::clique(4)
            .with_attributes(alloc::vec![alloc::vec![1]; 4])
            .unwrap();
        let out = adjust_density(&q, 0.5, 9).unwrap();
        assert_eq!(out.edge_count(), 3);
        assert_eq!(out.attributes(), q.attributes());

        let pc = uniform_confidence(4, 0.3).unwrap();
        let qc = Query::with_confidence(4, &[(0, 1), (1, 2), (2, 3)], pc.clone()).unwrap();
        let denser = adjust_density(&qc, 1.0, 10).unwrap();
        assert_eq!(denser.edge_count(), 6);
        assert_eq!(denser.confidence(), Some(&pc[..]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ego_invariants(n in 2usize..40, p in 0.05f64..0.6, seed in 0u64..500) {
            let g = generate_gnp(&GnpParams { n, p, seed }).unwrap();
            let mut rng = SplitMix64::new(seed ^ 0xabc);
            let center = rng.next_range(n as u64) as u32;
            let ego = ego_subgraph(&g, center);
            prop_assert!(ego.query.is_connected());
            prop_assert!(ego.query.edge_count() >= g.degree(center));
            prop_assert_eq!(
                ego.query.edge_count() == g.degree(center) && g.degree(center) >= 1,
                is_star(&ego.query)
            );
        }

        #[test]
        fn adjusted_density_lands_on_target(
            n_q in 2usize..10,
            p_q in 0.001f64..=1.0,
            seed in 0u64..200,
        ) {
            let q = Query::clique(n_q);
            let m0 = q.pair_count() as f64;
            let m_target = round_ties_even(p_q * m0);
            let result = adjust_density(&q, p_q, seed);
            if m_target < (n_q - 1) as u64 {
                let unachievable =
                    matches!(result, Err(QueryGenError::UnachievableDensity { .. }));
                prop_assert!(unachievable, "expected unachievable target, got {:?}", result);
            } else {
                let adjusted = result.unwrap();
                prop_assert_eq!(adjusted.edge_count() as u64, m_target);
                prop_assert!(adjusted.is_connected());
                // Within one edge of the real-valued target.
                prop_assert!((adjusted.edge_count() as f64 - p_q * m0).abs() <= 1.0);
            }
        }

        #[test]
        fn generated_queries_are_connected_at_target_density(
            seed in 0u64..40,
            p_q in 0.3f64..=1.0,
        ) {
            let g = generate_gnp(&GnpParams { n: 60, p: 0.2, seed: 17 }).unwrap();
            let mut spec = QuerySpec::new(QuerySource::SyntheticGnp { n_q: 6, p_q: 0.6 }, seed);
            spec.target_density = Some(p_q);
            match generate_query(&g, &spec) {
                Ok(out) => {
                    prop_assert!(out.query.is_connected());
                    let m0 = out.query.pair_count() as f64;
                    prop_assert_eq!(
                        out.query.edge_count() as u64,
                        round_ties_even(p_q * m0)
                    );
                }
                Err(QueryGenError::RejectionLimit { .. }) => {
                    // Only possible when the target is below tree size.
                    prop_assert!(round_ties_even(p_q * 15.0) < 5);
                }
                Err(e) => return Err(TestCaseError::fail(alloc::format!("{e}"))),
            }
        }
    }

    #[test]
    fn attribute_sampling_matches_marginals_and_is_keyed() {
        let schema = AttributeSchema::new(alloc::vec![
            Attribute::new("a", alloc::vec![0.2, 0.3, 0.5]).unwrap(),
            Attribute::new("b", alloc::vec![0.5, 0.5]).unwrap(),
        ]);
        let rows = sample_attributes(&schema, 100_000, 42);
        assert_eq!(rows.len(), 100_000);
        for row in &rows {
            schema.check_row(row).unwrap();
        }
        let mut counts = [[0u64; 3]; 2];
        for row in &rows {
            counts[0][row[0] as usize] += 1;
            counts[1][row[1] as usize] += 1;
        }
        for (value, &expected) in [0.2, 0.3, 0.5].iter().enumerate() {
            let freq = counts[0][value] as f64 / 100_000.0;
            assert!((freq - expected).abs() < 0.01, "value {value}: {freq}");
        }
        assert!((counts[1][0] as f64 / 100_000.0 - 0.5).abs() < 0.01);

        // Deterministic per seed, different across seeds.
        assert_eq!(rows, sample_attributes(&schema, 100_000, 42));
        assert_ne!(rows[..50], sample_attributes(&schema, 50, 43)[..]);
    }

    #[test]
    fn star_fraction_extremes() {
        // Every ego of a star graph is a star (the full star from the
        // center, a single edge from a leaf).
        let star = Graph::star(5);
        assert_eq!(star_fraction(&star, 64, 5).fraction(), 1.0);
        // Every ego of a complete graph is the complete graph.
        let k4 = Graph::complete(4);
        assert_eq!(star_fraction(&k4, 64, 5).fraction(), 0.0);
    }

    #[test]
    fn confidence_table_builders() {
        let uniform = uniform_confidence(4, 0.3).unwrap();
        assert_eq!(uniform.len(), 6);
        assert!(uniform.iter().all(|c| *c == PairConfidence::Known(0.3)));
        assert!(uniform_confidence(4, 1.2).is_err());

        let table = three_level_confidence(5, 0.9, 0.1, 3, 4, 7).unwrap();
        assert_eq!(table.len(), 10);
        let high = table.iter().filter(|c| **c == PairConfidence::Known(0.9)).count();
        let low = table.iter().filter(|c| **c == PairConfidence::Known(0.1)).count();
        let medium = table.iter().filter(|c| **c == PairConfidence::Medium).count();
        assert_eq!((high, low, medium), (3, 4, 3));
        assert_eq!(table, three_level_confidence(5, 0.9, 0.1, 3, 4, 7).unwrap());
        assert_ne!(table, three_level_confidence(5, 0.9, 0.1, 3, 4, 8).unwrap());
        // The table is valid query material.
        Query::with_confidence(5, &[], table).unwrap();

        assert_eq!(
            three_level_confidence(3, 0.9, 0.1, 2, 2, 1),
            Err(QueryGenError::ConfidenceOverflow { requested: 4, pairs: 3 })
        );
    }
}
