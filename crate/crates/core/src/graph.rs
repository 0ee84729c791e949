//! Graph and query representations shared by every module.
//!
//! [`Graph`] is the published (anonymized) network: an immutable undirected
//! simple graph over dense node ids `0..n`, optionally carrying per-node
//! attribute values. [`Query`] is the attacker's background knowledge: a
//! small graph whose edges may instead be per-pair confidence values and
//! whose nodes may carry attribute values or belief distributions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    NodeOutOfRange { node: u32, n: usize },
    SelfLoop { node: u32 },
    Disconnected,
    ConfidenceLength { expected: usize, got: usize },
    AttributeRows { expected: usize, got: usize },
    BadDistribution { context: &'static str, sum: f64 },
    BadSimilarity { context: &'static str },
    EmptyDomain,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::NodeOutOfRange { node, n } => {
                write!(f, "node {node} out of range for {n} nodes")
            }
            GraphError::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            GraphError::Disconnected => write!(f, "query graph must be connected"),
            GraphError::ConfidenceLength { expected, got } => {
                write!(f, "confidence table must cover all {expected} pairs, got {got}")
            }
            GraphError::AttributeRows { expected, got } => {
                write!(f, "expected {expected} attribute rows, got {got}")
            }
            GraphError::BadDistribution { context, sum } => {
                write!(f, "{context}: distribution sums to {sum}, not 1")
            }
            GraphError::BadSimilarity { context } => {
                write!(f, "invalid similarity kernel: {context}")
            }
            GraphError::EmptyDomain => write!(f, "attribute domain must be nonempty"),
        }
    }
}

impl core::error::Error for GraphError {}

const DISTRIBUTION_TOL: f64 = 1e-12;

fn canonical(u: u32, v: u32) -> (u32, u32) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Immutable undirected simple graph with optional per-node attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    attributes: Option<Vec<Vec<u16>>>,
}

impl Graph {
    /// Builds from an edge list over nodes `0..n`. Edges are deduplicated,
    /// self-loops rejected. Prefer [`GraphBuilder`] when ingesting data that
    /// may legitimately contain duplicates or self-loops.
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let mut builder = GraphBuilder::new(n);
        for &(u, v) in edges {
            builder.add_edge(u, v)?;
        }
        Ok(builder.build())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u == v {
            return false;
        }
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Attaches one attribute-value row per node (indices into the schema
    /// domains). Validation against a schema happens where the schema is
    /// known; here only the row count is checked.
    pub fn with_attributes(mut self, rows: Vec<Vec<u16>>) -> Result<Graph, GraphError> {
        if rows.len() != self.n {
            return Err(GraphError::AttributeRows { expected: self.n, got: rows.len() });
        }
        self.attributes = Some(rows);
        Ok(self)
    }

    pub fn attributes(&self) -> Option<&[Vec<u16>]> {
        self.attributes.as_deref()
    }

    /// Cycle on `n >= 3` nodes.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        let edges: Vec<(u32, u32)> =
            (0..n as u32).map(|i| (i, (i + 1) % n as u32)).collect();
        Graph::new(n, &edges).expect("cycle is simple")
    }

    /// Complete graph on `n` nodes.
    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).expect("complete graph is simple")
    }

    /// Path on `n >= 1` nodes (`n - 1` edges).
    pub fn path(n: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).expect("path is simple")
    }

    /// Star: node 0 is the center, nodes `1..=leaves` the leaves.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (1..=leaves as u32).map(|v| (0, v)).collect();
        Graph::new(leaves + 1, &edges).expect("star is simple")
    }
}

/// Counters from graph construction; real edge lists routinely contain
/// duplicates, reverse duplicates, and self-loops, all of which are dropped
/// and reported rather than silently discarded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Incremental builder producing a deduplicated, symmetrized simple graph.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    n: usize,
    edges: BTreeSet<(u32, u32)>,
    stats: IngestStats,
}

impl GraphBuilder {
    pub fn new(n: usize) -> GraphBuilder {
        GraphBuilder { n, edges: BTreeSet::new(), stats: IngestStats::default() }
    }

    /// Adds an undirected edge; direction, duplicates, and self-loops are
    /// normalized away (self-loops and duplicates counted, not errors).
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<(), GraphError> {
        if u as usize >= self.n {
            return Err(GraphError::NodeOutOfRange { node: u, n: self.n });
        }
        if v as usize >= self.n {
            return Err(GraphError::NodeOutOfRange { node: v, n: self.n });
        }
        if u == v {
            self.stats.self_loops_dropped += 1;
            return Ok(());
        }
        if !self.edges.insert(canonical(u, v)) {
            self.stats.duplicates_dropped += 1;
        }
        Ok(())
    }

    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    pub fn build(self) -> Graph {
        let mut adj = vec![Vec::new(); self.n];
        let edges: Vec<(u32, u32)> = self.edges.into_iter().collect();
        for &(u, v) in &edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        // BTreeSet iteration yields (u, v) sorted, so each list is sorted.
        Graph { n: self.n, adj, edges, attributes: None }
    }
}

/// Histogram: degree -> node count. The counts sum to `n`.
pub fn degree_distribution(g: &Graph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for v in 0..g.node_count() as u32 {
        *hist.entry(g.degree(v)).or_insert(0) += 1;
    }
    hist
}

/// Per-pair knowledge: a confidence value, or the designated "medium" marker
/// for pairs the attacker knows nothing about (excluded from quantification).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PairConfidence {
    Known(f64),
    Medium,
}

/// The attacker's background knowledge: a connected query graph, or a
/// confidence table over all `m0 = n_Q (n_Q - 1) / 2` node pairs, optionally
/// with per-node attribute values or attribute belief distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    n_q: usize,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
    confidence: Option<Vec<PairConfidence>>,
    attributes: Option<Vec<Vec<u16>>>,
    beliefs: Option<Vec<Vec<Vec<f64>>>>,
}

impl Query {
    /// A plain (non-probabilistic) query; must be connected.
    pub fn connected(n_q: usize, edges: &[(u32, u32)]) -> Result<Query, GraphError> {
        let q = Query::build(n_q, edges, None)?;
        if !q.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(q)
    }

    /// A probabilistic query: `confidence` must cover all `m0` pairs in
    /// [`Query::pair_index`] order. Connectivity is not required (knowledge
    /// is expressed by the confidence values themselves). `edges` lists the
    /// pairs the attacker asserts as present (confidence-1 shorthand is the
    /// caller's choice); it may be empty.
    pub fn with_confidence(
        n_q: usize,
        edges: &[(u32, u32)],
        confidence: Vec<PairConfidence>,
    ) -> Result<Query, GraphError> {
        let m0 = n_q * n_q.saturating_sub(1) / 2;
        if confidence.len() != m0 {
            return Err(GraphError::ConfidenceLength { expected: m0, got: confidence.len() });
        }
        for c in &confidence {
            if let PairConfidence::Known(p) = c {
                if !(0.0..=1.0).contains(p) {
                    return Err(GraphError::BadDistribution {
                        context: "pair confidence",
                        sum: *p,
                    });
                }
            }
        }
        Query::build(n_q, edges, Some(confidence))
    }

    /// Crate-internal: a match pattern that skips the connectivity
    /// requirement. Strong l-indistinguishability matches l node-disjoint
    /// copies of a query in one search, and that composite is never
    /// connected.
    pub(crate) fn pattern(n_q: usize, edges: &[(u32, u32)]) -> Result<Query, GraphError> {
        Query::build(n_q, edges, None)
    }

    fn build(
        n_q: usize,
        edges: &[(u32, u32)],
        confidence: Option<Vec<PairConfidence>>,
    ) -> Result<Query, GraphError> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u as usize >= n_q {
                return Err(GraphError::NodeOutOfRange { node: u, n: n_q });
            }
            if v as usize >= n_q {
                return Err(GraphError::NodeOutOfRange { node: v, n: n_q });
            }
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            set.insert(canonical(u, v));
        }
        let edges: Vec<(u32, u32)> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n_q];
        for &(u, v) in &edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        Ok(Query { n_q, edges, adj, confidence, attributes: None, beliefs: None })
    }

    pub fn node_count(&self) -> usize {
        self.n_q
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of unordered node pairs, `n_Q (n_Q - 1) / 2`.
    pub fn pair_count(&self) -> usize {
        self.n_q * self.n_q.saturating_sub(1) / 2
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v && self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Index of the unordered pair `{u, v}` in the canonical pair order
    /// (lexicographic over `u < v`); confidence tables use this order.
    pub fn pair_index(&self, u: u32, v: u32) -> usize {
        let (a, b) = canonical(u, v);
        let (a, b, n) = (a as usize, b as usize, self.n_q);
        a * n - a * (a + 1) / 2 + (b - a - 1)
    }

    /// Inverse of [`Query::pair_index`].
    pub fn pair_at(&self, index: usize) -> (u32, u32) {
        let n = self.n_q;
        let mut rest = index;
        for a in 0..n {
            let row = n - a - 1;
            if rest < row {
                return (a as u32, (a + 1 + rest) as u32);
            }
            rest -= row;
        }
        panic!("pair index {index} out of range");
    }

    pub fn confidence(&self) -> Option<&[PairConfidence]> {
        self.confidence.as_deref()
    }

    pub fn is_connected(&self) -> bool {
        if self.n_q == 0 {
            return false;
        }
        let mut seen = vec![false; self.n_q];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n_q
    }

    pub fn with_attributes(mut self, rows: Vec<Vec<u16>>) -> Result<Query, GraphError> {
        if rows.len() != self.n_q {
            return Err(GraphError::AttributeRows { expected: self.n_q, got: rows.len() });
        }
        self.attributes = Some(rows);
        Ok(self)
    }

    pub fn attributes(&self) -> Option<&[Vec<u16>]> {
        self.attributes.as_deref()
    }

    /// Attaches per-node, per-attribute belief distributions.
    pub fn with_beliefs(mut self, beliefs: Vec<Vec<Vec<f64>>>) -> Result<Query, GraphError> {
        if beliefs.len() != self.n_q {
            return Err(GraphError::AttributeRows { expected: self.n_q, got: beliefs.len() });
        }
        for node in &beliefs {
            for dist in node {
                check_distribution(dist, "attribute belief")?;
            }
        }
        self.beliefs = Some(beliefs);
        Ok(self)
    }

    pub fn beliefs(&self) -> Option<&[Vec<Vec<f64>>]> {
        self.beliefs.as_deref()
    }

    /// Path on `n >= 2` nodes.
    pub fn path(n: usize) -> Query {
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        Query::connected(n, &edges).expect("path is connected")
    }

    /// Star with center 0 and `leaves >= 1` leaves.
    pub fn star(leaves: usize) -> Query {
        let edges: Vec<(u32, u32)> = (1..=leaves as u32).map(|v| (0, v)).collect();
        Query::connected(leaves + 1, &edges).expect("star is connected")
    }

    /// Complete query on `n >= 1` nodes.
    pub fn clique(n: usize) -> Query {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        Query::connected(n, &edges).expect("clique is connected")
    }
}

/// Ego network extracted from a graph: the query plus the original node id
/// behind each query node (`node_map[0]` is the center).
#[derive(Clone, Debug)]
pub struct EgoNet {
    pub query: Query,
    pub node_map: Vec<u32>,
}

/// Extracts the ego network of `center`: the center, its neighbors, and all
/// induced edges, relabeled to dense ids with the center at 0. A degree-0
/// center yields a single-node query.
pub fn ego_subgraph(g: &Graph, center: u32) -> EgoNet {
    assert!((center as usize) < g.node_count(), "center out of range");
    let mut node_map = Vec::with_capacity(g.degree(center) + 1);
    node_map.push(center);
    node_map.extend_from_slice(g.neighbors(center));
    let mut local = BTreeMap::new();
    for (i, &orig) in node_map.iter().enumerate() {
        local.insert(orig, i as u32);
    }
    let mut edges = Vec::new();
    for (i, &orig) in node_map.iter().enumerate() {
        for &w in g.neighbors(orig) {
            if let Some(&j) = local.get(&w) {
                if (i as u32) < j {
                    edges.push((i as u32, j));
                }
            }
        }
    }
    let query = Query::connected(node_map.len(), &edges)
        .expect("ego network is connected through its center");
    EgoNet { query, node_map }
}

fn check_distribution(dist: &[f64], context: &'static str) -> Result<(), GraphError> {
    if dist.is_empty() {
        return Err(GraphError::EmptyDomain);
    }
    let mut sum = 0.0;
    for &p in dist {
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::BadDistribution { context, sum: p });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > DISTRIBUTION_TOL {
        return Err(GraphError::BadDistribution { context, sum });
    }
    Ok(())
}

/// One categorical attribute: a finite domain with a marginal distribution
/// and an optional similarity kernel `sim(a, b) in [0, 1]` (row-major
/// `domain x domain`).
#[derive(Clone, Debug, PartialEq)]
pub struct Attribute {
    name: String,
    marginal: Vec<f64>,
    similarity: Option<Vec<f64>>,
}

impl Attribute {
    pub fn new(name: &str, marginal: Vec<f64>) -> Result<Attribute, GraphError> {
        check_distribution(&marginal, "attribute marginal")?;
        Ok(Attribute { name: String::from(name), marginal, similarity: None })
    }

    /// Attaches a similarity kernel; must be symmetric with unit diagonal.
    pub fn with_similarity(mut self, sim: Vec<f64>) -> Result<Attribute, GraphError> {
        let k = self.domain_size();
        if sim.len() != k * k {
            return Err(GraphError::BadSimilarity { context: "kernel size" });
        }
        for a in 0..k {
            if sim[a * k + a] != 1.0 {
                return Err(GraphError::BadSimilarity { context: "sim(a,a) must be 1" });
            }
            for b in 0..k {
                let s = sim[a * k + b];
                if !(0.0..=1.0).contains(&s) {
                    return Err(GraphError::BadSimilarity { context: "sim out of [0,1]" });
                }
                if s != sim[b * k + a] {
                    return Err(GraphError::BadSimilarity { context: "sim must be symmetric" });
                }
            }
        }
        self.similarity = Some(sim);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_size(&self) -> usize {
        self.marginal.len()
    }

    pub fn marginal(&self) -> &[f64] {
        &self.marginal
    }

    pub fn similarity(&self) -> Option<&[f64]> {
        self.similarity.as_deref()
    }

    pub fn sim(&self, a: u16, b: u16) -> f64 {
        match &self.similarity {
            Some(s) => s[a as usize * self.domain_size() + b as usize],
            None => {
                if a == b {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Probability that two independent draws from the marginal coincide.
    pub fn p_same(&self) -> f64 {
        self.marginal.iter().map(|p| p * p).sum()
    }

    /// Probability that two independent draws approximately match under the
    /// similarity kernel (expectation of `sim`).
    pub fn p_similar(&self) -> f64 {
        let k = self.domain_size();
        let mut total = 0.0;
        for a in 0..k {
            for b in 0..k {
                total += self.marginal[a] * self.marginal[b] * self.sim(a as u16, b as u16);
            }
        }
        total
    }
}

/// The attribute universe: every node (graph or query) carrying attributes
/// has one value per attribute, drawn from that attribute's domain.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AttributeSchema {
    attrs: Vec<Attribute>,
}

impl AttributeSchema {
    pub fn new(attrs: Vec<Attribute>) -> AttributeSchema {
        AttributeSchema { attrs }
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attrs
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    /// Validates one value row (e.g. a node's attributes) against domains.
    pub fn check_row(&self, row: &[u16]) -> Result<(), GraphError> {
        if row.len() != self.attrs.len() {
            return Err(GraphError::AttributeRows { expected: self.attrs.len(), got: row.len() });
        }
        for (a, &v) in self.attrs.iter().zip(row) {
            if v as usize >= a.domain_size() {
                return Err(GraphError::NodeOutOfRange { node: v as u32, n: a.domain_size() });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_distribution_examples() {
        // Empty graph: all isolated.
        let g = Graph::new(3, &[]).unwrap();
        assert_eq!(degree_distribution(&g), BTreeMap::from([(0, 3)]));
        // 4-cycle: regular.
        assert_eq!(degree_distribution(&Graph::cycle(4)), BTreeMap::from([(2, 4)]));
        // Star with 5 leaves.
        assert_eq!(degree_distribution(&Graph::star(5)), BTreeMap::from([(1, 5), (5, 1)]));
        // Counts always sum to n.
        let g = Graph::path(7);
        assert_eq!(degree_distribution(&g).values().sum::<usize>(), 7);
    }

    #[test]
    fn ego_subgraph_examples() {
        // C4 center 0: neighbors 1 and 3 are non-adjacent.
        let ego = ego_subgraph(&Graph::cycle(4), 0);
        assert_eq!(ego.query.node_count(), 3);
        assert_eq!(ego.query.edges(), &[(0, 1), (0, 2)]);
        assert_eq!(ego.node_map, vec![0, 1, 3]);

        // Triangle: any center yields the full triangle.
        let ego = ego_subgraph(&Graph::cycle(3), 1);
        assert_eq!(ego.query.node_count(), 3);
        assert_eq!(ego.query.edge_count(), 3);

        // Isolated node.
        let g = Graph::new(2, &[]).unwrap();
        let ego = ego_subgraph(&g, 1);
        assert_eq!(ego.query.node_count(), 1);
        assert_eq!(ego.query.edge_count(), 0);
    }

    #[test]
    fn ego_contains_center_with_original_degree_and_is_connected() {
        let g = Graph::new(6, &[(0, 1), (0, 2), (0, 3), (1, 2), (3, 4), (4, 5)]).unwrap();
        for center in 0..6 {
            let ego = ego_subgraph(&g, center);
            assert!(ego.query.is_connected());
            assert_eq!(ego.node_map[0], center);
            assert_eq!(ego.query.degree(0), g.degree(center));
        }
    }

    #[test]
    fn builder_normalizes_input() {
        let mut b = GraphBuilder::new(3);
        b.add_edge(0, 1).unwrap();
        b.add_edge(1, 0).unwrap(); // reverse duplicate
        b.add_edge(2, 2).unwrap(); // self-loop
        let stats = b.stats();
        assert_eq!(stats.duplicates_dropped, 1);
        assert_eq!(stats.self_loops_dropped, 1);
        let g = b.build();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert!(!g.has_edge(2, 2));
    }

    #[test]
    fn builder_rejects_out_of_range() {
        let mut b = GraphBuilder::new(2);
        assert_eq!(b.add_edge(0, 5), Err(GraphError::NodeOutOfRange { node: 5, n: 2 }));
    }

    #[test]
    fn query_requires_connectivity_without_confidence() {
        assert_eq!(Query::connected(3, &[(0, 1)]), Err(GraphError::Disconnected));
        assert!(Query::connected(3, &[(0, 1), (1, 2)]).is_ok());
        // Single node is connected.
        assert!(Query::connected(1, &[]).is_ok());
    }

    #[test]
    fn confidence_table_must_cover_all_pairs() {
        let err = Query::with_confidence(3, &[], vec![PairConfidence::Medium; 2]);
        assert_eq!(err, Err(GraphError::ConfidenceLength { expected: 3, got: 2 }));
        let q = Query::with_confidence(
            3,
            &[],
            vec![
                PairConfidence::Known(0.9),
                PairConfidence::Medium,
                PairConfidence::Known(0.1),
            ],
        )
        .unwrap();
        assert_eq!(q.pair_count(), 3);
    }

    #[test]
    fn pair_index_roundtrip() {
        let q = Query::clique(6);
        let mut seen = vec![false; q.pair_count()];
        for u in 0..6u32 {
            for v in u + 1..6u32 {
                let idx = q.pair_index(u, v);
                assert_eq!(q.pair_index(v, u), idx);
                assert_eq!(q.pair_at(idx), (u, v));
                assert!(!seen[idx]);
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn attribute_probabilities() {
        // Uniform over 4 values: p_same = 4 * (1/4)^2 = 0.25.
        let a = Attribute::new("u4", vec![0.25; 4]).unwrap();
        assert!((a.p_same() - 0.25).abs() < 1e-15);
        // Default kernel reduces p_similar to p_same.
        assert!((a.p_similar() - 0.25).abs() < 1e-15);

        // Banded kernel |a-b| <= 1 over marginal [0.4, 0.3, 0.2, 0.1]: 0.70.
        let mut sim = vec![0.0; 16];
        for x in 0..4usize {
            for y in 0..4usize {
                if x.abs_diff(y) <= 1 {
                    sim[x * 4 + y] = 1.0;
                }
            }
        }
        let a = Attribute::new("age", vec![0.4, 0.3, 0.2, 0.1])
            .unwrap()
            .with_similarity(sim)
            .unwrap();
        assert!((a.p_similar() - 0.70).abs() < 1e-12);
        assert!((a.p_same() - 0.30).abs() < 1e-15);
    }

    #[test]
    fn attribute_validation() {
        assert!(Attribute::new("bad", vec![0.5, 0.4]).is_err());
        assert!(Attribute::new("empty", vec![]).is_err());
        let a = Attribute::new("ok", vec![0.5, 0.5]).unwrap();
        // Wrong kernel size, asymmetric kernel, non-unit diagonal.
        assert!(a.clone().with_similarity(vec![1.0; 3]).is_err());
        assert!(a.clone().with_similarity(vec![1.0, 0.2, 0.3, 1.0]).is_err());
        assert!(a.clone().with_similarity(vec![0.9, 0.2, 0.2, 1.0]).is_err());
        assert!(a.with_similarity(vec![1.0, 0.2, 0.2, 1.0]).is_ok());
    }

    #[test]
    fn beliefs_validated() {
        let q = Query::path(2);
        assert!(q.clone().with_beliefs(vec![vec![vec![0.6, 0.4]]; 2]).is_ok());
        assert!(q.clone().with_beliefs(vec![vec![vec![0.6, 0.3]]; 2]).is_err());
        assert!(q.with_beliefs(vec![vec![vec![0.6, 0.4]]]).is_err());
    }
}
