//! Analytic expected-match-count engine.
//!
//! For a query with `n_Q` nodes and a published G(n,p) graph, the expected
//! number of matches factors into a candidate-space term and per-candidate
//! match probabilities:
//!
//! ```text
//! E(M_Q) = C(n, n_Q) * n_Q! * Pr(Q ~ I),   Pr(Q ~ I) = Pr_edges * Pr_attrs
//! ```
//!
//! Each background-knowledge mode contributes its own closed form for the
//! edge and attribute probabilities; everything is composed in log space.
//! The de-anonymization gain is `DAG(Q) = n_Q / (M_Q * n)`, with `DAG = 0`
//! when no match exists and `M_Q` treated as 1 when the analytic expectation
//! falls below one (the vanish regime: a unique match re-identifies all of
//! `Q`).

use crate::graph::{AttributeSchema, PairConfidence, Query};
use crate::logspace::{ln_binomial, ln_falling_factorial, LogScalar, LogSum};
use crate::rng::{keyed_u64, tag};
use alloc::vec::Vec;
use core::fmt;
// Live only in pure no-std builds: whenever any crate in the graph links
// std (tests via proptest, or a std consumer), the inherent f64 methods
// shadow the trait and the import goes quiet.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Debug, PartialEq)]
pub enum KnowledgeError {
    EdgeCountTooLarge { m_q: u64, m0: u64 },
    BadProbability(f64),
    QueryLargerThanGraph { n_q: u64, n: u64 },
    ThreeLevelSplit { x1: u64, x0: u64, m0: u64 },
    BetaOutOfRange(f64),
    /// Exhaustive configuration enumeration is capped at 24 known pairs;
    /// larger queries must use `probabilistic_config_sampled`.
    ConfigSpaceTooLarge { known_pairs: usize },
    MissingConfidence,
    MissingSimilarity { attribute: usize },
    MissingBeliefs,
    ZeroSamples,
}

impl fmt::Display for KnowledgeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnowledgeError::EdgeCountTooLarge { m_q, m0 } => {
                write!(f, "m_Q = {m_q} exceeds the pair count m0 = {m0}")
            }
            KnowledgeError::BadProbability(p) => write!(f, "probability {p} outside [0,1]"),
            KnowledgeError::QueryLargerThanGraph { n_q, n } => {
                write!(f, "query size {n_q} exceeds graph size {n}")
            }
            KnowledgeError::ThreeLevelSplit { x1, x0, m0 } => {
                write!(f, "x1 + x0 = {} exceeds m0 = {m0}", x1 + x0)
            }
            KnowledgeError::BetaOutOfRange(b) => {
                write!(f, "power-law exponent must be > 2, got {b}")
            }
            KnowledgeError::ConfigSpaceTooLarge { known_pairs } => write!(
                f,
                "{known_pairs} known pairs exceed the exhaustive enumeration cap (24); \
                 use probabilistic_config_sampled"
            ),
            KnowledgeError::MissingConfidence => {
                write!(f, "query carries no per-pair confidence table")
            }
            KnowledgeError::MissingSimilarity { attribute } => {
                write!(f, "attribute {attribute} has no similarity kernel")
            }
            KnowledgeError::MissingBeliefs => {
                write!(f, "probabilistic attribute mode requires per-node beliefs")
            }
            KnowledgeError::ZeroSamples => write!(f, "sample count must be >= 1"),
        }
    }
}

impl core::error::Error for KnowledgeError {}

/// Whether edge knowledge constrains only the attacker's known edges
/// (non-induced, "subset matching") or the full induced pair set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Completeness {
    Partial,
    Complete,
}

/// Edge-knowledge taxonomy: how correct and how complete the attacker's
/// edge information is, or how confident per pair.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EdgeMode {
    /// All known edges are real and must be present (non-induced).
    ExactPartial,
    /// Known edges are exactly the induced edge set.
    ExactComplete,
    /// Up to `epsilon` known edges may be wrong (absent in the image).
    NoisyPartial { epsilon: u32 },
    /// Up to `epsilon` errors in each direction of the induced comparison.
    NoisyComplete { epsilon: u32 },
    /// Uniform confidence `p_e` on every pair.
    ProbUniform { p_e: f64, completeness: Completeness },
    /// Three-level confidence: `x1` pairs at `p1` (high), `x0` at `p0`
    /// (low); the remaining medium pairs carry no information and are
    /// excluded from the quantification.
    ProbThreeLevel { p1: f64, p0: f64, x1: u64, x0: u64 },
    /// Arbitrary per-pair confidences (the query's table).
    ProbGeneral { completeness: Completeness },
}

impl EdgeMode {
    /// Even split of `r * m0` known pairs into high and low halves:
    /// `x1 = x0 = round(r * m0 / 2)` (ties to even).
    pub fn three_level_from_ratio(p1: f64, p0: f64, r: f64, m0: u64) -> EdgeMode {
        let half = crate::logspace::round_ties_even(r * m0 as f64 / 2.0);
        EdgeMode::ProbThreeLevel { p1, p0, x1: half, x0: half }
    }

    /// True when a noisy tolerance makes the constraint vacuous (the closed
    /// form returns exactly 1); callers surface this as a warning.
    pub fn epsilon_vacuous(&self, m0: u64) -> bool {
        match *self {
            EdgeMode::NoisyComplete { epsilon } => epsilon as u64 >= m0,
            EdgeMode::NoisyPartial { epsilon } => epsilon as u64 >= m0,
            _ => false,
        }
    }
}

/// Attribute-knowledge taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AttributeMode {
    Ignored,
    /// Every node's full attribute vector matches.
    Exact,
    /// Up to `epsilon` nodes may mismatch.
    AlmostNodes { epsilon: u32 },
    /// Per node, up to `epsilon` attributes may mismatch.
    AlmostAttrs { epsilon: u32 },
    /// Matching under the attributes' similarity kernels.
    Approximate,
    /// The attacker holds belief distributions instead of values.
    Probabilistic,
}

/// The adversary model: edge knowledge plus attribute knowledge.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KnowledgeSpec {
    pub edge_mode: EdgeMode,
    pub attribute_mode: AttributeMode,
}

impl KnowledgeSpec {
    pub fn edges_only(edge_mode: EdgeMode) -> KnowledgeSpec {
        KnowledgeSpec { edge_mode, attribute_mode: AttributeMode::Ignored }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DagStatus {
    /// `M_Q >= 1`: DAG = n_Q / (M_Q n).
    Normal,
    /// No match exists: DAG = 0 by definition.
    NoMatch,
    /// Analytic `M_Q` in (0,1): the single existing match re-identifies all
    /// of Q, DAG = n_Q / n. Flagged because curves omit these points.
    BeyondVanish,
}

/// De-anonymization gain: the expected fraction of users re-identified.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DagValue {
    pub value: f64,
    pub status: DagStatus,
}

/// `ln p^k` with the `0^0 = 1` convention, exact at `p` in {0, 1}.
fn pow_ln(p: f64, k: u64) -> f64 {
    if k == 0 {
        0.0
    } else if p == 0.0 {
        f64::NEG_INFINITY
    } else {
        k as f64 * p.ln()
    }
}

fn check_prob(p: f64) -> Result<(), KnowledgeError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(KnowledgeError::BadProbability(p))
    }
}

/// `Pr(Q ~edges I)` for a uniformly random candidate in G(n,p), per mode.
///
/// `m_q` is the attacker's known edge count; probabilistic modes that do not
/// reference it (`ProbUniform`) ignore it. `ProbGeneral` is not computable
/// from counts alone and must go through [`probabilistic_config_sum`].
pub fn edge_match_probability(
    spec: &KnowledgeSpec,
    n_q: u64,
    m_q: u64,
    p: f64,
) -> Result<LogScalar, KnowledgeError> {
    let m0 = n_q * n_q.saturating_sub(1) / 2;
    if m_q > m0 {
        return Err(KnowledgeError::EdgeCountTooLarge { m_q, m0 });
    }
    check_prob(p)?;
    match spec.edge_mode {
        EdgeMode::ExactPartial => Ok(LogScalar::from_ln(pow_ln(p, m_q))),
        EdgeMode::ExactComplete => {
            Ok(LogScalar::from_ln(pow_ln(p, m_q) + pow_ln(1.0 - p, m0 - m_q)))
        }
        EdgeMode::NoisyPartial { epsilon } => {
            Ok(binomial_tail(m_q, epsilon as u64, p, 1.0 - p))
        }
        EdgeMode::NoisyComplete { epsilon } => {
            Ok(noisy_complete_probability(epsilon, n_q, m_q, p))
        }
        EdgeMode::ProbUniform { p_e, completeness } => {
            check_prob(p_e)?;
            let factor = match completeness {
                Completeness::Partial => 1.0 - p_e + p * p_e,
                Completeness::Complete => 1.0 - p - p_e + 2.0 * p * p_e,
            };
            Ok(LogScalar::from_ln(pow_ln(factor, m0)))
        }
        EdgeMode::ProbThreeLevel { p1, p0, x1, x0 } => {
            check_prob(p1)?;
            check_prob(p0)?;
            if x1 + x0 > m0 {
                return Err(KnowledgeError::ThreeLevelSplit { x1, x0, m0 });
            }
            let high = p * p1 + (1.0 - p) * (1.0 - p1);
            let low = p * p0 + (1.0 - p) * (1.0 - p0);
            Ok(LogScalar::from_ln(pow_ln(high, x1) + pow_ln(low, x0)))
        }
        EdgeMode::ProbGeneral { .. } => Err(KnowledgeError::MissingConfidence),
    }
}

/// `sum_{k <= eps} C(m, k) a^{m-k} b^k` in log space (`a + b = 1`).
fn binomial_tail(m: u64, eps: u64, a: f64, b: f64) -> LogScalar {
    let mut acc = LogSum::new();
    for k in 0..=eps.min(m) {
        acc.add(LogScalar::from_ln(ln_binomial(m, k) + pow_ln(a, m - k) + pow_ln(b, k)));
    }
    acc.total()
}

/// Noisy complete knowledge: the candidate may miss up to `epsilon` of the
/// attacker's edges and carry up to `epsilon` extra edges:
///
/// ```text
/// sum_{k<=eps} sum_{l<=eps} C(m_Q,k) C(m0-m_Q,l) p^{m_Q-k+l} (1-p)^{m0-m_Q+k-l}
/// ```
///
/// The expansion is validated against the brute-force candidate oracle in
/// the match-engine tests (every candidate edge pattern on `m0` slots).
pub fn noisy_complete_probability(epsilon: u32, n_q: u64, m_q: u64, p: f64) -> LogScalar {
    let m0 = n_q * n_q.saturating_sub(1) / 2;
    debug_assert!(m_q <= m0);
    let eps = epsilon as u64;
    let mut acc = LogSum::new();
    for k in 0..=eps.min(m_q) {
        for l in 0..=eps.min(m0 - m_q) {
            let ln = ln_binomial(m_q, k)
                + ln_binomial(m0 - m_q, l)
                + pow_ln(p, m_q - k + l)
                + pow_ln(1.0 - p, m0 - m_q + k - l);
            acc.add(LogScalar::from_ln(ln));
        }
    }
    acc.total()
}

/// `Pr(Q ~attrs I)` for a random candidate whose node labels are drawn from
/// the schema marginals. `beliefs` is required by `Probabilistic` mode only.
pub fn attribute_match_probability(
    schema: &AttributeSchema,
    mode: AttributeMode,
    n_q: u64,
    beliefs: Option<&[Vec<Vec<f64>>]>,
) -> Result<LogScalar, KnowledgeError> {
    match mode {
        AttributeMode::Ignored => Ok(LogScalar::ONE),
        AttributeMode::Exact => {
            let p_a = product_ln(schema, |a| a.p_same());
            Ok(LogScalar::from_ln(mul_n(p_a, n_q)))
        }
        AttributeMode::AlmostNodes { epsilon } => {
            let p_a = product_ln(schema, |a| a.p_same()).exp();
            Ok(binomial_tail(n_q, epsilon as u64, p_a, 1.0 - p_a))
        }
        AttributeMode::AlmostAttrs { epsilon } => {
            // Per node: sum over error sets S, |S| <= eps, of
            // prod_{i in S} (1 - p_i) prod_{i not in S} p_i.
            // DP over attributes x error count.
            let eps = (epsilon as usize).min(schema.len());
            let mut dp = alloc::vec![0.0f64; eps + 1];
            dp[0] = 1.0;
            for attr in schema.attributes() {
                let p_i = attr.p_same();
                for e in (0..=eps).rev() {
                    let keep = dp[e] * p_i;
                    let err = if e > 0 { dp[e - 1] * (1.0 - p_i) } else { 0.0 };
                    dp[e] = keep + err;
                }
            }
            let per_node: f64 = dp.iter().sum();
            Ok(LogScalar::from_ln(mul_n(per_node.ln(), n_q)))
        }
        AttributeMode::Approximate => {
            for (i, attr) in schema.attributes().iter().enumerate() {
                if attr.similarity().is_none() {
                    return Err(KnowledgeError::MissingSimilarity { attribute: i });
                }
            }
            let p_a = product_ln(schema, |a| a.p_similar());
            Ok(LogScalar::from_ln(mul_n(p_a, n_q)))
        }
        AttributeMode::Probabilistic => {
            let beliefs = beliefs.ok_or(KnowledgeError::MissingBeliefs)?;
            if beliefs.len() != n_q as usize {
                return Err(KnowledgeError::MissingBeliefs);
            }
            let mut total = 0.0f64;
            for node in beliefs {
                if node.len() != schema.len() {
                    return Err(KnowledgeError::MissingBeliefs);
                }
                for (attr, dist) in schema.attributes().iter().zip(node) {
                    // p = sum_a Pr(a) sum_b belief(b) sim(a, b).
                    let mut p = 0.0;
                    for (a, &pr_a) in attr.marginal().iter().enumerate() {
                        let mut inner = 0.0;
                        for (b, &pb) in dist.iter().enumerate() {
                            inner += pb * attr.sim(a as u16, b as u16);
                        }
                        p += pr_a * inner;
                    }
                    total += p.ln();
                }
            }
            Ok(LogScalar::from_ln(total))
        }
    }
}

fn product_ln(schema: &AttributeSchema, f: impl Fn(&crate::graph::Attribute) -> f64) -> f64 {
    schema.attributes().iter().map(|a| f(a).ln()).sum()
}

/// `n_q * ln_p_a` with the empty-product convention (`ln 1 = 0`).
fn mul_n(ln_p: f64, n_q: u64) -> f64 {
    if n_q == 0 {
        0.0
    } else {
        ln_p * n_q as f64
    }
}

/// Expected match count: candidate space times per-candidate probability,
/// `ln M_Q = sum_{i<n_Q} ln(n - i) + ln Pr_edges + ln Pr_attrs`.
pub fn expected_match_count(
    n: u64,
    n_q: u64,
    edge_factor: LogScalar,
    attr_factor: LogScalar,
) -> Result<LogScalar, KnowledgeError> {
    if n_q > n {
        return Err(KnowledgeError::QueryLargerThanGraph { n_q, n });
    }
    let candidates = LogScalar::from_ln(ln_falling_factorial(n, n_q));
    Ok(candidates * edge_factor * attr_factor)
}

/// De-anonymization gain from an analytic or empirical match count.
pub fn dag(n: u64, n_q: u64, match_count: LogScalar) -> DagValue {
    debug_assert!(n_q <= n && n > 0);
    if match_count.is_zero() {
        return DagValue { value: 0.0, status: DagStatus::NoMatch };
    }
    let ln_nq = (n_q as f64).ln();
    let ln_n = (n as f64).ln();
    if match_count.ln() < 0.0 {
        // Fewer than one match expected: the attacker finds the only one,
        // re-identifying all n_Q users.
        return DagValue { value: (ln_nq - ln_n).exp(), status: DagStatus::BeyondVanish };
    }
    DagValue {
        value: (ln_nq - match_count.ln() - ln_n).exp(),
        status: DagStatus::Normal,
    }
}

/// The power-law lower bound on the expected match count for Chung-Lu
/// graphs, and the DAG upper bound it implies:
///
/// ```text
/// M_Q >= C(n, n_Q) n_Q! ((beta - 1) / (n (beta - 2)))^{m_Q}
/// ```
pub fn powerlaw_match_lower_bound(
    n: u64,
    beta: f64,
    n_q: u64,
    m_q: u64,
) -> Result<(LogScalar, DagValue), KnowledgeError> {
    if beta <= 2.0 {
        return Err(KnowledgeError::BetaOutOfRange(beta));
    }
    if n_q > n {
        return Err(KnowledgeError::QueryLargerThanGraph { n_q, n });
    }
    let m0 = n_q * n_q.saturating_sub(1) / 2;
    if m_q > m0 {
        return Err(KnowledgeError::EdgeCountTooLarge { m_q, m0 });
    }
    let per_edge = (beta - 1.0) / (n as f64 * (beta - 2.0));
    let bound =
        LogScalar::from_ln(ln_falling_factorial(n, n_q) + m_q as f64 * per_edge.ln());
    let dag_upper = dag(n, n_q, bound);
    Ok((bound, dag_upper))
}

fn known_pairs(q: &Query) -> Result<Vec<(usize, f64)>, KnowledgeError> {
    let table = q.confidence().ok_or(KnowledgeError::MissingConfidence)?;
    Ok(table
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            PairConfidence::Known(v) => Some((i, *v)),
            PairConfidence::Medium => None,
        })
        .collect())
}

const CONFIG_ENUM_CAP: usize = 24;

/// Exact probabilistic edge-match probability by exhaustive enumeration of
/// the `2^k` configurations of the query's `k` known pairs:
///
/// ```text
/// Pr(Q ~edges I) = sum_{Q_c} Pr(Q_c | Q) Pr(Q_c ~edges I)
/// ```
///
/// with `Pr(Q_c ~ I) = p^{|E(Q_c)|}` (partial) or
/// `p^{|E(Q_c)|} (1-p)^{k - |E(Q_c)|}` (complete). Medium pairs carry no
/// information and are excluded throughout.
pub fn probabilistic_config_sum(
    q: &Query,
    p: f64,
    completeness: Completeness,
) -> Result<LogScalar, KnowledgeError> {
    check_prob(p)?;
    let pairs = known_pairs(q)?;
    let k = pairs.len();
    if k > CONFIG_ENUM_CAP {
        return Err(KnowledgeError::ConfigSpaceTooLarge { known_pairs: k });
    }
    // Power tables keep the per-leaf work constant.
    let mut p_pow = alloc::vec![1.0f64; k + 1];
    let mut q_pow = alloc::vec![1.0f64; k + 1];
    for i in 1..=k {
        p_pow[i] = p_pow[i - 1] * p;
        q_pow[i] = q_pow[i - 1] * (1.0 - p);
    }
    // DFS over pair inclusion; zero-probability branches prune exactly.
    let mut total = 0.0f64;
    let mut compensation = 0.0f64;
    let mut stack: Vec<(usize, f64, usize)> = alloc::vec![(0, 1.0, 0)];
    while let Some((idx, weight, edges)) = stack.pop() {
        if weight == 0.0 {
            continue;
        }
        if idx == k {
            let term = match completeness {
                Completeness::Partial => weight * p_pow[edges],
                Completeness::Complete => weight * p_pow[edges] * q_pow[k - edges],
            };
            // Kahan summation: the 2^k terms must reach 10 significant
            // digits against the closed forms.
            let y = term - compensation;
            let t = total + y;
            compensation = (t - total) - y;
            total = t;
            continue;
        }
        let c = pairs[idx].1;
        stack.push((idx + 1, weight * c, edges + 1));
        stack.push((idx + 1, weight * (1.0 - c), edges));
    }
    Ok(LogScalar::from_value(total))
}

/// A Monte-Carlo estimate carried in log space (values can underflow any
/// linear representation).
#[derive(Clone, Copy, Debug)]
pub struct McLogEstimate {
    pub mean: LogScalar,
    pub stderr: LogScalar,
    pub samples: u64,
}

/// Unbiased sampled version of [`probabilistic_config_sum`]: configurations
/// are drawn from `Pr(Q_c | Q)` by keyed per-(sample, pair) decisions and
/// the candidate probabilities averaged.
pub fn probabilistic_config_sampled(
    q: &Query,
    p: f64,
    completeness: Completeness,
    samples: u64,
    seed: u64,
) -> Result<McLogEstimate, KnowledgeError> {
    check_prob(p)?;
    if samples == 0 {
        return Err(KnowledgeError::ZeroSamples);
    }
    let pairs = known_pairs(q)?;
    let k = pairs.len() as u64;
    let mut acc = LogSum::new();
    let mut acc_sq = LogSum::new();
    let mut first_ln = f64::NAN;
    let mut constant = true;
    for s in 0..samples {
        let mut edges = 0u64;
        for &(i, c) in &pairs {
            let draw = keyed_u64(seed, tag::CONFIG_SAMPLE, s, i as u64);
            if ((draw >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < c {
                edges += 1;
            }
        }
        let ln_term = match completeness {
            Completeness::Partial => pow_ln(p, edges),
            Completeness::Complete => pow_ln(p, edges) + pow_ln(1.0 - p, k - edges),
        };
        if s == 0 {
            first_ln = ln_term;
        } else if ln_term != first_ln {
            constant = false;
        }
        acc.add(LogScalar::from_ln(ln_term));
        acc_sq.add(LogScalar::from_ln(2.0 * ln_term));
    }
    let ln_n = (samples as f64).ln();
    let mean = LogScalar::from_ln(acc.total().ln() - ln_n);
    let second_moment = acc_sq.total().ln() - ln_n;
    // var = E[X^2] - mean^2, in log space. A degenerate sample (all draws
    // identical) is detected exactly; the rounding of the log-space
    // difference must not manufacture a phantom variance.
    let excess = 2.0 * mean.ln() - second_moment;
    let stderr = if constant || mean.is_zero() || excess >= 0.0 {
        LogScalar::ZERO
    } else {
        let ln_var = second_moment + (-excess.exp()).ln_1p();
        LogScalar::from_ln((ln_var - ln_n) / 2.0)
    };
    Ok(McLogEstimate { mean, stderr, samples })
}

/// One fully-composed analytic evaluation, keeping the two opposing factors
/// separately for sweep diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct AnalyticPoint {
    /// `ln C(n, n_Q) n_Q!` — the candidate-space term, increasing in n_Q.
    pub ln_candidates: f64,
    /// `ln Pr(Q ~ I)` — the match-probability term, nonincreasing in n_Q.
    pub ln_match_probability: f64,
    pub match_count: LogScalar,
    pub dag: DagValue,
}

/// Composes edge and attribute factors into `M_Q` and `DAG` for one
/// parameter point.
pub fn analytic_point(
    spec: &KnowledgeSpec,
    n: u64,
    n_q: u64,
    m_q: u64,
    p: f64,
    schema: Option<&AttributeSchema>,
    beliefs: Option<&[Vec<Vec<f64>>]>,
) -> Result<AnalyticPoint, KnowledgeError> {
    if n_q > n {
        return Err(KnowledgeError::QueryLargerThanGraph { n_q, n });
    }
    let edge = edge_match_probability(spec, n_q, m_q, p)?;
    let attr = match schema {
        Some(schema) => attribute_match_probability(schema, spec.attribute_mode, n_q, beliefs)?,
        None => LogScalar::ONE,
    };
    let ln_candidates = ln_falling_factorial(n, n_q);
    let match_count = expected_match_count(n, n_q, edge, attr)?;
    Ok(AnalyticPoint {
        ln_candidates,
        ln_match_probability: (edge * attr).ln(),
        match_count,
        dag: dag(n, n_q, match_count),
    })
}
