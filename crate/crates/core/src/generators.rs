//! Seeded random graph generation: G(n,p) and the Chung-Lu power-law model.
//!
//! Every pair decision is keyed on `(seed, u, v)` through the SplitMix64
//! finalizer, so generation is a pure function of the parameters: the same
//! seed yields the bit-identical graph no matter how the pair loop is
//! ordered or partitioned across workers.

use crate::graph::{Graph, GraphBuilder};
use crate::logspace::round_ties_even;
use crate::rng::{keyed_bernoulli, tag};
use alloc::vec::Vec;
use core::fmt;
// Live only in pure no-std builds: whenever any crate in the graph links
// std (tests via proptest, or a std consumer), the inherent f64 methods
// shadow the trait and the import goes quiet.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Debug, PartialEq)]
pub enum GenError {
    EmptyGraph,
    BadProbability(f64),
    BadBeta(f64),
    /// The constructed degree sequence violates the model assumption
    /// `max d_k^2 <= sum d_k`; edge probabilities would need clamping.
    DegreeAssumption { max_degree: u32, sum_degrees: u64 },
    /// The power-law bucket counts cannot be renormalized to `n` nodes.
    DegenerateSequence,
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::EmptyGraph => write!(f, "graph must have at least one node"),
            GenError::BadProbability(p) => write!(f, "edge probability {p} outside [0,1]"),
            GenError::BadBeta(b) => write!(f, "power-law exponent must be > 2, got {b}"),
            GenError::DegreeAssumption { max_degree, sum_degrees } => write!(
                f,
                "degree sequence violates max d^2 <= sum d ({max_degree}^2 > {sum_degrees}); \
                 edge probabilities would be clamped"
            ),
            GenError::DegenerateSequence => {
                write!(f, "power-law bucket counts cannot be renormalized to n")
            }
        }
    }
}

impl core::error::Error for GenError {}

/// Parameters of the G(n,p) model: every one of the `C(n,2)` pairs is an
/// edge independently with probability `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GnpParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

/// Parameters of the power-law Chung-Lu model with target degree counts
/// `n(d) = alpha d^{-beta}`, `alpha = n (beta - 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerLawParams {
    pub n: usize,
    pub beta: f64,
    pub seed: u64,
}

pub fn generate_gnp(params: &GnpParams) -> Result<Graph, GenError> {
    if params.n == 0 {
        return Err(GenError::EmptyGraph);
    }
    if !(0.0..=1.0).contains(&params.p) {
        return Err(GenError::BadProbability(params.p));
    }
    let mut builder = GraphBuilder::new(params.n);
    for u in 0..params.n as u32 {
        for v in u + 1..params.n as u32 {
            if keyed_bernoulli(params.seed, tag::GNP_PAIR, u as u64, v as u64, params.p) {
                builder.add_edge(u, v).expect("in-range by construction");
            }
        }
    }
    Ok(builder.build())
}

/// The discretized power-law expected-degree sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeSequence {
    /// `bucket_counts[d - 1]` = number of nodes with expected degree `d`.
    pub bucket_counts: Vec<usize>,
    /// Expected degree per node, ascending; length `n`.
    pub degrees: Vec<u32>,
    /// The normalizer `sum d_k`, used exactly as constructed.
    pub sum_degrees: u64,
}

impl DegreeSequence {
    pub fn max_degree(&self) -> u32 {
        self.bucket_counts.len() as u32
    }
}

/// Builds the degree sequence for `n(d) = alpha d^{-beta}`: counts rounded
/// to the nearest integer (ties to even), buckets stop at the last `d` whose
/// rounded count is >= 1, and the `d = 1` bucket absorbs the rounding excess
/// so the counts total exactly `n`.
pub fn chung_lu_degree_sequence(n: usize, beta: f64) -> Result<DegreeSequence, GenError> {
    if beta <= 2.0 {
        return Err(GenError::BadBeta(beta));
    }
    if n == 0 {
        return Err(GenError::EmptyGraph);
    }
    let alpha = n as f64 * (beta - 1.0);
    let mut bucket_counts: Vec<usize> = Vec::new();
    let mut d = 1u32;
    loop {
        let target = alpha * (d as f64).powf(-beta);
        let count = round_ties_even(target);
        if count < 1 {
            break;
        }
        bucket_counts.push(count as usize);
        d += 1;
    }
    if bucket_counts.is_empty() {
        return Err(GenError::DegenerateSequence);
    }
    let total: usize = bucket_counts.iter().sum();
    let adjusted = bucket_counts[0] as i64 + n as i64 - total as i64;
    if adjusted < 0 {
        return Err(GenError::DegenerateSequence);
    }
    bucket_counts[0] = adjusted as usize;

    let mut degrees = Vec::with_capacity(n);
    for (i, &count) in bucket_counts.iter().enumerate() {
        for _ in 0..count {
            degrees.push(i as u32 + 1);
        }
    }
    let sum_degrees: u64 = degrees.iter().map(|&d| d as u64).sum();
    let max_degree = bucket_counts.len() as u32;
    if (max_degree as u64) * (max_degree as u64) > sum_degrees {
        return Err(GenError::DegreeAssumption { max_degree, sum_degrees });
    }
    Ok(DegreeSequence { bucket_counts, degrees, sum_degrees })
}

/// A generated Chung-Lu graph together with its construction record.
#[derive(Clone, Debug)]
pub struct ChungLuGraph {
    pub graph: Graph,
    pub sequence: DegreeSequence,
    /// Pairs whose probability `d_u d_v / sum d` exceeded 1 and was clamped.
    /// Always 0 when the `max d^2 <= sum d` assumption holds (enforced), but
    /// surfaced so a violation can never pass silently.
    pub clamped_pairs: u64,
}

pub fn generate_chung_lu(params: &PowerLawParams) -> Result<ChungLuGraph, GenError> {
    let sequence = chung_lu_degree_sequence(params.n, params.beta)?;
    let s = sequence.sum_degrees as f64;
    let mut builder = GraphBuilder::new(params.n);
    let mut clamped_pairs = 0u64;
    for u in 0..params.n as u32 {
        let du = sequence.degrees[u as usize] as f64;
        for v in u + 1..params.n as u32 {
            let mut p = du * sequence.degrees[v as usize] as f64 / s;
            if p > 1.0 {
                p = 1.0;
                clamped_pairs += 1;
            }
            if keyed_bernoulli(params.seed, tag::CHUNG_LU_PAIR, u as u64, v as u64, p) {
                builder.add_edge(u, v).expect("in-range by construction");
            }
        }
    }
    Ok(ChungLuGraph { graph: builder.build(), sequence, clamped_pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::keyed_unit;

    #[test]
    fn gnp_extremes() {
        let complete = generate_gnp(&GnpParams { n: 5, p: 1.0, seed: 3 }).unwrap();
        assert_eq!(complete.edge_count(), 10);
        let empty = generate_gnp(&GnpParams { n: 5, p: 0.0, seed: 3 }).unwrap();
        assert_eq!(empty.edge_count(), 0);
        assert_eq!(generate_gnp(&GnpParams { n: 0, p: 0.5, seed: 0 }), Err(GenError::EmptyGraph));
        assert!(matches!(
            generate_gnp(&GnpParams { n: 3, p: 1.5, seed: 0 }),
            Err(GenError::BadProbability(_))
        ));
    }

    #[test]
    fn gnp_is_seed_deterministic() {
        let a = generate_gnp(&GnpParams { n: 40, p: 0.3, seed: 11 }).unwrap();
        let b = generate_gnp(&GnpParams { n: 40, p: 0.3, seed: 11 }).unwrap();
        assert_eq!(a, b);
        let c = generate_gnp(&GnpParams { n: 40, p: 0.3, seed: 12 }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gnp_pairs_match_independent_keyed_recomputation() {
        // The per-pair contract: edge presence is a pure function of
        // (seed, u, v), reproducible without running the generator.
        let params = GnpParams { n: 25, p: 0.4, seed: 77 };
        let g = generate_gnp(&params).unwrap();
        for u in 0..25u32 {
            for v in u + 1..25u32 {
                let expected = keyed_unit(77, tag::GNP_PAIR, u as u64, v as u64) < 0.4;
                assert_eq!(g.has_edge(u, v), expected, "pair ({u},{v})");
            }
        }
    }

    #[test]
    fn gnp_edge_count_is_binomial() {
        // 200 seeds at n=1000, p=0.01: per-graph sigma = sqrt(C(1000,2) p q).
        let pairs: f64 = 1000.0 * 999.0 / 2.0;
        let expected = 0.01 * pairs;
        let sigma = (pairs * 0.01 * 0.99).sqrt();
        let seeds = 200;
        let counts: Vec<f64> = (0..seeds)
            .map(|s| {
                generate_gnp(&GnpParams { n: 1000, p: 0.01, seed: s }).unwrap().edge_count() as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / seeds as f64;
        assert!(
            (mean - expected).abs() <= 3.0 * sigma / (seeds as f64).sqrt(),
            "mean {mean} expected {expected}"
        );
        // Dispersion sanity: sample std within a generous band of sigma.
        let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (seeds - 1) as f64;
        let std = var.sqrt();
        assert!(std > 0.8 * sigma && std < 1.2 * sigma, "std {std} vs sigma {sigma}");
    }

    #[test]
    fn chung_lu_sequence_example() {
        // n=100, beta=2.5: rounded targets 150 d^{-2.5} with the d=1 bucket
        // renormalized from 150 down to 50 so counts total n.
        let seq = chung_lu_degree_sequence(100, 2.5).unwrap();
        assert_eq!(seq.bucket_counts, alloc::vec![50, 27, 10, 5, 3, 2, 1, 1, 1]);
        assert_eq!(seq.degrees.len(), 100);
        assert_eq!(seq.sum_degrees, 205);
        assert_eq!(seq.max_degree(), 9);
        // Monotone nonincreasing counts.
        assert!(seq.bucket_counts.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn chung_lu_sequence_normalizer_is_exact() {
        for &(n, beta) in &[(200usize, 2.3), (200, 2.5), (200, 2.9), (500, 2.2)] {
            let seq = chung_lu_degree_sequence(n, beta).unwrap();
            assert_eq!(seq.degrees.len(), n);
            let s: u64 = seq
                .bucket_counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as u64 + 1) * c as u64)
                .sum();
            assert_eq!(s, seq.sum_degrees);
        }
    }

    #[test]
    fn chung_lu_rejects_assumption_violation() {
        // n=5, beta=2.05: adjusted counts [3,1,1], sum d = 8 < 9 = max d^2.
        assert!(matches!(
            chung_lu_degree_sequence(5, 2.05),
            Err(GenError::DegreeAssumption { max_degree: 3, sum_degrees: 8 })
        ));
        assert!(matches!(chung_lu_degree_sequence(100, 2.0), Err(GenError::BadBeta(_))));
    }

    #[test]
    fn chung_lu_is_seed_deterministic_and_unclamped() {
        let params = PowerLawParams { n: 100, beta: 2.5, seed: 5 };
        let a = generate_chung_lu(&params).unwrap();
        let b = generate_chung_lu(&params).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.clamped_pairs, 0);
    }

    #[test]
    fn chung_lu_realized_degrees_track_construction() {
        // Exact expectations: E[deg u] = d_u (S - d_u) / S and
        // E[mean degree] = (S - sum d^2 / S) / n; the idealized S/n and d_u
        // ignore the no-self-pair correction, so the exact forms are the
        // oracle and the idealized values are checked as approximations.
        let seq = chung_lu_degree_sequence(100, 2.5).unwrap();
        let s = seq.sum_degrees as f64;
        let sum_sq: f64 = seq.degrees.iter().map(|&d| (d as f64) * (d as f64)).sum();
        let exact_mean_degree = (s - sum_sq / s) / 100.0;
        assert!((s / 100.0 - exact_mean_degree).abs() / exact_mean_degree < 0.02);

        let hub = 99u32; // degrees ascend, so the last node is the d=9 hub
        assert_eq!(seq.degrees[hub as usize], 9);
        let exact_hub = 9.0 * (s - 9.0) / s;

        let seeds = 400;
        let mut mean_deg_sum = 0.0;
        let mut hub_sum = 0.0;
        let mut var_edges = 0.0;
        let mut var_hub = 0.0;
        for u in 0..100u32 {
            for v in u + 1..100u32 {
                let p = seq.degrees[u as usize] as f64 * seq.degrees[v as usize] as f64 / s;
                var_edges += p * (1.0 - p);
                if u == hub || v == hub {
                    var_hub += p * (1.0 - p);
                }
            }
        }
        for seed in 0..seeds {
            let g = generate_chung_lu(&PowerLawParams { n: 100, beta: 2.5, seed }).unwrap();
            mean_deg_sum += 2.0 * g.graph.edge_count() as f64 / 100.0;
            hub_sum += g.graph.degree(hub) as f64;
        }
        let runs = seeds as f64;
        let mc_mean_degree = mean_deg_sum / runs;
        let sigma_mean = (var_edges.sqrt() * 2.0 / 100.0) / runs.sqrt();
        assert!(
            (mc_mean_degree - exact_mean_degree).abs() <= 3.0 * sigma_mean,
            "mean degree {mc_mean_degree} vs exact {exact_mean_degree} (sigma {sigma_mean})"
        );

        let mc_hub = hub_sum / runs;
        let sigma_hub = var_hub.sqrt() / runs.sqrt();
        assert!(
            (mc_hub - exact_hub).abs() <= 3.0 * sigma_hub,
            "hub degree {mc_hub} vs exact {exact_hub} (sigma {sigma_hub})"
        );
        // The model property "expected degree of u is d_u" holds to the
        // self-pair correction, under 5% here.
        assert!((exact_hub - 9.0).abs() / 9.0 < 0.05);
    }
}
