//! Core engine for quantifying user re-identification gain from adversarial
//! background knowledge attacking an anonymized social graph.
//!
//! The crate is organized around one pipeline:
//!
//! * [`graph`] — immutable simple graphs, attribute schemas, query graphs
//!   (the attacker's background knowledge), ego-network extraction.
//! * [`generators`] — seeded G(n,p) and Chung-Lu power-law graph generation
//!   with order-independent keyed randomness.
//! * [`knowledge`] — closed-form expected match counts for every background
//!   knowledge mode (exact/noisy x partial/complete edges, probabilistic
//!   confidences, attribute knowledge), the de-anonymization gain DAG(Q),
//!   and the power-law lower bound. All probability composition happens in
//!   natural-log space.
//! * [`sweep`] — DAG curves over knowledge quantity or quality and detection
//!   of the valley / vanish critical points.
//! * [`matching`] — empirical ground truth: exact match counting by pruned
//!   backtracking, graph-conditional expectations for probabilistic
//!   knowledge, Monte-Carlo validation, color-coding estimation for tree
//!   queries, the star shortcut, and l-indistinguishability checks.
//! * [`querygen`] — query-graph generation mirroring the experimental
//!   methodology: ego networks, synthetic G(n_Q, p_q) queries, density
//!   adjustment, attribute attachment.
//!
//! The crate is `no_std` (with `alloc`) so the whole analytic core can be
//! embedded anywhere; file formats and the CLI live in the companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod generators;
pub mod graph;
pub mod knowledge;
pub mod logspace;
pub mod matching;
pub mod querygen;
pub mod rng;
pub mod sweep;

pub use graph::{AttributeSchema, Graph, Query};
pub use knowledge::{DagStatus, DagValue, EdgeMode, KnowledgeSpec};
pub use logspace::LogScalar;
