//! IO, file formats, and the experiment driver for the de-anonymization
//! gain toolkit. The analytic and counting engine lives in `deanon-core`;
//! this crate adds everything that touches the filesystem: edge-list and
//! CSV formats, JSON configs, and the reproducible experiment runner behind
//! the `deanon-gain` binary.

pub mod csvout;
pub mod experiments;
pub mod io;
