//! Range-based (non-stochastic) information measures and privacy-preserving
//! quantization of public data by agglomerative clustering.
//!
//! The sensitive variable `S` and the public variable `X` are described only
//! by their joint range. A release `X̂` is a [`Quantization`] of `X`; the
//! greedy procedures in [`greedy`] trade worst-case leakage about `S`
//! against worst-case utility of `X̂`.

pub mod baseline;
pub mod error;
pub mod graph;
pub mod greedy;
pub mod ingest;
pub mod measures;
pub mod oracle;
pub mod pareto;
pub mod quantization;
pub mod range;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, IngestError, Result};
pub use graph::{ConfusabilityGraph, Decomposition};
pub use greedy::{Algorithm, GreedyResult, LagrangianConfig, Termination, TraceEntry};
pub use quantization::{
    Cluster, ClusterId, CodewordPolicy, Distance, Quantization, UtilityChoice, UtilityKind,
};
pub use range::{ConditionalRange, JointRange, Symbol};
