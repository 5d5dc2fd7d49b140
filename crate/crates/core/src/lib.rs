//! Soft-hypergraph relational modeling.
//!
//! The crate builds hyperedges from node features with Fuzzy C-Means,
//! propagates hyperedge information back to nodes, amplifies relational
//! structure with a fused self-similarity operator, and keeps a long-term
//! prototype bank of class-aware and global centroids that seeds later
//! clustering. An independent analyzer computes total correlation, dual
//! total correlation and O-information for discrete and Gaussian systems.
//!
//! Module map:
//!
//! * [`fcm`]: Fuzzy C-Means engine (and the K-Means initializer in [`fcm::kmeans`]).
//! * [`hypergraph`]: incidence construction, degree capping, cardinality statistics, aggregation.
//! * [`amplifier`]: structural/feature affinities, fusion and attention-driven amplification.
//! * [`bank`]: prototype bank, alignment, EMA updates, schedule and persistence.
//! * [`oinfo`]: entropy-based higher-order information measures.
//! * [`pipeline`]: the composed layer forward pass, epoch training loop and gap scoring.
//! * [`io`]: feature, label and run-configuration file formats.
//! * [`cli`]: command implementations behind the `hgproto` binary.

pub mod amplifier;
pub mod bank;
pub mod cli;
pub mod error;
pub mod fcm;
pub mod hypergraph;
pub mod io;
pub mod linalg;
pub mod oinfo;
pub mod pipeline;
mod types;

pub use error::{Error, Result};
pub use types::{CentroidSet, FeatureMatrix, MembershipMatrix};
