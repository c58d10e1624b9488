//! Anonymity measures for undirected graphs.
//!
//! The crate answers one question in several strengths: given only the
//! structure of a network, how many of its nodes can be singled out?
//!
//! - [`equivalence`] groups nodes whose d-neighborhoods are isomorphic
//!   around them (d-k-anonymity); the fraction of singleton classes is the
//!   network's uniqueness.
//! - [`cascade`] propagates identification across links: a neighbor of an
//!   identified node is pinned down when it is the only neighbor in its
//!   ego-network equivalence class.
//! - [`twins`] detects nodes with identical neighborhoods, which no
//!   structural measure can separate, and folds them into twin-unique
//!   variants of both measures.
//! - [`models`] and [`sweep`] generate ER/BA/WS graphs and uniqueness-map
//!   tables; [`oracle`] holds the brute-force reference implementations
//!   used for differential testing.

pub mod canonical;
pub mod cascade;
pub mod equivalence;
pub mod graph;
pub mod models;
pub mod neighborhood;
pub mod oracle;
pub mod sweep;
pub mod twins;

pub use canonical::{
    canonical_certificate, certify_all, invariant_key, CertId, Certificate, CertificateCache,
    CertifyOptions, InvariantKey,
};
pub use cascade::{c1_uniqueness, cascade as run_cascade, CascadeBudget, CascadeResult};
pub use equivalence::{partition, partition_with, report, AnonymityReport, EquivalencePartition};
pub use graph::{
    load_edge_list, load_edge_list_str, Graph, LoadError, LoadOptions, LoadReport, LoadedGraph,
    NodeId,
};
pub use models::{generate, ModelError, ModelFamily, ModelSpec};
pub use neighborhood::{closed_neighborhood, open_neighbor_set, NeighborhoodView};
pub use sweep::{sweep, SweepGrid, SweepRow};
pub use twins::{
    find_twins, twin_cascade, twin_reduce, twin_unique_classes, twin_unique_fraction, TwinSets,
};
