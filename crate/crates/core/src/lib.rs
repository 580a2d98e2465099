//! Visualize large high-dimensional data sets as two-dimensional trees.
//!
//! The pipeline has four phases:
//!
//! 1. [`hashing`] encodes items as (weighted) MinHash signatures, which
//!    [`forest`] indexes in an LSH Forest.
//! 2. [`knng`] queries the index for every item and builds an undirected
//!    k-nearest-neighbor graph weighted by estimated Jaccard distance.
//! 3. [`mst`] reduces the graph to a minimum spanning forest (Kruskal).
//! 4. [`layout`] draws the forest with a multilevel spring-electrical model.
//!
//! [`eval`] measures how well nearest neighbors survive the embedding, and
//! [`pipeline`] / [`cli`] wire everything to files.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default); see [`exec::Exec`]. Results do not depend on the thread
//! count.

pub mod cli;
pub mod eval;
pub mod exec;
pub mod forest;
pub mod hashing;
pub mod io;
pub mod knng;
pub mod layout;
pub mod mst;
pub mod pipeline;
pub mod rng;

pub use exec::Exec;
pub use forest::{LshForest, LshForestConfig, Neighbor};
pub use hashing::{Encoder, HashMode, HashingConfig, Signature, SignatureMatrix, SparseBinarySet, WeightedVector};
pub use knng::{Edge, KnnGraphConfig, WeightedGraph};
pub use layout::{LayoutConfig, LayoutResult};
pub use mst::SpanningForest;
pub use pipeline::{embed, EmbedConfig, EmbedMetric};
