//! Crossing-metric toolkit: exact geometry, planar line arrangements, and
//! four minimum-spanning-tree computation paths under the metric "number of
//! hyperplanes separating two points".
//!
//! The paths, from slowest-and-exact to fastest-and-approximate:
//! - [`mst_exact::mst_bruteforce`]: Kruskal over all pairs; the oracle.
//! - [`mst_exact::mst_wavefront`]: multi-source flooding of the arrangement
//!   face-adjacency graph; exact, verified weight-equal to the oracle.
//! - [`mst_approx::approx_mst`]: staged random sampling of the line set with
//!   doubling distance scales; (1+eps)-approximate.
//! - [`ann_mst::mst_via_embedding`]: embed into binary Hamming space, then
//!   Boruvka rounds over bit-sampling LSH indices.

pub mod ann_mst;
pub mod arrangement;
pub mod embedding;
pub mod error;
pub mod forest;
pub mod geometry;
pub mod lsh;
pub mod mst_approx;
pub mod mst_exact;
pub mod seed;
pub mod svg;

pub use error::{Error, Result};
pub use forest::SpanningForest;
pub use geometry::{
    crossing_distance, generate_instance, side, sign_vector, subset_mask, Hyperplane, Instance,
    Point, SignTable, SignVector,
};
