//! Exact-arithmetic toolkit for classic and weighted dissimilarity vectors of
//! phylogenetic trees.
//!
//! The crate computes `d_2`, `d_r` and the weighted `d_r^wt` of a tree, decides
//! whether an arbitrary vector in `Q^(n choose r)` is a weighted
//! r-dissimilarity vector (cube hyperplanes plus a four-point condition),
//! reconstructs the witnessing tree, and audits balancing of the
//! split-metric cones at codimension-one faces.
//!
//! Every number is an exact rational; there is no floating point anywhere in
//! the library.

pub mod algebraic;
pub mod balancing;
pub mod combinat;
pub mod dissim;
pub mod error;
pub mod linalg;
pub mod membership;
pub mod rational;
pub mod sample;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
