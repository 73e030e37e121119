//! Graph states, entanglement widths and measurement patterns.
//!
//! This crate implements a small toolkit around one theme: how hard is it to
//! classically contract the tensor networks that show up when simulating
//! measurement-based quantum computation on graph states, and which graph
//! width parameters certify that hardness.
//!
//! The pieces:
//!
//! - [`graph`]: undirected simple graphs with bit-row adjacency, local
//!   complementation, GF(2) cut ranks and crossing-edge counts.
//! - [`tree`]: unrooted subcubic trees whose leaves label the graph vertices
//!   (or qubits), plus exhaustive enumeration of all `(2n-5)!!` of them.
//! - [`width`]: exact carving width, rank width and treewidth, with witness
//!   trees.
//! - [`dense`]: a plain state-vector simulator used as the ground-truth
//!   oracle everywhere (graph states, Schmidt ranks, POVMs, measurements).
//! - [`tensor`]: labeled dense tensors, pairwise contraction, contraction
//!   sequences and their equivalence with tree layouts.
//! - [`ttn`]: tree tensor networks built from dense states by recursive SVD,
//!   with amplitude evaluation and local measurement updates.
//! - [`circuit`] / [`mqc`]: a tiny circuit IR, its compilation onto
//!   graph-state measurement patterns, circuit graphs, PEPS-style tensors and
//!   probability networks.
//! - [`bounds`]: executable checks of the width inequalities tying all of the
//!   above together, including the constructive entangled-pair extraction.
//!
//! Qubit `k` is bit `k` of a basis index (little endian) throughout.

pub mod bits;
pub mod bounds;
pub mod circuit;
pub mod config;
pub mod dense;
pub mod error;
pub mod graph;
pub mod mqc;
pub mod svd;
pub mod tensor;
pub mod tree;
pub mod ttn;
pub mod width;

pub use config::Caps;
pub use error::{Error, Result};
