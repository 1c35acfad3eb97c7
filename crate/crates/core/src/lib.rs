//! Adjacency labeling for graphs that embed into a strong product `H ⊠ P`
//! of a bounded-treewidth graph `H` and a path `P`.
//!
//! Three schemes share one archive format:
//!
//! * [`tw_label`]: `log n + O(k log log n)` bits for treewidth `k`, with
//!   `log |Q| + O(k log log n)` bits for a chosen vertex set `Q`;
//! * [`product_label`]: `log n + log d + O(w log log n)` bits for subgraphs
//!   of `H ⊠ P` with a path of length `d`;
//! * [`flat`]: `(4/3) log n + O(w log log n)` bits for subgraphs of `H ⊠ P`
//!   with a path of any length.

pub mod archive;
pub mod bidecomposition;
pub mod codec;
pub mod error;
pub mod flat;
pub mod gen;
pub mod graph;
pub mod io;
pub mod product_label;
pub mod treewidth;
pub mod tw_label;
pub mod verify;

pub use archive::{Decoder, LabelArchive, SchemeKind};
pub use error::{DecodeError, Error, Result};
pub use graph::{Graph, ProductEmbedding, VertexSet};
pub use treewidth::TreeDecomposition;
