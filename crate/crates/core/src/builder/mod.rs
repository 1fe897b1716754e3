//! Construction of the CBM representation.
//!
//! The pipeline is: candidate edges of the α-pruned distance graph →
//! minimum cost arborescence rooted at the virtual row → per-row delta lists
//! → signed delta matrix.

mod arborescence;
mod cbm;
mod chain;
mod delta;
mod edges;
mod space;

pub use arborescence::find_min_arborescence;
pub(crate) use cbm::inverse_sqrt_degrees;
pub use cbm::{build_cbm, build_cbm_normalized, build_cbm_normalized_with, CbmMatrix, DegreeSource};
pub use chain::CompressionChain;
pub use delta::{compute_delta_lists, DeltaList};
pub use edges::{build_candidate_edges, CandidateEdge};
pub use space::{compression_ratio, csr_bytes, memory_footprint, ByteModel, BYTE_MODEL};
