//! Khovanov homology over GF(2), chain maps induced by link cobordism movies,
//! and end/co-end Khovanov homology of towers of links.

pub mod cobordism;
pub mod complex;
pub mod diagram;
pub mod error;
pub mod f2linalg;
pub mod formats;
pub mod random;
pub mod tower;

pub use cobordism::{
    apply_movie, elementary_chain_map, induced_homology_map, induced_transfer_map, reverse_aligned,
    reverse_movie, transfer, verify_chain_map, Movie, MovieEvent, Transfer,
};
pub use complex::{
    apply_differential, bigrading, enumerate_generators, homology_dims, is_boundary,
    is_cycle_local, relabel_chain, BigradedDims, Bigrading, ChainVector, LabeledSmoothing,
};
pub use diagram::{
    align, apply_event, Alignment, CircleSet, Crossing, Diagram, EdgeCorrespondence, EdgeId, Side,
    Sign,
};
pub use error::{Error, Result};
pub use f2linalg::{eventual_rank, kernel_basis, rank, solve, BitVec, F2Matrix};
