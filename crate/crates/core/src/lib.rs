//! Hard-decision renormalisation decoding for the toric code.
//!
//! * [`lattice`]: torus geometry, syndromes, homology.
//! * [`decoder`]: the three-step reduction procedure and the stage loop.
//! * [`channel`]: bit-flip sampling and the threshold experiment.
//! * [`adversarial`]: worst-case constructions, radius searches, ablations.
//! * [`reduced_weight`]: path/cycle partitions and the reduced-weight growth check.
//! * [`io`]: edge-list text, JSON traces and reports, CSV tables.

pub mod adversarial;
pub mod channel;
pub mod decoder;
pub mod error;
pub mod io;
pub mod lattice;
pub mod reduced_weight;

pub use decoder::{decode, decode_with_trace, DecodeTrace, DecoderOptions};
pub use error::{Error, Result};
pub use lattice::{homology_class, syndrome, EdgeSet, Edge, HomologyClass, SyndromeSet, TorusLevel, Vertex};
