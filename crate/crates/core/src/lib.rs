//! Core library of the pbench data-poisoning benchmark.
//!
//! The pipeline has five stages — raw, annotation, features, splits, model —
//! each emitting a canonically serialized manifest that is hashed, committed
//! to a Merkle tree (from the features stage on), and signed with a
//! post-quantum scheme. The attack modules mutate those artifacts the way a
//! write-capable adversary would; the detect module implements the
//! statistical monitors that do (and do not) catch them.

pub mod digest;
pub mod grid;
pub mod manifest;
pub mod model;
pub mod synth;

pub use digest::{hash_file, Digest};
pub use grid::FeatureGrid;
pub use manifest::{parse_manifest, serialize_manifest, SampleRecord, Stage, StageManifest};
