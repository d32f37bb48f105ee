//! Exact classification of adjoint orbits in the Lie algebra of a
//! generalized orthogonal group: linear maps skew-compatible with a
//! degenerate symmetric bilinear form whose radical is one line, spanned by
//! a distinguished vector v0 that the maps annihilate.
//!
//! Everything runs over exact rational arithmetic. The crate
//!
//! - validates triples (Gram matrix, nilpotent-or-not operator, radical
//!   vector) against the structural identities ([`triple`]),
//! - computes the complete orbit invariants of the nilpotent part: the
//!   special height, the induced nondegenerate pair on V/span{v0}, the
//!   connection class and its self-pairing, and per-height uniform-layer
//!   signatures ([`invariants`]),
//! - classifies up to conjugation by the group of isometries fixing v0 and
//!   decides orbit equivalence ([`classify`]),
//! - emits explicit normal-form matrices for every classification and
//!   parses the canonical label grammar ([`emit`]),
//! - reads and writes an exact JSON interchange format ([`json`]).
//!
//! The binary `genorth` exposes all of this as subcommands: `classify`,
//! `equiv`, `emit`, `fuzz`, and `validate`.

pub mod classify;
pub mod emit;
pub mod error;
pub mod forms;
pub mod invariants;
pub mod json;
pub mod mat;
pub mod rat;
pub mod triple;

pub use classify::{
    canonical_string, classify, equivalent, Classification, NonzeroPart, SignLabel, SpecialLabel,
    TypeLabel,
};
pub use emit::{assemble, emit_special, emit_type, fuzz_label, parse_label, LabelError};
pub use error::Error;
pub use forms::{Signature, SymForm};
pub use invariants::{connection_class, induced_pair, special_height, uniform_layer};
pub use json::{read_triple, triple_from_json, triple_to_json, write_triple, TripleFile};
pub use mat::Mat;
pub use rat::{parse_rat, rat, rat_int, Rat};
pub use triple::{cayley_element, fitting_split, random_group_element, GroupElement, Pair, Triple};
