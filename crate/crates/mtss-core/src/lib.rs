//! Toolkit for multi-stream scene scripts: define, parse, validate, query,
//! edit, render, and score factorized audio-visual script documents.
//!
//! A script factorizes a video description into four streams — reference
//! entities, shots, audio events, and global context — reconnected by
//! explicit identity links (reference ids) and temporal links (shared time
//! ranges, inline timestamps). This crate provides:
//!
//! - [`schema`]: the typed document model and its structural invariants
//! - [`parser`]: bit-exact serialization to/from the `.mtss.json` dialect,
//!   with located parse diagnostics and the inline-timestamp micro-grammar
//! - [`validator`]: the relational-grounding lint engine (coded rules)
//! - [`timeline`]: interval index, overlap/IoU, active-event inference,
//!   and shot boundaries
//! - [`edits`]: local edits with change-footprint tracking
//! - [`render`]: monolithic caption and per-shot prompt flattening
//! - [`evalx`]: script-vs-script metrics (boundary deviation, stream F1)
//! - [`gen`]: seeded random script generation for tests and benchmarks

pub mod edits;
pub mod evalx;
pub mod gen;
pub mod parser;
pub mod render;
pub mod schema;
pub mod timeline;
pub mod validator;

pub use schema::{
    AppearanceAnchor, AudioEvent, Camera, EntityCategory, EntityId, EventId, EventType,
    GlobalContext, MediaMeta, ReferenceEntity, Script, Shot, ShotId, StructureError, TimeRange,
    TIME_EPSILON,
};
