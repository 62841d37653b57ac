//! Schema-first telemetry framework.
//!
//! Telemetry assets (counters, structured logs, span payloads) are defined in
//! an annotated interface-definition language before any emitting code is
//! written. The schema is the single source of truth for the asset's
//! metadata: field types, display names, units, validation rules, privacy
//! annotations, and cross-asset semantic types.
//!
//! The crate is organized around the life cycle of a schema:
//!
//! - [`idl`] — lexer, parser, and pretty-printer for the `.tsch` schema
//!   language.
//! - [`model`] — resolves parsed documents into a fully-qualified,
//!   annotation-interpreted schema model with stable fingerprints.
//! - [`compat`] — diffs two schema versions, classifies every change as
//!   compatible or breaking, and builds rename transforms for record
//!   migration.
//! - [`registry`] — the versioned metadata store with an actualization
//!   pipeline that gates publication on compatibility, plus an HTTP service.
//! - [`codec`] — the self-describing binary wire format for telemetry
//!   records.
//! - [`telemetry`] — schema-checked record builders, span envelopes with
//!   schematized payload dictionaries, and a file-backed queue.
//! - [`semquery`] — semantic cross-asset discovery, filtering, conversion,
//!   and joins.

pub mod codec;
pub mod compat;
pub mod idl;
pub mod model;
pub mod registry;
