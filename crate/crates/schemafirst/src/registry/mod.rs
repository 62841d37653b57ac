//! The metadata store: versioned schema storage gated by compatibility
//! checking, discovery and semantic search, and an HTTP front end.
//!
//! Publication goes through [`Store::actualize`]: the document is parsed and
//! resolved, diffed against the asset's latest version, and classified.
//! Breaking changes are rejected with the verdict — nothing is written.
//! Compatible changes append a new immutable version file together with the
//! rename transform from its predecessor, so consumers can migrate records
//! in both directions at any later time.
//!
//! Asset identity is the fully qualified name of the root struct. Storage
//! is plain JSON files under `assets/<fqn>/`: one `v<N>.json` per version
//! plus an `index.json` summary. Version files are never rewritten.

pub mod http;
mod store;

pub use store::{
    ActualizeOptions, AssetId, AssetIndex, AssetSummary, FingerprintRecord, RegistryError,
    SemanticHit, Store, VersionSelector, VersionEntry,
};
