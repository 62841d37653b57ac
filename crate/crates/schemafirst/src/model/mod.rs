//! The resolved schema model.
//!
//! [`resolve`] turns parsed IDL documents into a [`ResolvedSchema`]: every
//! name fully qualified, embedded composites flattened into their owners,
//! and annotations interpreted into typed metadata (display names, semantic
//! types, qualifiers, units, validation rules, privacy, conversions).
//! Unknown annotations are preserved as opaque extras so that future
//! metadata vocabularies survive a round-trip through the registry.
//!
//! A resolved schema is immutable and carries two FNV-1a-64 fingerprints
//! over its canonical serialization: a structural one (field ids, names,
//! types, optionality) and a semantic one (additionally semantic types,
//! qualifiers, units, validation, privacy). Display names and descriptions
//! affect neither.

mod fingerprint;
mod resolve;
mod semantic;
#[cfg(test)]
mod tests;
mod types;

pub use fingerprint::{fingerprint, fnv1a64};
pub use resolve::{resolve, resolve_all, ResolveError};
pub use semantic::{semantic_fields, SemanticFieldEntry};
pub use types::{
    BaseKind, CompositeDef, ConversionDecl, ConversionHow, EnumDef, EnumEntry, FieldDef,
    OpaqueAnnotation, OpaqueValue, PrivacyPolicy, QualifierValue, ResolvedSchema, RichType,
    SemanticTypeId, TypeDef, TypeRef,
};
