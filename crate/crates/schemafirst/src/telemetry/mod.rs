//! Producer and consumer plumbing built on the schema registry: checked
//! record builders, span envelopes carrying schematized payloads, an
//! append-only queue file, and a self-checking demo pipeline.

mod builder;
mod demo;
mod queue;
mod span;
#[cfg(test)]
mod tests;

pub use builder::RecordBuilder;
pub use demo::{pipeline_demo, DemoConfig, PipelineReport};
pub use queue::{QueueError, QueueFile, QueueReader};
pub use span::{AttachReport, SpanEnvelope};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TelemetryError {
    #[error(transparent)]
    Encode(#[from] crate::codec::EncodeError),
    #[error(transparent)]
    Decode(#[from] crate::codec::DecodeError),
    #[error(transparent)]
    Registry(#[from] crate::registry::RegistryError),
    #[error(transparent)]
    Queue(#[from] QueueError),
    #[error("span carries no payload keyed '{fqn}'")]
    PayloadNotFound { fqn: String },
}
