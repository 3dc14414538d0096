//! Training-free context compression for long documents.
//!
//! The pipeline splits a document into sentences, embeds them, links them in a
//! hybrid semantic/sequential graph, clusters them into a topic skeleton, scores
//! each sentence for task relevance, topic representativeness, bridging role and
//! cycle membership, and finally selects a token-budgeted subset that is
//! reassembled in original order. Every stage is deterministic for a fixed seed.

pub mod config;
pub mod embed;
pub mod eval;
pub mod graph;
pub mod harness;
pub mod pipeline;
pub mod score;
pub mod seed;
pub mod segment;
pub mod select;
pub mod topics;

pub use config::PipelineConfig;
pub use pipeline::Pipeline;
