//! The `semtex` pipeline: configuration, per-file processing, the optional
//! rendering check and source rewriting for review.

pub mod config;
pub mod pipeline;
pub mod render;
pub mod replace;

use thiserror::Error;

pub use config::{FileOverride, PipelineConfig};
pub use pipeline::{run_pipeline, FileResult, RunOutput};
pub use render::{request_mathml, MockRenderService, RenderError, RenderedMath};
pub use replace::{rewrite_source, Rewrite};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Page(#[from] semtex_core::PageError),
}
