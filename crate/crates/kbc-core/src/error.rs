use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown {kind} '{name}'")]
    Vocabulary { kind: &'static str, name: String },

    #[error("negative sampler exhausted after {attempts} attempts for relation {relation}")]
    SamplerExhausted { relation: u32, attempts: usize },

    #[error("non-finite loss {loss} at epoch {epoch}, step {step}")]
    NonFiniteLoss { epoch: usize, step: usize, loss: f64 },

    #[error("grid search failed: every cell errored")]
    GridExhausted,
}
