//! Configuration-driven orchestration of the cloaksim pipeline.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod commands;
pub mod config;
pub mod pipeline;
pub mod presets;
pub mod validate;

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] cloaksim_core::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("configuration syntax: {0}")]
    TomlRead(#[from] toml::de::Error),
    #[error("configuration output: {0}")]
    TomlWrite(#[from] toml::ser::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
