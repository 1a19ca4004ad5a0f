use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("mesh file line {line}: {msg}")]
    MeshFormat { line: usize, msg: String },
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("finite elements: {0}")]
    Fem(String),
    #[error("singular factorization: {0}")]
    Singular(String),
    #[error("eigensolver: {0}")]
    Eigen(String),
    #[error("herglotz: {0}")]
    Herglotz(String),
    #[error("scattering: {0}")]
    Scatter(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
