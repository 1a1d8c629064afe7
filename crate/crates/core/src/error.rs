//! Crate error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh parse error at line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("non-admissible state{} (rho = {rho:.6e}, p = {p:.6e})",
            elem.map(|e| format!(" in element {e}")).unwrap_or_default())]
    NonAdmissible {
        elem: Option<usize>,
        rho: f64,
        p: f64,
    },

    #[error("singular local system in element {elem}: {msg}")]
    SingularLocal { elem: usize, msg: String },

    #[error("linear solver breakdown: {0}")]
    LinearBreakdown(String),

    #[error("nonlinear solve did not converge after {iters} iterations (residual {residual:.3e})")]
    NonConvergence { iters: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
