use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("convergence failure in {what}: residual {residual:e}")]
    Convergence { what: String, residual: f64 },
    /// Instanton search stopped early; carries the best path found (natural units) and its action.
    #[error("instanton search did not converge: residual {residual:e}, best action {best_action}")]
    Instanton {
        residual: f64,
        best_action: f64,
        best_path: Vec<(f64, f64)>,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
