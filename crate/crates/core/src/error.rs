use thiserror::Error;

/// Errors produced by the physics, simulation, and estimation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An input is outside the physical/mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to reach its requested accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An input exceeds a hard resource limit (e.g. oracle grid size).
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A nonlinear or linear fit did not converge or is degenerate.
    #[error("fit error: {0}")]
    Fit(String),

    /// Records could not be grouped as required (e.g. missing CW/ACW pair).
    #[error("grouping error: {0}")]
    Grouping(String),
}

pub type Result<T> = std::result::Result<T, Error>;
