use thiserror::Error;

/// Errors produced by the numerical and geometric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("parameter domain: {0}")]
    Domain(String),

    #[error("non-finite integrand value {value} at theta={theta}, phi={phi}")]
    NonFiniteIntegrand { theta: f64, phi: f64, value: f64 },

    #[error("quadrature did not converge: last difference {last_difference:e} at {nodes_theta}x{nodes_phi} nodes (value {value})")]
    Convergence { value: f64, last_difference: f64, nodes_theta: usize, nodes_phi: usize },

    /// No sign change of the centering function across the search interval.
    #[error("no sign change in bracket [{lo}, {hi}]: H(lo)={h_lo:e}, H(hi)={h_hi:e}")]
    Bracket { lo: f64, hi: f64, h_lo: f64, h_hi: f64 },

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("malformed mesh input: {0}")]
    MalformedMesh(String),

    #[error("mass properties: {0}")]
    Mass(String),

    #[error("degenerate equilibrium census: {0}")]
    Degenerate(String),

    #[error("internal numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
