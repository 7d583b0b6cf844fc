use thiserror::Error;

/// Errors raised by the numerical routines. Location payloads are `(re, im)` pairs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("radius {radius:e} below degenerate floor {floor:e}")]
    DegenerateRadius { radius: f64, floor: f64 },
    #[error("point ({0}, {1}) outside the mapping domain")]
    OutOfDomain(f64, f64),
    #[error("mapping not differentiable at ({0}, {1})")]
    NotDifferentiableHere(f64, f64),
    #[error("finite-difference stencil around ({0}, {1}) crosses a non-smooth set")]
    StencilCrossesSeam(f64, f64),
    #[error("Jacobian {jacobian:e} not positive at ({re}, {im})")]
    NonPositiveJacobian { jacobian: f64, re: f64, im: f64 },
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("kappa {kappa:e} not positive at r = {radius:e}")]
    NonPositiveKappa { kappa: f64, radius: f64 },
    #[error("e_{0} overflows double precision")]
    Overflow(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("table parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
