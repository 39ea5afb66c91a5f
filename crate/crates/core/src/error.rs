use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sequence is not log-convex: quotient drops at p = {0}")]
    NotLogConvex(usize),
    #[error("associated function is infinite: quotients stay bounded by {0}")]
    DivergentAssociated(f64),
    #[error("index {requested} is beyond the available range {available}")]
    OutOfRange { requested: f64, available: usize },
    #[error("sampled phi is not convex at y = ({y0}, {y1}, {y2}), excess {excess:e}")]
    ConvexityViolation { y0: f64, y1: f64, y2: f64, excess: f64 },
    #[error("conjugate grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("weight is not non-quasianalytic: {0}")]
    NotNonQuasianalytic(String),
    #[error("weight function is not normalized: {0}")]
    NotNormalized(String),
    #[error("no witness for gamma(sigma, omega) > 1 within the search budget")]
    GammaNotAboveOne,
    #[error("precondition could not be verified: {0}")]
    PreconditionInconclusive(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
