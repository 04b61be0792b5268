use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse scalar {0:?}")]
pub struct ParseScalarError(pub String);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not skew with respect to the metric")]
    NotSkew,

    #[error("operator does not preserve the isotropic subspace")]
    NotInStabilizer,

    #[error("transport is not orthogonal for the metric")]
    NonOrthogonalTransport,

    #[error("shape operator for normal index {0} is not symmetric")]
    NonSymmetricShape(usize),

    #[error("span is not closed under the bracket")]
    NotLieClosed,

    #[error("curvature value R({0}, {1}) does not lie in the algebra")]
    TensorNotInAlgebra(usize, usize),

    #[error("expected signature (1, n), got ({neg}, {pos})")]
    SignatureMismatch { neg: usize, pos: usize },

    #[error("invalid epimorphism: {0}")]
    InvalidEpimorphism(String),

    #[error("invalid construction data: {0}")]
    InvalidConstruction(String),

    #[error("algebra matches none of the four weakly irreducible shapes: {0}")]
    UnrecognizedStructure(String),

    #[error("metric is singular")]
    SingularMetric,

    #[error("induced metric is not positive definite at the given point")]
    DegenerateMetric,

    #[error("point is not on the light cone (<V,V> = {0:e})")]
    NotOnCone(f64),

    #[error("path is not closed (endpoint gap {0:e})")]
    OpenLoop(f64),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Parse(#[from] ParseScalarError),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by the input (as opposed to a violated
    /// internal invariant).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::UnrecognizedStructure(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
