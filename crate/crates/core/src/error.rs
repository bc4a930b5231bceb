use crate::expr::ExprError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("point ({}, {}, {}) is outside the chart", .0[0], .0[1], .0[2])]
    OutOfChart([f64; 3]),
    #[error("metric is singular or indefinite at ({}, {}, {}): condition number {condition:e}", point[0], point[1], point[2])]
    SingularMetric { point: [f64; 3], condition: f64 },
    #[error("both frame seeds lie in the span of the field")]
    DegenerateSeed,
    #[error("vectors do not span a plane (Gram determinant {0:e})")]
    DegeneratePlane(f64),
    #[error("field is not unit length (defect {0:e})")]
    NotUnit(f64),
    #[error("frame orthonormality drifted by {drift:e} at t = {t}; halve the step")]
    StepTooLarge { drift: f64, t: f64 },
    #[error("comparison function pole reached at t = {0}")]
    PoleReached(f64),
    #[error("entry `{0}` has no integration parametrization")]
    NoParametrization(String),
    #[error("manifold is not of constant curvature {c}: sectional curvatures range over [{min}, {max}]")]
    NotConstantCurvature { c: f64, min: f64, max: f64 },
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable variant name, used as the error tag on the command line and across the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Expr(_) => "Expression",
            Error::OutOfChart(_) => "OutOfChart",
            Error::SingularMetric { .. } => "SingularMetric",
            Error::DegenerateSeed => "DegenerateSeed",
            Error::DegeneratePlane(_) => "DegeneratePlane",
            Error::NotUnit(_) => "NotUnit",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::PoleReached(_) => "PoleReached",
            Error::NoParametrization(_) => "NoParametrization",
            Error::NotConstantCurvature { .. } => "NotConstantCurvature",
            Error::UnknownEntry(_) => "UnknownEntry",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
