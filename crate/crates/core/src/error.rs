use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("rank N = {0} outside the supported range 2..=5")]
    RankOutOfRange(usize),
    #[error("element is not traceless (|tr| = {0:e})")]
    NotTraceless(f64),
    #[error("element is not regular semisimple: {0}")]
    NonGenericElement(String),
    #[error("unsupported Casimir degree {degree} for sl_{n}")]
    UnsupportedDegree { degree: usize, n: usize },
    #[error("point is within {distance:e} of puncture {puncture} (clearance {clearance:e})")]
    TooCloseToPuncture { puncture: usize, distance: f64, clearance: f64 },
    #[error("path segment {segment} passes within {distance:e} of puncture {puncture}")]
    ClearanceViolation { segment: usize, puncture: usize, distance: f64 },
    #[error("step size underflow at t = {t} on segment {segment}")]
    StepSizeUnderflow { segment: usize, t: f64 },
    #[error("resonant residue at puncture {puncture}: eigenvalues differ by an integer")]
    ResonantSystem { puncture: usize },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("too many points: {0} (maximum 8)")]
    TooManyPoints(usize),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("singular matrix")]
    Singular,
    #[error("ill-conditioned split: smallest retained singular value {0:e}")]
    IllConditionedSplit(f64),
    #[error("non-transversal intersection persisted after perturbation")]
    NonTransversal,
    #[error("invalid arc: {0}")]
    InvalidArc(String),
    #[error("boundary check failed: defect {0:e}")]
    BoundaryCheck(f64),
    #[error("finite-difference noise: relative change {0:e} when halving the step")]
    FiniteDifferenceNoise(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::RankOutOfRange(_) => "RankOutOfRange",
            Error::NotTraceless(_) => "NotTraceless",
            Error::NonGenericElement(_) => "NonGenericElement",
            Error::UnsupportedDegree { .. } => "UnsupportedDegree",
            Error::TooCloseToPuncture { .. } => "TooCloseToPuncture",
            Error::ClearanceViolation { .. } => "ClearanceViolation",
            Error::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            Error::ResonantSystem { .. } => "ResonantSystem",
            Error::NoConvergence(_) => "NoConvergence",
            Error::TooManyPoints(_) => "TooManyPoints",
            Error::InvalidSystem(_) => "InvalidSystem",
            Error::Singular => "Singular",
            Error::IllConditionedSplit(_) => "IllConditionedSplit",
            Error::NonTransversal => "NonTransversal",
            Error::InvalidArc(_) => "InvalidArc",
            Error::BoundaryCheck(_) => "BoundaryCheck",
            Error::FiniteDifferenceNoise(_) => "FiniteDifferenceNoise",
            Error::Parse(_) => "Parse",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
