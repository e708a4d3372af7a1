use thiserror::Error;

/// Errors raised across the library. Numeric payloads are stored as `f64`
/// regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {name} = {value} is outside its admissible range")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("Lambda is not an isometry of the pencil metric (max residual {residual:e})")]
    NonIsometric { residual: f64 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("entry ({row}, {col}) lies outside the strictly upper triangular state layout")]
    OffPattern { row: usize, col: usize },

    #[error("observable gradient is not finite")]
    InvalidGradient,

    #[error("invalid time span: t1 must exceed t0")]
    InvalidSpan,

    #[error("tolerances and sample count must be positive")]
    InvalidTolerance,

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64, last_state: Vec<f64> },

    #[error("non-finite derivative at t = {t}")]
    NonFiniteDerivative { t: f64 },

    #[error("maximum number of steps exceeded at t = {t}")]
    TooManySteps { t: f64 },

    #[error("chart singularity: {what} = {value:e}")]
    ChartSingularity { what: &'static str, value: f64 },

    #[error("chart undefined: {reason}")]
    UndefinedChart { reason: &'static str },

    #[error("radicand {value:e} is negative: W0 lies outside the oscillation band")]
    NegativeRadicand { value: f64 },

    #[error("W0 is frozen (b = a or d = 0); the quadrature map is undefined")]
    FrozenW0,

    #[error("integration interval crosses the quartic root {root}")]
    BandCrossing { root: f64 },

    #[error("band endpoint {root} is a double root; the elapsed time is infinite")]
    AsymptoticBand { root: f64 },

    #[error("angles are geometrically inconsistent with the reduced data (residual {value:e})")]
    GeometricInconsistency { value: f64 },

    #[error("W0 vanishes at t = {t}; division singularity")]
    DivisionSingularity { t: f64 },

    #[error("quadrature did not converge (estimated error {error:e})")]
    QuadratureNoConvergence { error: f64 },

    #[error("massless data rejected: {reason}")]
    MasslessRejected { reason: &'static str },

    #[error("massive data rejected: {reason}")]
    MassiveRejected { reason: &'static str },

    #[error("twistor is not positive (Delta = {delta:e})")]
    NotPositive { delta: f64 },

    #[error("degenerate flag: {reason}")]
    DegenerateFlag { reason: &'static str },

    #[error("trajectory chart mismatch: expected {expected}, found {found}")]
    ChartMismatch { expected: &'static str, found: &'static str },

    #[error("requested time {t} lies outside the trajectory span")]
    OutOfSpan { t: f64 },
}

impl Error {
    /// True for failures that come from the flow running into a chart or
    /// step-size singularity (as opposed to invalid input).
    pub fn is_singularity(&self) -> bool {
        matches!(
            self,
            Error::StepSizeUnderflow { .. }
                | Error::NonFiniteDerivative { .. }
                | Error::ChartSingularity { .. }
                | Error::DivisionSingularity { .. }
                | Error::TooManySteps { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
