use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `D_α g` (or a conjugated jet) is undefined because `x = 0` or `g₁ ≈ 0`.
    #[error("singular point at ({x}, {y}): {reason}")]
    SingularPoint { x: f64, y: f64, reason: String },

    #[error("finite-difference stencil point ({x}, {y}) leaves the domain")]
    EvaluationOutsideDomain { x: f64, y: f64 },

    #[error("pole hit at z = {re} + {im}i")]
    PoleHit { re: f64, im: f64 },

    #[error("point ({x}, {y}) outside the declared domain")]
    DomainViolation { x: f64, y: f64 },

    #[error("map is not entire affine: {0}")]
    NotEntireAffine(String),

    #[error("incompatible maps: {0}")]
    DomainMismatch(String),

    #[error("no symbolic inverse for {0}")]
    NotInvertibleSymbolically(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("degenerate boundary derivative {value} at y = {y}")]
    DegenerateDerivative { y: f64, value: f64 },

    #[error("search budget exceeded: {0} components in one part (limit 12)")]
    SearchBudgetExceeded(usize),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("axis preservation fails at z = {re} + {im}i")]
    AxisPreservation { re: f64, im: f64 },

    #[error("operation not available for {0} maps")]
    Unsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
