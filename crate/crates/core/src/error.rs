use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular matrix: ad - bc = 0")]
    SingularMatrix,

    #[error("element is not in PSL(2,R)")]
    NotReal,

    #[error("whole sphere fixed: the identity has no isolated fixed points")]
    WholeSphereFixed,

    #[error("no attracting limit: {0} elements do not converge under iteration")]
    NoAttractingLimit(&'static str),

    #[error("point {0} is not in the upper half-plane")]
    NotInUpperHalfPlane(String),

    #[error("point with Im z = {im} is below the minimum height {y_min}")]
    BelowMinimumHeight { im: f64, y_min: f64 },

    #[error("truncation insufficient: tail bound {bound:e} exceeds tolerance {tolerance:e}; try N >= {suggested}")]
    TruncationInsufficient {
        bound: f64,
        tolerance: f64,
        suggested: usize,
    },

    #[error("truncation {requested} exceeds the cap {cap}")]
    TruncationCap { requested: usize, cap: usize },

    #[error("integer overflow while generating coefficient {index} of {series}")]
    CoefficientOverflow { series: &'static str, index: usize },

    #[error("divisor_sum is undefined for n = 0")]
    ZeroDivisorSum,

    #[error("unsupported Eisenstein weight {0} (expected 2, 4 or 6)")]
    UnsupportedWeight(u32),

    #[error("incompatible leading exponents {0}/24 and {1}/24")]
    IncompatibleExponents(i64, i64),

    #[error("division by a series whose coefficients vanish through the truncation order")]
    ZeroLeadingCoefficient,

    #[error("derivative of order {0} is not available for {1}")]
    DerivativeOrder(usize, String),

    #[error("function vanishes at {0}")]
    VanishingValue(String),

    #[error("j_gamma(z) = cz + d vanishes")]
    SingularAutomorphyFactor,

    #[error("multiplier {0} is not a unit complex number (|nu| = {1})")]
    NonUnitMultiplier(String, f64),

    #[error("multiplier depends on the probe point (max deviation {0:e})")]
    ProbeDependentMultiplier(f64),

    #[error("weight k must be non-zero")]
    ZeroWeight,

    #[error("boundary of the search box passes through a zero of the function")]
    BoundaryZero,

    #[error("winding integral {0} is not close to an integer")]
    NonIntegerWinding(f64),

    #[error("invalid search box: {0}")]
    InvalidBox(String),

    #[error("fundamental-domain reduction did not terminate")]
    ReductionDiverged,

    #[error("unknown form {0}")]
    UnknownForm(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-finite value at {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
