use crate::weight_transforms::ProblemKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension N = {0} is not supported (need N >= 2)")]
    InvalidDimension(usize),

    #[error("critical weight for {kind} at N = {dimension}: gamma = {excluded} is excluded")]
    CriticalWeight {
        dimension: usize,
        kind: ProblemKind,
        excluded: f64,
    },

    #[error("weight outside the admissible range: {0}")]
    Domain(String),

    #[error("pole at epsilon^2 + lambda^2 = 0; use the pole-free P01/Q01/Q02 forms")]
    Pole,

    #[error("{family} is defined for {expected} setups only")]
    KindMismatch {
        family: &'static str,
        expected: ProblemKind,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("frequency grid does not resolve the profile: Plancherel defect {defect:.3e}")]
    Bandwidth { defect: f64 },

    #[error("derivative order {0} is not supported (max 3)")]
    UnsupportedOrder(usize),

    #[error("field is identically zero")]
    ZeroField,

    #[error("curl-free constraint violated: relative residual {residual:.3e} exceeds {tolerance:.3e}")]
    CurlConstraintViolated { residual: f64, tolerance: f64 },

    #[error("potential violates the annulus support requirement: {0}")]
    Support(String),

    #[error("cannot parse weight {0:?}")]
    ParseWeight(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
