use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// One or more metric components failed to parse. Each entry names the
    /// component key (`"01"`, ...) and its error.
    #[error("metric compile failed: {}", format_compile_errors(.0))]
    Compile(Vec<(String, ParseError)>),

    #[error("invalid metric spec: {0}")]
    Spec(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate metric at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    DegenerateMetric { point: Vec<f64>, min_eigenvalue: f64 },

    #[error("degenerate 2-plane (gram determinant {gram:e})")]
    DegeneratePlane { gram: f64 },

    #[error("point is (nearly) isotropic: |H - N| = {gap:e}")]
    NearIsotropic { gap: f64 },

    #[error("line field cannot be consistently oriented (|<xi, xi'>| = {overlap:e})")]
    SignAlignmentFailure { overlap: f64 },

    #[error("H + kappa = {value:e} is not positive at {point:?}")]
    NonpositiveOperand { value: f64, point: Vec<f64> },

    #[error("difference stencil around {point:?} reaches a non-QC point")]
    StencilClassificationChange { point: Vec<f64> },

    #[error("operation needs a quasi-constant point, got {class}")]
    NotQuasiConstant { class: String },

    #[error("operation needs dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mu must be positive, got {0}")]
    InvalidMu(f64),

    #[error("ball curvature must be positive, got {0}")]
    InvalidLambda(f64),

    #[error("no hyperspherical cap for H_S = {0} <= 0")]
    NoCap(f64),

    #[error("flat ambient (kappa = 0) has no hyperbolic branch for this quantity")]
    FlatAmbient,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("profile is not realizable at r = {r}: 1 + kappa f^2 - f'^2 = {discriminant:e}")]
    ProfileDomainError { r: f64, discriminant: f64 },

    #[error("vector is not a unit normal (<v, v> = {norm:e})")]
    NotUnitNormal { norm: f64 },

    #[error("vector is not tangent to the hyperboloid (<x, v> = {inner:e})")]
    NotTangent { inner: f64 },

    #[error("trace left the quasi-constant region at step {step} ({class} at {point:?})")]
    LeftQcRegion {
        step: usize,
        class: String,
        point: Vec<f64>,
    },

    #[error("step too large: horizontal drift degenerated at {point:?}")]
    StepTooLarge { point: Vec<f64> },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogName(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("smoothing width must be positive, got {0}")]
    BadDelta(f64),

    #[error("warp mismatch at junction t = {t}: {left} vs {right}")]
    JunctionMismatch { t: f64, left: f64, right: f64 },

    #[error("warp is not positive at t = {t} (f = {value})")]
    NonpositiveWarp { t: f64, value: f64 },
}

fn format_compile_errors(errors: &[(String, ParseError)]) -> String {
    errors
        .iter()
        .map(|(key, e)| format!("g[{key}]: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}
