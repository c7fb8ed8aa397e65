use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("point {point:?} lies outside the chart domain")]
    Domain { point: Vec<f64> },

    #[error("degenerate metric at {point:?} (det = {det:e})")]
    DegenerateMetric { point: Vec<f64>, det: f64 },

    #[error("field evaluated to jet order {got}, operation needs {needed}")]
    Order { needed: usize, got: usize },

    #[error("endomorphism is not an almost complex structure (|J² + Id| = {residual:e})")]
    AlmostComplex { residual: f64 },

    #[error("operation supports dimension {expected} only, chart has {got}")]
    UnsupportedDimension { expected: usize, got: usize },

    #[error("degenerate two-form: {0}")]
    DegenerateForm(String),

    #[error("not a solution of the continuous Toda equation (residual {residual:e})")]
    InvalidSolution { residual: f64 },

    #[error("moment map is degenerate at {point:?}: |df_Z| = {norm:e}")]
    MomentMapDegenerate { point: Vec<f64>, norm: f64 },

    #[error("quaternionic span of Z has rank {rank} at {point:?}")]
    RankDeficient { point: Vec<f64>, rank: usize },

    #[error("signature violation: {0}")]
    Signature(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("pole of {factor} inside the integration interval near {at}")]
    Pole { factor: String, at: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("bracket closure fails (projection residual {residual:e})")]
    NonClosure { residual: f64 },

    #[error("integrability criterion violated (residual {residual:e}); ψ is undefined")]
    CriterionViolated { residual: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("unknown {kind} '{name}'; available: {available}")]
    Registry {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("invalid model parameters: {0}")]
    Parameters(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
