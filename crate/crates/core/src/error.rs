use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at z = {0}")]
    GammaPole(f64),

    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pole collision: {0}")]
    PoleCollision(String),

    #[error("contour integration failed: {0}")]
    ContourFailure(String),

    #[error("numerical integration failed: {0}")]
    IntegrationFailure(String),

    #[error("secrecy target has theta = 1; closed form is singular, use the semi-analytic path")]
    ThetaDegenerate,

    #[error("empty range: {0}")]
    EmptyRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        function,
        detail: detail.into(),
    }
}
