use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid constraint length {0}: must be at least 2")]
    InvalidConstraint(u32),
    #[error("invalid generator polynomial {octal} for constraint length {k}")]
    InvalidPolynomial { octal: String, k: u32 },
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("weight spectrum is empty below d_max = {d_max} (free distance is {d_free})")]
    EmptySpectrum { d_free: u32, d_max: u32 },
    #[error("catastrophic puncturing: zero-weight cycle in the product trellis")]
    Catastrophic,
    #[error("uncorrectable Reed-Solomon block")]
    DecodeFailure,
    #[error("ill-conditioned least-squares problem: {0}")]
    IllConditioned(String),
    #[error("equalizer diverged (tap norm {0:.3e}); try a smaller step size")]
    Divergence(f64),
    #[error("EVM undefined: reference power is zero")]
    UndefinedEvm,
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wraps an error with the name of the chain stage that produced it.
    pub fn at(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
