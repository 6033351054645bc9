use thiserror::Error;

/// Errors raised by the scattering toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NftError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("circle grid of {grid} points would alias a polynomial with {len} coefficients")]
    Aliasing { grid: usize, len: usize },
    #[error("spectral factorization of an all-zero power spectrum")]
    DegenerateSpectrum,
    #[error("filter precondition violated: delta*|psi| = {value:.6} >= 1 at omega = {omega:.6}")]
    FilterGain { omega: f64, value: f64 },
    #[error("D too small for prescribed spectrum: truncation tail energy {tail:.3e} exceeds {limit:.1e}")]
    TruncationTail { tail: f64, limit: f64 },
    #[error("singular recovery at step {step}: |a0| = {a0:.3e}")]
    SingularRecovery { step: usize, a0: f64 },
    #[error("invalid scattering pair: {0}")]
    InvalidPair(String),
    #[error("D = {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{0} is not a root of a(z)")]
    NotARoot(String),
    #[error("multiple root at {0}: da/dz vanishes")]
    MultipleRoot(String),
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<NftError>,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl NftError {
    pub fn in_stage(self, stage: &'static str) -> Self {
        NftError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for NftError {
    fn from(err: std::io::Error) -> Self {
        NftError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NftError>;
