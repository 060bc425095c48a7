use thiserror::Error;

/// Every failure surfaced by the library. The message prefix names the
/// module that raised it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exact: {0} is not a prime")]
    NotPrime(String),
    #[error("exact: {0} is at least 2^64; only 64-bit primes are supported")]
    PrimeTooLarge(String),
    #[error("exact: invalid rational literal `{0}`")]
    InvalidRational(String),

    #[error("poly: {0}")]
    Validation(String),

    #[error("fixdiv: refinement depth cap {cap} exceeded in class {class}")]
    DepthCapExceeded { cap: u32, class: String },
    #[error("fixdiv: {0}")]
    Consistency(String),

    #[error("fdkernel: witness report has no classes")]
    EmptyWitnessReport,
    #[error("fdkernel: kernel is trivial (s = 0); the Siegel bound is undefined")]
    TrivialKernel,
    #[error("{module}: search space of {candidates} candidates exceeds the limit {limit}; {hint}")]
    SearchTooLarge {
        module: &'static str,
        candidates: String,
        limit: u128,
        hint: &'static str,
    },

    #[error("classify: {0}")]
    Bound(String),

    #[error("powerfac: precondition violated: {0}")]
    Precondition(String),
    #[error("powerfac: F is reducible; the oracle needs an irreducible element")]
    Reducible,

    #[error("{module}: verification failed: {what}")]
    Verification { module: &'static str, what: String },

    #[error("cli: syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn verification(module: &'static str, what: impl Into<String>) -> Self {
        Error::Verification {
            module,
            what: what.into(),
        }
    }
}
