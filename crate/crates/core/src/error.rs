use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("signature entry {index} is {value}, expected +1 or -1")]
    InvalidSignature { index: usize, value: i64 },
    #[error("degenerate pivot at step {step}: the J-Grammian is singular")]
    DegeneratePivot { step: usize },
    #[error("S is numerically indefinite or singular: {0}")]
    IndefiniteS(String),
    #[error("a block of H is rank deficient; retry with a different block count or pointwise mode")]
    RankDeficientH,
    #[error("no Mantharam-Eberlein table for order {0}; use the modified modulus strategy")]
    UnsupportedStrategy(usize),
    #[error("strategy order {0} is odd; border the problem first")]
    OddOrder(usize),
    #[error("column {0} of G vanished: infinite eigenvalue")]
    InfiniteEigenvalue(usize),
    #[error("invalid permutation")]
    InvalidPermutation,
    #[error("Cholesky breakdown at column {0}")]
    CholeskyBreakdown(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("phase {phase}: {source}")]
    InPhase { phase: u8, source: Box<Error> },
}

impl Error {
    /// True for failures of the numerical method itself, as opposed to bad
    /// input, configuration or I/O.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::InPhase { source, .. } => source.is_numerical(),
            Error::Io(_) | Error::Format(_) | Error::Config(_) | Error::Dimension(_) => false,
            Error::InvalidSignature { .. } | Error::InvalidPermutation | Error::UnsupportedStrategy(_) => false,
            _ => true,
        }
    }

    pub fn in_phase(self, phase: u8) -> Error {
        Error::InPhase { phase, source: Box::new(self) }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
