use crate::words::FiniteWord;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. `code()` gives the stable
/// module-qualified identifier used by the CLI and in golden files.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("comparison undecidable at {bits} bits of precision")]
    Undecidable { bits: u32 },
    #[error("no real root in ({lo}, {hi})")]
    NoRoot { lo: String, hi: String },
    #[error("no exact period within {steps} steps (prefix {prefix})")]
    NoPeriodWithinBudget { steps: usize, prefix: FiniteWord },
    #[error("word is not admissible: {0}")]
    NotAdmissible(String),
    #[error("round trip mismatch: {0}")]
    RoundtripMismatch(String),
    #[error("target out of range: {0}")]
    TargetOutOfRange(String),
    #[error("not a subshift of finite type: {0}")]
    NotSft(String),
    #[error("Markov property violated: {0}")]
    MarkovViolation(String),
    #[error("system is not transitive")]
    NotTransitive,
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("no point of the bifurcation set found with Lyndon words up to length {bound}")]
    EPlusSearchExhausted { bound: usize },
    #[error("missing fixture: {0}")]
    MissingFixture(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Undecidable { .. } => "numerics.UNDECIDABLE-AT-PRECISION",
            Error::NoRoot { .. } => "numerics.NO-ROOT",
            Error::DivisionByZero => "numerics.DIVISION-BY-ZERO",
            Error::NoPeriodWithinBudget { .. } => "itinerary.NO-PERIOD-WITHIN-BUDGET",
            Error::InvalidParams(_) => "itinerary.INVALID-PARAMS",
            Error::NotAdmissible(_) => "kneading.NOT-ADMISSIBLE",
            Error::RoundtripMismatch(_) => "kneading.ROUNDTRIP-MISMATCH",
            Error::TargetOutOfRange(_) => "kneading.TARGET-OUT-OF-RANGE",
            Error::NotSft(_) => "sft.NOT-SFT",
            Error::MarkovViolation(_) => "sft.MARKOV-VIOLATION",
            Error::NotTransitive => "winning.NOT-TRANSITIVE",
            Error::SearchExhausted(_) => "correspondence.SEARCH-EXHAUSTED",
            Error::EPlusSearchExhausted { .. } => "survivor.E-PLUS-SEARCH-EXHAUSTED",
            Error::MissingFixture(_) => "golden.MISSING-FIXTURE",
            Error::Parse(_) => "input.PARSE",
        }
    }
}
