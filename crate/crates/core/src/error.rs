use thiserror::Error;

/// A `(prime, valuation)` pair naming one ε candidate.
pub type Candidate = (u64, u32);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sieve exhausted: successor of {after} exceeds sieve limit {limit}")]
    SieveExhausted { after: u64, limit: u64 },

    #[error("{0} is not a prime in the sieve")]
    NotFound(u64),

    #[error("value exceeds materialization bound {bound}")]
    TooLarge { bound: u128 },

    /// Two ε candidates coincide within the tie tolerance. Under the
    /// Alaoglu–Erdős assumption this cannot happen; if it does it is a
    /// counterexample to the four exponentials conjecture.
    #[error("FOUR EXPONENTIALS DISPROVED? tie between {first:?} and {second:?} (eps {eps_first:e} vs {eps_second:e})")]
    FourExponentialsWitness {
        first: Candidate,
        second: Candidate,
        eps_first: f64,
        eps_second: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("input excluded from the unconditional bound (n in {{1, 2, 12}})")]
    ExcludedInput,

    #[error("insufficient data: records do not cover index {0}")]
    InsufficientData(usize),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("unsupported checkpoint version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("checkpoint parse error: {0}")]
    Parse(String),

    #[error("checkpoint was written with sieve limit {found}, current sieve limit is {expected}")]
    SieveMismatch { found: u64, expected: u64 },

    #[error("log-domain drift {drift:e} at index {index} exceeds tolerance")]
    Drift { index: usize, drift: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
