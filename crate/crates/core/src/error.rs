use alloc::string::String;
use core::fmt;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Matrix or list dimensions disagree with the declared market size.
    Shape(String),
    WorkerOutOfRange { worker: usize, n_workers: usize },
    JobOutOfRange { job: usize, n_jobs: usize },
    /// A matching assigns some job or worker twice.
    NotInjective(String),
    /// A matching contains a pair the worker finds unacceptable.
    UnacceptablePair { worker: usize, job: usize },
    /// A preference list is not a strict order over its universe.
    MalformedPreferences(String),
    NegativeEpsilon,
    /// The instance is too large for exhaustive enumeration.
    EnumerationBound { n_workers: usize, n_jobs: usize, bound: usize },
    InvalidParameter(String),
    /// An input distribution violates an operation's precondition.
    Precondition(String),
    EmptyClass,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            Error::WorkerOutOfRange { worker, n_workers } => {
                write!(f, "worker index {worker} out of range (n_workers = {n_workers})")
            }
            Error::JobOutOfRange { job, n_jobs } => {
                write!(f, "job index {job} out of range (n_jobs = {n_jobs})")
            }
            Error::NotInjective(msg) => write!(f, "matching is not injective: {msg}"),
            Error::UnacceptablePair { worker, job } => write!(
                f,
                "pair (w{}, a{}) has zero utility and cannot be matched",
                worker + 1,
                job + 1
            ),
            Error::MalformedPreferences(msg) => write!(f, "malformed preference list: {msg}"),
            Error::NegativeEpsilon => f.write_str("epsilon must be non-negative"),
            Error::EnumerationBound { n_workers, n_jobs, bound } => write!(
                f,
                "instance {n_workers}x{n_jobs} exceeds the enumeration bound {bound}"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::EmptyClass => f.write_str("matching class is empty"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
