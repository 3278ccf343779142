use thiserror::Error;

/// Errors shared by every subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller handed in something malformed (bad dimensions, out-of-range
    /// index, unparseable text).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation was attempted that the communication rules forbid
    /// (duplicate upload, delivery after sealing, measuring out of order).
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    /// The requested computation exceeds a configured size or budget cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// The simulator reached a state its own invariants rule out; indicates
    /// a bug (for example a phase-convention mismatch), not bad user input.
    #[error("internal consistency: {0}")]
    InternalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
