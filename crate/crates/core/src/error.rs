use thiserror::Error;

/// Errors raised by the channel model, generators and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("non-finite sample at flat index {0}")]
    NonFinite(usize),
    #[error("selected block has zero total energy")]
    ZeroEnergy,
    #[error("antenna subset is empty")]
    EmptySubset,
    #[error("antenna index {0} selected more than once")]
    DuplicateIndex(usize),
    #[error("antenna index {index} out of range for {antennas} antennas")]
    IndexOutOfRange { index: usize, antennas: usize },
    #[error("user {user} out of range for {users} users")]
    UserOutOfRange { user: usize, users: usize },
    #[error("need at least {needed} valid samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("subset of size {size} is not a prefix of the previous selection")]
    InconsistentPrefix { size: usize },
    #[error("array '{0}' carries no polarization tags")]
    MissingPolarization(String),
    #[error("array '{0}' has no co-located V/H port pairs")]
    UnpairedArray(String),
    #[error("unknown array id '{0}'")]
    UnknownArray(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Whether this error reports a violated data invariant (as opposed to
    /// malformed input or a bad argument).
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimensions(_)
                | Error::NonFinite(_)
                | Error::ZeroEnergy
                | Error::DuplicateIndex(_)
                | Error::InconsistentPrefix { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_classification() {
        assert!(Error::ZeroEnergy.is_invariant_violation());
        assert!(Error::NonFinite(3).is_invariant_violation());
        assert!(!Error::InvalidArgument("x".into()).is_invariant_violation());
        assert!(!Error::InvalidConfig("x".into()).is_invariant_violation());
    }
}
