use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A table or search range is too small, or a requested size is too large.
    #[error("size error: {0}")]
    Size(String),
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    /// The evaluation point is outside the range where the target accuracy holds.
    #[error("accuracy loss: {0}")]
    AccuracyLoss(String),
    /// Sign-change search and argument-principle count disagree after refinement.
    #[error("incomplete zero list: found {found} zeros, argument principle counts {expected}")]
    IncompleteZeroList { found: usize, expected: i64 },
    #[error("contour passes too close to a zero: {0}")]
    ContourNearZero(String),
}

pub type Result<T> = std::result::Result<T, Error>;
