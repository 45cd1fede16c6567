use thiserror::Error;

/// Errors raised by the engine.
///
/// Variants split into two families: validation errors (the mathematical
/// input is malformed) and scope errors (the input is well-formed but the
/// computation falls outside what this crate evaluates). See [`Error::is_scope`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("level n = {n} violates the standing hypothesis n >= 3")]
    LevelConstraint { n: u64 },

    #[error("genus d = {d} must be at least 1")]
    GenusConstraint { d: usize },

    #[error("genus d = {d} exceeds the explicit Weyl group limit {max}")]
    GenusTooLarge { d: usize, max: usize },

    #[error("modulus must be positive, got {0}")]
    BadModulus(u64),

    #[error("weight {weight} is not dominant for {group}")]
    NonDominant { weight: String, group: String },

    #[error("{what} index {index} out of range 0..{bound}")]
    OutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("parabolic index set must be non-empty")]
    EmptyParabolic,

    #[error("stratum index {r} must equal min(S) = {min}")]
    NotMinimum { r: usize, min: usize },

    #[error("stratum index {r} exceeds the smallest chain entry {min}")]
    StratumAboveChain { r: usize, min: usize },

    #[error("chain entries must be strictly decreasing")]
    ChainOrder,

    #[error("level {n} does not divide level {m}")]
    Divisibility { n: u64, m: u64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not in {group}: {reason}")]
    NotInGroup { group: String, reason: String },

    #[error("enumeration needs {needed} elements, cap is {cap}")]
    CapExceeded { needed: String, cap: u64 },

    #[error("Hecke element outside the integral shadow: {0}")]
    NonIntegralHecke(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that mean "well-formed but not evaluated here".
    pub fn is_scope(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::NonIntegralHecke(_) | Error::GenusTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
