//! Error type shared across the crate.

use std::fmt;

/// Errors produced while building models or computing heights.
///
/// `PrecisionExhausted` is special: the height engine catches it internally
/// and retries at doubled precision until the configured ceiling, so user
/// code only sees it once the ceiling is reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A working precision was insufficient to certify a valuation or
    /// angular component, and the ceiling prevented further escalation.
    PrecisionExhausted {
        /// Absolute precision in effect when certification failed.
        prec: i64,
    },
    /// A modulus or place polynomial that must be irreducible is not.
    NotIrreducible(String),
    /// Construction data for a field, module, model, or element is invalid.
    Invalid(String),
    /// Newton lifting was attempted where the simple-root condition
    /// v(F(x0)) > 2 v(F'(x0)) fails (including identically zero derivative).
    HenselConditionFailed(String),
    /// Division by zero (exact zero or zero within precision).
    DivisionByZero,
    /// The requested operation needs the place to lie in S (a coefficient
    /// pole), but the module has no pole there.
    NotInS,
    /// The module cannot be made monic at the place within the given model.
    Unmonicizable(String),
    /// The escape-multiplier search exhausted its degree bound.
    NoEscapeFound {
        /// Degree bound z * f_cap that was searched.
        degree_bound: u32,
    },
    /// The subspace-lemma hypothesis failed for a supplied witness.
    HypothesisViolated(String),
    /// An operand mixes distinct fields or models.
    FieldMismatch(String),
    /// A span is too large for exhaustive enumeration.
    DimensionTooLarge {
        /// Number of F_q-combinations the check would have to visit.
        combinations: u128,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PrecisionExhausted { prec } => {
                write!(f, "precision exhausted at absolute precision {prec}")
            }
            Error::NotIrreducible(what) => write!(f, "polynomial is not irreducible: {what}"),
            Error::Invalid(msg) => write!(f, "invalid construction: {msg}"),
            Error::HenselConditionFailed(msg) => {
                write!(f, "Hensel condition failed: {msg}")
            }
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::NotInS => write!(f, "place is not in S: no coefficient pole"),
            Error::Unmonicizable(msg) => write!(f, "cannot monicize at this place: {msg}"),
            Error::NoEscapeFound { degree_bound } => {
                write!(f, "no escaping multiplier up to degree {degree_bound}")
            }
            Error::HypothesisViolated(msg) => write!(f, "hypothesis violated: {msg}"),
            Error::FieldMismatch(msg) => write!(f, "field mismatch: {msg}"),
            Error::DimensionTooLarge { combinations } => {
                write!(
                    f,
                    "span too large for exhaustive enumeration: {combinations} combinations"
                )
            }
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
