use thiserror::Error;

/// Precondition and domain failures raised by the library.
///
/// Every variant is a domain error from the CLI's point of view (exit code 3);
/// argument parsing and I/O failures are handled by the driver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be prime (got {value})")]
    NotPrime { name: &'static str, value: u64 },

    #[error("q must be a prime power (got {0})")]
    NotPrimePower(u64),

    #[error("{name} = {value} is outside the supported range [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: i128,
        min: i128,
        max: i128,
    },

    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("singular curve: 4a^3 + 27b^2 = 0 mod {p} for (a, b) = ({a}, {b})")]
    SingularCurve { p: u64, a: u64, b: u64 },

    #[error("invalid window q = {q}, R = {r}: {reason}")]
    InvalidWindow { q: u64, r: u64, reason: &'static str },

    #[error("trace t = {t} is not ordinary for q = {q} (need 0 < |t| < 2 sqrt(q) and t prime to the characteristic)")]
    NotOrdinary { q: u64, t: i64 },

    #[error("character for q = {q}, t = {t} is principal")]
    PrincipalCharacter { q: u64, t: i64 },

    #[error("gcd({v}, {r}) must be 1")]
    NotCoprime { v: i64, r: u64 },

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
