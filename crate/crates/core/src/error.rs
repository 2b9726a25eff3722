use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("weights not coprime: gcd({w1}, {w2}) = {gcd} != 1")]
    WeightsNotCoprime { w1: u64, w2: u64, gcd: u64 },

    #[error("weights unordered: w1 = {w1} < w2 = {w2} (require w1 >= w2)")]
    WeightsUnordered { w1: u64, w2: u64 },

    #[error("admissibility failure: gcd(l2, l1*w1*w2) = gcd({l2}, {product}) = {gcd} != 1")]
    AdmissibilityGcdFailure { l2: u64, product: u64, gcd: u64 },

    #[error("{name} must be positive")]
    NonPositive { name: &'static str },

    #[error("ray ({v1}, {v2}) is not a coprime pair of positive integers")]
    InvalidRay { v1: String, v2: String },

    #[error("degenerate ray ({v1}, {v2}): w1*v2 - w2*v1 = 0")]
    DegenerateRay { v1: String, v2: String },

    #[error("base {0} has no quasi-monotone index")]
    NotQuasiMonotone(String),

    #[error("invalid base geometry: {0}")]
    InvalidBase(String),

    #[error("invalid admissible data: {0}")]
    InvalidData(String),

    #[error("invalid precondition: {0}")]
    Precondition(String),

    #[error("extremal linear system is singular at {0}")]
    SingularSystem(String),

    #[error("CSC ray function is identically zero for {0}")]
    DegenerateFamily(String),

    #[error("no positive root of the Einstein condition for {0}")]
    NoPositiveRoot(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("unsupported dimension: p = {0} (need p >= 2)")]
    UnsupportedDimension(i64),

    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(String, String),

    #[error("invalid (p, q) = ({p}, {q}): need 1 <= q < p and gcd(p, q) = 1")]
    InvalidPQ { p: i64, q: i64 },

    #[error("catalog error: {0}")]
    Catalog(String),
}

impl Error {
    /// True for errors raised by the mathematics rather than by bad input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem(_)
                | Error::DegenerateFamily(_)
                | Error::NoPositiveRoot(_)
                | Error::Consistency(_)
        )
    }
}
