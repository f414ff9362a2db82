use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a unit modulo p^l")]
    NonUnit(u64),
    #[error("invalid ring parameters: {0}")]
    BadRing(String),
    #[error("root of unity of order {0} is not available in conductor {1}")]
    BadConductor(u64, u64),
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("enumeration of {size} elements exceeds the cap of {cap}")]
    TooLarge { size: u64, cap: u64 },
    #[error("matrix is not in the subgroup {0}")]
    NotInSubgroup(String),
    #[error("no coset representative found: {0}")]
    NotFound(String),
    #[error("coset representative is not unique: {0}")]
    NotUnique(String),
    #[error("inexact division by {0}")]
    InexactDivision(i128),
    #[error("binomial sum is not divisible by p^{0}")]
    DivisibilityFailed(u32),
    #[error("family {0} is not supported by this operation")]
    UnsupportedFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
