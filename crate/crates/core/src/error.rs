use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid base field: {0}")]
    InvalidBase(String),
    #[error("residue degree {needed} exceeds the configured cap {cap}")]
    ResidueBudgetExceeded { needed: usize, cap: usize },
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("Hensel lifting failed: {0}")]
    HenselFails(String),
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("unsupported degree: {0}")]
    UnsupportedDegree(String),
    #[error("extension is not Galois: found {found} of {degree} automorphisms")]
    NotGalois { found: usize, degree: usize },
    #[error("element is not invertible at working precision")]
    NotInvertible,
    #[error("split component {0} vanishes at working precision")]
    ZeroComponent(usize),
    #[error("incompatible tower: {0}")]
    IncompatibleTower(String),
    #[error("nonzero slope {num}/{den}: no solution of the sigma equation exists")]
    NonzeroSlope { num: i64, den: i64 },
    #[error("cocycle value ({0}, {1}) is not in L^x at working precision")]
    NotInL(usize, usize),
    #[error("cocycle does not have the unramified shape: {0}")]
    NotUnramifiedShape(String),
    #[error("norm class group did not stabilise up to depth {0}")]
    Unstable(usize),
    #[error("norm residue map is not bijective: {0}")]
    NotBijective(String),
    #[error("pair is not in the Weil group (residual valuation {0})")]
    NotInWeilGroup(i64),
    #[error("Weil elements live over different ambients")]
    AmbientMismatch,
    #[error("groups are not isomorphic as extensions: {0}")]
    GroupsNotIsomorphic(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
