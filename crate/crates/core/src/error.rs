use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("denominator {den} does not divide level {level}")]
    LevelMismatch { den: u64, level: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {p} divides tame level {m}")]
    PrimeDividesTameLevel { p: u64, m: u64 },

    #[error("level {level} exceeds working precision {precision}")]
    LevelExceedsPrecision { level: u64, precision: u64 },

    #[error("residue is not a unit")]
    NotAUnit,

    #[error("operation requires an unramified tower (k = 0), got k = {0}")]
    RamifiedTower(u32),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular matrix where an isogeny was required")]
    Singular,

    #[error("no integer multiplier exists: {0}")]
    NoMultiplier(String),

    #[error("singular curve (zero discriminant)")]
    SingularCurve,

    #[error("field too large for exhaustive enumeration: {0} elements")]
    FieldTooLarge(u64),

    #[error("Boxall hypotheses violated: generator {0} moves a point of A[p] (or A[4] for p = 2)")]
    HypothesesViolated(usize),

    #[error("point is fixed by the whole group; no moving element exists")]
    PointFixed,

    #[error("generated group exceeds the enumeration bound {0}")]
    GroupTooLarge(usize),

    #[error("invalid automorphism: {0}")]
    InvalidAction(String),

    #[error("chain did not stabilize within {0} iterations")]
    ChainDidNotStabilize(usize),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
