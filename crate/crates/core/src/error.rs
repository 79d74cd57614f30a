use thiserror::Error;

/// Errors shared across the workbench modules.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("zero input where a nonzero field element is required")]
    ZeroInput,
    #[error("the field pair is not a supported extension")]
    NotAnExtension,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is isotropic (q(v) = 0)")]
    IsotropicVector,
    #[error("isometry is improper (det = -1)")]
    ImproperIsometry,
    #[error("operation not supported over this field")]
    UnsupportedField,
    #[error("space has odd dimension where even dimension is required")]
    OddDimension,
    #[error("no anisotropic vector found")]
    NoAnisotropicVector,
    #[error("algebra mismatch between operands")]
    AlgebraMismatch,
    #[error("element is not in the Clifford group: conjugation does not preserve V")]
    NotInCliffordGroup,
    #[error("similitude lift failed: {0}")]
    LiftFailure(String),
    #[error("value expected to be a scalar in Z is not")]
    NotScalar,
    #[error("omega^2 / gamma is not in Z*: inconsistent lift")]
    InconsistentLift,
    #[error("mu_star requires n odd")]
    WrongParity,
    #[error("multiplier of omega is not in the base field")]
    MultiplierNotInBase,
    #[error("(f, z) is not in U: f^4 != N(z)")]
    NotInU,
    #[error("Hilbert 90 solver failed: right-hand side is not a norm-one element")]
    Hilbert90Failure,
    #[error("class is not in the image of i")]
    NotInImageOfI,
    #[error("discriminant is a square: Z is split, not a field")]
    SplitDiscriminant,
    #[error("discriminant becomes a square over L: Z_L is split")]
    SplitDiscriminantOverL,
    #[error("Z over L is not the base change of the discriminant extension")]
    MalformedTower,
    #[error("invalid construction: {0}")]
    InvalidField(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
