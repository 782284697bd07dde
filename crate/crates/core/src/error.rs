use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("non-rational literal `{0}`")]
    NonRational(String),
    #[error("exponent is not affine in the free parameters: {0}")]
    NonAffine(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no value bound for `{0}`")]
    MissingBinding(String),
    #[error("negative base raised to a non-integer power")]
    NegativeBase,
    #[error("value has no exact rational root: {0}")]
    InexactRoot(String),
    #[error("function `{0}` has no numeric sample")]
    NoSample(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("identity {index} does not annihilate the equations; residual {residual}")]
    IdentityResidual { index: usize, residual: String },
    #[error("restriction did not terminate for {0}")]
    RestrictDiverged(String),
    #[error("singular homotopy exponent in term {0}; try shifting the base point")]
    SingularHomotopy(String),
    #[error("homotopy needs homogeneous dependence on the dependent variables: {0}")]
    NonHomogeneousHomotopy(String),
    #[error("expression is not a total divergence: {0}")]
    NotDivergence(String),
    #[error("expression is not homogeneous under the scaling action: {0}")]
    NotHomogeneous(String),
    #[error("critical weight: omega = 0 for this multiplier; use the homotopy or dimensional scaling construction")]
    CriticalWeight,
    #[error("free parameter `{0}` must be given a numeric value before solving")]
    FreeParameter(String),
    #[error("residual is not linear in the unknowns or has non-numeric coefficients: {0}")]
    NonLinearResidual(String),
    #[error("empty ansatz basis")]
    EmptyBasis,
    #[error("inconsistent linear system; unmatched monomials: {0}")]
    Inconsistent(String),
    #[error("lead {0} has no subleading derivative in any direction")]
    NoSubleading(String),
    #[error("{0} is not a multiplier")]
    NotMultiplier(String),
    #[error("system declares no differential identity")]
    NoIdentity,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown scaling action `{0}`")]
    UnknownScaling(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("file format error: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
