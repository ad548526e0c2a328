use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LameError {
    #[error("valuation of zero")]
    ValuationOfZero,
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("division by a value that is zero at the working precision")]
    DivisionByZero,
    #[error("wild case unsupported here: p = {p} divides e = {e}")]
    WildCase { p: u64, e: u64 },
    #[error("no certified convergence: {0}")]
    NoCertifiedConvergence(String),
    #[error("singular point: derivative indistinguishable from zero")]
    SingularPoint,
    #[error("all coefficients are exact zero")]
    ZeroPolynomial,
    #[error("expected a p-adic unit")]
    NotAUnit,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("bad-reduction criterion v_p(n-2b) > v_p(2n) fails for n={n}, b={b}, p={p}")]
    CriterionNotSatisfied { n: u64, b: u64, p: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("outside the certified range: {0}")]
    OutOfRange(String),
    #[error("not a torsion point: {0}")]
    NotTorsion(String),
    #[error("inputs {0} and {1} are not coprime")]
    NonCoprime(u64, u64),
    #[error("evaluation at a point of the divisor support (order {order})")]
    PoleOrZero { order: i64 },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, LameError>;
