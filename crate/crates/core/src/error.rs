use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite coordinate ({re}, {im})")]
    NonFiniteCoordinate { re: f64, im: f64 },

    #[error("point ({re}, {im}) is outside the {domain} domain")]
    PointOutsideDomain {
        domain: &'static str,
        re: f64,
        im: f64,
    },

    #[error("point ({re}, {im}) lies on the branch cut of the {domain} map")]
    BranchCutViolation {
        domain: &'static str,
        re: f64,
        im: f64,
    },

    #[error("automorphism parameter must satisfy |a| < 1, got |a| = {0}")]
    InvalidAutomorphism(f64),

    #[error("operation requires a map in the {expected} direction")]
    WrongDirection { expected: &'static str },

    #[error("weights live on different domains: {0} vs {1}")]
    DomainMismatch(&'static str, &'static str),

    #[error("rectangle is not strictly inside the {0} domain")]
    RectangleNotInterior(&'static str),

    #[error("integrand returned a non-finite value at w = ({re}, {im})")]
    IntegrandNotFinite { re: f64, im: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: need at least {min} nodes per direction, got {n_r}x{n_theta}")]
    GridTooCoarse {
        min: usize,
        n_r: usize,
        n_theta: usize,
    },

    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    #[error("exponent out of range: {0}")]
    ExponentOutOfRange(String),

    #[error("dilatation integral K_(p,q) is not finite for p = {p}, q = {q}")]
    KpqDivergent { p: f64, q: f64 },

    #[error("power iteration did not settle within {0} steps")]
    IterationDivergence(usize),

    #[error("right-hand side is not finite at z = ({re}, {im})")]
    RhsNotFinite { re: f64, im: f64 },

    #[error("singular tridiagonal system in radial mode {0}")]
    SingularTridiagonal(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
