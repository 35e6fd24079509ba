use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {value}: {reason}")]
    InvalidParameter { value: f64, reason: &'static str },
    #[error("ill-defined family (R=0): p = {p} exceeds q + 1 = {}", .q + 1)]
    IllDefined { p: usize, q: usize },
    #[error("|x| = {x} lies outside the convergence domain (radius {radius})")]
    OutOfDomain { x: f64, radius: f64 },
    #[error("f has a pole at n = {n}")]
    Pole { n: usize },
    #[error("series did not converge within {terms} terms")]
    NotConverged { terms: usize },
    #[error("series overflowed double precision")]
    Overflow,
    #[error("index {n} exceeds the truncation order N = {trunc}")]
    BeyondTruncation { n: usize, trunc: usize },
    #[error("k = {k} does not divide N + 1 = {}", .trunc + 1)]
    SectorMismatch { k: usize, trunc: usize },
    #[error("dimension {dim} is too small: {reason}")]
    DimensionTooSmall { dim: usize, reason: &'static str },
    #[error("degenerate sector j = {j}: Gram eigenvalue {lambda:e} below 1e-13")]
    DegenerateSector { j: usize, lambda: f64 },
    #[error("parameter or dimension mismatch between operands")]
    Mismatch,
    #[error("state has weight on the top Fock level; raising it would leave the space")]
    TopOfSpace,
    #[error("no inflection point: the second derivative never changes sign")]
    NoSignChange,
    #[error("integral diverges")]
    Divergent,
    #[error("{0}")]
    Precondition(&'static str),
}
