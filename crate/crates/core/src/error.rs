use thiserror::Error;

use crate::lattice::Site;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("({0}, {1}) is not a primitive nonzero vector")]
    NotPrimitive(i64, i64),
    #[error("invalid window [{x_min}, {x_max}] x [{y_min}, {y_max}]")]
    BadWindow { x_min: i64, x_max: i64, y_min: i64, y_max: i64 },
    #[error("site ({}, {}) lies outside the explicit boundary collar", .0.x, .0.y)]
    OutsideCollar(Site),
    #[error("invalid update family: {0}")]
    BadFamily(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("empty droplet")]
    EmptyDroplet,
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("target unreachable from {0} state(s)")]
    Unreachable(usize),
    #[error("linear solver failed: {0}")]
    Solver(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
