//! Upper bounds on the information ratio from fractional covers, lower bounds
//! from the entropy-method LP.

mod cover;
mod entropy;

pub use cover::{
    multipartite_cover_minmax, star_cover_minmax, verify_cover, CoverError, CoverReport, CoverSolution, Subgraph,
    WeightedSubgraph, MULTIPARTITE_VERTEX_LIMIT,
};
pub use entropy::{
    entropy_constraints, entropy_lp_complexity, entropy_lp_set_query, EntropyBound, EntropyObjective, EntropyTarget,
    Inequality, ENTROPY_VERTEX_LIMIT,
};

use thiserror::Error;

use crate::lp::LpError;
use crate::rational::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("graph has {size} vertices, limit is {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("LP solver reported {0}")]
    Solver(String),
    #[error("invalid entropy certificate: {0}")]
    Certificate(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Stinson's bound for maximum degree `d`: `(d + 1) / 2`.
pub fn stinson_upper(d: usize) -> Rational {
    Rational::from(d + 1) / Rational::from_int(2)
}
