//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the group-theoretic machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse permutation: {0}")]
    ParsePermutation(String),

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("element is not in the group")]
    NotInGroup,

    #[error("subgroup is not normal in the given group")]
    NotNormal,

    #[error("subgroup is not abelian")]
    NotAbelian,

    #[error("subgroup is not invariant under the prescribed action")]
    NotInvariant,

    #[error("subgroup chain is incompatible: {0}")]
    IncompatibleChain(String),

    #[error("coset index {index} exceeds the configured cap {cap}")]
    IndexTooLarge { index: u128, cap: u128 },

    #[error("group too large for {op}: order {order} exceeds cap {cap}")]
    TooLarge {
        op: &'static str,
        order: u128,
        cap: u128,
    },

    #[error("order {order} is not cube-free: {prime}^3 divides it")]
    NotCubeFree { order: u128, prime: u64 },

    #[error("group is not solvable")]
    NotSolvable,

    #[error("prime {p} does not divide the group order {order}")]
    PrimeDoesNotDivide { p: u64, order: u128 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("Singer cycles are not supported for p = 2")]
    SingerCharTwo,

    #[error("dimension mismatch in linear system")]
    DimensionMismatch,

    #[error("unsupported modulus {0}: need a prime, a prime squared, or a product of such with distinct primes")]
    BadModulus(u64),

    #[error("group is not Frattini-free")]
    NotFrattiniFree,

    #[error("no Sylow tower found; input is not a cube-free solvable group")]
    NoSylowTower,

    #[error("action is not faithful")]
    NotFaithful,

    #[error("invalid group file: {0}")]
    GroupFile(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
