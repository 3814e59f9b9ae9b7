use thiserror::Error;

use crate::fock::Partition;

#[derive(Debug, Error)]
pub enum Error {
    #[error("monomial {monomial} has odd total jet weight {weight}; only even powers of sqrt(-i*hbar) may occur")]
    OddPower { monomial: String, weight: u32 },

    #[error("index out of range: {0}")]
    InvalidIndex(String),

    #[error("monomial {monomial} of H_{d} violates n = d + 2 - 2g (n = {n}, g = {g})")]
    WeightMismatch {
        d: i64,
        monomial: String,
        n: usize,
        g: u32,
    },

    #[error("commutator [H_{d1}, H_{d2}] is nonzero on |{partition}>: coefficient {coefficient} at |{output}>")]
    CommutatorNonzero {
        d1: i64,
        d2: i64,
        partition: Partition,
        output: Partition,
        coefficient: String,
    },

    #[error("classical limit mismatch on |{partition}> at |{output}>: commutator gives {lhs}, Poisson bracket gives {rhs}")]
    Mismatch {
        partition: Partition,
        output: Partition,
        lhs: String,
        rhs: String,
    },

    #[error("reconstruction of H_{d} is underdetermined at mmax = {mmax}: {nullity}-dimensional solution space")]
    Underdetermined { d: i64, mmax: u32, nullity: usize },

    #[error("reconstruction of H_{d} is inconsistent at mmax = {mmax}")]
    Inconsistent { d: i64, mmax: u32 },

    #[error("reconstructed functional for H_{d} fails re-verification on momentum {momentum}")]
    Reverification { d: i64, momentum: u32 },

    #[error("malformed document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
