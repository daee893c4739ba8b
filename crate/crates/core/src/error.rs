use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{unit} is not invertible modulo {modulus}")]
    NotInvertible { unit: String, modulus: String },

    /// A tracked step needed more p-adic precision than the state carried.
    /// Only reachable when a caller steps past `nu_p(n!) <= r`.
    #[error("precision exhausted at n = {n}: state has b = {precision}, step needs {needed}")]
    PrecisionExhausted { n: u64, precision: u32, needed: u32 },

    #[error("verification failed: k = {k}, p = {p}, n = {n}")]
    VerificationFailed { k: u64, p: u64, n: u64 },

    /// The tracked-residue engine and the exact rational oracle disagree.
    #[error("oracle disagreement for k = {k}, init = {init}: residue engine {residue:?}, exact {exact:?}")]
    OracleDisagreement {
        k: u64,
        init: String,
        residue: Option<u64>,
        exact: Option<u64>,
    },
}
