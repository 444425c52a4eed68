use thiserror::Error;

/// Errors raised by basis construction, diagonalization and the protocol.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sector: {num_sites} sites, {num_electrons} electrons, 2Sz = {two_sz}")]
    EmptySector {
        num_sites: usize,
        num_electrons: usize,
        two_sz: i32,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis built for {basis} sites but parameters describe {params} sites")]
    SiteCountMismatch { basis: usize, params: usize },

    #[error("state has weight {weight:.3e} outside the target sector")]
    OutsideSector { weight: f64 },

    #[error("degenerate ground level: E0 = {energy}, gap = {gap:.3e}")]
    DegenerateGroundState { energy: f64, gap: f64 },

    #[error("state lacks the pair symmetry a1 = a2, b1 = b2 (|a1|-|a2| = {a_diff:.3e}, |b1|-|b2| = {b_diff:.3e})")]
    AsymmetricState { a_diff: f64, b_diff: f64 },

    #[error("state mixes sectors: {0}")]
    MixedSector(String),

    #[error("outcome |{label}> is outside the {channel} herald set")]
    FilteredBranch { label: String, channel: String },

    #[error("decoding failed: weight {leakage:.3e} leaked outside the logical span")]
    Leakage { leakage: f64 },

    #[error("sweep point U/t = {u_over_t}: {source}")]
    SweepPoint {
        u_over_t: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
