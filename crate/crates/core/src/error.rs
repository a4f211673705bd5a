use thiserror::Error;

/// Errors produced by the simulator and algebra toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qudit dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("site {site} out of range for a register of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("control and target share site {0}")]
    SiteCollision(usize),

    #[error("register of {total} amplitudes exceeds the cap of {cap}")]
    RegisterTooLarge { total: usize, cap: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("sampled outcome {outcome} on site {site} has vanishing marginal")]
    ZeroMarginal { site: usize, outcome: usize },

    #[error("ancilla on site {site} is not in |0>")]
    AncillaNotReady { site: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("element set is not closed under composition")]
    NonClosedSubgroup,

    #[error("duplicate syndrome label {0}")]
    DuplicateLabel(usize),

    #[error("no correction branch for syndrome label {0}")]
    MissingBranch(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Whether the error signals a broken internal invariant rather than bad
    /// input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::Invariant(_)
                | Error::NotUnitary { .. }
                | Error::NotHermitian { .. }
                | Error::NotNormalized { .. }
                | Error::ZeroMarginal { .. }
                | Error::MissingBranch(_)
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
