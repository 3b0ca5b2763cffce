use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the pipeline can surface, grouped loosely by stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic number {found}, expected {expected}")]
    BadMagic { expected: u32, found: u32 },
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("no rows survive the digit filter")]
    EmptyResult,
    #[error("split leaves one side without both classes")]
    DegenerateSplit,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("covariance has fewer than {k} non-negligible eigenvalues")]
    RankDeficient { k: usize },

    #[error("qubit {qubit} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, qubits: usize },
    #[error("rotation angle is not finite")]
    NonFiniteAngle,
    #[error("control and target qubits coincide")]
    SameQubit,
    #[error("state norm deviates from 1 beyond tolerance")]
    UnnormalizedState,
    #[error("parameter coordinate {0} does not exist")]
    BadCoordinate(usize),

    #[error("empty batch")]
    EmptyBatch,
    #[error("empty dataset")]
    EmptyData,
    #[error("dataset contains a single class")]
    DegenerateData,
    #[error("training diverged: loss is not finite")]
    NonFiniteLoss,
    #[error("feature {0} is constant on the training set")]
    DegenerateFeature(usize),

    #[error("visible and hidden units must be 0 or 1")]
    NonBinaryInput,

    #[error("scores do not form a probability distribution")]
    NotADistribution,
    #[error("value function returned a non-finite number")]
    NonFiniteValue,
    #[error("attribution degenerate: every score is zero")]
    DegenerateAttribution,

    #[error("perplexity {perplexity} too large for {n} points")]
    PerplexityTooLarge { n: usize, perplexity: f64 },
    #[error("all pairwise distances vanish")]
    DegenerateDistances,
    #[error("silhouette requires at least two clusters")]
    SingleCluster,

    #[error("missing artifact {path}: run the producing stage first")]
    MissingArtifact { path: PathBuf },
    #[error("malformed artifact {path}: {reason}")]
    BadArtifact { path: PathBuf, reason: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable process exit code per error family, documented in the CLI.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Io { .. } => 2,
            BadMagic { .. } | TruncatedPayload { .. } | BadArtifact { .. } => 3,
            EmptyResult | DegenerateSplit | EmptyBatch | EmptyData | DegenerateData
            | DegenerateFeature(_) | DegenerateAttribution | DegenerateDistances
            | SingleCluster => 4,
            DimensionMismatch(_) | QubitOutOfRange { .. } | SameQubit | BadCoordinate(_)
            | NonBinaryInput => 5,
            MissingArtifact { .. } => 6,
            NonFinite | RankDeficient { .. } | NonFiniteAngle | UnnormalizedState
            | NonFiniteLoss | NotADistribution | NonFiniteValue | PerplexityTooLarge { .. } => 7,
            InvalidConfig(_) => 8,
        }
    }
}
