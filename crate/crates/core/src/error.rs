use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot normalize a (near) zero vector")]
    ZeroVector,

    #[error("argument {t} outside [-1, 1]")]
    Domain { t: f64 },

    #[error("harmonic index k={k} out of range for degree {degree}")]
    Index { degree: usize, k: usize },

    #[error("point within the pole exclusion zone of the spherical coordinate chart")]
    PoleProximity,

    #[error("vector is not tangent (normal component {normal:e})")]
    NotTangent { normal: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("duplicate scale factors in kernel combination")]
    DuplicateScale,

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{path}:{line}: row norm {norm} outside the accepted band around 1")]
    Norm { path: PathBuf, line: usize, norm: f64 },

    #[error("{0}: no points")]
    EmptyFile(PathBuf),

    #[error("interpolation matrix is not positive definite, even after diagonal jitter")]
    NotSpd,

    #[error("point set not available: {0}")]
    MissingPointSet(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("design refinement did not converge (residual {residual:e})")]
    DesignNotConverged { residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line driver: 2 for configuration
    /// problems, 3 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidKernel(_) | Error::DuplicateScale => 2,
            _ => 3,
        }
    }
}
