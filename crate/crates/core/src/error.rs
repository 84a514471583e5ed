use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}x{expected}, found {found}x{found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported matrix dimension {0} (only 2 and 4 are supported)")]
    UnsupportedDimension(usize),

    #[error("matrix has a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    Trace(f64),

    #[error("{name} = {value} is outside [0, 1]")]
    OutOfUnitInterval { name: &'static str, value: f64 },

    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),

    #[error("measurement directions {0} and {1} are parallel or anti-parallel")]
    ParallelDirections(usize, usize),

    #[error("unsupported number of settings {0} (expected one of 2, 3, 4, 6, 10, 16)")]
    UnsupportedSettings(usize),

    #[error("{found} directions supplied for a {expected}-setting set")]
    SettingCount { expected: usize, found: usize },

    #[error("scenario needs at least one Alice and one Bob")]
    NoObservers,

    #[error("observer pair (A{i}, B{p}) is out of range for {alices} Alices and {bobs} Bobs")]
    ObserverOutOfRange {
        i: usize,
        p: usize,
        alices: usize,
        bobs: usize,
    },

    #[error("grid step {0} must lie in (0, 0.5]")]
    GridStep(f64),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<f64> {
        if (0.0..=1.0).contains(&value) {
            Ok(value)
        } else {
            Err(Error::OutOfUnitInterval { name, value })
        }
    }
}
