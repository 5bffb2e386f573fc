use std::path::PathBuf;

/// Process exit statuses.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const THRESHOLD_FAIL: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const RESOURCE: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("insufficient sample: {0}")]
    InsufficientSample(String),
    /// A simulation invariant broke; reported with the resource status.
    #[error("internal error: {0}")]
    Internal(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Io { .. } => exit::CONFIG,
            LabError::Resource(_) | LabError::InsufficientSample(_) | LabError::Internal(_) => exit::RESOURCE,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }
}

impl From<bbm_engine::BbmError> for LabError {
    fn from(e: bbm_engine::BbmError) -> Self {
        use bbm_engine::BbmError::*;
        match e {
            PopulationCap { .. } => LabError::Resource(e.to_string()),
            InsufficientSample { .. } => LabError::InsufficientSample(e.to_string()),
            Domain { .. } | InvalidLaw(_) | InvalidConfig(_) => LabError::Config(e.to_string()),
        }
    }
}

impl From<spine_bbm::SpineError> for LabError {
    fn from(e: spine_bbm::SpineError) -> Self {
        use spine_bbm::SpineError::*;
        match e {
            Engine(inner) => inner.into(),
            Excursion(inner) => inner.into(),
            Taboo(inner) => inner.into(),
            InsufficientSample { .. } => LabError::InsufficientSample(e.to_string()),
            Invariant(_) => LabError::Internal(e.to_string()),
            Domain { .. } | InvalidConfig(_) => LabError::Config(e.to_string()),
        }
    }
}

impl From<excursion_ppp::ExcursionError> for LabError {
    fn from(e: excursion_ppp::ExcursionError) -> Self {
        use excursion_ppp::ExcursionError::*;
        match e {
            Taboo(inner) => inner.into(),
            Domain { .. } => LabError::Config(e.to_string()),
            EmptyWindow { .. } | PathTooShort { .. } => LabError::Internal(e.to_string()),
        }
    }
}

impl From<taboo_diffusion::TabooError> for LabError {
    fn from(e: taboo_diffusion::TabooError) -> Self {
        LabError::Config(e.to_string())
    }
}

impl From<stat_lab::StatError> for LabError {
    fn from(e: stat_lab::StatError) -> Self {
        use stat_lab::StatError::*;
        match e {
            EmptySample | TooFewPoints { .. } => LabError::InsufficientSample(e.to_string()),
            _ => LabError::Internal(e.to_string()),
        }
    }
}
