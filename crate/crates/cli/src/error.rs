use emofuse_core::eval::EvalError;
use emofuse_core::features::FeatureError;
use emofuse_core::fusion::FusionError;
use emofuse_core::rules::RuleError;
use emofuse_core::skeleton::SkeletonError;
use emofuse_core::svm::SvmError;
use thiserror::Error;

/// Command failure, carrying the process exit code class.
#[derive(Debug, Error)]
pub enum CliError {
    /// Results disagree with the reference beyond tolerance (exit 1).
    #[error("{0}")]
    Diff(String),
    /// Malformed input data (exit 2).
    #[error("parse error: {0}")]
    Parse(String),
    /// Bad configuration, flags or semantically invalid inputs (exit 3).
    #[error("config error: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Diff(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Config(_) => 3,
        }
    }

    pub fn parse(context: impl std::fmt::Display, e: impl std::fmt::Display) -> Self {
        CliError::Parse(format!("{context}: {e}"))
    }

    pub fn config(context: impl std::fmt::Display, e: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{context}: {e}"))
    }
}

/// Attaches a context string (usually a path) while classifying the error.
pub trait Context<T> {
    fn context(self, what: impl std::fmt::Display) -> Result<T, CliError>;
}

pub trait Classify: std::fmt::Display {
    fn is_parse(&self) -> bool;
}

impl Classify for SkeletonError {
    fn is_parse(&self) -> bool {
        !matches!(self, SkeletonError::Config(_))
    }
}

impl Classify for FeatureError {
    fn is_parse(&self) -> bool {
        matches!(self, FeatureError::Csv { .. } | FeatureError::BadDescriptor(_))
    }
}

impl Classify for RuleError {
    fn is_parse(&self) -> bool {
        matches!(self, RuleError::Format(_))
    }
}

impl Classify for SvmError {
    fn is_parse(&self) -> bool {
        matches!(self, SvmError::Format(_))
    }
}

impl Classify for FusionError {
    fn is_parse(&self) -> bool {
        matches!(self, FusionError::Format { .. } | FusionError::UnknownSource(_))
    }
}

impl Classify for EvalError {
    fn is_parse(&self) -> bool {
        matches!(self, EvalError::Format { .. } | EvalError::Label(_))
    }
}

impl<T, E: Classify> Context<T> for Result<T, E> {
    fn context(self, what: impl std::fmt::Display) -> Result<T, CliError> {
        self.map_err(|e| if e.is_parse() { CliError::parse(what, e) } else { CliError::config(what, e) })
    }
}
