use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] sasaki_core::Error),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    /// 1 usage, 2 validation, 3 mathematical, 4 infrastructure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_mathematical() => 3,
            CliError::Core(_) | CliError::Config(_) => 2,
            CliError::Io(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "usage",
            2 => "validation",
            3 => "mathematical",
            _ => "io",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        let mut s = serde_json::to_string_pretty(&Report {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .expect("report serializes");
        s.push('\n');
        s
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
