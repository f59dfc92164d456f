use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] zeno_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
        }
    }

    /// One-line `error: kind=... message="..."` diagnostic.
    pub fn diagnostic(&self) -> String {
        let message = self.to_string().replace('\n', " ").replace('"', "'");
        format!("error: kind={} code={} message=\"{}\"", self.kind(), self.exit_code(), message)
    }
}
