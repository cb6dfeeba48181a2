#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("configuration error: {0}")]
    Core(#[from] rqkz_core::Error),
    #[error("unknown check `{0}`; run `rqkz verify list` for the available names")]
    UnknownCheck(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed matrix dump: {0}")]
    Dump(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}
