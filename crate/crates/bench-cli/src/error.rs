use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration or the command line is invalid.
    #[error("invalid {field}: {message}")]
    Config { field: String, message: String },
    /// The experiment failed while running or writing its output.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError::Runtime(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Runtime(_) => 2,
        }
    }

    /// Single-line JSON for `--format json`.
    pub fn to_json(&self) -> String {
        let v = match self {
            CliError::Config { field, message } => serde_json::json!({
                "error": "config",
                "field": field,
                "message": message,
            }),
            CliError::Runtime(m) => serde_json::json!({"error": "runtime", "message": m}),
        };
        v.to_string()
    }
}

impl From<banditconf::Error> for CliError {
    fn from(e: banditconf::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
