use serde_json::{json, Value};

/// How a subcommand failed; decides the exit code.
#[derive(Debug)]
pub enum CmdError {
    /// Bad flags or parameters: exit 2.
    Usage(String),
    /// Numerical or validation failure: exit 1 with this JSON on stderr.
    Failed(Value),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => 2,
            CmdError::Failed(_) => 1,
        }
    }

    pub fn report(&self) {
        match self {
            CmdError::Usage(msg) => {
                eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            }
            CmdError::Failed(v) => {
                eprintln!("{}", serde_json::to_string_pretty(v).expect("diagnostic serializes"));
            }
        }
    }
}

impl From<minorkern::Error> for CmdError {
    fn from(e: minorkern::Error) -> Self {
        use minorkern::Error::*;
        match e {
            Parameter(_) | Range(_) | Argument(_) => CmdError::Usage(e.to_string()),
            Numeric { message, achieved } => CmdError::Failed(json!({
                "error": "numeric",
                "message": message,
                "achieved": achieved,
            })),
        }
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Failed(json!({ "error": "io", "message": e.to_string() }))
    }
}
