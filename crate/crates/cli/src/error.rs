use std::fmt;
use std::path::Path;

/// Failure of a command, carrying the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, state spec or parameter values.
    Usage(String),
    /// Reading or writing a file failed.
    Io(String),
    /// A searched bound or checked property was violated.
    Falsified(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Falsified(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Falsified(m) => write!(f, "falsified: {m}"),
        }
    }
}

impl From<spinphase::Error> for CliError {
    fn from(e: spinphase::Error) -> Self {
        use spinphase::Error as E;
        match e {
            E::BoundFalsified { .. } | E::PropertyViolation(_) => CliError::Falsified(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        let bound = spinphase::Error::BoundFalsified {
            message: "m".into(),
            witness: "w".into(),
        };
        assert_eq!(CliError::from(bound).exit_code(), 4);
        assert_eq!(CliError::from(spinphase::Error::Domain("x".into())).exit_code(), 2);
        let io = CliError::io(Path::new("f"), std::io::Error::other("x"));
        assert_eq!(io.exit_code(), 3);
    }
}
