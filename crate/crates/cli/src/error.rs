use std::fmt;

use topicforge_client::ClientError;
use topicforge_core::nmf::NmfError;
use topicforge_core::query::QueryError;
use topicforge_core::text::TextError;
use topicforge_core::topics::TopicError;
use topicforge_core::workspace::WorkspaceError;
use topicforge_core::MatrixError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 2;
    pub const EMPTY: i32 = 3;
    pub const UNKNOWN: i32 = 4;
    pub const INVALID: i32 = 5;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(exit::IO, message)
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(exit::INVALID, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        let code = match e {
            MatrixError::UnknownLabel(_) => exit::UNKNOWN,
            MatrixError::Csv(_) => exit::IO,
            _ => exit::INVALID,
        };
        Self::new(code, e.to_string())
    }
}

impl From<TextError> for CliError {
    fn from(e: TextError) -> Self {
        let code = match e {
            TextError::EmptyCorpus => exit::EMPTY,
            TextError::Io { .. } | TextError::Parse { .. } | TextError::NoDocuments => exit::IO,
            TextError::DuplicateDocumentId(_) => exit::INVALID,
            TextError::Matrix(m) => return m.into(),
        };
        Self::new(code, e.to_string())
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        let code = match e {
            QueryError::UnknownLabel(_) => exit::UNKNOWN,
            QueryError::EmptySelection => exit::INVALID,
            QueryError::Matrix(m) => return m.into(),
        };
        Self::new(code, e.to_string())
    }
}

impl From<NmfError> for CliError {
    fn from(e: NmfError) -> Self {
        Self::invalid(e.to_string())
    }
}

impl From<TopicError> for CliError {
    fn from(e: TopicError) -> Self {
        let code = match e {
            TopicError::UnknownTopic(_) | TopicError::UnknownDocument(_) | TopicError::DuplicateName(_) => exit::UNKNOWN,
            TopicError::KOutOfRange { .. } => exit::INVALID,
            TopicError::Matrix(m) => return m.into(),
        };
        Self::new(code, e.to_string())
    }
}

impl From<WorkspaceError> for CliError {
    fn from(e: WorkspaceError) -> Self {
        let code = match e {
            WorkspaceError::NotFound { .. } => exit::UNKNOWN,
            WorkspaceError::InvalidName(_) => exit::INVALID,
            WorkspaceError::Io { .. } | WorkspaceError::Json { .. } => exit::IO,
            WorkspaceError::Topic(t) => return t.into(),
        };
        Self::new(code, e.to_string())
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        let code = match &e {
            ClientError::Http { status, error, .. } => match (*status, error.as_str()) {
                (404, _) | (409, _) | (400, "unknown_label") => exit::UNKNOWN,
                (422, "empty_corpus") => exit::EMPTY,
                _ => exit::INVALID,
            },
            ClientError::Transport(_) | ClientError::Decode(_) => exit::IO,
        };
        let message = match e {
            ClientError::Http { message, .. } => message,
            other => other.to_string(),
        };
        Self::new(code, message)
    }
}
