use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use topicforge_core::nmf::NmfError;
use topicforge_core::query::QueryError;
use topicforge_core::report::{to_json, ErrorBody};
use topicforge_core::text::TextError;
use topicforge_core::topics::TopicError;
use topicforge_core::workspace::WorkspaceError;
use topicforge_core::MatrixError;

/// An error response: `{"error": code, "message": text}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no {what} with id {id:?}"))
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = to_json(&ErrorBody {
            error: self.code.to_string(),
            message: self.message,
        });
        (self.status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

impl From<TextError> for ApiError {
    fn from(e: TextError) -> Self {
        match e {
            TextError::EmptyCorpus => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "empty_corpus", e.to_string()),
            TextError::NoDocuments => Self::bad_request("no_documents", e.to_string()),
            TextError::DuplicateDocumentId(_) => Self::bad_request("duplicate_document_id", e.to_string()),
            TextError::Matrix(m) => m.into(),
            other => Self::internal(other.to_string()),
        }
    }
}

impl From<MatrixError> for ApiError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::UnknownLabel(_) => Self::bad_request("unknown_label", e.to_string()),
            MatrixError::EmptyLabel => Self::bad_request("invalid_name", e.to_string()),
            _ => Self::bad_request("invalid_matrix", e.to_string()),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::UnknownLabel(_) => Self::bad_request("unknown_label", e.to_string()),
            QueryError::EmptySelection => Self::bad_request("empty_selection", e.to_string()),
            QueryError::Matrix(m) => m.into(),
        }
    }
}

impl From<NmfError> for ApiError {
    fn from(e: NmfError) -> Self {
        let code = match e {
            NmfError::RankTooLarge { .. } => "rank_too_large",
            NmfError::InvalidConfig(_) => "invalid_config",
            NmfError::NegativeInput { .. } => "negative_input",
            NmfError::ZeroColumn { .. } => "zero_column",
            NmfError::Matrix(_) => "invalid_matrix",
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string())
    }
}

impl From<TopicError> for ApiError {
    fn from(e: TopicError) -> Self {
        match e {
            TopicError::UnknownTopic(_) => Self::new(StatusCode::NOT_FOUND, "unknown_topic", e.to_string()),
            TopicError::UnknownDocument(_) => Self::new(StatusCode::NOT_FOUND, "unknown_document", e.to_string()),
            TopicError::DuplicateName(_) => Self::new(StatusCode::CONFLICT, "duplicate_name", e.to_string()),
            TopicError::KOutOfRange { .. } => Self::bad_request("k_out_of_range", e.to_string()),
            TopicError::Matrix(m) => m.into(),
        }
    }
}

impl From<WorkspaceError> for ApiError {
    fn from(e: WorkspaceError) -> Self {
        match e {
            WorkspaceError::Topic(t) => t.into(),
            other => Self::internal(other.to_string()),
        }
    }
}
