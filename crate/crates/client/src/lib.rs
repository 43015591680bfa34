//! Blocking client for the topicforge HTTP service.
//!
//! Each call returns the decoded payload together with the exact response
//! body, so callers can forward the server's bytes unchanged.

use reqwest::blocking::{Client as Http, RequestBuilder};
use reqwest::{StatusCode, Url};
use serde::de::DeserializeOwned;
use thiserror::Error;

use topicforge_core::nmf::NmfConfig;
use topicforge_core::query::{Query, QueryResult};
use topicforge_core::report::{
    CorpusRequest, CorpusSummary, ErrorBody, ExclusiveTerm, FactorizationSummary, RenameRequest, ResidualCurve,
    Sparsity,
};
use topicforge_core::topics::TopicReport;
use topicforge_core::workspace::StoredFactorization;
use topicforge_core::LabeledMatrix;

#[derive(Debug, Error)]
pub enum ClientError {
    /// The server answered with an error body.
    #[error("{status}: {message}")]
    Http {
        status: u16,
        error: String,
        message: String,
    },
    #[error("cannot reach server: {0}")]
    Transport(String),
    #[error("unexpected response: {0}")]
    Decode(String),
}

/// A decoded payload and the body it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Fetched<T> {
    pub value: T,
    pub body: String,
}

#[derive(Debug, Clone)]
pub struct Client {
    base: Url,
    http: Http,
}

impl Client {
    pub fn new(base_url: &str) -> Result<Self, ClientError> {
        let mut base = Url::parse(base_url).map_err(|e| ClientError::Transport(format!("{base_url}: {e}")))?;
        if base.cannot_be_a_base() {
            return Err(ClientError::Transport(format!("{base_url}: not a base URL")));
        }
        if !base.path().ends_with('/') {
            let path = format!("{}/", base.path());
            base.set_path(&path);
        }
        let http = Http::builder()
            .build()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(Client { base, http })
    }

    pub fn base_url(&self) -> &Url {
        &self.base
    }

    fn url(&self, segments: &[&str]) -> Url {
        let mut url = self.base.clone();
        url.path_segments_mut()
            .expect("checked in new")
            .pop_if_empty()
            .extend(segments);
        url
    }

    fn send_raw(&self, request: RequestBuilder) -> Result<(StatusCode, String), ClientError> {
        let response = request.send().map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = response.status();
        let body = response.text().map_err(|e| ClientError::Transport(e.to_string()))?;
        if status.is_success() {
            return Ok((status, body));
        }
        Err(match serde_json::from_str::<ErrorBody>(&body) {
            Ok(e) => ClientError::Http {
                status: status.as_u16(),
                error: e.error,
                message: e.message,
            },
            Err(_) => ClientError::Http {
                status: status.as_u16(),
                error: "unknown".into(),
                message: body,
            },
        })
    }

    fn send<T: DeserializeOwned>(&self, request: RequestBuilder) -> Result<Fetched<T>, ClientError> {
        let (_, body) = self.send_raw(request)?;
        let value = serde_json::from_str(&body).map_err(|e| ClientError::Decode(e.to_string()))?;
        Ok(Fetched { value, body })
    }

    fn get<T: DeserializeOwned>(&self, segments: &[&str]) -> Result<Fetched<T>, ClientError> {
        self.send(self.http.get(self.url(segments)))
    }

    pub fn create_corpus(&self, request: &CorpusRequest) -> Result<Fetched<CorpusSummary>, ClientError> {
        self.send(self.http.post(self.url(&["corpora"])).json(request))
    }

    pub fn corpora(&self) -> Result<Fetched<Vec<String>>, ClientError> {
        self.get(&["corpora"])
    }

    pub fn corpus(&self, id: &str) -> Result<Fetched<CorpusSummary>, ClientError> {
        self.get(&["corpora", id])
    }

    pub fn matrix(&self, id: &str) -> Result<Fetched<LabeledMatrix>, ClientError> {
        self.get(&["corpora", id, "matrix"])
    }

    pub fn query(&self, id: &str, query: &Query) -> Result<Fetched<QueryResult>, ClientError> {
        let (key, value) = match query {
            Query::Docs(d) => ("docs", d.join(",")),
            Query::Terms(t) => ("terms", t.join(",")),
            Query::Diff(a, b) => ("diff", format!("{a},{b}")),
        };
        self.send(self.http.get(self.url(&["corpora", id, "query"])).query(&[(key, value)]))
    }

    pub fn exclusive(&self, id: &str) -> Result<Fetched<Vec<ExclusiveTerm>>, ClientError> {
        self.get(&["corpora", id, "exclusive"])
    }

    pub fn sparsity(&self, id: &str) -> Result<Fetched<Sparsity>, ClientError> {
        self.get(&["corpora", id, "sparsity"])
    }

    pub fn factorize(&self, corpus: &str, config: &NmfConfig) -> Result<Fetched<FactorizationSummary>, ClientError> {
        self.send(
            self.http
                .post(self.url(&["corpora", corpus, "factorizations"]))
                .json(config),
        )
    }

    pub fn factorization(&self, id: &str) -> Result<Fetched<StoredFactorization>, ClientError> {
        self.get(&["factorizations", id])
    }

    pub fn topics(&self, id: &str, k: Option<usize>) -> Result<Fetched<TopicReport>, ClientError> {
        let mut request = self.http.get(self.url(&["factorizations", id, "topics"]));
        if let Some(k) = k {
            request = request.query(&[("k", k)]);
        }
        self.send(request)
    }

    pub fn rename_topic(&self, id: &str, topic: &str, name: &str) -> Result<(), ClientError> {
        let body = RenameRequest { name: name.to_string() };
        self.send_raw(
            self.http
                .patch(self.url(&["factorizations", id, "topics", topic]))
                .json(&body),
        )
        .map(|_| ())
    }

    pub fn residual_curve(&self, id: &str) -> Result<Fetched<ResidualCurve>, ClientError> {
        self.get(&["factorizations", id, "residual-curve"])
    }

    pub fn rank_one(&self, id: &str, topic: &str) -> Result<Fetched<LabeledMatrix>, ClientError> {
        self.get(&["factorizations", id, "rank-one", topic])
    }
}
