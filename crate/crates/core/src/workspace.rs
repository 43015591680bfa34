//! A directory of JSON files holding named corpora and factorizations.
//!
//! ```text
//! <root>/corpora/<name>.json
//! <root>/factorizations/<name>.json
//! ```
//!
//! Names are slugs (`[A-Za-z0-9_-]`, at most 64 characters). A stored
//! factorization records the corpus it was computed from and the topic
//! names assigned so far.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Label;
use crate::nmf::Factorization;
use crate::text::Corpus;
use crate::topics::{TopicError, TopicView};

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("invalid name {0:?}: use letters, digits, '-' or '_' (max 64)")]
    InvalidName(String),
    #[error("no {kind} named {name:?}")]
    NotFound { kind: &'static str, name: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Topic(#[from] TopicError),
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.len() <= 64
        && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

/// Turn arbitrary text into a valid name, or `None` if nothing usable is left.
pub fn slugify(text: &str) -> Option<String> {
    let mut out = String::new();
    for c in text.chars() {
        if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    let out: String = out.trim_matches('-').chars().take(64).collect();
    (!out.is_empty()).then_some(out)
}

/// A factorization as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredFactorization {
    pub corpus: String,
    pub topic_names: Vec<Label>,
    pub factorization: Factorization,
}

impl StoredFactorization {
    pub fn new(corpus: impl Into<String>, factorization: Factorization) -> Self {
        StoredFactorization {
            corpus: corpus.into(),
            topic_names: factorization.w.col_labels().to_vec(),
            factorization,
        }
    }

    pub fn view(&self) -> Result<TopicView, TopicError> {
        TopicView::with_names(self.factorization.clone(), self.topic_names.clone())
    }
}

#[derive(Debug, Clone)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn open(root: impl Into<PathBuf>) -> Self {
        Workspace { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, dir: &str, name: &str) -> Result<PathBuf, WorkspaceError> {
        if !is_valid_name(name) {
            return Err(WorkspaceError::InvalidName(name.to_string()));
        }
        Ok(self.root.join(dir).join(format!("{name}.json")))
    }

    fn write<T: Serialize>(&self, dir: &str, name: &str, value: &T) -> Result<PathBuf, WorkspaceError> {
        let path = self.path(dir, name)?;
        let io_err = |source| WorkspaceError::Io {
            path: path.display().to_string(),
            source,
        };
        fs::create_dir_all(path.parent().expect("joined path has a parent")).map_err(io_err)?;
        let text = serde_json::to_string_pretty(value).map_err(|source| WorkspaceError::Json {
            path: path.display().to_string(),
            source,
        })?;
        fs::write(&path, text + "\n").map_err(io_err)?;
        Ok(path)
    }

    fn read<T: for<'de> Deserialize<'de>>(&self, dir: &str, kind: &'static str, name: &str) -> Result<T, WorkspaceError> {
        let path = self.path(dir, name)?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(WorkspaceError::NotFound {
                    kind,
                    name: name.to_string(),
                })
            }
            Err(source) => {
                return Err(WorkspaceError::Io {
                    path: path.display().to_string(),
                    source,
                })
            }
        };
        serde_json::from_str(&text).map_err(|source| WorkspaceError::Json {
            path: path.display().to_string(),
            source,
        })
    }

    fn list(&self, dir: &str) -> Result<Vec<String>, WorkspaceError> {
        let path = self.root.join(dir);
        let entries = match fs::read_dir(&path) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(source) => {
                return Err(WorkspaceError::Io {
                    path: path.display().to_string(),
                    source,
                })
            }
        };
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let p = e.path();
                (p.extension()? == "json").then(|| p.file_stem()?.to_str().map(str::to_string))?
            })
            .filter(|n| is_valid_name(n))
            .collect();
        names.sort();
        Ok(names)
    }

    pub fn save_corpus(&self, name: &str, corpus: &Corpus) -> Result<PathBuf, WorkspaceError> {
        self.write("corpora", name, corpus)
    }

    pub fn load_corpus(&self, name: &str) -> Result<Corpus, WorkspaceError> {
        self.read("corpora", "corpus", name)
    }

    pub fn corpora(&self) -> Result<Vec<String>, WorkspaceError> {
        self.list("corpora")
    }

    /// Store a factorization; its corpus must already exist.
    pub fn save_factorization(&self, name: &str, f: &StoredFactorization) -> Result<PathBuf, WorkspaceError> {
        self.path("factorizations", name)?;
        if !self.path("corpora", &f.corpus)?.is_file() {
            return Err(WorkspaceError::NotFound {
                kind: "corpus",
                name: f.corpus.clone(),
            });
        }
        self.write("factorizations", name, f)
    }

    pub fn load_factorization(&self, name: &str) -> Result<StoredFactorization, WorkspaceError> {
        self.read("factorizations", "factorization", name)
    }

    pub fn factorizations(&self) -> Result<Vec<String>, WorkspaceError> {
        self.list("factorizations")
    }
}
