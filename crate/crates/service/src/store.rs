//! In-memory session store with optional write-through to a workspace.

use std::collections::BTreeMap;
use std::sync::RwLock;

use topicforge_core::text::Corpus;
use topicforge_core::workspace::{StoredFactorization, Workspace, WorkspaceError};

#[derive(Default)]
struct Inner {
    corpora: BTreeMap<String, Corpus>,
    factorizations: BTreeMap<String, StoredFactorization>,
    next_corpus: u64,
    next_factorization: u64,
}

/// Corpora and factorizations keyed by opaque ids (`c<n>`, `f<n>`).
///
/// Reads take a shared lock; inserts and renames take it exclusively.
/// Corpora are never modified after insertion.
pub struct SessionStore {
    inner: RwLock<Inner>,
    workspace: Option<Workspace>,
}

fn id_number(id: &str, prefix: char) -> Option<u64> {
    id.strip_prefix(prefix)?.parse().ok()
}

impl SessionStore {
    pub fn in_memory() -> Self {
        SessionStore {
            inner: RwLock::new(Inner {
                next_corpus: 1,
                next_factorization: 1,
                ..Default::default()
            }),
            workspace: None,
        }
    }

    /// Load everything already in `workspace` and persist new entries there.
    pub fn with_workspace(workspace: Workspace) -> Result<Self, WorkspaceError> {
        let mut inner = Inner {
            next_corpus: 1,
            next_factorization: 1,
            ..Default::default()
        };
        for name in workspace.corpora()? {
            if let Some(n) = id_number(&name, 'c') {
                inner.next_corpus = inner.next_corpus.max(n + 1);
            }
            inner.corpora.insert(name.clone(), workspace.load_corpus(&name)?);
        }
        for name in workspace.factorizations()? {
            let f = workspace.load_factorization(&name)?;
            if !inner.corpora.contains_key(&f.corpus) {
                continue;
            }
            if let Some(n) = id_number(&name, 'f') {
                inner.next_factorization = inner.next_factorization.max(n + 1);
            }
            inner.factorizations.insert(name, f);
        }
        Ok(SessionStore {
            inner: RwLock::new(inner),
            workspace: Some(workspace),
        })
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Inner> {
        self.inner.read().unwrap_or_else(|e| e.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, Inner> {
        self.inner.write().unwrap_or_else(|e| e.into_inner())
    }

    pub fn insert_corpus(&self, corpus: Corpus) -> Result<String, WorkspaceError> {
        let mut inner = self.write();
        let id = loop {
            let id = format!("c{}", inner.next_corpus);
            inner.next_corpus += 1;
            if !inner.corpora.contains_key(&id) {
                break id;
            }
        };
        if let Some(ws) = &self.workspace {
            ws.save_corpus(&id, &corpus)?;
        }
        inner.corpora.insert(id.clone(), corpus);
        Ok(id)
    }

    pub fn corpus(&self, id: &str) -> Option<Corpus> {
        self.read().corpora.get(id).cloned()
    }

    pub fn corpus_ids(&self) -> Vec<String> {
        self.read().corpora.keys().cloned().collect()
    }

    /// Returns `None` when the referenced corpus does not exist.
    pub fn insert_factorization(&self, f: StoredFactorization) -> Result<Option<String>, WorkspaceError> {
        let mut inner = self.write();
        if !inner.corpora.contains_key(&f.corpus) {
            return Ok(None);
        }
        let id = loop {
            let id = format!("f{}", inner.next_factorization);
            inner.next_factorization += 1;
            if !inner.factorizations.contains_key(&id) {
                break id;
            }
        };
        if let Some(ws) = &self.workspace {
            ws.save_factorization(&id, &f)?;
        }
        inner.factorizations.insert(id.clone(), f);
        Ok(Some(id))
    }

    pub fn factorization(&self, id: &str) -> Option<StoredFactorization> {
        self.read().factorizations.get(id).cloned()
    }

    /// Apply `update` to a stored factorization under the write lock.
    pub fn update_factorization<E>(
        &self,
        id: &str,
        update: impl FnOnce(&StoredFactorization) -> Result<StoredFactorization, E>,
    ) -> Option<Result<(), E>>
    where
        E: From<WorkspaceError>,
    {
        let mut inner = self.write();
        let current = inner.factorizations.get(id)?;
        let next = match update(current) {
            Ok(n) => n,
            Err(e) => return Some(Err(e)),
        };
        if let Some(ws) = &self.workspace {
            if let Err(e) = ws.save_factorization(id, &next) {
                return Some(Err(e.into()));
            }
        }
        inner.factorizations.insert(id.to_string(), next);
        Some(Ok(()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use topicforge_core::nmf::{factorize, NmfConfig};
    use topicforge_core::LabeledMatrix;

    fn corpus() -> Corpus {
        Corpus::from_matrix(LabeledMatrix::from_rows(&["a", "b"], &["x", "y"], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap())
    }

    #[test]
    fn ids_are_sequential_and_factorizations_need_a_corpus() {
        let store = SessionStore::in_memory();
        assert_eq!(store.insert_corpus(corpus()).unwrap(), "c1");
        assert_eq!(store.insert_corpus(corpus()).unwrap(), "c2");
        let f = factorize(&corpus().matrix, &NmfConfig::new(1)).unwrap();
        assert_eq!(store.insert_factorization(StoredFactorization::new("c9", f.clone())).unwrap(), None);
        assert_eq!(store.insert_factorization(StoredFactorization::new("c1", f)).unwrap().as_deref(), Some("f1"));
        assert_eq!(store.corpus_ids(), vec!["c1", "c2"]);
    }

    #[test]
    fn workspace_persistence_survives_restart() {
        let dir = std::env::temp_dir().join(format!("tf-store-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        {
            let store = SessionStore::with_workspace(Workspace::open(&dir)).unwrap();
            store.insert_corpus(corpus()).unwrap();
        }
        let store = SessionStore::with_workspace(Workspace::open(&dir)).unwrap();
        assert!(store.corpus("c1").is_some());
        assert_eq!(store.insert_corpus(corpus()).unwrap(), "c2");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
