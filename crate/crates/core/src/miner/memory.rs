use std::collections::{BTreeMap, HashMap};

use super::{CommitMeta, HistoryCommit, HistoryReader, MineError, PathChange};

/// A linear in-memory history, built commit by commit.
#[derive(Debug, Clone, Default)]
pub struct MemoryHistory {
    commits: Vec<HistoryCommit>,
    blobs: HashMap<String, Vec<u8>>,
    tree: BTreeMap<String, String>,
}

impl MemoryHistory {
    pub fn new() -> Self {
        Self::default()
    }

    fn store_blob(&mut self, content: &[u8]) -> String {
        let id = format!("b{:039x}", self.blobs.len() + 1);
        self.blobs.insert(id.clone(), content.to_vec());
        id
    }

    /// Appends a commit. `None` content deletes the path. Returns the id.
    pub fn commit(&mut self, message: &str, timestamp: i64, files: &[(&str, Option<&str>)]) -> String {
        let bytes: Vec<(&str, Option<&[u8]>)> = files.iter().map(|(p, c)| (*p, c.map(str::as_bytes))).collect();
        self.commit_bytes(message, timestamp, &bytes, false)
    }

    /// Like [`MemoryHistory::commit`] with a second, synthetic parent.
    pub fn merge(&mut self, message: &str, timestamp: i64, files: &[(&str, Option<&str>)]) -> String {
        let bytes: Vec<(&str, Option<&[u8]>)> = files.iter().map(|(p, c)| (*p, c.map(str::as_bytes))).collect();
        self.commit_bytes(message, timestamp, &bytes, true)
    }

    pub fn commit_bytes(
        &mut self,
        message: &str,
        timestamp: i64,
        files: &[(&str, Option<&[u8]>)],
        merge: bool,
    ) -> String {
        let id = format!("{:040x}", self.commits.len() + 1);
        let mut parents: Vec<String> = self.commits.last().map(|c| c.meta.id.clone()).into_iter().collect();
        if merge {
            parents.push(format!("f{:039x}", self.commits.len() + 1));
        }
        let mut changes = Vec::new();
        for (path, content) in files {
            let old_blob = self.tree.get(*path).cloned();
            if let (Some(old), Some(new)) = (&old_blob, content) {
                if self.blobs[old] == *new {
                    continue;
                }
            }
            let new_blob = content.map(|c| self.store_blob(c));
            match &new_blob {
                Some(b) => self.tree.insert(path.to_string(), b.clone()),
                None => self.tree.remove(*path),
            };
            if old_blob.is_some() || new_blob.is_some() {
                changes.push(PathChange {
                    path: path.to_string(),
                    old_blob,
                    new_blob,
                });
            }
        }
        changes.sort_by(|a, b| a.path.cmp(&b.path));
        self.commits.push(HistoryCommit {
            meta: CommitMeta {
                id: id.clone(),
                parents,
                message: message.to_string(),
                timestamp,
            },
            changes,
        });
        id
    }
}

impl HistoryReader for MemoryHistory {
    fn commits(&self) -> Result<Vec<HistoryCommit>, MineError> {
        Ok(self.commits.clone())
    }

    fn read_blob(&self, id: &str) -> Result<Vec<u8>, MineError> {
        self.blobs
            .get(id)
            .cloned()
            .ok_or_else(|| MineError::ObjectNotFound(id.to_string()))
    }
}
