//! History mining: select source-file changes per commit and compute their
//! line-level and token-level diffs.

mod git;
mod memory;

pub use git::GitCli;
pub use memory::MemoryHistory;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diff::{diff, diff_by_key, DiffResult};
use crate::lex::{decode, lex_path, strip_comments_linewise, Language, Lexeme};

#[derive(Debug, thiserror::Error)]
pub enum MineError {
    #[error("cannot read repository {path}: {reason}")]
    Repo { path: String, reason: String },
    #[error("commit {commit} not found")]
    CommitNotFound { commit: String },
    #[error("path {path} is not changed by commit {commit}")]
    PathNotFound { commit: String, path: String },
    #[error("object {0} not found")]
    ObjectNotFound(String),
    #[error("git {command} failed: {stderr}")]
    Git { command: String, stderr: String },
    #[error("malformed history output: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MineError {
    pub fn is_not_found(&self) -> bool {
        matches!(
            self,
            MineError::CommitNotFound { .. } | MineError::PathNotFound { .. } | MineError::ObjectNotFound(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitMeta {
    pub id: String,
    pub parents: Vec<String>,
    pub message: String,
    pub timestamp: i64,
}

/// One path touched by a commit, diffed against the first parent (or the
/// empty tree for root commits). `None` marks the absent side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathChange {
    pub path: String,
    pub old_blob: Option<String>,
    pub new_blob: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryCommit {
    pub meta: CommitMeta,
    pub changes: Vec<PathChange>,
}

/// Read access to a version-control history.
pub trait HistoryReader: Send + Sync {
    /// All commits, oldest first, parents before children.
    fn commits(&self) -> Result<Vec<HistoryCommit>, MineError>;

    fn read_blob(&self, id: &str) -> Result<Vec<u8>, MineError>;

    /// Pre- and post-image of `path` at `commit_id`. The absent side of an
    /// added or deleted file is empty.
    fn file_pair(&self, commit_id: &str, path: &str) -> Result<(String, String), MineError> {
        let commits = self.commits()?;
        let commit = commits
            .iter()
            .find(|c| c.meta.id == commit_id)
            .ok_or_else(|| MineError::CommitNotFound {
                commit: commit_id.to_string(),
            })?;
        let change = commit
            .changes
            .iter()
            .find(|c| c.path == path)
            .ok_or_else(|| MineError::PathNotFound {
                commit: commit_id.to_string(),
                path: path.to_string(),
            })?;
        read_pair(self, change)
    }
}

fn read_side<R: HistoryReader + ?Sized>(reader: &R, blob: &Option<String>) -> Result<Vec<u8>, MineError> {
    match blob {
        Some(id) => reader.read_blob(id),
        None => Ok(Vec::new()),
    }
}

pub(crate) fn read_pair<R: HistoryReader + ?Sized>(
    reader: &R,
    change: &PathChange,
) -> Result<(String, String), MineError> {
    Ok((
        decode(&read_side(reader, &change.old_blob)?),
        decode(&read_side(reader, &change.new_blob)?),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MineConfig {
    pub languages: Vec<Language>,
    /// File extensions without the dot, compared case-insensitively.
    pub extensions: Vec<String>,
    pub include_merges: bool,
    /// Examine only the first N commits of history; 0 means all.
    pub max_commits: usize,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig {
            languages: vec![Language::C, Language::Java],
            extensions: vec!["c".into(), "h".into(), "java".into()],
            include_merges: false,
            max_commits: 0,
        }
    }
}

impl MineConfig {
    /// Language of `path` if it passes the extension and language filters.
    pub fn select(&self, path: &str) -> Option<Language> {
        let ext = path.rsplit_once('.')?.1.to_ascii_lowercase();
        if !self.extensions.iter().any(|e| e.to_ascii_lowercase() == ext) {
            return None;
        }
        Language::from_extension(&ext).filter(|lang| self.languages.contains(lang))
    }
}

/// A source line after comment stripping, with surrounding whitespace
/// trimmed. `number` is 1-based in the original file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceLine {
    pub number: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChange {
    pub path: String,
    pub language: Language,
    pub line_diff: DiffResult<SourceLine>,
    pub token_diff: DiffResult<Lexeme>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub commit_id: String,
    /// Position in history order among all commits of the repository.
    pub seq: u64,
    pub message: String,
    pub timestamp: i64,
    pub is_merge: bool,
    pub files: Vec<FileChange>,
}

impl CommitRecord {
    pub fn n_tokens_added(&self) -> usize {
        self.files.iter().map(|f| f.token_diff.n_added).sum()
    }

    pub fn n_tokens_removed(&self) -> usize {
        self.files.iter().map(|f| f.token_diff.n_removed).sum()
    }

    pub fn n_lines_added(&self) -> usize {
        self.files.iter().map(|f| f.line_diff.n_added).sum()
    }

    pub fn n_lines_removed(&self) -> usize {
        self.files.iter().map(|f| f.line_diff.n_removed).sum()
    }

    pub fn n_token_hunks(&self) -> usize {
        self.files.iter().map(|f| f.token_diff.hunks.len()).sum()
    }

    pub fn n_line_hunks(&self) -> usize {
        self.files.iter().map(|f| f.line_diff.hunks.len()).sum()
    }
}

/// Non-blank lines of `source` after comment stripping.
pub fn source_lines(source: &str, language: Language) -> Vec<SourceLine> {
    strip_comments_linewise(source, language)
        .split('\n')
        .enumerate()
        .filter_map(|(i, line)| {
            let text = line.trim();
            (!text.is_empty()).then(|| SourceLine {
                number: i + 1,
                text: text.to_string(),
            })
        })
        .collect()
}

fn whitespace_free(line: &SourceLine) -> String {
    line.text.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Line and token diffs of one file. `None` when no code line changed, i.e.
/// the edit only touched comments or whitespace.
pub fn diff_file(path: &str, language: Language, old: &str, new: &str) -> Option<FileChange> {
    let old_lines = source_lines(old, language);
    let new_lines = source_lines(new, language);
    let line_diff = diff_by_key(&old_lines, &new_lines, whitespace_free);
    if line_diff.is_empty() {
        return None;
    }
    let old_tokens = lex_path(path, old, language);
    let new_tokens = lex_path(path, new, language);
    if old_tokens.recovered || new_tokens.recovered {
        log::warn!("{path}: unterminated literal or comment, lexed in recovery mode");
    }
    let token_diff = diff(&old_tokens.lexemes(), &new_tokens.lexemes());
    Some(FileChange {
        path: path.to_string(),
        language,
        line_diff,
        token_diff,
    })
}

fn process_commit<R: HistoryReader + ?Sized>(
    reader: &R,
    config: &MineConfig,
    seq: u64,
    commit: &HistoryCommit,
) -> Option<CommitRecord> {
    let mut files = Vec::new();
    for change in &commit.changes {
        let Some(language) = config.select(&change.path) else {
            continue;
        };
        let (old, new) = match (read_side(reader, &change.old_blob), read_side(reader, &change.new_blob)) {
            (Ok(old), Ok(new)) => (old, new),
            (Err(e), _) | (_, Err(e)) => {
                log::warn!("{} {}: skipped, {e}", commit.meta.id, change.path);
                continue;
            }
        };
        if old.contains(&0) || new.contains(&0) {
            log::warn!("{} {}: skipped binary file", commit.meta.id, change.path);
            continue;
        }
        if let Some(fc) = diff_file(&change.path, language, &decode(&old), &decode(&new)) {
            files.push(fc);
        }
    }
    (!files.is_empty()).then(|| CommitRecord {
        commit_id: commit.meta.id.clone(),
        seq,
        message: commit.meta.message.clone(),
        timestamp: commit.meta.timestamp,
        is_merge: commit.meta.parents.len() > 1,
        files,
    })
}

const CHUNK: usize = 256;

/// Mines the history and hands each studied commit to `sink` in history
/// order. Commits for which `skip` returns true are not processed.
pub fn mine_each<R, S, F, E>(reader: &R, config: &MineConfig, skip: S, mut sink: F) -> Result<MineStats, E>
where
    R: HistoryReader + ?Sized,
    S: Fn(&str) -> bool + Sync,
    F: FnMut(CommitRecord) -> Result<(), E>,
    E: From<MineError>,
{
    let mut commits = reader.commits()?;
    if config.max_commits > 0 {
        commits.truncate(config.max_commits);
    }
    let mut stats = MineStats {
        n_commits: commits.len(),
        ..MineStats::default()
    };
    let candidates: Vec<(u64, &HistoryCommit)> = commits
        .iter()
        .enumerate()
        .filter(|(_, c)| config.include_merges || c.meta.parents.len() <= 1)
        .map(|(i, c)| (i as u64, c))
        .collect();
    stats.n_merges_skipped = commits.len() - candidates.len();
    for chunk in candidates.chunks(CHUNK) {
        let results: Vec<Option<Option<CommitRecord>>> = chunk
            .par_iter()
            .map(|(seq, commit)| (!skip(&commit.meta.id)).then(|| process_commit(reader, config, *seq, commit)))
            .collect();
        for result in results {
            match result {
                None => stats.n_skipped += 1,
                Some(Some(record)) => {
                    stats.n_studied += 1;
                    sink(record)?;
                }
                Some(None) => {}
            }
        }
    }
    Ok(stats)
}

/// Collects all studied commits.
pub fn mine<R: HistoryReader + ?Sized>(reader: &R, config: &MineConfig) -> Result<Vec<CommitRecord>, MineError> {
    let mut out = Vec::new();
    mine_each(
        reader,
        config,
        |_| false,
        |r| {
            out.push(r);
            Ok::<(), MineError>(())
        },
    )?;
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MineStats {
    /// Commits examined after the `max_commits` cut.
    pub n_commits: usize,
    pub n_merges_skipped: usize,
    /// Commits passed over because `skip` accepted them.
    pub n_skipped: usize,
    /// Newly mined studied commits.
    pub n_studied: usize,
}
