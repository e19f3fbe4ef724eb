//! Single-file SQLite store for mined commits and their labels.

mod filter;

pub use filter::{CmpOp, Expr, Filter, FilterError, Literal, COLUMNS};

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rusqlite::types::ValueRef;
use rusqlite::{params, params_from_iter, Connection, OptionalExtension, Transaction};
use serde::{Deserialize, Serialize};

use crate::diff::{DiffResult, Hunk};
use crate::lex::{Language, Lexeme, TokenType};
use crate::miner::{CommitRecord, FileChange, SourceLine};

pub const SCHEMA_VERSION: &str = "1";

/// Tables that [`Store::export_csv`] accepts.
pub const TABLES: &[&str] = &[
    "commits",
    "file_changes",
    "hunks",
    "token_changes",
    "line_changes",
    "labels",
    "meta",
];

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS commits (
    commit_id TEXT PRIMARY KEY,
    seq INTEGER NOT NULL,
    message TEXT NOT NULL,
    timestamp INTEGER NOT NULL,
    is_merge INTEGER NOT NULL,
    n_files INTEGER NOT NULL,
    n_tokens_added INTEGER NOT NULL,
    n_tokens_removed INTEGER NOT NULL,
    n_lines_added INTEGER NOT NULL,
    n_lines_removed INTEGER NOT NULL,
    n_hunks INTEGER NOT NULL,
    n_line_hunks INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS commits_order ON commits (timestamp, seq);
CREATE TABLE IF NOT EXISTS file_changes (
    commit_id TEXT NOT NULL REFERENCES commits (commit_id) ON DELETE CASCADE,
    file_index INTEGER NOT NULL,
    path TEXT NOT NULL,
    language TEXT NOT NULL,
    n_tokens_added INTEGER NOT NULL,
    n_tokens_removed INTEGER NOT NULL,
    n_lines_added INTEGER NOT NULL,
    n_lines_removed INTEGER NOT NULL,
    UNIQUE (commit_id, path)
);
CREATE TABLE IF NOT EXISTS hunks (
    commit_id TEXT NOT NULL REFERENCES commits (commit_id) ON DELETE CASCADE,
    path TEXT NOT NULL,
    granularity TEXT NOT NULL CHECK (granularity IN ('token', 'line')),
    hunk_index INTEGER NOT NULL,
    old_start INTEGER NOT NULL,
    old_count INTEGER NOT NULL,
    new_start INTEGER NOT NULL,
    new_count INTEGER NOT NULL,
    PRIMARY KEY (commit_id, path, granularity, hunk_index)
);
CREATE TABLE IF NOT EXISTS token_changes (
    commit_id TEXT NOT NULL REFERENCES commits (commit_id) ON DELETE CASCADE,
    path TEXT NOT NULL,
    hunk_index INTEGER NOT NULL,
    sign TEXT NOT NULL CHECK (sign IN ('+', '-')),
    position INTEGER NOT NULL,
    token_type TEXT NOT NULL,
    token_text TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS token_changes_commit ON token_changes (commit_id);
CREATE TABLE IF NOT EXISTS line_changes (
    commit_id TEXT NOT NULL REFERENCES commits (commit_id) ON DELETE CASCADE,
    path TEXT NOT NULL,
    hunk_index INTEGER NOT NULL,
    sign TEXT NOT NULL CHECK (sign IN ('+', '-')),
    position INTEGER NOT NULL,
    line_number INTEGER NOT NULL,
    text TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS line_changes_commit ON line_changes (commit_id);
CREATE TABLE IF NOT EXISTS labels (
    commit_id TEXT NOT NULL REFERENCES commits (commit_id) ON DELETE CASCADE,
    scheme TEXT NOT NULL CHECK (scheme IN ('detector', 'maintenance', 'taxonomy')),
    label TEXT NOT NULL,
    confidence REAL,
    UNIQUE (commit_id, scheme, label)
);
CREATE INDEX IF NOT EXISTS labels_scheme ON labels (scheme, label);
";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Sqlite(#[from] rusqlite::Error),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("database schema version {found} is not supported (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: String },
    #[error("stored row is malformed: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Detector,
    Maintenance,
    Taxonomy,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Detector => "detector",
            Scheme::Maintenance => "maintenance",
            Scheme::Taxonomy => "taxonomy",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "detector" => Ok(Scheme::Detector),
            "maintenance" => Ok(Scheme::Maintenance),
            "taxonomy" => Ok(Scheme::Taxonomy),
            _ => Err(format!("unknown label scheme `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub commit_id: String,
    pub label: String,
    pub confidence: Option<f64>,
}

impl LabelRow {
    pub fn new(commit_id: impl Into<String>, label: impl Into<String>) -> Self {
        LabelRow {
            commit_id: commit_id.into(),
            label: label.into(),
            confidence: None,
        }
    }
}

/// The `commits` row of a stored commit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitSummary {
    pub commit_id: String,
    pub seq: u64,
    pub message: String,
    pub timestamp: i64,
    pub is_merge: bool,
    pub n_files: usize,
    pub n_tokens_added: usize,
    pub n_tokens_removed: usize,
    pub n_lines_added: usize,
    pub n_lines_removed: usize,
    /// Token hunks across all files.
    pub n_hunks: usize,
    pub n_line_hunks: usize,
}

impl CommitSummary {
    pub fn of(record: &CommitRecord) -> Self {
        CommitSummary {
            commit_id: record.commit_id.clone(),
            seq: record.seq,
            message: record.message.clone(),
            timestamp: record.timestamp,
            is_merge: record.is_merge,
            n_files: record.files.len(),
            n_tokens_added: record.n_tokens_added(),
            n_tokens_removed: record.n_tokens_removed(),
            n_lines_added: record.n_lines_added(),
            n_lines_removed: record.n_lines_removed(),
            n_hunks: record.n_token_hunks(),
            n_line_hunks: record.n_line_hunks(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub n_commits: usize,
    pub problems: Vec<String>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.problems.is_empty()
    }
}

pub struct Store {
    conn: Connection,
}

fn to_i64(n: usize) -> i64 {
    i64::try_from(n).expect("count fits in i64")
}

fn to_usize(n: i64) -> Result<usize, StoreError> {
    usize::try_from(n).map_err(|_| StoreError::Corrupt(format!("negative count {n}")))
}

impl Store {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let conn = Connection::open(path)?;
        conn.query_row("PRAGMA journal_mode = WAL", [], |r| r.get::<_, String>(0))?;
        conn.execute_batch("PRAGMA synchronous = NORMAL;")?;
        Self::init(conn)
    }

    pub fn open_in_memory() -> Result<Self, StoreError> {
        Self::init(Connection::open_in_memory()?)
    }

    fn init(conn: Connection) -> Result<Self, StoreError> {
        conn.execute_batch("PRAGMA foreign_keys = ON;")?;
        conn.busy_timeout(std::time::Duration::from_secs(30))?;
        conn.execute_batch(SCHEMA)?;
        let found: Option<String> = conn
            .query_row("SELECT value FROM meta WHERE key = 'schema_version'", [], |r| r.get(0))
            .optional()?;
        match found {
            Some(v) if v != SCHEMA_VERSION => return Err(StoreError::SchemaVersion { found: v }),
            Some(_) => {}
            None => {
                conn.execute(
                    "INSERT INTO meta (key, value) VALUES ('schema_version', ?1)",
                    [SCHEMA_VERSION],
                )?;
            }
        }
        Ok(Store { conn })
    }

    pub fn set_meta(&self, key: &str, value: &str) -> Result<(), StoreError> {
        self.conn.execute(
            "INSERT INTO meta (key, value) VALUES (?1, ?2)
             ON CONFLICT (key) DO UPDATE SET value = excluded.value",
            [key, value],
        )?;
        Ok(())
    }

    pub fn meta(&self, key: &str) -> Result<Option<String>, StoreError> {
        Ok(self
            .conn
            .query_row("SELECT value FROM meta WHERE key = ?1", [key], |r| r.get(0))
            .optional()?)
    }

    pub fn put(&mut self, record: &CommitRecord) -> Result<(), StoreError> {
        self.put_batch(std::slice::from_ref(record))
    }

    /// Stores the records in one transaction, replacing any earlier rows
    /// (labels included) of the same commits.
    pub fn put_batch(&mut self, records: &[CommitRecord]) -> Result<(), StoreError> {
        let tx = self.conn.transaction()?;
        for record in records {
            insert_record(&tx, record)?;
        }
        tx.commit()?;
        Ok(())
    }

    pub fn contains(&self, commit_id: &str) -> Result<bool, StoreError> {
        Ok(self
            .conn
            .query_row("SELECT 1 FROM commits WHERE commit_id = ?1", [commit_id], |_| Ok(()))
            .optional()?
            .is_some())
    }

    pub fn commit_ids(&self) -> Result<HashSet<String>, StoreError> {
        let mut stmt = self.conn.prepare("SELECT commit_id FROM commits")?;
        let ids = stmt.query_map([], |r| r.get(0))?.collect::<Result<_, _>>()?;
        Ok(ids)
    }

    pub fn count(&self) -> Result<usize, StoreError> {
        to_usize(self.conn.query_row("SELECT COUNT(*) FROM commits", [], |r| r.get(0))?)
    }

    pub fn get(&self, commit_id: &str) -> Result<Option<CommitRecord>, StoreError> {
        let Some(summary) = self.summary(commit_id)? else {
            return Ok(None);
        };
        let mut stmt = self
            .conn
            .prepare_cached("SELECT path, language FROM file_changes WHERE commit_id = ?1 ORDER BY file_index")?;
        let files: Vec<(String, String)> = stmt
            .query_map([commit_id], |r| Ok((r.get(0)?, r.get(1)?)))?
            .collect::<Result<_, _>>()?;
        let mut changes = Vec::with_capacity(files.len());
        for (path, language) in files {
            let language = Language::from_str(&language).map_err(|e| StoreError::Corrupt(e.to_string()))?;
            let token_diff = self.load_diff(commit_id, &path, "token", |text, kind, _| {
                let kind = TokenType::from_str(&kind).map_err(|e| StoreError::Corrupt(e.to_string()))?;
                Ok(Lexeme::new(kind, text))
            })?;
            let line_diff = self.load_diff(commit_id, &path, "line", |text, _, number| {
                Ok(SourceLine {
                    number: to_usize(number)?,
                    text,
                })
            })?;
            changes.push(FileChange {
                path,
                language,
                line_diff,
                token_diff,
            });
        }
        Ok(Some(CommitRecord {
            commit_id: summary.commit_id,
            seq: summary.seq,
            message: summary.message,
            timestamp: summary.timestamp,
            is_merge: summary.is_merge,
            files: changes,
        }))
    }

    fn load_diff<T>(
        &self,
        commit_id: &str,
        path: &str,
        granularity: &str,
        mut unit: impl FnMut(String, String, i64) -> Result<T, StoreError>,
    ) -> Result<DiffResult<T>, StoreError> {
        let mut stmt = self.conn.prepare_cached(
            "SELECT hunk_index, old_start, old_count, new_start, new_count FROM hunks
             WHERE commit_id = ?1 AND path = ?2 AND granularity = ?3 ORDER BY hunk_index",
        )?;
        let shapes: Vec<(i64, i64, i64, i64, i64)> = stmt
            .query_map(params![commit_id, path, granularity], |r| {
                Ok((r.get(0)?, r.get(1)?, r.get(2)?, r.get(3)?, r.get(4)?))
            })?
            .collect::<Result<_, _>>()?;
        let mut hunks: Vec<Hunk<T>> = Vec::with_capacity(shapes.len());
        let mut index: HashMap<i64, usize> = HashMap::new();
        for (i, &(hunk_index, old_start, _, new_start, _)) in shapes.iter().enumerate() {
            index.insert(hunk_index, i);
            hunks.push(Hunk {
                old_start: to_usize(old_start)?,
                new_start: to_usize(new_start)?,
                removed: Vec::new(),
                added: Vec::new(),
            });
        }
        let sql = if granularity == "token" {
            "SELECT hunk_index, sign, token_text, token_type, 0 FROM token_changes
             WHERE commit_id = ?1 AND path = ?2 ORDER BY hunk_index, sign DESC, position"
        } else {
            "SELECT hunk_index, sign, text, '', line_number FROM line_changes
             WHERE commit_id = ?1 AND path = ?2 ORDER BY hunk_index, sign DESC, position"
        };
        let mut stmt = self.conn.prepare_cached(sql)?;
        let mut rows = stmt.query(params![commit_id, path])?;
        while let Some(row) = rows.next()? {
            let hunk_index: i64 = row.get(0)?;
            let sign: String = row.get(1)?;
            let slot = *index
                .get(&hunk_index)
                .ok_or_else(|| StoreError::Corrupt(format!("{commit_id} {path}: change without hunk {hunk_index}")))?;
            let value = unit(row.get(2)?, row.get(3)?, row.get(4)?)?;
            match sign.as_str() {
                "-" => hunks[slot].removed.push(value),
                _ => hunks[slot].added.push(value),
            }
        }
        for (h, &(_, _, old_count, _, new_count)) in hunks.iter().zip(&shapes) {
            if to_i64(h.removed.len()) != old_count || to_i64(h.added.len()) != new_count {
                return Err(StoreError::Corrupt(format!(
                    "{commit_id} {path}: {granularity} hunk counts disagree with change rows"
                )));
            }
        }
        Ok(DiffResult::from_hunks(hunks))
    }

    fn summary(&self, commit_id: &str) -> Result<Option<CommitSummary>, StoreError> {
        let mut stmt = self.conn.prepare_cached(&format!(
            "SELECT {} FROM commits c WHERE commit_id = ?1",
            COLUMNS.join(", ")
        ))?;
        let row = stmt.query_row([commit_id], read_summary).optional()?;
        Ok(row)
    }

    /// Summaries of commits matching `filter`, ordered by timestamp and then
    /// history position.
    pub fn query(&self, filter: &Filter) -> Result<Vec<CommitSummary>, StoreError> {
        let (cond, values) = filter.to_sql();
        let sql = format!(
            "SELECT {} FROM commits c WHERE {cond} ORDER BY c.timestamp, c.seq",
            COLUMNS.iter().map(|c| format!("c.{c}")).collect::<Vec<_>>().join(", ")
        );
        let mut stmt = self.conn.prepare(&sql)?;
        let rows = stmt
            .query_map(params_from_iter(values), read_summary)?
            .collect::<Result<_, _>>()?;
        Ok(rows)
    }

    pub fn query_str(&self, filter: &str) -> Result<Vec<CommitSummary>, StoreError> {
        self.query(&Filter::parse(filter)?)
    }

    /// Replaces every label of `scheme` with `rows` in one transaction.
    pub fn replace_labels(&mut self, scheme: Scheme, rows: &[LabelRow]) -> Result<(), StoreError> {
        let tx = self.conn.transaction()?;
        tx.execute("DELETE FROM labels WHERE scheme = ?1", [scheme.as_str()])?;
        {
            let mut stmt = tx.prepare(
                "INSERT OR REPLACE INTO labels (commit_id, scheme, label, confidence) VALUES (?1, ?2, ?3, ?4)",
            )?;
            for row in rows {
                stmt.execute(params![row.commit_id, scheme.as_str(), row.label, row.confidence])?;
            }
        }
        tx.commit()?;
        Ok(())
    }

    /// Labels of `scheme` by commit id, each list in label order.
    pub fn labels(&self, scheme: Scheme) -> Result<HashMap<String, Vec<LabelRow>>, StoreError> {
        let mut stmt = self
            .conn
            .prepare("SELECT commit_id, label, confidence FROM labels WHERE scheme = ?1 ORDER BY commit_id, label")?;
        let mut out: HashMap<String, Vec<LabelRow>> = HashMap::new();
        let rows = stmt.query_map([scheme.as_str()], |r| {
            Ok(LabelRow {
                commit_id: r.get(0)?,
                label: r.get(1)?,
                confidence: r.get(2)?,
            })
        })?;
        for row in rows {
            let row = row?;
            out.entry(row.commit_id.clone()).or_default().push(row);
        }
        Ok(out)
    }

    /// Ids of commits carrying `label` under `scheme`.
    pub fn labeled(&self, scheme: Scheme, label: &str) -> Result<HashSet<String>, StoreError> {
        let mut stmt = self
            .conn
            .prepare("SELECT commit_id FROM labels WHERE scheme = ?1 AND label = ?2")?;
        let ids = stmt
            .query_map([scheme.as_str(), label], |r| r.get(0))?
            .collect::<Result<_, _>>()?;
        Ok(ids)
    }

    /// Recomputes every aggregate column from detail rows and reports any
    /// mismatch or dangling row.
    pub fn audit(&self) -> Result<AuditReport, StoreError> {
        let checks: &[(&str, &str)] = &[
            (
                "commits.n_tokens_added/removed differ from token_changes",
                "SELECT c.commit_id FROM commits c WHERE
                   c.n_tokens_added <> (SELECT COUNT(*) FROM token_changes t WHERE t.commit_id = c.commit_id AND t.sign = '+')
                OR c.n_tokens_removed <> (SELECT COUNT(*) FROM token_changes t WHERE t.commit_id = c.commit_id AND t.sign = '-')",
            ),
            (
                "commits.n_lines_added/removed differ from line_changes",
                "SELECT c.commit_id FROM commits c WHERE
                   c.n_lines_added <> (SELECT COUNT(*) FROM line_changes t WHERE t.commit_id = c.commit_id AND t.sign = '+')
                OR c.n_lines_removed <> (SELECT COUNT(*) FROM line_changes t WHERE t.commit_id = c.commit_id AND t.sign = '-')",
            ),
            (
                "commits.n_files differs from file_changes",
                "SELECT c.commit_id FROM commits c WHERE
                   c.n_files <> (SELECT COUNT(*) FROM file_changes f WHERE f.commit_id = c.commit_id)",
            ),
            (
                "commits.n_hunks/n_line_hunks differ from hunks",
                "SELECT c.commit_id FROM commits c WHERE
                   c.n_hunks <> (SELECT COUNT(*) FROM hunks h WHERE h.commit_id = c.commit_id AND h.granularity = 'token')
                OR c.n_line_hunks <> (SELECT COUNT(*) FROM hunks h WHERE h.commit_id = c.commit_id AND h.granularity = 'line')",
            ),
            (
                "file_changes token counts differ from token_changes",
                "SELECT f.commit_id || ' ' || f.path FROM file_changes f WHERE
                   f.n_tokens_added <> (SELECT COUNT(*) FROM token_changes t WHERE t.commit_id = f.commit_id AND t.path = f.path AND t.sign = '+')
                OR f.n_tokens_removed <> (SELECT COUNT(*) FROM token_changes t WHERE t.commit_id = f.commit_id AND t.path = f.path AND t.sign = '-')",
            ),
            (
                "hunk counts differ from change rows",
                "SELECT h.commit_id || ' ' || h.path || ' ' || h.granularity || ' ' || h.hunk_index FROM hunks h WHERE
                   h.old_count <> (CASE h.granularity
                       WHEN 'token' THEN (SELECT COUNT(*) FROM token_changes t WHERE t.commit_id = h.commit_id AND t.path = h.path AND t.hunk_index = h.hunk_index AND t.sign = '-')
                       ELSE (SELECT COUNT(*) FROM line_changes t WHERE t.commit_id = h.commit_id AND t.path = h.path AND t.hunk_index = h.hunk_index AND t.sign = '-') END)
                OR h.new_count <> (CASE h.granularity
                       WHEN 'token' THEN (SELECT COUNT(*) FROM token_changes t WHERE t.commit_id = h.commit_id AND t.path = h.path AND t.hunk_index = h.hunk_index AND t.sign = '+')
                       ELSE (SELECT COUNT(*) FROM line_changes t WHERE t.commit_id = h.commit_id AND t.path = h.path AND t.hunk_index = h.hunk_index AND t.sign = '+') END)",
            ),
            (
                "labels reference missing commits",
                "SELECT l.commit_id FROM labels l LEFT JOIN commits c ON c.commit_id = l.commit_id WHERE c.commit_id IS NULL",
            ),
            (
                "token_changes reference missing files",
                "SELECT DISTINCT t.commit_id || ' ' || t.path FROM token_changes t LEFT JOIN file_changes f
                   ON f.commit_id = t.commit_id AND f.path = t.path WHERE f.path IS NULL",
            ),
        ];
        let mut report = AuditReport {
            n_commits: self.count()?,
            problems: Vec::new(),
        };
        for (what, sql) in checks {
            let mut stmt = self.conn.prepare(sql)?;
            let rows: Vec<String> = stmt.query_map([], |r| r.get(0))?.collect::<Result<_, _>>()?;
            for row in rows {
                report.problems.push(format!("{what}: {row}"));
            }
        }
        Ok(report)
    }

    /// Writes `table` as CSV with a header row.
    pub fn export_csv(&self, table: &str, out: impl Write) -> Result<usize, StoreError> {
        if !TABLES.contains(&table) {
            return Err(StoreError::UnknownTable(table.to_string()));
        }
        let mut stmt = self.conn.prepare(&format!("SELECT * FROM {table} ORDER BY rowid"))?;
        let names: Vec<String> = stmt.column_names().iter().map(|s| s.to_string()).collect();
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&names)?;
        let mut rows = stmt.query([])?;
        let mut n = 0;
        while let Some(row) = rows.next()? {
            let mut fields = Vec::with_capacity(names.len());
            for i in 0..names.len() {
                fields.push(match row.get_ref(i)? {
                    ValueRef::Null => String::new(),
                    ValueRef::Integer(v) => v.to_string(),
                    ValueRef::Real(v) => v.to_string(),
                    ValueRef::Text(t) => String::from_utf8_lossy(t).into_owned(),
                    ValueRef::Blob(b) => String::from_utf8_lossy(b).into_owned(),
                });
            }
            writer.write_record(&fields)?;
            n += 1;
        }
        writer.flush()?;
        Ok(n)
    }

    /// Raw connection, for ad-hoc read queries.
    pub fn connection(&self) -> &Connection {
        &self.conn
    }
}

fn read_summary(r: &rusqlite::Row<'_>) -> rusqlite::Result<CommitSummary> {
    let count = |i: usize| -> rusqlite::Result<usize> { Ok(r.get::<_, i64>(i)?.max(0) as usize) };
    Ok(CommitSummary {
        commit_id: r.get(0)?,
        seq: r.get::<_, i64>(1)?.max(0) as u64,
        message: r.get(2)?,
        timestamp: r.get(3)?,
        is_merge: r.get(4)?,
        n_files: count(5)?,
        n_tokens_added: count(6)?,
        n_tokens_removed: count(7)?,
        n_lines_added: count(8)?,
        n_lines_removed: count(9)?,
        n_hunks: count(10)?,
        n_line_hunks: count(11)?,
    })
}

fn insert_record(tx: &Transaction<'_>, record: &CommitRecord) -> Result<(), StoreError> {
    let id = record.commit_id.as_str();
    tx.execute("DELETE FROM commits WHERE commit_id = ?1", [id])?;
    let s = CommitSummary::of(record);
    tx.prepare_cached(
        "INSERT INTO commits (commit_id, seq, message, timestamp, is_merge, n_files, n_tokens_added,
             n_tokens_removed, n_lines_added, n_lines_removed, n_hunks, n_line_hunks)
         VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12)",
    )?
    .execute(params![
        id,
        i64::try_from(s.seq).expect("seq fits in i64"),
        s.message,
        s.timestamp,
        s.is_merge,
        to_i64(s.n_files),
        to_i64(s.n_tokens_added),
        to_i64(s.n_tokens_removed),
        to_i64(s.n_lines_added),
        to_i64(s.n_lines_removed),
        to_i64(s.n_hunks),
        to_i64(s.n_line_hunks),
    ])?;

    let mut file_stmt = tx.prepare_cached(
        "INSERT INTO file_changes (commit_id, file_index, path, language, n_tokens_added, n_tokens_removed,
             n_lines_added, n_lines_removed) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)",
    )?;
    let mut hunk_stmt = tx.prepare_cached(
        "INSERT INTO hunks (commit_id, path, granularity, hunk_index, old_start, old_count, new_start, new_count)
         VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)",
    )?;
    let mut token_stmt = tx.prepare_cached(
        "INSERT INTO token_changes (commit_id, path, hunk_index, sign, position, token_type, token_text)
         VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)",
    )?;
    let mut line_stmt = tx.prepare_cached(
        "INSERT INTO line_changes (commit_id, path, hunk_index, sign, position, line_number, text)
         VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)",
    )?;
    for (fi, file) in record.files.iter().enumerate() {
        let path = file.path.as_str();
        file_stmt.execute(params![
            id,
            to_i64(fi),
            path,
            file.language.as_str(),
            to_i64(file.token_diff.n_added),
            to_i64(file.token_diff.n_removed),
            to_i64(file.line_diff.n_added),
            to_i64(file.line_diff.n_removed),
        ])?;
        for (hi, hunk) in file.token_diff.hunks.iter().enumerate() {
            insert_hunk_shape(&mut hunk_stmt, id, path, "token", hi, hunk)?;
            for (k, t) in hunk.removed.iter().enumerate() {
                token_stmt.execute(params![
                    id,
                    path,
                    to_i64(hi),
                    "-",
                    to_i64(hunk.old_start + k),
                    t.kind.as_str(),
                    t.text
                ])?;
            }
            for (k, t) in hunk.added.iter().enumerate() {
                token_stmt.execute(params![
                    id,
                    path,
                    to_i64(hi),
                    "+",
                    to_i64(hunk.new_start + k),
                    t.kind.as_str(),
                    t.text
                ])?;
            }
        }
        for (hi, hunk) in file.line_diff.hunks.iter().enumerate() {
            insert_hunk_shape(&mut hunk_stmt, id, path, "line", hi, hunk)?;
            for (k, l) in hunk.removed.iter().enumerate() {
                line_stmt.execute(params![
                    id,
                    path,
                    to_i64(hi),
                    "-",
                    to_i64(hunk.old_start + k),
                    to_i64(l.number),
                    l.text
                ])?;
            }
            for (k, l) in hunk.added.iter().enumerate() {
                line_stmt.execute(params![
                    id,
                    path,
                    to_i64(hi),
                    "+",
                    to_i64(hunk.new_start + k),
                    to_i64(l.number),
                    l.text
                ])?;
            }
        }
    }
    Ok(())
}

fn insert_hunk_shape<T>(
    stmt: &mut rusqlite::CachedStatement<'_>,
    id: &str,
    path: &str,
    granularity: &str,
    index: usize,
    hunk: &Hunk<T>,
) -> Result<(), StoreError> {
    stmt.execute(params![
        id,
        path,
        granularity,
        to_i64(index),
        to_i64(hunk.old_start),
        to_i64(hunk.removed.len()),
        to_i64(hunk.new_start),
        to_i64(hunk.added.len()),
    ])?;
    Ok(())
}
