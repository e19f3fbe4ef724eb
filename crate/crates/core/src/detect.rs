//! One-line, micro and one-token commit detectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::miner::CommitRecord;
use crate::store::{CommitSummary, LabelRow};

pub const DEFAULT_THRESHOLD: usize = 5;

pub const ONE_LINE: &str = "one_line";
pub const MICRO: &str = "micro";
pub const ONE_TOKEN: &str = "one_token";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThresholdError {
    #[error("threshold must be at least 1, got {0}")]
    TooSmall(usize),
    #[error("expected thresholds as ADDED:REMOVED, got `{0}`")]
    Syntax(String),
}

/// Micro-commit limits. With `file_condition` set, a micro commit must also
/// change exactly one source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    added: usize,
    removed: usize,
    pub file_condition: bool,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            added: DEFAULT_THRESHOLD,
            removed: DEFAULT_THRESHOLD,
            file_condition: true,
        }
    }
}

impl Thresholds {
    pub fn new(threshold: usize) -> Result<Self, ThresholdError> {
        Self::asymmetric(threshold, threshold)
    }

    pub fn asymmetric(added: usize, removed: usize) -> Result<Self, ThresholdError> {
        for t in [added, removed] {
            if t < 1 {
                return Err(ThresholdError::TooSmall(t));
            }
        }
        Ok(Thresholds {
            added,
            removed,
            file_condition: true,
        })
    }

    pub fn without_file_condition(mut self) -> Self {
        self.file_condition = false;
        self
    }

    pub fn added(&self) -> usize {
        self.added
    }

    pub fn removed(&self) -> usize {
        self.removed
    }
}

impl FromStr for Thresholds {
    type Err = ThresholdError;

    /// Parses `N` or `A:R`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| ThresholdError::Syntax(s.to_string()))
        };
        match s.split_once(':') {
            Some((a, r)) => Self::asymmetric(num(a)?, num(r)?),
            None => Self::new(num(s)?),
        }
    }
}

impl fmt::Display for Thresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.added, self.removed)
    }
}

/// Commit-level change counts, the only input the detectors need.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeCounts {
    pub n_files: usize,
    pub n_tokens_added: usize,
    pub n_tokens_removed: usize,
    pub n_hunks: usize,
    pub n_lines_added: usize,
    pub n_lines_removed: usize,
    pub n_line_hunks: usize,
}

impl From<&CommitRecord> for ChangeCounts {
    fn from(r: &CommitRecord) -> Self {
        ChangeCounts {
            n_files: r.files.len(),
            n_tokens_added: r.n_tokens_added(),
            n_tokens_removed: r.n_tokens_removed(),
            n_hunks: r.n_token_hunks(),
            n_lines_added: r.n_lines_added(),
            n_lines_removed: r.n_lines_removed(),
            n_line_hunks: r.n_line_hunks(),
        }
    }
}

impl From<&CommitSummary> for ChangeCounts {
    fn from(s: &CommitSummary) -> Self {
        ChangeCounts {
            n_files: s.n_files,
            n_tokens_added: s.n_tokens_added,
            n_tokens_removed: s.n_tokens_removed,
            n_hunks: s.n_hunks,
            n_lines_added: s.n_lines_added,
            n_lines_removed: s.n_lines_removed,
            n_line_hunks: s.n_line_hunks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorVerdict {
    pub is_one_line: bool,
    pub is_micro: bool,
    pub is_one_token: bool,
    pub n_tokens_added: usize,
    pub n_tokens_removed: usize,
    pub n_files: usize,
    pub n_hunks: usize,
}

impl DetectorVerdict {
    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.is_one_line {
            out.push(ONE_LINE);
        }
        if self.is_micro {
            out.push(MICRO);
        }
        if self.is_one_token {
            out.push(ONE_TOKEN);
        }
        out
    }

    pub fn label_rows(&self, commit_id: &str) -> Vec<LabelRow> {
        self.labels().into_iter().map(|l| LabelRow::new(commit_id, l)).collect()
    }
}

/// One hunk across all files, made of one removed and one added line.
pub fn detect_one_line(c: impl Into<ChangeCounts>) -> bool {
    let c = c.into();
    c.n_line_hunks == 1 && c.n_lines_removed == 1 && c.n_lines_added == 1
}

pub fn detect_micro(c: impl Into<ChangeCounts>, t: &Thresholds) -> bool {
    let c = c.into();
    let files_ok = if t.file_condition {
        c.n_files == 1
    } else {
        c.n_files >= 1
    };
    files_ok && c.n_tokens_added <= t.added && c.n_tokens_removed <= t.removed
}

pub fn detect_one_token(c: impl Into<ChangeCounts>, t: &Thresholds) -> bool {
    let c = c.into();
    detect_micro(c, t) && c.n_tokens_added == 1 && c.n_tokens_removed == 1
}

pub fn verdict(c: impl Into<ChangeCounts>, t: &Thresholds) -> DetectorVerdict {
    let c = c.into();
    DetectorVerdict {
        is_one_line: detect_one_line(c),
        is_micro: detect_micro(c, t),
        is_one_token: detect_one_token(c, t),
        n_tokens_added: c.n_tokens_added,
        n_tokens_removed: c.n_tokens_removed,
        n_files: c.n_files,
        n_hunks: c.n_hunks,
    }
}
