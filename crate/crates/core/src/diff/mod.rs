//! Minimal edit scripts over lines or tokens, grouped into zero-context hunks.
//!
//! A hunk is a maximal run of edits with no unchanged unit in between; within
//! a hunk all removed units come before all added units, as in `git diff -U0`.

mod myers;

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk<T> {
    /// Index into the old sequence of the first removed unit, or of the unit
    /// the additions are inserted before.
    pub old_start: usize,
    pub new_start: usize,
    pub removed: Vec<T>,
    pub added: Vec<T>,
}

impl<T> Hunk<T> {
    /// Unified-diff style header with Git's zero-context conventions:
    /// 1-based starts, a count of one omitted, and an empty side anchored at
    /// the unit before the change.
    pub fn header(&self) -> String {
        format!(
            "@@ -{} +{} @@",
            header_range(self.old_start, self.removed.len()),
            header_range(self.new_start, self.added.len())
        )
    }

    pub fn len(&self) -> usize {
        self.removed.len() + self.added.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty() && self.added.is_empty()
    }
}

fn header_range(start: usize, count: usize) -> String {
    match count {
        0 => format!("{start},0"),
        1 => format!("{}", start + 1),
        n => format!("{},{}", start + 1, n),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffResult<T> {
    pub hunks: Vec<Hunk<T>>,
    pub n_added: usize,
    pub n_removed: usize,
}

impl<T> Default for DiffResult<T> {
    fn default() -> Self {
        DiffResult {
            hunks: Vec::new(),
            n_added: 0,
            n_removed: 0,
        }
    }
}

impl<T> DiffResult<T> {
    pub fn from_hunks(hunks: Vec<Hunk<T>>) -> Self {
        let n_added = hunks.iter().map(|h| h.added.len()).sum();
        let n_removed = hunks.iter().map(|h| h.removed.len()).sum();
        DiffResult {
            hunks,
            n_added,
            n_removed,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.hunks.is_empty()
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> DiffResult<U> {
        DiffResult {
            hunks: self
                .hunks
                .iter()
                .map(|h| Hunk {
                    old_start: h.old_start,
                    new_start: h.new_start,
                    removed: h.removed.iter().map(&mut f).collect(),
                    added: h.added.iter().map(&mut f).collect(),
                })
                .collect(),
            n_added: self.n_added,
            n_removed: self.n_removed,
        }
    }
}

pub fn diff<T: Clone + Eq + Hash>(old: &[T], new: &[T]) -> DiffResult<T> {
    diff_by_key(old, new, |unit| unit)
}

/// Diffs two sequences comparing units through `key`. The hunks carry
/// clones of the original units.
pub fn diff_by_key<'a, T, K, F>(old: &'a [T], new: &'a [T], key: F) -> DiffResult<T>
where
    T: Clone,
    K: Eq + Hash,
    F: Fn(&'a T) -> K,
{
    let mut ids: HashMap<K, u32> = HashMap::new();
    let mut intern = |unit: &'a T| {
        let next = ids.len() as u32;
        *ids.entry(key(unit)).or_insert(next)
    };
    let old_ids: Vec<u32> = old.iter().map(&mut intern).collect();
    let new_ids: Vec<u32> = new.iter().map(&mut intern).collect();
    let marks = myers::edit_marks(&old_ids, &new_ids);
    group_hunks(old, new, &marks.removed, &marks.added)
}

fn group_hunks<T: Clone>(old: &[T], new: &[T], removed: &[bool], added: &[bool]) -> DiffResult<T> {
    let mut hunks = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < old.len() || j < new.len() {
        let old_changed = i < old.len() && removed[i];
        let new_changed = j < new.len() && added[j];
        if !old_changed && !new_changed {
            i += 1;
            j += 1;
            continue;
        }
        let (old_start, new_start) = (i, j);
        while i < old.len() && removed[i] {
            i += 1;
        }
        while j < new.len() && added[j] {
            j += 1;
        }
        hunks.push(Hunk {
            old_start,
            new_start,
            removed: old[old_start..i].to_vec(),
            added: new[new_start..j].to_vec(),
        });
    }
    DiffResult::from_hunks(hunks)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApplyError {
    #[error("hunk {hunk} starts before the end of the previous hunk")]
    Overlap { hunk: usize },
    #[error("hunk {hunk} reaches past the end of the old sequence")]
    OutOfRange { hunk: usize },
    #[error("hunk {hunk} removes units that differ from the old sequence")]
    Mismatch { hunk: usize },
    #[error("hunk {hunk} new_start {expected} does not match output position {actual}")]
    NewStart {
        hunk: usize,
        expected: usize,
        actual: usize,
    },
    #[error("diff totals ({n_added} added, {n_removed} removed) do not match its hunks")]
    Totals { n_added: usize, n_removed: usize },
}

/// Replays `diff` on `old`. Fails without partial output if the diff was not
/// produced against `old`.
pub fn apply<T: Clone + PartialEq>(old: &[T], diff: &DiffResult<T>) -> Result<Vec<T>, ApplyError> {
    let added: usize = diff.hunks.iter().map(|h| h.added.len()).sum();
    let removed: usize = diff.hunks.iter().map(|h| h.removed.len()).sum();
    if added != diff.n_added || removed != diff.n_removed {
        return Err(ApplyError::Totals {
            n_added: diff.n_added,
            n_removed: diff.n_removed,
        });
    }

    let mut out = Vec::with_capacity((old.len() + added).saturating_sub(removed));
    let mut cursor = 0;
    for (index, hunk) in diff.hunks.iter().enumerate() {
        if hunk.old_start < cursor {
            return Err(ApplyError::Overlap { hunk: index });
        }
        let end = hunk.old_start + hunk.removed.len();
        if end > old.len() {
            return Err(ApplyError::OutOfRange { hunk: index });
        }
        out.extend_from_slice(&old[cursor..hunk.old_start]);
        if out.len() != hunk.new_start {
            return Err(ApplyError::NewStart {
                hunk: index,
                expected: hunk.new_start,
                actual: out.len(),
            });
        }
        if old[hunk.old_start..end] != hunk.removed[..] {
            return Err(ApplyError::Mismatch { hunk: index });
        }
        out.extend(hunk.added.iter().cloned());
        cursor = end;
    }
    out.extend_from_slice(&old[cursor..]);
    Ok(out)
}
