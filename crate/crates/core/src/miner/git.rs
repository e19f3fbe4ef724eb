use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use super::{read_pair, CommitMeta, HistoryCommit, HistoryReader, MineError, PathChange};

const RECORD_SEP: u8 = 0x1e;
const FIELD_SEP: u8 = 0x1f;
const GITLINK_MODE: &str = "160000";
const SYMLINK_MODE: &str = "120000";

/// History reader backed by the `git` executable.
pub struct GitCli {
    repo: PathBuf,
    pool: Mutex<Vec<CatFile>>,
}

impl GitCli {
    pub fn open(repo: impl AsRef<Path>) -> Result<Self, MineError> {
        let repo = repo.as_ref().to_path_buf();
        let out = Command::new("git")
            .arg("-C")
            .arg(&repo)
            .args(["rev-parse", "--git-dir"])
            .output()
            .map_err(|e| MineError::Repo {
                path: repo.display().to_string(),
                reason: format!("cannot run git: {e}"),
            })?;
        if !out.status.success() {
            return Err(MineError::Repo {
                path: repo.display().to_string(),
                reason: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        Ok(GitCli {
            repo,
            pool: Mutex::new(Vec::new()),
        })
    }

    pub fn path(&self) -> &Path {
        &self.repo
    }

    fn command(&self) -> Command {
        let mut cmd = Command::new("git");
        cmd.arg("-C")
            .arg(&self.repo)
            .args(["-c", "log.showSignature=false", "-c", "core.quotePath=false"]);
        cmd
    }

    fn run(&self, args: &[&str]) -> Result<Vec<u8>, MineError> {
        let out = self.command().args(args).stderr(Stdio::piped()).output()?;
        if !out.status.success() {
            return Err(MineError::Git {
                command: args.first().copied().unwrap_or_default().to_string(),
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        Ok(out.stdout)
    }

    fn resolve(&self, rev: &str) -> Result<Option<String>, MineError> {
        let spec = format!("{rev}^{{commit}}");
        let out = self
            .command()
            .args(["rev-parse", "--verify", "-q", &spec])
            .stderr(Stdio::null())
            .output()?;
        Ok(out
            .status
            .success()
            .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string()))
    }

    fn with_cat_file<T>(&self, f: impl FnOnce(&mut CatFile) -> Result<T, MineError>) -> Result<T, MineError> {
        let idle = self.pool.lock().expect("cat-file pool poisoned").pop();
        let mut proc = match idle {
            Some(p) => p,
            None => CatFile::spawn(self.command())?,
        };
        let result = f(&mut proc);
        // A process that failed mid-protocol is dropped rather than reused.
        if !matches!(result, Err(MineError::Io(_)) | Err(MineError::Parse(_))) {
            self.pool.lock().expect("cat-file pool poisoned").push(proc);
        }
        result
    }
}

impl HistoryReader for GitCli {
    fn commits(&self) -> Result<Vec<HistoryCommit>, MineError> {
        if self.resolve("HEAD")?.is_none() {
            return Ok(Vec::new());
        }
        let out = self.run(&[
            "log",
            "--reverse",
            "--topo-order",
            "--no-renames",
            "--root",
            "--diff-merges=first-parent",
            "--raw",
            "--no-abbrev",
            "-z",
            "--format=%x1e%H%x1f%P%x1f%ct%x1f%B%x1f",
        ])?;
        parse_log(&out)
    }

    fn read_blob(&self, id: &str) -> Result<Vec<u8>, MineError> {
        self.with_cat_file(|p| p.read(id))
    }

    fn file_pair(&self, commit_id: &str, path: &str) -> Result<(String, String), MineError> {
        let not_found = || MineError::CommitNotFound {
            commit: commit_id.to_string(),
        };
        let id = self.resolve(commit_id)?.ok_or_else(not_found)?;
        let parents = self.run(&["rev-list", "--parents", "-n", "1", &id])?;
        let parents = String::from_utf8_lossy(&parents);
        let first_parent = parents.split_whitespace().nth(1).map(str::to_string);
        let mut args = vec!["diff-tree", "-r", "--no-renames", "--no-abbrev", "-z"];
        match &first_parent {
            Some(parent) => args.push(parent),
            None => args.push("--root"),
        }
        args.extend([id.as_str(), "--", path]);
        let out = self.run(&args)?;
        let change = parse_raw_entries(&out)
            .into_iter()
            .find(|c| c.path == path)
            .ok_or_else(|| MineError::PathNotFound {
                commit: commit_id.to_string(),
                path: path.to_string(),
            })?;
        read_pair(self, &change)
    }
}

/// Parses the record stream of the `git log` call in [`GitCli::commits`].
pub(crate) fn parse_log(out: &[u8]) -> Result<Vec<HistoryCommit>, MineError> {
    let mut commits = Vec::new();
    for record in out.split(|&b| b == RECORD_SEP).skip(1) {
        let seps: Vec<usize> = record
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == FIELD_SEP)
            .map(|(i, _)| i)
            .collect();
        if seps.len() < 4 {
            return Err(MineError::Parse(format!("commit header has {} fields", seps.len())));
        }
        let (a, b, c) = (seps[0], seps[1], seps[2]);
        let last = *seps.last().unwrap();
        let field = |from: usize, to: usize| String::from_utf8_lossy(&record[from..to]).into_owned();
        let id = field(0, a);
        let parents = field(a + 1, b).split_whitespace().map(str::to_string).collect();
        let timestamp = field(b + 1, c)
            .trim()
            .parse()
            .map_err(|_| MineError::Parse(format!("bad timestamp for {id}")))?;
        let message = field(c + 1, last);
        commits.push(HistoryCommit {
            meta: CommitMeta {
                id,
                parents,
                message,
                timestamp,
            },
            changes: parse_raw_entries(&record[last + 1..]),
        });
    }
    Ok(commits)
}

/// Extracts `:<mode> <mode> <sha> <sha> <status>\0<path>\0` entries,
/// ignoring anything else between NUL separators.
pub(crate) fn parse_raw_entries(out: &[u8]) -> Vec<PathChange> {
    let mut changes = Vec::new();
    let mut parts = out.split(|&b| b == 0);
    while let Some(part) = parts.next() {
        let part = part.strip_prefix(b"\n").unwrap_or(part);
        let Some(meta) = part.strip_prefix(b":") else {
            continue;
        };
        let Some(path) = parts.next() else { break };
        let meta = String::from_utf8_lossy(meta);
        let fields: Vec<&str> = meta.split(' ').collect();
        if fields.len() < 5 {
            continue;
        }
        let side = |mode: &str, sha: &str| {
            let absent = sha.bytes().all(|b| b == b'0') || mode == GITLINK_MODE || mode == SYMLINK_MODE;
            (!absent).then(|| sha.to_string())
        };
        let old_blob = side(fields[0], fields[2]);
        let new_blob = side(fields[1], fields[3]);
        if old_blob.is_none() && new_blob.is_none() {
            continue;
        }
        changes.push(PathChange {
            path: String::from_utf8_lossy(path).into_owned(),
            old_blob,
            new_blob,
        });
    }
    changes
}

struct CatFile {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl CatFile {
    fn spawn(mut cmd: Command) -> Result<Self, MineError> {
        let mut child = cmd
            .args(["cat-file", "--batch"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(CatFile { child, stdin, stdout })
    }

    fn read(&mut self, id: &str) -> Result<Vec<u8>, MineError> {
        writeln!(self.stdin, "{id}")?;
        self.stdin.flush()?;
        let mut header = String::new();
        if self.stdout.read_line(&mut header)? == 0 {
            return Err(MineError::Parse("cat-file closed its output".into()));
        }
        let header = header.trim_end();
        if header.ends_with(" missing") || header.ends_with(" ambiguous") {
            return Err(MineError::ObjectNotFound(id.to_string()));
        }
        let size: usize = header
            .rsplit(' ')
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| MineError::Parse(format!("cat-file header {header:?}")))?;
        let mut data = vec![0; size + 1];
        self.stdout.read_exact(&mut data)?;
        data.pop();
        Ok(data)
    }
}

impl Drop for CatFile {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
