//! Operation and target labels for micro commits, assigned hunk by hunk from
//! the token types of the changed tokens.
//!
//! Per hunk, the operation follows from which sides are empty and the target
//! from the first matching rule:
//!
//! 1. only statement terminators changed: `no`
//! 2. only non-keyword names: `identifier`
//! 3. only literals or macro values: `constant`
//! 4. a control-flow keyword: `control flow`
//! 5. each changed side is a complete statement: `statement`, or
//!    `declaration` when it is a declaration or a `#define`
//! 6. a specifier, annotation or type keyword: `declaration`
//! 7. anything else: `expression`, with confidence 0.5
//!
//! A commit whose hunks disagree is `multi`, and its distinct hunk labels are
//! kept as components. Lines moved unchanged within a file are a removed plus
//! an added statement, whatever the token diff looks like.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detect::{detect_micro, Thresholds};
use crate::diff::Hunk;
use crate::lex::keywords::{is_any_type_keyword, is_control_flow};
use crate::lex::{Lexeme, TokenType};
use crate::miner::{CommitRecord, FileChange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Add,
    Replace,
    Remove,
    Multi,
    No,
}

impl Operation {
    pub const ALL: [Operation; 5] = [
        Operation::Add,
        Operation::Replace,
        Operation::Remove,
        Operation::Multi,
        Operation::No,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Operation::Add => "add",
            Operation::Replace => "replace",
            Operation::Remove => "remove",
            Operation::Multi => "multi",
            Operation::No => "no",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Identifier,
    Statement,
    Constant,
    Declaration,
    ControlFlow,
    Expression,
    Multi,
    No,
}

impl Target {
    pub const ALL: [Target; 8] = [
        Target::Identifier,
        Target::Statement,
        Target::Constant,
        Target::Declaration,
        Target::ControlFlow,
        Target::Expression,
        Target::Multi,
        Target::No,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Identifier => "identifier",
            Target::Statement => "statement",
            Target::Constant => "constant",
            Target::Declaration => "declaration",
            Target::ControlFlow => "control_flow",
            Target::Expression => "expression",
            Target::Multi => "multi",
            Target::No => "no",
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn normalized(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace([' ', '-'], "_")
}

impl FromStr for Operation {
    type Err = String;

    /// Also accepts `change` for `replace`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = normalized(s);
        if n == "change" {
            return Ok(Operation::Replace);
        }
        Operation::ALL
            .into_iter()
            .find(|o| o.as_str() == n)
            .ok_or_else(|| format!("unknown operation `{s}`"))
    }
}

impl FromStr for Target {
    type Err = String;

    /// Accepts `control flow`, `control-flow` and `control_flow`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = normalized(s);
        Target::ALL
            .into_iter()
            .find(|t| t.as_str() == n)
            .ok_or_else(|| format!("unknown target `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair {
    pub operation: Operation,
    pub target: Target,
}

impl Pair {
    pub fn new(operation: Operation, target: Target) -> Self {
        Pair { operation, target }
    }

    pub const NO: Pair = Pair {
        operation: Operation::No,
        target: Target::No,
    };

    pub const MULTI: Pair = Pair {
        operation: Operation::Multi,
        target: Target::Multi,
    };
}

/// `operation:target`, the form stored in the label table.
impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.operation, self.target)
    }
}

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (o, t) = s
            .split_once(':')
            .ok_or_else(|| format!("expected operation:target, got `{s}`"))?;
        Ok(Pair::new(o.parse()?, t.parse()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyLabel {
    pub operation: Operation,
    pub target: Target,
    pub confidence: f64,
    /// Distinct per-hunk labels of a multi verdict, sorted; empty otherwise.
    pub components: Vec<Pair>,
}

impl TaxonomyLabel {
    pub fn pair(&self) -> Pair {
        Pair::new(self.operation, self.target)
    }

    pub fn is_multi(&self) -> bool {
        self.operation == Operation::Multi
    }
}

/// Prefix of component label strings in the label table.
pub const COMPONENT_PREFIX: &str = "component:";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error("commit {commit} is not a micro commit ({added} added, {removed} removed tokens in {files} files)")]
    NotMicro {
        commit: String,
        added: usize,
        removed: usize,
        files: usize,
    },
}

fn is_plain_name(l: &Lexeme) -> bool {
    l.kind == TokenType::Name && !is_control_flow(&l.text) && !is_any_type_keyword(&l.text)
}

fn is_declaration_marker(l: &Lexeme) -> bool {
    match l.kind {
        TokenType::Specifier | TokenType::Annotation | TokenType::DeclStmt => true,
        TokenType::Name => is_any_type_keyword(&l.text),
        TokenType::Directive => directive_name(&l.text) == "define",
        _ => false,
    }
}

fn directive_name(text: &str) -> &str {
    text.trim_start_matches('#').trim()
}

/// A complete statement: ends at its only top-level terminator with
/// balanced brackets, or is a whole preprocessor line.
fn is_statement(tokens: &[Lexeme]) -> bool {
    match tokens.first() {
        None => return false,
        Some(first) if first.kind == TokenType::Directive => {
            return tokens[1..].iter().all(|t| t.kind != TokenType::Directive);
        }
        Some(first) if first.kind.is_terminator() => return false,
        _ => {}
    }
    let mut depth = 0i64;
    for (i, t) in tokens.iter().enumerate() {
        match t.text.as_str() {
            "(" | "{" | "[" => depth += 1,
            ")" | "}" | "]" => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
        if t.kind.is_terminator() && depth == 0 {
            return i + 1 == tokens.len();
        }
    }
    false
}

/// Rotations of a pure insertion or deletion are the same edit slid along
/// repeated neighbors; accept the side if any of them is a statement.
fn is_statement_side(tokens: &[Lexeme], slidable: bool) -> bool {
    if !slidable {
        return is_statement(tokens);
    }
    (0..tokens.len()).any(|k| {
        let rotated: Vec<Lexeme> = tokens[k..].iter().chain(&tokens[..k]).cloned().collect();
        is_statement(&rotated)
    })
}

fn declares(tokens: &[Lexeme]) -> bool {
    tokens.iter().any(|t| {
        t.kind == TokenType::DeclStmt || (t.kind == TokenType::Directive && directive_name(&t.text) == "define")
    })
}

/// Label and confidence of one token hunk.
pub fn classify_hunk(hunk: &Hunk<Lexeme>) -> (Pair, f64) {
    let operation = match (hunk.removed.is_empty(), hunk.added.is_empty()) {
        (true, true) => return (Pair::NO, 1.0),
        (true, false) => Operation::Add,
        (false, true) => Operation::Remove,
        (false, false) => Operation::Replace,
    };
    let changed: Vec<&Lexeme> = hunk.removed.iter().chain(&hunk.added).collect();
    let all = |f: fn(&Lexeme) -> bool| changed.iter().all(|t| f(t));
    let any = |f: fn(&Lexeme) -> bool| changed.iter().any(|t| f(t));

    if all(|t| t.kind.is_terminator()) {
        return (Pair::NO, 1.0);
    }
    let target = if all(is_plain_name) {
        Target::Identifier
    } else if all(|t| matches!(t.kind, TokenType::Literal | TokenType::Value)) {
        Target::Constant
    } else if any(|t| t.kind == TokenType::Name && is_control_flow(&t.text)) {
        Target::ControlFlow
    } else if [&hunk.removed, &hunk.added]
        .iter()
        .filter(|side| !side.is_empty())
        .all(|side| is_statement_side(side, operation != Operation::Replace))
    {
        if declares(&hunk.removed) || declares(&hunk.added) {
            Target::Declaration
        } else {
            Target::Statement
        }
    } else if any(is_declaration_marker) {
        Target::Declaration
    } else {
        return (Pair::new(operation, Target::Expression), 0.5);
    };
    (Pair::new(operation, target), 1.0)
}

/// Moved lines: the removed and added lines of the file are the same
/// multiset, split over separate pure removals and pure additions.
fn is_line_move(file: &FileChange) -> bool {
    let d = &file.line_diff;
    let key = |text: &str| -> String { text.chars().filter(|c| !c.is_whitespace()).collect() };
    let mut removed: Vec<String> = d.hunks.iter().flat_map(|h| &h.removed).map(|l| key(&l.text)).collect();
    let mut added: Vec<String> = d.hunks.iter().flat_map(|h| &h.added).map(|l| key(&l.text)).collect();
    removed.sort();
    added.sort();
    !removed.is_empty() && removed == added && d.hunks.iter().all(|h| h.removed.is_empty() != h.added.is_empty())
}

/// Labels a record without checking that it is a micro commit.
pub fn label_record(record: &CommitRecord) -> TaxonomyLabel {
    let mut pairs: Vec<(Pair, f64)> = Vec::new();
    for file in &record.files {
        if is_line_move(file) {
            pairs.push((Pair::new(Operation::Remove, Target::Statement), 1.0));
            pairs.push((Pair::new(Operation::Add, Target::Statement), 1.0));
            continue;
        }
        pairs.extend(file.token_diff.hunks.iter().map(classify_hunk));
    }
    let functional: Vec<(Pair, f64)> = pairs.iter().copied().filter(|(p, _)| *p != Pair::NO).collect();
    if functional.is_empty() {
        return TaxonomyLabel {
            operation: Operation::No,
            target: Target::No,
            confidence: 1.0,
            components: Vec::new(),
        };
    }
    let distinct: BTreeSet<Pair> = functional.iter().map(|(p, _)| *p).collect();
    let confidence = functional.iter().map(|(_, c)| *c).fold(1.0, f64::min);
    if distinct.len() == 1 {
        let p = *distinct.first().unwrap();
        return TaxonomyLabel {
            operation: p.operation,
            target: p.target,
            confidence,
            components: Vec::new(),
        };
    }
    TaxonomyLabel {
        operation: Operation::Multi,
        target: Target::Multi,
        confidence,
        components: distinct.into_iter().collect(),
    }
}

/// Labels a micro commit; other commits are rejected.
pub fn classify_taxonomy(record: &CommitRecord, thresholds: &Thresholds) -> Result<TaxonomyLabel, TaxonomyError> {
    if !detect_micro(record, thresholds) {
        return Err(TaxonomyError::NotMicro {
            commit: record.commit_id.clone(),
            added: record.n_tokens_added(),
            removed: record.n_tokens_removed(),
            files: record.files.len(),
        });
    }
    Ok(label_record(record))
}

/// One row of an imported label file.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct GoldLabel {
    pub commit_id: String,
    #[serde(deserialize_with = "parse_field")]
    pub operation: Operation,
    #[serde(deserialize_with = "parse_field")]
    pub target: Target,
}

fn parse_field<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: serde::Deserializer<'de>,
    T: FromStr<Err = String>,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// Reads `commit_id,operation,target` rows with a header line.
pub fn read_gold(reader: impl Read) -> Result<Vec<GoldLabel>, csv::Error> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader)
        .into_deserialize()
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    /// Gold rows whose commit was found among the predictions.
    pub n_compared: usize,
    pub n_missing: usize,
    pub operation: f64,
    pub target: f64,
    /// Both operation and target correct.
    pub overall: f64,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub commit_id: String,
    pub expected: String,
    pub predicted: String,
}

/// Compares predictions against gold rows. A gold id may be an abbreviated
/// hash; it matches the unique predicted id it prefixes.
pub fn accuracy(gold: &[GoldLabel], predicted: &HashMap<String, Pair>) -> Accuracy {
    let mut out = Accuracy::default();
    let (mut ops, mut targets, mut both) = (0usize, 0usize, 0usize);
    for g in gold {
        let found = predicted
            .get(&g.commit_id)
            .map(|p| (g.commit_id.clone(), *p))
            .or_else(|| {
                let mut hits = predicted.iter().filter(|(id, _)| id.starts_with(&g.commit_id));
                match (hits.next(), hits.next()) {
                    (Some((id, p)), None) => Some((id.clone(), *p)),
                    _ => None,
                }
            });
        let Some((id, p)) = found else {
            out.n_missing += 1;
            continue;
        };
        out.n_compared += 1;
        let op_ok = p.operation == g.operation;
        let target_ok = p.target == g.target;
        ops += op_ok as usize;
        targets += target_ok as usize;
        if op_ok && target_ok {
            both += 1;
        } else {
            out.mismatches.push(Mismatch {
                commit_id: id,
                expected: Pair::new(g.operation, g.target).to_string(),
                predicted: p.to_string(),
            });
        }
    }
    if out.n_compared > 0 {
        let n = out.n_compared as f64;
        out.operation = ops as f64 / n;
        out.target = targets as f64 / n;
        out.overall = both as f64 / n;
    }
    out
}
