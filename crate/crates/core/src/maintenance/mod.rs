//! Keyword-based maintenance-activity labels for commit messages.

pub mod porter;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const STOPWORDS: &str = include_str!("stopwords.txt");

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS.lines().map(str::trim).filter(|w| !w.is_empty()).collect())
}

pub fn is_stopword(word: &str) -> bool {
    stopwords().contains(word)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Corrective,
    Adaptive,
    Perfective,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Corrective, Category::Adaptive, Category::Perfective];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Corrective => "corrective",
            Category::Adaptive => "adaptive",
            Category::Perfective => "perfective",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown maintenance category `{s}`"))
    }
}

/// How keywords are looked up in a preprocessed message.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// Keyword is a substring of some stem.
    #[default]
    Token,
    /// Keyword is a substring of the stems concatenated without separator.
    Whole,
}

impl FromStr for MatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "token" => Ok(MatchMode::Token),
            "whole" => Ok(MatchMode::Whole),
            _ => Err(format!("match mode must be `token` or `whole`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordScheme {
    pub corrective: Vec<String>,
    pub adaptive: Vec<String>,
    pub perfective: Vec<String>,
}

fn owned(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

impl Default for KeywordScheme {
    fn default() -> Self {
        KeywordScheme {
            corrective: owned(&[
                "fix", "esolv", "clos", "handl", "issue", "defect", "bug", "problem", "ticket",
            ]),
            adaptive: owned(&[
                "add",
                "new",
                "introduc",
                "implement",
                "implemented",
                "extend",
                "feature",
                "support",
            ]),
            perfective: owned(&[
                "refactor",
                "re-factor",
                "reimplement",
                "re-implement",
                "design",
                "replac",
                "modify",
                "updat",
                "upgrad",
                "cleanup",
                "clean-up",
            ]),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum KeywordError {
    #[error("cannot parse keyword file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("keyword list `{0}` contains an empty keyword")]
    Empty(Category),
}

impl KeywordScheme {
    /// Reads `corrective`, `adaptive` and `perfective` arrays; a missing
    /// list keeps its default.
    pub fn from_toml(text: &str) -> Result<Self, KeywordError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Partial {
            corrective: Option<Vec<String>>,
            adaptive: Option<Vec<String>>,
            perfective: Option<Vec<String>>,
        }
        let p: Partial = toml::from_str(text)?;
        let d = KeywordScheme::default();
        let scheme = KeywordScheme {
            corrective: p.corrective.unwrap_or(d.corrective),
            adaptive: p.adaptive.unwrap_or(d.adaptive),
            perfective: p.perfective.unwrap_or(d.perfective),
        };
        for c in Category::ALL {
            if scheme.keywords(c).iter().any(|k| k.is_empty()) {
                return Err(KeywordError::Empty(c));
            }
        }
        Ok(scheme)
    }

    pub fn keywords(&self, category: Category) -> &[String] {
        match category {
            Category::Corrective => &self.corrective,
            Category::Adaptive => &self.adaptive,
            Category::Perfective => &self.perfective,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaintenanceLabel {
    pub categories: BTreeSet<Category>,
}

impl MaintenanceLabel {
    pub fn is_unlabeled(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn contains(&self, c: Category) -> bool {
        self.categories.contains(&c)
    }
}

/// Lowercased words: runs of letters and digits, with single internal
/// hyphens or apostrophes kept (`re-factor`, `don't`).
pub fn words(message: &str) -> Vec<String> {
    let lower: Vec<char> = message
        .to_lowercase()
        .chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lower.len() {
        if !lower[i].is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = i;
        loop {
            while i < lower.len() && lower[i].is_alphanumeric() {
                i += 1;
            }
            let joiner = i + 1 < lower.len() && matches!(lower[i], '-' | '\'') && lower[i + 1].is_alphanumeric();
            if !joiner {
                break;
            }
            i += 1;
        }
        out.push(lower[start..i].iter().collect());
    }
    out
}

/// Words of `message` without stopwords, each Porter-stemmed.
pub fn preprocess(message: &str) -> Vec<String> {
    words(message)
        .into_iter()
        .filter(|w| !is_stopword(w))
        .map(|w| porter::stem(&w))
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct Classifier {
    pub scheme: KeywordScheme,
    pub mode: MatchMode,
}

impl Classifier {
    pub fn new(scheme: KeywordScheme, mode: MatchMode) -> Self {
        Classifier { scheme, mode }
    }

    pub fn classify(&self, message: &str) -> MaintenanceLabel {
        let stems = preprocess(message);
        let joined = stems.concat();
        let categories = Category::ALL
            .into_iter()
            .filter(|&c| {
                self.scheme.keywords(c).iter().any(|k| match self.mode {
                    MatchMode::Token => stems.iter().any(|s| s.contains(k.as_str())),
                    MatchMode::Whole => joined.contains(k.as_str()),
                })
            })
            .collect();
        MaintenanceLabel { categories }
    }
}

/// Classifies with the default keyword lists and per-stem matching.
pub fn classify(message: &str) -> MaintenanceLabel {
    Classifier::default().classify(message)
}
