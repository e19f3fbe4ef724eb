//! Run configuration: a TOML file with command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use microcommit::detect::Thresholds;
use microcommit::lex::Language;
use microcommit::maintenance::{Classifier, KeywordScheme, MatchMode};
use microcommit::miner::MineConfig;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub repo_path: Option<PathBuf>,
    pub db_path: Option<PathBuf>,
    pub languages: Vec<String>,
    /// Defaults to every extension of the selected languages.
    pub extensions: Option<Vec<String>>,
    pub threshold: usize,
    /// `ADDED:REMOVED`, overriding `threshold`.
    pub asym: Option<String>,
    pub file_condition: bool,
    pub include_merges: bool,
    pub max_commits: usize,
    pub keywords: Option<PathBuf>,
    pub match_mode: MatchMode,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            repo_path: None,
            db_path: None,
            languages: vec!["c".into(), "java".into()],
            extensions: None,
            threshold: microcommit::detect::DEFAULT_THRESHOLD,
            asym: None,
            file_condition: true,
            include_merges: false,
            max_commits: 0,
            keywords: None,
            match_mode: MatchMode::Token,
            format: Format::Json,
        }
    }
}

/// Everything a run needs, checked before any work starts.
pub struct Validated {
    pub repo: PathBuf,
    pub db: PathBuf,
    pub mine: MineConfig,
    pub thresholds: Thresholds,
    pub classifier: Classifier,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<Validated, String> {
        let repo = self
            .repo_path
            .clone()
            .ok_or("no repository given (repo_path or --repo)")?;
        let db = self
            .db_path
            .clone()
            .ok_or("no database given (db_path, --db or MICROCOMMIT_DB)")?;
        let mine = mine_config(
            &self.languages,
            self.extensions.as_deref(),
            self.include_merges,
            self.max_commits,
        )?;
        let thresholds = thresholds(self.threshold, self.asym.as_deref(), self.file_condition)?;
        let classifier = classifier(self.keywords.as_deref(), self.match_mode)?;
        Ok(Validated {
            repo,
            db,
            mine,
            thresholds,
            classifier,
        })
    }
}

pub fn mine_config(
    languages: &[String],
    extensions: Option<&[String]>,
    include_merges: bool,
    max_commits: usize,
) -> Result<MineConfig, String> {
    let languages = languages
        .iter()
        .map(|l| l.parse::<Language>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if languages.is_empty() {
        return Err("at least one language is required".into());
    }
    let extensions = match extensions {
        Some(ext) => {
            let ext: Vec<String> = ext
                .iter()
                .map(|e| e.trim_start_matches('.').to_ascii_lowercase())
                .collect();
            if let Some(bad) = ext.iter().find(|e| Language::from_extension(e).is_none()) {
                return Err(format!("extension `{bad}` belongs to no supported language"));
            }
            ext
        }
        None => {
            let mut ext = Vec::new();
            for l in &languages {
                match l {
                    Language::C => ext.extend(["c".to_string(), "h".to_string()]),
                    Language::Java => ext.push("java".into()),
                }
            }
            ext
        }
    };
    Ok(MineConfig {
        languages,
        extensions,
        include_merges,
        max_commits,
    })
}

pub fn thresholds(threshold: usize, asym: Option<&str>, file_condition: bool) -> Result<Thresholds, String> {
    let t = match asym {
        Some(a) => a.parse::<Thresholds>(),
        None => Thresholds::new(threshold),
    }
    .map_err(|e| e.to_string())?;
    Ok(if file_condition { t } else { t.without_file_condition() })
}

pub fn classifier(keywords: Option<&Path>, mode: MatchMode) -> Result<Classifier, String> {
    let scheme = match keywords {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            KeywordScheme::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => KeywordScheme::default(),
    };
    Ok(Classifier::new(scheme, mode))
}
