//! Aggregate tables over a mined and labeled store.
//!
//! Counts are exact integers; proportions are computed on output and shown
//! with four decimals in heatmaps and two decimals elsewhere.

pub mod stats;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rusqlite::params;
use serde::{Deserialize, Serialize};

use crate::detect::{MICRO, ONE_LINE, ONE_TOKEN};
use crate::maintenance::Category;
use crate::store::{CommitSummary, Filter, Scheme, Store, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("population `{0}` is empty")]
    EmptyPopulation(Population),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Sqlite(#[from] rusqlite::Error),
    #[error("cannot write report: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

/// Commits an aggregate is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    Studied,
    OneLine,
    Micro,
    OneToken,
}

impl Population {
    pub fn as_str(self) -> &'static str {
        match self {
            Population::Studied => "studied",
            Population::OneLine => "one_line",
            Population::Micro => "micro",
            Population::OneToken => "one_token",
        }
    }

    fn detector_label(self) -> Option<&'static str> {
        match self {
            Population::Studied => None,
            Population::OneLine => Some(ONE_LINE),
            Population::Micro => Some(MICRO),
            Population::OneToken => Some(ONE_TOKEN),
        }
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Population {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "studied" | "all" => Ok(Population::Studied),
            "one_line" => Ok(Population::OneLine),
            "micro" => Ok(Population::Micro),
            "one_token" => Ok(Population::OneToken),
            _ => Err(format!("unknown population `{s}`")),
        }
    }
}

fn ratio(n: u64, d: u64) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

/// Commits of a population, in history order.
pub fn members(store: &Store, population: Population) -> Result<Vec<CommitSummary>, AnalyticsError> {
    let all = store.query(&Filter::all())?;
    Ok(match population.detector_label() {
        None => all.into_iter().filter(|c| !c.is_merge).collect(),
        Some(label) => {
            let ids = store.labeled(Scheme::Detector, label)?;
            all.into_iter()
                .filter(|c| !c.is_merge && ids.contains(&c.commit_id))
                .collect()
        }
    })
}

fn non_empty(store: &Store, population: Population) -> Result<Vec<CommitSummary>, AnalyticsError> {
    let m = members(store, population)?;
    if m.is_empty() {
        return Err(AnalyticsError::EmptyPopulation(population));
    }
    Ok(m)
}

/// A report that can be written as CSV rows.
pub trait Tabular: Serialize {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), AnalyticsError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for r in self.rows() {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<(), AnalyticsError>
    where
        Self: Sized,
    {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)?;
        Ok(())
    }
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub population: Population,
    pub max_axis: usize,
    pub population_size: u64,
    /// `counts[added][removed]` for both axes in `0..=max_axis`.
    pub counts: Vec<Vec<u64>>,
    /// Commits beyond `max_axis` on either axis.
    pub tail: u64,
}

impl Heatmap {
    pub fn count(&self, added: usize, removed: usize) -> u64 {
        self.counts
            .get(added)
            .and_then(|r| r.get(removed))
            .copied()
            .unwrap_or(0)
    }

    pub fn proportion(&self, added: usize, removed: usize) -> f64 {
        ratio(self.count(added, removed), self.population_size)
    }

    pub fn tail_proportion(&self) -> f64 {
        ratio(self.tail, self.population_size)
    }
}

impl Tabular for Heatmap {
    fn header(&self) -> Vec<String> {
        header(&["n_added", "n_removed", "n", "proportion"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for a in 0..=self.max_axis {
            for r in 0..=self.max_axis {
                out.push(vec![
                    a.to_string(),
                    r.to_string(),
                    self.count(a, r).to_string(),
                    format!("{:.4}", self.proportion(a, r)),
                ]);
            }
        }
        out
    }
}

pub fn heatmap(store: &Store, population: Population, max_axis: usize) -> Result<Heatmap, AnalyticsError> {
    let commits = non_empty(store, population)?;
    let mut counts = vec![vec![0u64; max_axis + 1]; max_axis + 1];
    let mut tail = 0;
    for c in &commits {
        if c.n_tokens_added <= max_axis && c.n_tokens_removed <= max_axis {
            counts[c.n_tokens_added][c.n_tokens_removed] += 1;
        } else {
            tail += 1;
        }
    }
    Ok(Heatmap {
        population,
        max_axis,
        population_size: commits.len() as u64,
        counts,
        tail,
    })
}

/// Share of commits whose measured value is at most `t`, for each `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccumCurve {
    pub population: Population,
    pub measure: String,
    pub population_size: u64,
    /// `(t, number of commits with value <= t)`.
    pub points: Vec<(usize, u64)>,
}

impl AccumCurve {
    fn build(population: Population, measure: &str, values: &[usize], max_t: usize) -> Self {
        let mut hist = vec![0u64; max_t + 1];
        for &v in values {
            if v <= max_t {
                hist[v] += 1;
            }
        }
        let mut running = 0;
        let points = hist
            .iter()
            .enumerate()
            .map(|(t, n)| {
                running += n;
                (t, running)
            })
            .collect();
        AccumCurve {
            population,
            measure: measure.to_string(),
            population_size: values.len() as u64,
            points,
        }
    }

    pub fn at(&self, t: usize) -> f64 {
        let n = match self.points.get(t) {
            Some(&(_, n)) => n,
            None => self.points.last().map_or(0, |p| p.1),
        };
        ratio(n, self.population_size)
    }
}

impl Tabular for AccumCurve {
    fn header(&self) -> Vec<String> {
        header(&["t", "n", "proportion"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|&(t, n)| {
                vec![
                    t.to_string(),
                    n.to_string(),
                    format!("{:.4}", ratio(n, self.population_size)),
                ]
            })
            .collect()
    }
}

/// Curve over `max(n_tokens_added, n_tokens_removed)`.
pub fn accum_curve(store: &Store, population: Population, max_t: usize) -> Result<AccumCurve, AnalyticsError> {
    let commits = non_empty(store, population)?;
    let values: Vec<usize> = commits
        .iter()
        .map(|c| c.n_tokens_added.max(c.n_tokens_removed))
        .collect();
    Ok(AccumCurve::build(
        population,
        "max_tokens_added_removed",
        &values,
        max_t,
    ))
}

/// Curve over the number of token hunks.
pub fn hunk_distribution(store: &Store, population: Population, max_t: usize) -> Result<AccumCurve, AnalyticsError> {
    let commits = non_empty(store, population)?;
    let values: Vec<usize> = commits.iter().map(|c| c.n_hunks).collect();
    Ok(AccumCurve::build(population, "token_hunks", &values, max_t))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub key: String,
    pub n: u64,
}

/// Rows sorted by count, descending, then by key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub title: String,
    pub denominator: u64,
    pub rows: Vec<FrequencyRow>,
}

impl FrequencyTable {
    pub fn from_counts(title: &str, counts: HashMap<String, u64>, denominator: u64) -> Self {
        let mut rows: Vec<FrequencyRow> = counts.into_iter().map(|(key, n)| FrequencyRow { key, n }).collect();
        rows.sort_by(|a, b| b.n.cmp(&a.n).then_with(|| a.key.cmp(&b.key)));
        FrequencyTable {
            title: title.to_string(),
            denominator,
            rows,
        }
    }

    pub fn get(&self, key: &str) -> Option<u64> {
        self.rows.iter().find(|r| r.key == key).map(|r| r.n)
    }

    pub fn as_map(&self) -> HashMap<String, u64> {
        self.rows.iter().map(|r| (r.key.clone(), r.n)).collect()
    }
}

impl Tabular for FrequencyTable {
    fn header(&self) -> Vec<String> {
        header(&["key", "n", "pro"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.key.clone(),
                    r.n.to_string(),
                    format!("{:.2}", ratio(r.n, self.denominator)),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenScope {
    /// Token type labels.
    Types,
    /// `type|text` of each token.
    Tokens,
}

impl FromStr for TokenScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "types" => Ok(TokenScope::Types),
            "tokens" => Ok(TokenScope::Tokens),
            _ => Err(format!("scope must be `types` or `tokens`, got `{s}`")),
        }
    }
}

/// Added plus removed occurrences of each token type or token, over the
/// changes of a population. The denominator is the total number of
/// occurrences.
pub fn token_frequencies(
    store: &Store,
    scope: TokenScope,
    population: Population,
) -> Result<FrequencyTable, AnalyticsError> {
    let ids: HashSet<String> = members(store, population)?.into_iter().map(|c| c.commit_id).collect();
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut total = 0;
    let mut stmt = store
        .connection()
        .prepare("SELECT commit_id, token_type, token_text FROM token_changes")?;
    let mut rows = stmt.query(params![])?;
    while let Some(row) = rows.next()? {
        let id: String = row.get(0)?;
        if !ids.contains(&id) {
            continue;
        }
        let kind: String = row.get(1)?;
        let key = match scope {
            TokenScope::Types => kind,
            TokenScope::Tokens => format!("{kind}|{}", row.get::<_, String>(2)?),
        };
        *counts.entry(key).or_default() += 1;
        total += 1;
    }
    let title = match scope {
        TokenScope::Types => "token_types",
        TokenScope::Tokens => "tokens",
    };
    Ok(FrequencyTable::from_counts(title, counts, total))
}

/// `{a,b} -> {c}`: sorted multisets of removed and added token types.
pub fn pattern_key(removed: &[String], added: &[String]) -> String {
    let side = |v: &[String]| {
        let mut v = v.to_vec();
        v.sort();
        format!("{{{}}}", v.join(","))
    };
    format!("{} -> {}", side(removed), side(added))
}

/// One row per distinct modification pattern; the denominator is the
/// number of commits.
pub fn modification_patterns(store: &Store, population: Population) -> Result<FrequencyTable, AnalyticsError> {
    let commits = members(store, population)?;
    let ids: HashSet<&str> = commits.iter().map(|c| c.commit_id.as_str()).collect();
    let mut sides: HashMap<String, (Vec<String>, Vec<String>)> = HashMap::new();
    let mut stmt = store
        .connection()
        .prepare("SELECT commit_id, sign, token_type FROM token_changes")?;
    let mut rows = stmt.query(params![])?;
    while let Some(row) = rows.next()? {
        let id: String = row.get(0)?;
        if !ids.contains(id.as_str()) {
            continue;
        }
        let sign: String = row.get(1)?;
        let kind: String = row.get(2)?;
        let entry = sides.entry(id).or_default();
        if sign == "+" {
            entry.1.push(kind);
        } else {
            entry.0.push(kind);
        }
    }
    let mut counts: HashMap<String, u64> = HashMap::new();
    for c in &commits {
        let (removed, added) = sides.remove(&c.commit_id).unwrap_or_default();
        *counts.entry(pattern_key(&removed, &added)).or_default() += 1;
    }
    Ok(FrequencyTable::from_counts(
        "modification_patterns",
        counts,
        commits.len() as u64,
    ))
}

/// Frequencies of stored taxonomy labels over a population.
pub fn taxonomy_frequencies(store: &Store, population: Population) -> Result<FrequencyTable, AnalyticsError> {
    let commits = members(store, population)?;
    let labels = store.labels(Scheme::Taxonomy)?;
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut n = 0;
    for c in &commits {
        let Some(rows) = labels.get(&c.commit_id) else { continue };
        n += 1;
        for r in rows {
            *counts.entry(r.label.clone()).or_default() += 1;
        }
    }
    Ok(FrequencyTable::from_counts("taxonomy", counts, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub n_intersect: u64,
    pub n_one_line: u64,
    pub n_micro: u64,
    /// Share of one-line commits that are micro commits.
    pub pct_one_line: f64,
    /// Share of micro commits that are one-line commits.
    pub pct_micro: f64,
}

impl Intersection {
    pub fn from_counts(n_intersect: u64, n_one_line: u64, n_micro: u64) -> Self {
        Intersection {
            n_intersect,
            n_one_line,
            n_micro,
            pct_one_line: 100.0 * ratio(n_intersect, n_one_line),
            pct_micro: 100.0 * ratio(n_intersect, n_micro),
        }
    }
}

impl Tabular for Intersection {
    fn header(&self) -> Vec<String> {
        header(&["n_intersect", "n_one_line", "n_micro", "pct_one_line", "pct_micro"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.n_intersect.to_string(),
            self.n_one_line.to_string(),
            self.n_micro.to_string(),
            format!("{:.2}", self.pct_one_line),
            format!("{:.2}", self.pct_micro),
        ]]
    }
}

pub fn intersection(store: &Store) -> Result<Intersection, AnalyticsError> {
    let one_line: HashSet<String> = members(store, Population::OneLine)?
        .into_iter()
        .map(|c| c.commit_id)
        .collect();
    let micro: HashSet<String> = members(store, Population::Micro)?
        .into_iter()
        .map(|c| c.commit_id)
        .collect();
    let both = one_line.intersection(&micro).count() as u64;
    Ok(Intersection::from_counts(
        both,
        one_line.len() as u64,
        micro.len() as u64,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectiveComparison {
    pub n_micro: u64,
    pub n_corrective_micro: u64,
    pub n_non_micro: u64,
    pub n_corrective_non_micro: u64,
    pub pct_corrective_micro: f64,
    pub pct_corrective_non_micro: f64,
}

impl Tabular for CorrectiveComparison {
    fn header(&self) -> Vec<String> {
        header(&["group", "n", "n_corrective", "pct_corrective"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![
            vec![
                "micro".into(),
                self.n_micro.to_string(),
                self.n_corrective_micro.to_string(),
                format!("{:.2}", self.pct_corrective_micro),
            ],
            vec![
                "non_micro".into(),
                self.n_non_micro.to_string(),
                self.n_corrective_non_micro.to_string(),
                format!("{:.2}", self.pct_corrective_non_micro),
            ],
        ]
    }
}

/// Corrective shares (as fractions) among micro and other studied commits.
pub fn corrective_comparison(store: &Store) -> Result<CorrectiveComparison, AnalyticsError> {
    let studied = members(store, Population::Studied)?;
    let micro = store.labeled(Scheme::Detector, MICRO)?;
    let corrective = store.labeled(Scheme::Maintenance, Category::Corrective.as_str())?;
    let (mut nm, mut cm, mut nn, mut cn) = (0, 0, 0, 0);
    for c in &studied {
        let fix = corrective.contains(&c.commit_id) as u64;
        if micro.contains(&c.commit_id) {
            nm += 1;
            cm += fix;
        } else {
            nn += 1;
            cn += fix;
        }
    }
    Ok(CorrectiveComparison {
        n_micro: nm,
        n_corrective_micro: cm,
        n_non_micro: nn,
        n_corrective_non_micro: cn,
        pct_corrective_micro: ratio(cm, nm),
        pct_corrective_non_micro: ratio(cn, nn),
    })
}

/// Counts of the detector populations, shaped like a per-project table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_studied: u64,
    pub n_one_line: u64,
    pub n_micro: u64,
    pub n_one_token: u64,
    pub pct_one_line: f64,
    pub pct_micro: f64,
    pub pct_one_token: f64,
    /// Commits per maintenance category, among studied commits; absent when
    /// no maintenance labels exist.
    pub maintenance: BTreeMap<String, u64>,
    /// Taxonomy labels (without components) among micro commits.
    pub taxonomy: BTreeMap<String, u64>,
}

impl Tabular for Summary {
    fn header(&self) -> Vec<String> {
        header(&["measure", "value"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut out = vec![
            vec!["n_studied".into(), self.n_studied.to_string()],
            vec!["n_one_line".into(), self.n_one_line.to_string()],
            vec!["n_micro".into(), self.n_micro.to_string()],
            vec!["n_one_token".into(), self.n_one_token.to_string()],
            vec!["pct_one_line".into(), format!("{:.2}", self.pct_one_line)],
            vec!["pct_micro".into(), format!("{:.2}", self.pct_micro)],
            vec!["pct_one_token".into(), format!("{:.2}", self.pct_one_token)],
        ];
        for (k, v) in &self.maintenance {
            out.push(vec![format!("maintenance:{k}"), v.to_string()]);
        }
        for (k, v) in &self.taxonomy {
            out.push(vec![format!("taxonomy:{k}"), v.to_string()]);
        }
        out
    }
}

pub fn summary(store: &Store) -> Result<Summary, AnalyticsError> {
    let n = |p| members(store, p).map(|m| m.len() as u64);
    let studied = n(Population::Studied)?;
    let one_line = n(Population::OneLine)?;
    let micro = n(Population::Micro)?;
    let one_token = n(Population::OneToken)?;
    let ids: HashSet<String> = members(store, Population::Studied)?
        .into_iter()
        .map(|c| c.commit_id)
        .collect();
    let mut maintenance = BTreeMap::new();
    for (id, rows) in store.labels(Scheme::Maintenance)? {
        if ids.contains(&id) {
            for r in rows {
                *maintenance.entry(r.label).or_default() += 1;
            }
        }
    }
    let micro_ids = store.labeled(Scheme::Detector, MICRO)?;
    let mut taxonomy = BTreeMap::new();
    for (id, rows) in store.labels(Scheme::Taxonomy)? {
        if ids.contains(&id) && micro_ids.contains(&id) {
            for r in rows
                .into_iter()
                .filter(|r| !r.label.starts_with(crate::taxonomy::COMPONENT_PREFIX))
            {
                *taxonomy.entry(r.label).or_default() += 1;
            }
        }
    }
    Ok(Summary {
        n_studied: studied,
        n_one_line: one_line,
        n_micro: micro,
        n_one_token: one_token,
        pct_one_line: 100.0 * ratio(one_line, studied),
        pct_micro: 100.0 * ratio(micro, studied),
        pct_one_token: 100.0 * ratio(one_token, studied),
        maintenance,
        taxonomy,
    })
}
