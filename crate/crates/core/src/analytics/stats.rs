//! Inter-rater agreement and survey sample sizes.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("rater matrix has no subjects")]
    NoSubjects,
    #[error("rater matrix has no categories")]
    NoCategories,
    #[error("row {row} has {got} categories, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("row {row} sums to {got} raters, expected {expected}")]
    RaterCount { row: usize, got: u64, expected: u64 },
    #[error("at least 2 raters are needed, got {0}")]
    TooFewRaters(u64),
    #[error("cannot read rater matrix: {0}")]
    Parse(String),
    #[error("population must be at least 1")]
    Population,
    #[error("confidence level must be 90, 95 or 99, got {0}")]
    Confidence(String),
    #[error("confidence interval must be in (0, 100], got {0}")]
    Interval(f64),
}

/// Subjects by categories, each cell the number of raters who put the
/// subject in the category. Rows have a common sum, the number of raters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaterMatrix {
    counts: Vec<Vec<u64>>,
    raters: u64,
}

impl RaterMatrix {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self, StatsError> {
        let first = counts.first().ok_or(StatsError::NoSubjects)?;
        let k = first.len();
        if k == 0 {
            return Err(StatsError::NoCategories);
        }
        let raters: u64 = first.iter().sum();
        for (i, row) in counts.iter().enumerate() {
            if row.len() != k {
                return Err(StatsError::Ragged {
                    row: i + 1,
                    got: row.len(),
                    expected: k,
                });
            }
            let sum: u64 = row.iter().sum();
            if sum != raters {
                return Err(StatsError::RaterCount {
                    row: i + 1,
                    got: sum,
                    expected: raters,
                });
            }
        }
        if raters < 2 {
            return Err(StatsError::TooFewRaters(raters));
        }
        Ok(RaterMatrix { counts, raters })
    }

    /// Builds the matrix from one label per rater for every subject.
    pub fn from_assignments<T: Ord + Clone>(subjects: &[Vec<T>]) -> Result<Self, StatsError> {
        let mut categories: Vec<T> = subjects.iter().flatten().cloned().collect();
        categories.sort();
        categories.dedup();
        let counts = subjects
            .iter()
            .map(|labels| {
                categories
                    .iter()
                    .map(|c| labels.iter().filter(|l| *l == c).count() as u64)
                    .collect()
            })
            .collect();
        Self::new(counts)
    }

    /// Reads integer rows. A header row and a leading non-numeric subject
    /// column are skipped.
    pub fn from_csv(reader: impl Read) -> Result<Self, StatsError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows: Vec<Vec<String>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| StatsError::Parse(e.to_string()))?;
            if rec.iter().all(|f| f.is_empty()) {
                continue;
            }
            rows.push(rec.iter().map(str::to_string).collect());
        }
        let numeric = |s: &String| s.parse::<u64>().is_ok();
        if rows.first().is_some_and(|r| !r.iter().skip(1).all(numeric)) {
            rows.remove(0);
        }
        let skip = usize::from(rows.first().is_some_and(|r| !r.first().is_some_and(numeric)));
        let counts = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .skip(skip)
                    .map(|f| {
                        f.parse::<u64>()
                            .map_err(|_| StatsError::Parse(format!("row {}: `{f}` is not a count", i + 1)))
                    })
                    .collect::<Result<Vec<u64>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(counts)
    }

    pub fn raters(&self) -> u64 {
        self.raters
    }

    pub fn n_subjects(&self) -> usize {
        self.counts.len()
    }

    pub fn n_categories(&self) -> usize {
        self.counts[0].len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }
}

/// Fleiss' kappa. Unanimous agreement on every subject gives exactly 1,
/// including the single-category case where the usual ratio is 0/0.
pub fn fleiss_kappa(m: &RaterMatrix) -> f64 {
    let n = m.raters as f64;
    let subjects = m.n_subjects() as f64;
    if m.counts.iter().all(|row| row.contains(&m.raters)) {
        return 1.0;
    }
    let p_bar = m
        .counts
        .iter()
        .map(|row| (row.iter().map(|&c| (c * c) as f64).sum::<f64>() - n) / (n * (n - 1.0)))
        .sum::<f64>()
        / subjects;
    let p_e: f64 = (0..m.n_categories())
        .map(|j| {
            let share = m.counts.iter().map(|row| row[j] as f64).sum::<f64>() / (subjects * n);
            share * share
        })
        .sum();
    (p_bar - p_e) / (1.0 - p_e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Poor,
    Slight,
    Fair,
    Moderate,
    Substantial,
    AlmostPerfect,
    Perfect,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Poor => "poor",
            Agreement::Slight => "slight",
            Agreement::Fair => "fair",
            Agreement::Moderate => "moderate",
            Agreement::Substantial => "substantial",
            Agreement::AlmostPerfect => "almost perfect",
            Agreement::Perfect => "perfect",
        }
    }
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} agreement", self.as_str())
    }
}

/// Viera and Garrett's bands, with `poor` at or below zero and `perfect`
/// at one.
pub fn kappa_interpretation(k: f64) -> Agreement {
    match k {
        k if k >= 1.0 => Agreement::Perfect,
        k if k <= 0.0 => Agreement::Poor,
        k if k <= 0.20 => Agreement::Slight,
        k if k <= 0.40 => Agreement::Fair,
        k if k <= 0.60 => Agreement::Moderate,
        k if k <= 0.80 => Agreement::Substantial,
        _ => Agreement::AlmostPerfect,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Confidence {
    P90,
    P95,
    P99,
}

impl Confidence {
    pub fn z(self) -> f64 {
        match self {
            Confidence::P90 => 1.645,
            Confidence::P95 => 1.96,
            Confidence::P99 => 2.576,
        }
    }

    pub fn percent(self) -> u32 {
        match self {
            Confidence::P90 => 90,
            Confidence::P95 => 95,
            Confidence::P99 => 99,
        }
    }
}

impl FromStr for Confidence {
    type Err = StatsError;

    /// `95`, `95%` or `0.95`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().trim_end_matches('%') {
            "90" | "0.90" | "0.9" => Ok(Confidence::P90),
            "95" | "0.95" => Ok(Confidence::P95),
            "99" | "0.99" => Ok(Confidence::P99),
            _ => Err(StatsError::Confidence(s.to_string())),
        }
    }
}

/// Minimum sample for estimating a proportion in a finite population, with
/// worst-case variance: `x / (1 + (x - 1) / N)` for `x = z^2 / (4 E^2)`,
/// rounded to the nearest integer.
pub fn sample_size(population: u64, confidence: Confidence, interval_percent: f64) -> Result<u64, StatsError> {
    if population < 1 {
        return Err(StatsError::Population);
    }
    if !(interval_percent > 0.0 && interval_percent <= 100.0) {
        return Err(StatsError::Interval(interval_percent));
    }
    let e = interval_percent / 100.0;
    let z = confidence.z();
    let x = z * z * 0.25 / (e * e);
    let n = x / (1.0 + (x - 1.0) / population as f64);
    Ok((n.round() as u64).clamp(1, population))
}
