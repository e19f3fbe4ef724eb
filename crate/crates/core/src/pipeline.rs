//! Pipeline stages over a store: ingest, detect, classify.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::detect::{verdict, Thresholds, MICRO};
use crate::maintenance::Classifier;
use crate::miner::{mine_each, CommitRecord, HistoryReader, MineConfig, MineError, MineStats};
use crate::store::{LabelRow, Scheme, Store, StoreError};
use crate::taxonomy::{label_record, Pair, COMPONENT_PREFIX};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Mine(#[from] MineError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Records written per transaction during ingestion.
pub const BATCH: usize = 512;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    #[serde(flatten)]
    pub mine: MineStats,
    pub n_stored: usize,
}

/// Mines `reader` into `store`. With `resume`, commits already in the store
/// are not processed again.
pub fn ingest<R: HistoryReader + ?Sized>(
    store: &mut Store,
    reader: &R,
    config: &MineConfig,
    resume: bool,
) -> Result<IngestStats, PipelineError> {
    let known = if resume {
        store.commit_ids()?
    } else {
        Default::default()
    };
    let mut batch: Vec<CommitRecord> = Vec::with_capacity(BATCH);
    let mut stored = 0;
    let mine = mine_each(
        reader,
        config,
        |id| known.contains(id),
        |record| -> Result<(), PipelineError> {
            batch.push(record);
            if batch.len() >= BATCH {
                store.put_batch(&batch)?;
                stored += batch.len();
                batch.clear();
            }
            Ok(())
        },
    )?;
    store.put_batch(&batch)?;
    stored += batch.len();
    Ok(IngestStats { mine, n_stored: stored })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectStats {
    pub n_commits: usize,
    pub n_one_line: usize,
    pub n_micro: usize,
    pub n_one_token: usize,
}

/// Recomputes all detector labels.
pub fn detect(store: &mut Store, thresholds: &Thresholds) -> Result<DetectStats, PipelineError> {
    let commits = store.query(&crate::store::Filter::all())?;
    let mut rows = Vec::new();
    let mut stats = DetectStats::default();
    for c in commits.iter().filter(|c| !c.is_merge) {
        let v = verdict(c, thresholds);
        stats.n_commits += 1;
        stats.n_one_line += v.is_one_line as usize;
        stats.n_micro += v.is_micro as usize;
        stats.n_one_token += v.is_one_token as usize;
        rows.extend(v.label_rows(&c.commit_id));
    }
    store.replace_labels(Scheme::Detector, &rows)?;
    Ok(stats)
}

/// Recomputes maintenance labels for every stored commit. Returns the
/// number of commits per category and of unlabeled commits.
pub fn classify_maintenance(
    store: &mut Store,
    classifier: &Classifier,
) -> Result<HashMap<String, usize>, PipelineError> {
    let commits = store.query(&crate::store::Filter::all())?;
    let mut rows = Vec::new();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for c in &commits {
        let label = classifier.classify(&c.message);
        if label.is_unlabeled() {
            *counts.entry("unlabeled".into()).or_default() += 1;
        }
        for cat in &label.categories {
            *counts.entry(cat.as_str().into()).or_default() += 1;
            rows.push(LabelRow::new(&c.commit_id, cat.as_str()));
        }
    }
    store.replace_labels(Scheme::Maintenance, &rows)?;
    Ok(counts)
}

/// Labels every commit carrying the `micro` detector label. Main labels
/// are `operation:target`; multi verdicts add `component:operation:target`
/// rows. Returns the main label of each commit.
pub fn classify_taxonomy(store: &mut Store) -> Result<HashMap<String, Pair>, PipelineError> {
    let micro = store.labeled(Scheme::Detector, MICRO)?;
    let mut ids: Vec<&String> = micro.iter().collect();
    ids.sort();
    let mut rows = Vec::new();
    let mut out = HashMap::new();
    for id in ids {
        let Some(record) = store.get(id)? else { continue };
        let label = label_record(&record);
        rows.push(LabelRow {
            commit_id: id.clone(),
            label: label.pair().to_string(),
            confidence: Some(label.confidence),
        });
        for c in &label.components {
            rows.push(LabelRow::new(id, format!("{COMPONENT_PREFIX}{c}")));
        }
        out.insert(id.clone(), label.pair());
    }
    store.replace_labels(Scheme::Taxonomy, &rows)?;
    Ok(out)
}
