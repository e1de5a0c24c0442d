//! Content-addressed cache of selection results: an append-only directory
//! with one JSON record per digest, plus in-flight deduplication so
//! concurrent identical requests hit the upstream once.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use persona_perspective::PromptBundle;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tokio::sync::Mutex;

use crate::endpoint::Respondent;
use crate::{Error, SelectionMethod, SelectionResult};

/// Stable content hash over everything that determines a selection:
/// model id, the full message list, the candidate order and the
/// extraction contract.
pub fn cache_key(bundle: &PromptBundle, model_id: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(model_id.as_bytes());
    hasher.update([0]);
    for m in &bundle.messages {
        hasher.update(m.role.as_str().as_bytes());
        hasher.update([1]);
        hasher.update(m.text.as_bytes());
        hasher.update([2]);
    }
    for c in &bundle.candidate_answers {
        hasher.update(c.presented_label.as_bytes());
        hasher.update([3]);
        hasher.update(c.original_option_index.to_le_bytes());
    }
    hasher.update(bundle.extraction.cue.as_bytes());
    hex::encode(hasher.finalize())
}

/// One persisted request/response record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheRecord {
    pub digest: String,
    pub model_id: String,
    pub presented_label: String,
    pub original_option_index: usize,
    pub method: SelectionMethod,
    pub raw_payload: String,
    pub tie_broken: bool,
    pub timestamp_unix: u64,
}

/// Directory-backed cache store.
pub struct CacheStore {
    dir: PathBuf,
    in_flight: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl CacheStore {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, Error> {
        std::fs::create_dir_all(dir.as_ref())?;
        Ok(CacheStore {
            dir: dir.as_ref().to_path_buf(),
            in_flight: Mutex::new(HashMap::new()),
        })
    }

    fn record_path(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    /// Loads a record; a present-but-unreadable record is an error, never
    /// a silent recompute.
    pub fn load(&self, digest: &str) -> Result<Option<CacheRecord>, Error> {
        let path = self.record_path(digest);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::CacheIo(e)),
        };
        let record: CacheRecord = serde_json::from_str(&text).map_err(|e| Error::CacheCorrupt {
            digest: digest.to_string(),
            problem: e.to_string(),
        })?;
        if record.digest != digest {
            return Err(Error::CacheCorrupt {
                digest: digest.to_string(),
                problem: format!("record claims digest {}", record.digest),
            });
        }
        Ok(Some(record))
    }

    /// Atomic write: temp file then rename.
    pub fn persist(&self, record: &CacheRecord) -> Result<(), Error> {
        let path = self.record_path(&record.digest);
        let tmp = path.with_extension("json.tmp");
        std::fs::write(
            &tmp,
            serde_json::to_vec_pretty(record).expect("record serializes"),
        )?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }
}

/// Returns the cached result for the bundle or performs the selection,
/// persists it and returns it with `cached = false`. Concurrent calls for
/// the same digest collapse into one upstream request.
pub async fn run_with_cache(
    bundle: &PromptBundle,
    respondent: &dyn Respondent,
    store: &CacheStore,
) -> Result<SelectionResult, Error> {
    let digest = cache_key(bundle, &respondent.model_id());
    if let Some(record) = store.load(&digest)? {
        return Ok(from_record(record));
    }

    let gate = {
        let mut map = store.in_flight.lock().await;
        map.entry(digest.clone())
            .or_insert_with(|| Arc::new(Mutex::new(())))
            .clone()
    };
    let _held = gate.lock().await;
    // Another task may have completed while this one waited on the gate.
    if let Some(record) = store.load(&digest)? {
        return Ok(from_record(record));
    }

    let result = respondent.select_option(bundle).await?;
    let record = CacheRecord {
        digest: digest.clone(),
        model_id: respondent.model_id(),
        presented_label: result.presented_label.clone(),
        original_option_index: result.original_option_index,
        method: result.method,
        raw_payload: result.raw_payload.clone(),
        tie_broken: result.tie_broken,
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    store.persist(&record)?;
    Ok(result)
}

fn from_record(record: CacheRecord) -> SelectionResult {
    SelectionResult {
        presented_label: record.presented_label,
        original_option_index: record.original_option_index,
        method: record.method,
        raw_payload: record.raw_payload,
        cached: true,
        tie_broken: record.tie_broken,
    }
}
