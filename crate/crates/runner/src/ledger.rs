//! The run ledger: per-task status plus answers, persisted as an
//! append-only journal with a canonical snapshot. The snapshot is the
//! byte-stable serialization (records sorted by task id); the journal
//! exists so interrupted runs lose nothing.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use persona_model_client::SelectionMethod;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Pending,
    Done,
    Failed,
    Refused,
}

/// Outcome of one administration attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub task_id: String,
    pub status: TaskStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presented_label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub original_option_index: Option<usize>,
    /// Numeric Likert value of the selected option.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<SelectionMethod>,
    #[serde(default)]
    pub tie_broken: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub attempts: u32,
}

/// Counts per status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StatusSummary {
    pub total: usize,
    pub pending: usize,
    pub done: usize,
    pub failed: usize,
    pub refused: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLedger {
    pub experiment_id: String,
    pub config_digest: String,
    /// task id -> latest record; absent means pending.
    pub records: BTreeMap<String, AnswerRecord>,
}

impl RunLedger {
    pub fn fresh(config: &ExperimentConfig) -> Self {
        RunLedger {
            experiment_id: config.id.clone(),
            config_digest: config.digest(),
            records: BTreeMap::new(),
        }
    }

    pub fn status_of(&self, task_id: &str) -> TaskStatus {
        self.records
            .get(task_id)
            .map_or(TaskStatus::Pending, |r| r.status)
    }

    /// Applies a record, enforcing that done is terminal.
    pub fn apply(&mut self, record: AnswerRecord) -> Result<(), Error> {
        if let Some(existing) = self.records.get(&record.task_id) {
            if existing.status == TaskStatus::Done {
                return Err(Error::DoneIsTerminal {
                    task_id: record.task_id,
                });
            }
        }
        self.records.insert(record.task_id.clone(), record);
        Ok(())
    }

    pub fn summary(&self, total_tasks: usize) -> StatusSummary {
        let mut s = StatusSummary {
            total: total_tasks,
            ..Default::default()
        };
        for r in self.records.values() {
            match r.status {
                TaskStatus::Done => s.done += 1,
                TaskStatus::Failed => s.failed += 1,
                TaskStatus::Refused => s.refused += 1,
                TaskStatus::Pending => {}
            }
        }
        s.pending = total_tasks - s.done - s.failed - s.refused;
        s
    }

    /// Canonical serialization: pretty JSON with records sorted by task
    /// id (the map is ordered). Identical runs produce identical bytes.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }
}

/// Directory layout for one experiment: `config.toml`, `ledger.json`
/// (snapshot) and `journal.jsonl` (appended record per completion).
pub struct LedgerStore {
    dir: PathBuf,
    journal: Mutex<Option<std::fs::File>>,
}

impl LedgerStore {
    pub fn create(runs_root: impl AsRef<Path>, config: &ExperimentConfig) -> Result<Self, Error> {
        let dir = runs_root.as_ref().join(&config.id);
        if dir.join("config.toml").exists() {
            return Err(Error::ExperimentExists {
                id: config.id.clone(),
            });
        }
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("config.toml"), config.to_toml())?;
        Ok(LedgerStore {
            dir,
            journal: Mutex::new(None),
        })
    }

    pub fn open(runs_root: impl AsRef<Path>, experiment_id: &str) -> Result<Self, Error> {
        let dir = runs_root.as_ref().join(experiment_id);
        if !dir.join("config.toml").exists() {
            return Err(Error::UnknownExperiment {
                id: experiment_id.to_string(),
            });
        }
        Ok(LedgerStore {
            dir,
            journal: Mutex::new(None),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn load_config(&self) -> Result<ExperimentConfig, Error> {
        let text = std::fs::read_to_string(self.dir.join("config.toml"))?;
        ExperimentConfig::from_toml(&text)
    }

    /// Loads the snapshot and replays any journaled records over it.
    pub fn load_ledger(&self, config: &ExperimentConfig) -> Result<RunLedger, Error> {
        let snapshot_path = self.dir.join("ledger.json");
        let mut ledger = if snapshot_path.exists() {
            let text = std::fs::read_to_string(&snapshot_path)?;
            serde_json::from_str(&text).map_err(|e| Error::LedgerCorrupt {
                problem: e.to_string(),
            })?
        } else {
            RunLedger::fresh(config)
        };
        if ledger.config_digest != config.digest() {
            return Err(Error::DigestMismatch {
                expected: ledger.config_digest,
                actual: config.digest(),
            });
        }
        let journal_path = self.dir.join("journal.jsonl");
        if journal_path.exists() {
            for (no, line) in std::fs::read_to_string(&journal_path)?.lines().enumerate() {
                if line.is_empty() {
                    continue;
                }
                let record: AnswerRecord =
                    serde_json::from_str(line).map_err(|e| Error::LedgerCorrupt {
                        problem: format!("journal line {}: {e}", no + 1),
                    })?;
                // Journal replay may legitimately repeat done records
                // written right before a crash-era snapshot; keep latest.
                ledger.records.insert(record.task_id.clone(), record);
            }
        }
        Ok(ledger)
    }

    /// Appends one record to the journal and flushes before returning.
    pub fn journal_append(&self, record: &AnswerRecord) -> Result<(), Error> {
        let mut guard = self.journal.lock().expect("journal lock");
        if guard.is_none() {
            *guard = Some(
                std::fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(self.dir.join("journal.jsonl"))?,
            );
        }
        let file = guard.as_mut().expect("journal open");
        let line = serde_json::to_string(record).expect("record serializes");
        file.write_all(line.as_bytes())?;
        file.write_all(b"\n")?;
        file.flush()?;
        Ok(())
    }

    /// Writes the canonical snapshot and clears the journal.
    pub fn write_snapshot(&self, ledger: &RunLedger) -> Result<(), Error> {
        let path = self.dir.join("ledger.json");
        let tmp = self.dir.join("ledger.json.tmp");
        std::fs::write(&tmp, ledger.to_canonical_json())?;
        std::fs::rename(&tmp, &path)?;
        let mut guard = self.journal.lock().expect("journal lock");
        *guard = None;
        let journal_path = self.dir.join("journal.jsonl");
        if journal_path.exists() {
            std::fs::remove_file(journal_path)?;
        }
        Ok(())
    }

    /// Experiment ids present under a runs root.
    pub fn list(runs_root: impl AsRef<Path>) -> Result<Vec<String>, Error> {
        let mut out = Vec::new();
        let root = runs_root.as_ref();
        if !root.exists() {
            return Ok(out);
        }
        for entry in std::fs::read_dir(root)? {
            let entry = entry?;
            if entry.path().join("config.toml").exists() {
                out.push(entry.file_name().to_string_lossy().to_string());
            }
        }
        out.sort();
        Ok(out)
    }
}
