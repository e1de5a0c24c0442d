//! Shared service state: the data directory, known endpoint profiles and
//! the set of currently running experiments.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use persona_model_client::{EndpointProfile, HttpEndpoint, Respondent};
use persona_runner::resolve_scripted;
use serde::Deserialize;
use tokio::sync::Mutex;

/// `endpoints.toml`: the HTTP endpoints this service may administer
/// questionnaires to.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct EndpointsFile {
    #[serde(default)]
    pub endpoints: Vec<EndpointProfile>,
}

impl EndpointsFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, String> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| format!("cannot read endpoints file: {e}"))?;
        toml::from_str(&text).map_err(|e| format!("endpoints file does not parse: {e}"))
    }
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    data_dir: PathBuf,
    endpoints: Vec<EndpointProfile>,
    running: Mutex<BTreeSet<String>>,
}

impl AppState {
    pub fn new(data_dir: impl Into<PathBuf>, endpoints: Vec<EndpointProfile>) -> Self {
        AppState {
            inner: Arc::new(Inner {
                data_dir: data_dir.into(),
                endpoints,
                running: Mutex::new(BTreeSet::new()),
            }),
        }
    }

    pub fn data_dir(&self) -> &Path {
        &self.inner.data_dir
    }

    pub fn runs_root(&self) -> PathBuf {
        self.inner.data_dir.join("runs")
    }

    pub fn results_root(&self) -> PathBuf {
        self.inner.data_dir.join("results")
    }

    pub fn cache_root(&self) -> PathBuf {
        self.inner.data_dir.join("cache")
    }

    pub fn endpoint(&self, id: &str) -> Option<&EndpointProfile> {
        self.inner.endpoints.iter().find(|e| e.id == id)
    }

    /// Resolves an endpoint reference to a respondent. Scripted references
    /// need no profile; HTTP references must name a configured endpoint.
    pub fn resolve_respondent(
        &self,
        endpoint_ref: &str,
        questionnaire_id: &str,
    ) -> Result<Arc<dyn Respondent>, String> {
        match resolve_scripted(endpoint_ref, questionnaire_id) {
            Ok(Some(r)) => return Ok(r),
            Ok(None) => {}
            Err(e) => return Err(e.to_string()),
        }
        match self.endpoint(endpoint_ref) {
            Some(profile) => Ok(Arc::new(HttpEndpoint::new(profile.clone()))),
            None => Err(format!(
                "unknown endpoint '{endpoint_ref}' (configured: {})",
                self.inner
                    .endpoints
                    .iter()
                    .map(|e| e.id.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            )),
        }
    }

    /// Marks an experiment running; false when it already is.
    pub async fn try_start(&self, experiment_id: &str) -> bool {
        self.inner
            .running
            .lock()
            .await
            .insert(experiment_id.to_string())
    }

    pub async fn finish(&self, experiment_id: &str) {
        self.inner.running.lock().await.remove(experiment_id);
    }

    pub async fn is_running(&self, experiment_id: &str) -> bool {
        self.inner.running.lock().await.contains(experiment_id)
    }
}
