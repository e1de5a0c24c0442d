//! End-to-end runner behavior with scripted respondents: determinism,
//! crash-resume equivalence, tamper detection and exclusion bookkeeping.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use async_trait::async_trait;
use persona_model_client::{Respondent, ScriptedRespondent, SelectionResult};
use persona_perspective::PromptBundle;
use persona_runner::{
    assemble_tensor, execute, expand_grid, resolve_scripted, ExclusionPolicy, ExecuteOptions,
    ExperimentConfig, LedgerStore, TaskStatus,
};

fn config(id: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(&format!(
        r#"
id = "{id}"
questionnaire = "pvq"
endpoint = "scripted:option:3"
contexts = ["none", "format/code_py"]
permutations = 5
seed = 17
variants = ["system-2nd"]

[[perspectives]]
kind = "none"
"#
    ))
    .unwrap()
}

async fn run_full(id: &str, root: &std::path::Path) -> (persona_runner::RunLedger, String) {
    let cfg = config(id);
    let plan = expand_grid(&cfg).unwrap();
    let respondent = resolve_scripted(&cfg.endpoint, &cfg.questionnaire)
        .unwrap()
        .unwrap();
    let store = LedgerStore::create(root, &cfg).unwrap();
    let ledger = execute(
        &cfg,
        &plan,
        respondent,
        None,
        &store,
        ExecuteOptions::default(),
    )
    .await
    .unwrap();
    let bytes = std::fs::read_to_string(store.dir().join("ledger.json")).unwrap();
    (ledger, bytes)
}

#[tokio::test]
async fn identical_configs_produce_bit_identical_ledgers() {
    // Same config run twice in separate run roots.
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let (ledger_a, bytes_a) = run_full("exp-same", dir_a.path()).await;
    let (ledger_b, bytes_b) = run_full("exp-same", dir_b.path()).await;
    assert_eq!(ledger_a.records, ledger_b.records);
    assert_eq!(bytes_a, bytes_b);
    // Every task is done and scored with the fixed option value.
    assert!(ledger_a
        .records
        .values()
        .all(|r| r.status == TaskStatus::Done));
    assert!(ledger_a.records.values().all(|r| r.value == Some(6.0)));
}

#[tokio::test]
async fn interrupted_run_resumes_to_the_same_bytes() {
    // The uninterrupted reference run of the same config, separate root.
    let ref_dir = tempfile::tempdir().unwrap();
    let (_, uninterrupted) = run_full("exp-interrupted", ref_dir.path()).await;

    let dir = tempfile::tempdir().unwrap();
    let cfg = config("exp-interrupted");
    let plan = expand_grid(&cfg).unwrap();
    let total = plan.tasks.len();
    let respondent = resolve_scripted(&cfg.endpoint, &cfg.questionnaire)
        .unwrap()
        .unwrap();
    let store = LedgerStore::create(dir.path(), &cfg).unwrap();

    // First call stops half way; the journal holds the completions.
    let half = execute(
        &cfg,
        &plan,
        respondent.clone(),
        None,
        &store,
        ExecuteOptions {
            stop_after: Some(total / 2),
        },
    )
    .await
    .unwrap();
    assert_eq!(half.summary(total).done, total / 2);

    // Fresh store handle, as a new process would open it.
    let store = LedgerStore::open(dir.path(), "exp-interrupted").unwrap();
    let resumed = execute(
        &cfg,
        &plan,
        respondent,
        None,
        &store,
        ExecuteOptions::default(),
    )
    .await
    .unwrap();
    assert_eq!(resumed.summary(total).done, total);

    let bytes = std::fs::read_to_string(store.dir().join("ledger.json")).unwrap();
    assert_eq!(bytes, uninterrupted);
}

#[tokio::test]
async fn edited_config_is_rejected_by_digest_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("exp-tamper");
    let plan = expand_grid(&cfg).unwrap();
    let respondent = resolve_scripted(&cfg.endpoint, &cfg.questionnaire)
        .unwrap()
        .unwrap();
    let store = LedgerStore::create(dir.path(), &cfg).unwrap();
    execute(
        &cfg,
        &plan,
        respondent.clone(),
        None,
        &store,
        ExecuteOptions {
            stop_after: Some(10),
        },
    )
    .await
    .unwrap();

    let mut edited = cfg.clone();
    edited.seed = 99;
    let plan2 = expand_grid(&edited).unwrap();
    let err = execute(
        &edited,
        &plan2,
        respondent,
        None,
        &store,
        ExecuteOptions::default(),
    )
    .await
    .unwrap_err();
    assert!(err.to_string().contains("different config"), "got {err}");
}

/// Refuses the first administration of the PVQ "rich" item it sees.
struct RefuseOne {
    inner: ScriptedRespondent,
    calls: Arc<AtomicUsize>,
    refused: std::sync::atomic::AtomicBool,
}

#[async_trait]
impl Respondent for RefuseOne {
    async fn select_option(
        &self,
        bundle: &PromptBundle,
    ) -> Result<SelectionResult, persona_model_client::Error> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        if bundle.messages[0]
            .text
            .contains("It is important to him to be rich")
            && !self.refused.swap(true, Ordering::SeqCst)
        {
            return Err(persona_model_client::Error::Refusal {
                generation: "I'd rather not say.".into(),
            });
        }
        self.inner.select_option(bundle).await
    }

    fn model_id(&self) -> String {
        "refuse-one".into()
    }

    fn supports_system_role(&self) -> bool {
        true
    }
}

#[tokio::test]
async fn refusals_are_excluded_and_reported_never_retried() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("exp-refuse");
    cfg.contexts = vec!["none".to_string()];
    cfg.permutations = 3;
    cfg.concurrency = 1;
    let plan = expand_grid(&cfg).unwrap();
    let total = plan.tasks.len();
    let calls = Arc::new(AtomicUsize::new(0));
    let respondent = Arc::new(RefuseOne {
        inner: ScriptedRespondent::fixed_original_option(3),
        calls: calls.clone(),
        refused: std::sync::atomic::AtomicBool::new(false),
    });
    let store = LedgerStore::create(dir.path(), &cfg).unwrap();
    let ledger = execute(
        &cfg,
        &plan,
        respondent.clone(),
        None,
        &store,
        ExecuteOptions::default(),
    )
    .await
    .unwrap();
    // With serial execution the first rich-item administration (p0000) is
    // the one refused.
    let summary = ledger.summary(total);
    assert_eq!(summary.refused, 1);
    assert_eq!(summary.done, total - 1);

    // Re-running does not retry refusals.
    let before = calls.load(Ordering::SeqCst);
    let ledger = execute(
        &cfg,
        &plan,
        respondent,
        None,
        &store,
        ExecuteOptions::default(),
    )
    .await
    .unwrap();
    assert_eq!(calls.load(Ordering::SeqCst), before);

    // Strict assembly refuses; exclusion drops just that permutation.
    let err = assemble_tensor(&plan, &ledger, "refuse-one", ExclusionPolicy::Strict).unwrap_err();
    assert!(err.to_string().contains("incomplete"), "got {err}");
    let set = assemble_tensor(
        &plan,
        &ledger,
        "refuse-one",
        ExclusionPolicy::ExcludeIncomplete,
    )
    .unwrap();
    assert_eq!(set.annex.refusals, 1);
    assert_eq!(set.annex.excluded.len(), 1);
    assert_eq!(set.annex.excluded[0].permutation, 0);
    let tensor = &set.tensors["none"];
    assert_eq!(tensor.permutations("none", "none").unwrap(), vec![1, 2]);
}

#[tokio::test]
async fn constant_policy_yields_constant_tensor() {
    let dir = tempfile::tempdir().unwrap();
    // Always the original option with value 6 on PVQ (index 3).
    let cfg = config("exp-constant");
    let plan = expand_grid(&cfg).unwrap();
    let respondent = resolve_scripted("scripted:option:3", "pvq")
        .unwrap()
        .unwrap();
    let store = LedgerStore::create(dir.path(), &cfg).unwrap();
    let ledger = execute(
        &cfg,
        &plan,
        respondent,
        None,
        &store,
        ExecuteOptions::default(),
    )
    .await
    .unwrap();
    let set = assemble_tensor(&plan, &ledger, "m", ExclusionPolicy::Strict).unwrap();
    let tensor = &set.tensors["none"];
    for ctx in tensor.contexts() {
        for perm in tensor.permutations(&ctx, "none").unwrap() {
            let row = tensor
                .row(&ctx, "none", perm, persona_metrics::Which::Raw)
                .unwrap();
            assert!(row.iter().all(|v| *v == 6.0));
        }
    }
}
