//! Resumable execution of an administration grid against a respondent.

use std::sync::Arc;

use futures::stream::{self, StreamExt};
use persona_model_client::{run_with_cache, CacheStore, Respondent};
use persona_perspective::{build_prompt, PerspectiveSpec};
use tokio::sync::Mutex;

use crate::grid::{AdminTask, ResolvedPlan};
use crate::ledger::{AnswerRecord, LedgerStore, RunLedger, TaskStatus};
use crate::{config::ExperimentConfig, Error};

/// Execution knobs. `stop_after` bounds the number of completions in this
/// call, which is how interruption is simulated in tests; a resumed call
/// finishes the rest.
#[derive(Debug, Clone, Default)]
pub struct ExecuteOptions {
    pub stop_after: Option<usize>,
}

/// Processes every pending task of the plan. Completions are journaled
/// before the next task is scheduled on that worker; re-running after an
/// interruption executes exactly the remaining tasks. Failed tasks retry
/// across resumptions up to the config's retry budget; refusals never
/// retry automatically.
pub async fn execute(
    config: &ExperimentConfig,
    plan: &ResolvedPlan,
    respondent: Arc<dyn Respondent>,
    cache: Option<Arc<CacheStore>>,
    store: &LedgerStore,
    options: ExecuteOptions,
) -> Result<RunLedger, Error> {
    let ledger = store.load_ledger(config)?;

    // Reject unsupported channel variants up front rather than failing
    // task by task.
    if !respondent.supports_system_role() {
        if let Some((label, _, _)) = plan
            .variants
            .iter()
            .find(|(_, c, _)| *c == persona_perspective::Channel::SystemMsg)
        {
            let uses_system = plan
                .perspectives
                .iter()
                .any(|(_, p)| !matches!(p, PerspectiveSpec::None));
            if uses_system {
                return Err(Error::ChannelUnsupported {
                    variant: label.clone(),
                });
            }
        }
    }

    let todo: Vec<AdminTask> = plan
        .tasks
        .iter()
        .filter(|t| match ledger.status_of(&t.task_id) {
            TaskStatus::Pending => true,
            TaskStatus::Failed => ledger.records[&t.task_id].attempts < config.retry_budget,
            TaskStatus::Done | TaskStatus::Refused => false,
        })
        .cloned()
        .collect();
    let todo: Vec<AdminTask> = match options.stop_after {
        Some(n) => todo.into_iter().take(n).collect(),
        None => todo,
    };

    let shared = Arc::new(Mutex::new(ledger));
    let concurrency = config.concurrency.max(1);
    let results = stream::iter(todo.into_iter().map(|task| {
        let respondent = respondent.clone();
        let cache = cache.clone();
        let shared = shared.clone();
        async move {
            let prior_attempts = {
                let guard = shared.lock().await;
                guard.records.get(&task.task_id).map_or(0, |r| r.attempts)
            };
            let record = run_task(config, plan, &task, respondent.as_ref(), cache.as_deref())
                .await
                .unwrap_or_else(|e| AnswerRecord {
                    task_id: task.task_id.clone(),
                    status: TaskStatus::Failed,
                    presented_label: None,
                    original_option_index: None,
                    value: None,
                    method: None,
                    tie_broken: false,
                    error: Some(e.to_string()),
                    attempts: 0,
                });
            let record = AnswerRecord {
                attempts: prior_attempts + 1,
                ..record
            };
            store.journal_append(&record)?;
            shared.lock().await.apply(record)?;
            Ok::<(), Error>(())
        }
    }))
    .buffer_unordered(concurrency)
    .collect::<Vec<Result<(), Error>>>()
    .await;
    for r in results {
        r?;
    }

    let ledger = Arc::try_unwrap(shared)
        .map_err(|_| Error::Internal("ledger still shared after execution"))?
        .into_inner();
    store.write_snapshot(&ledger)?;
    Ok(ledger)
}

async fn run_task(
    config: &ExperimentConfig,
    plan: &ResolvedPlan,
    task: &AdminTask,
    respondent: &dyn Respondent,
    cache: Option<&CacheStore>,
) -> Result<AnswerRecord, Error> {
    let q = &plan.questionnaire;
    let context = plan
        .context(&task.context)
        .ok_or(Error::Internal("task references unknown context"))?;
    let base = plan
        .perspective(&task.perspective)
        .ok_or(Error::Internal("task references unknown perspective"))?;
    let perspective = match plan.variant(&task.variant) {
        Some((channel, person)) => base.with_variant(channel, person),
        None => base.clone(),
    };
    let item = q
        .item(&task.item_id)
        .ok_or(Error::Internal("task references unknown item"))?
        .clone();
    let permutation = &plan.permutations[task.permutation_index as usize];
    let bundle = build_prompt(q, &item, &perspective, context, permutation)?;

    let outcome = match cache {
        Some(store) => run_with_cache(&bundle, respondent, store).await,
        None => respondent.select_option(&bundle).await,
    };
    let _ = config;
    match outcome {
        Ok(result) => Ok(AnswerRecord {
            task_id: task.task_id.clone(),
            status: TaskStatus::Done,
            value: Some(q.scale.values[result.original_option_index]),
            presented_label: Some(result.presented_label),
            original_option_index: Some(result.original_option_index),
            method: Some(result.method),
            tie_broken: result.tie_broken,
            error: None,
            attempts: 0,
        }),
        Err(e) if e.is_refusal() => Ok(AnswerRecord {
            task_id: task.task_id.clone(),
            status: TaskStatus::Refused,
            presented_label: None,
            original_option_index: None,
            value: None,
            method: None,
            tie_broken: false,
            error: Some(e.to_string()),
            attempts: 0,
        }),
        Err(e) => Ok(AnswerRecord {
            task_id: task.task_id.clone(),
            status: TaskStatus::Failed,
            presented_label: None,
            original_option_index: None,
            value: None,
            method: None,
            tie_broken: false,
            error: Some(e.to_string()),
            attempts: 0,
        }),
    }
}
