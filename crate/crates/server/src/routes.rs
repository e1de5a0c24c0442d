//! Route handlers.

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;

use persona_metrics::{controllability, ScoreTensor, StabilityReport};
use persona_model_client::CacheStore;
use persona_protocol as proto;
use persona_questionnaire::{builtin, score, AnswerSheet, BUILTIN_IDS};
use persona_report::{build_report, HumanBaselines, ReportOptions};
use persona_runner::{
    assemble_tensor, execute, expand_grid, ExclusionPolicy, ExecuteOptions, ExperimentConfig,
    LedgerStore,
};

use crate::state::AppState;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/v1/questionnaires", get(list_questionnaires))
        .route("/v1/questionnaires/:id", get(get_questionnaire))
        .route("/v1/score", post(score_sheet))
        .route("/v1/contexts", get(list_contexts))
        .route("/v1/contexts/*name", get(get_context))
        .route("/v1/prompts/preview", post(preview_prompt))
        .route(
            "/v1/experiments",
            post(submit_experiment).get(list_experiments),
        )
        .route("/v1/experiments/:id", get(experiment_status))
        .route("/v1/experiments/:id/resume", post(resume_experiment))
        .route("/v1/experiments/:id/tensors", get(experiment_tensors))
        .route("/v1/experiments/:id/report", post(experiment_report))
        .route("/v1/stats/welch", post(stats_welch))
        .route("/v1/stats/anova", post(stats_anova))
        .route("/v1/stats/tukey", post(stats_tukey))
        .route("/v1/stats/pearson", post(stats_pearson))
        .route("/v1/stats/cohens-d", post(stats_cohens_d))
        .route("/v1/stats/bonferroni", post(stats_bonferroni))
        .route("/v1/metrics/controllability", post(metrics_controllability))
        .route("/v1/metrics/stability", post(metrics_stability))
        .with_state(state)
}

/// JSON error envelope with a status code.
struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(proto::ErrorBody { error: self.1 })).into_response()
    }
}

fn bad_request(e: impl ToString) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, e.to_string())
}

fn not_found(e: impl ToString) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, e.to_string())
}

fn internal(e: impl ToString) -> ApiError {
    ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
}

async fn health() -> Json<proto::HealthResponse> {
    Json(proto::HealthResponse {
        status: "ok".into(),
        version: env!("CARGO_PKG_VERSION").into(),
    })
}

async fn list_questionnaires() -> Json<Vec<proto::QuestionnaireSummary>> {
    let list = BUILTIN_IDS
        .iter()
        .map(|id| {
            let q = builtin(id).expect("builtin loads");
            proto::QuestionnaireSummary {
                id: q.id.clone(),
                name: q.name.clone(),
                items: q.items.len(),
                dimensions: q.dimensions.len(),
                scale_points: q.scale.points(),
            }
        })
        .collect();
    Json(list)
}

async fn get_questionnaire(
    Path(id): Path<String>,
) -> Result<Json<persona_questionnaire::Questionnaire>, ApiError> {
    builtin(&id).map(Json).map_err(not_found)
}

async fn score_sheet(
    Json(request): Json<proto::ScoreRequest>,
) -> Result<Json<persona_questionnaire::ScoreProfile>, ApiError> {
    let q = builtin(&request.questionnaire_id).map_err(not_found)?;
    let sheet = AnswerSheet {
        questionnaire_id: request.questionnaire_id,
        entries: request.entries,
        permutation_index: request.permutation_index,
    };
    score(&sheet, &q).map(Json).map_err(bad_request)
}

async fn list_contexts() -> Json<Vec<String>> {
    Json(persona_perspective::available_fixtures())
}

async fn get_context(
    Path(name): Path<String>,
) -> Result<Json<persona_perspective::ContextSpec>, ApiError> {
    persona_perspective::load_context_fixture(&name)
        .map(Json)
        .map_err(not_found)
}

async fn preview_prompt(
    Json(request): Json<proto::PreviewRequest>,
) -> Result<Json<persona_perspective::PromptBundle>, ApiError> {
    let q = builtin(&request.questionnaire_id).map_err(not_found)?;
    let item = match &request.item_id {
        Some(id) => q
            .item(id)
            .ok_or_else(|| bad_request(format!("unknown item '{id}'")))?
            .clone(),
        None => q.items[0].clone(),
    };
    let context =
        persona_perspective::load_context_fixture(&request.context).map_err(bad_request)?;
    let perms = persona_perspective::permute_options(
        &q,
        request.seed,
        request.permutation_index + 1,
        request.identity_first,
    );
    let bundle = persona_perspective::build_prompt(
        &q,
        &item,
        &request.perspective,
        &context,
        &perms[request.permutation_index],
    )
    .map_err(bad_request)?;
    Ok(Json(bundle))
}

/// Spawns execution of a stored experiment. The task re-expands the plan
/// from the stored config and journals every completion.
async fn spawn_execution(
    state: AppState,
    config: ExperimentConfig,
    store: LedgerStore,
) -> Result<(), ApiError> {
    if !state.try_start(&config.id).await {
        return Err(ApiError(
            StatusCode::CONFLICT,
            format!("experiment '{}' is already running", config.id),
        ));
    }
    let respondent = state
        .resolve_respondent(&config.endpoint, &config.questionnaire)
        .map_err(bad_request)?;
    let cache = if config.endpoint.starts_with("scripted:") {
        None
    } else {
        Some(Arc::new(
            CacheStore::open(state.cache_root().join(&config.endpoint)).map_err(internal)?,
        ))
    };
    let task_state = state.clone();
    tokio::spawn(async move {
        let id = config.id.clone();
        let result = async {
            let plan = expand_grid(&config)?;
            execute(
                &config,
                &plan,
                respondent,
                cache,
                &store,
                ExecuteOptions::default(),
            )
            .await
        }
        .await;
        if let Err(e) = result {
            tracing::error!("experiment {id} failed: {e}");
            let _ = std::fs::write(
                store.dir().join("run_error.json"),
                serde_json::to_vec_pretty(&json!({"error": e.to_string()})).expect("serializes"),
            );
        }
        task_state.finish(&id).await;
    });
    Ok(())
}

async fn submit_experiment(
    State(state): State<AppState>,
    Json(config): Json<ExperimentConfig>,
) -> Result<Json<proto::SubmitResponse>, ApiError> {
    let plan = expand_grid(&config).map_err(bad_request)?;
    // Fail fast on unresolvable endpoints before creating the store.
    state
        .resolve_respondent(&config.endpoint, &config.questionnaire)
        .map_err(bad_request)?;
    let store = LedgerStore::create(state.runs_root(), &config).map_err(bad_request)?;
    let response = proto::SubmitResponse {
        experiment_id: config.id.clone(),
        task_count: plan.tasks.len(),
        config_digest: config.digest(),
    };
    spawn_execution(state, config, store).await?;
    Ok(Json(response))
}

async fn list_experiments(State(state): State<AppState>) -> Result<Json<Vec<String>>, ApiError> {
    LedgerStore::list(state.runs_root())
        .map(Json)
        .map_err(internal)
}

fn load_experiment(
    state: &AppState,
    id: &str,
) -> Result<(ExperimentConfig, LedgerStore), ApiError> {
    let store = LedgerStore::open(state.runs_root(), id).map_err(not_found)?;
    let config = store.load_config().map_err(internal)?;
    Ok((config, store))
}

async fn experiment_status(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<proto::StatusResponse>, ApiError> {
    let (config, store) = load_experiment(&state, &id)?;
    let plan = expand_grid(&config).map_err(internal)?;
    let ledger = store.load_ledger(&config).map_err(internal)?;
    Ok(Json(proto::StatusResponse {
        experiment_id: id.clone(),
        config_digest: config.digest(),
        summary: ledger.summary(plan.tasks.len()),
        running: state.is_running(&id).await,
    }))
}

async fn resume_experiment(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<proto::StatusResponse>, ApiError> {
    let (config, store) = load_experiment(&state, &id)?;
    // Surface digest mismatches now rather than inside the spawned task.
    store.load_ledger(&config).map_err(bad_request)?;
    spawn_execution(state.clone(), config.clone(), store).await?;
    let (config, store) = load_experiment(&state, &id)?;
    let plan = expand_grid(&config).map_err(internal)?;
    let ledger = store.load_ledger(&config).map_err(internal)?;
    Ok(Json(proto::StatusResponse {
        experiment_id: id.clone(),
        config_digest: config.digest(),
        summary: ledger.summary(plan.tasks.len()),
        running: state.is_running(&id).await,
    }))
}

async fn experiment_tensors(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<proto::TensorsResponse>, ApiError> {
    let (config, store) = load_experiment(&state, &id)?;
    let plan = expand_grid(&config).map_err(internal)?;
    let ledger = store.load_ledger(&config).map_err(internal)?;
    let set = assemble_tensor(
        &plan,
        &ledger,
        &config.endpoint,
        ExclusionPolicy::ExcludeIncomplete,
    )
    .map_err(bad_request)?;
    Ok(Json(proto::TensorsResponse {
        tensors: set.tensors,
        annex: set.annex,
    }))
}

async fn experiment_report(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(request): Json<proto::ReportRequest>,
) -> Result<Json<proto::ReportResponse>, ApiError> {
    let (config, store) = load_experiment(&state, &id)?;
    let plan = expand_grid(&config).map_err(internal)?;
    let ledger = store.load_ledger(&config).map_err(internal)?;
    let baselines = match &request.baselines_json {
        Some(text) => HumanBaselines::from_json(text).map_err(bad_request)?,
        None => HumanBaselines::shipped(),
    };
    let options = ReportOptions {
        tables: request.tables,
        charts: request.charts,
        baselines,
        ..Default::default()
    };
    let bundle = build_report(&config, &plan, &ledger, &options).map_err(internal)?;
    let out_dir = state.results_root().join(&id);
    bundle.write_to(&out_dir).map_err(internal)?;

    let mut files = Vec::new();
    for t in &bundle.tables {
        files.push(format!("results/{id}/{}.tsv", t.name));
        files.push(format!("results/{id}/{}.sidecar.json", t.name));
    }
    for c in &bundle.charts {
        files.push(format!("results/{id}/charts/{}.svg", c.name));
    }
    files.push(format!("results/{id}/annex.json"));
    files.push(format!("results/{id}/provenance.json"));
    Ok(Json(proto::ReportResponse {
        experiment_id: id,
        files,
    }))
}

async fn stats_welch(
    Json(request): Json<proto::TwoSampleRequest>,
) -> Result<Json<persona_stats::TestResult>, ApiError> {
    persona_stats::welch_t(&request.a, &request.b)
        .map(Json)
        .map_err(bad_request)
}

async fn stats_anova(
    Json(request): Json<proto::GroupsRequest>,
) -> Result<Json<persona_stats::TestResult>, ApiError> {
    persona_stats::one_way_anova(&request.groups)
        .map(Json)
        .map_err(bad_request)
}

async fn stats_tukey(
    Json(request): Json<proto::GroupsRequest>,
) -> Result<Json<Vec<persona_stats::PairwiseComparison>>, ApiError> {
    let alpha = request.alpha.unwrap_or(0.05);
    persona_stats::tukey_hsd(&request.groups, alpha)
        .map(Json)
        .map_err(bad_request)
}

async fn stats_pearson(
    Json(request): Json<proto::PairsRequest>,
) -> Result<Json<proto::CorrelationResponse>, ApiError> {
    persona_stats::pearson_r(&request.x, &request.y)
        .map(|r| Json(proto::CorrelationResponse { r }))
        .map_err(bad_request)
}

async fn stats_cohens_d(
    Json(request): Json<proto::TwoSampleRequest>,
) -> Result<Json<proto::EffectSizeResponse>, ApiError> {
    persona_metrics::cohens_d(&request.a, &request.b)
        .map(|d| Json(proto::EffectSizeResponse { d }))
        .map_err(bad_request)
}

async fn stats_bonferroni(
    Json(request): Json<proto::BonferroniRequest>,
) -> Result<Json<proto::BonferroniResponse>, ApiError> {
    if request.comparisons == 0 {
        return Err(bad_request("comparisons must be at least 1"));
    }
    Ok(Json(proto::BonferroniResponse {
        adjusted_alpha: persona_stats::bonferroni(request.alpha, request.comparisons),
    }))
}

async fn metrics_controllability(
    Json(request): Json<proto::ControllabilityRequest>,
) -> Result<Json<persona_metrics::ControllabilityReport>, ApiError> {
    controllability(&request.tensor, &request.target_map)
        .map(Json)
        .map_err(bad_request)
}

async fn metrics_stability(
    Json(request): Json<proto::StabilityRequest>,
) -> Result<Json<StabilityReport>, ApiError> {
    let _check: &ScoreTensor = &request.tensor;
    StabilityReport::compute(&request.tensor, &request.perspective, request.which)
        .map(Json)
        .map_err(bad_request)
}
