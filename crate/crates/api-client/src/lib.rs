//! Thin typed client for the persona-probe service.

use persona_protocol as proto;
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),

    #[error("service error ({status}): {message}")]
    Service { status: u16, message: String },
}

pub struct ApiClient {
    base_url: String,
    http: reqwest::Client,
}

impl ApiClient {
    pub fn new(base_url: impl Into<String>) -> Self {
        ApiClient {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    async fn decode<T: DeserializeOwned>(response: reqwest::Response) -> Result<T, Error> {
        let status = response.status();
        if status.is_success() {
            Ok(response.json().await?)
        } else {
            let message = match response.json::<proto::ErrorBody>().await {
                Ok(body) => body.error,
                Err(_) => status
                    .canonical_reason()
                    .unwrap_or("unknown error")
                    .to_string(),
            };
            Err(Error::Service {
                status: status.as_u16(),
                message,
            })
        }
    }

    async fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T, Error> {
        let response = self
            .http
            .get(format!("{}{path}", self.base_url))
            .send()
            .await?;
        Self::decode(response).await
    }

    async fn post<B: Serialize, T: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<T, Error> {
        let response = self
            .http
            .post(format!("{}{path}", self.base_url))
            .json(body)
            .send()
            .await?;
        Self::decode(response).await
    }

    pub async fn health(&self) -> Result<proto::HealthResponse, Error> {
        self.get("/health").await
    }

    pub async fn questionnaires(&self) -> Result<Vec<proto::QuestionnaireSummary>, Error> {
        self.get("/v1/questionnaires").await
    }

    pub async fn questionnaire(&self, id: &str) -> Result<proto::Questionnaire, Error> {
        self.get(&format!("/v1/questionnaires/{id}")).await
    }

    pub async fn score(&self, request: &proto::ScoreRequest) -> Result<proto::ScoreProfile, Error> {
        self.post("/v1/score", request).await
    }

    pub async fn contexts(&self) -> Result<Vec<String>, Error> {
        self.get("/v1/contexts").await
    }

    pub async fn context(&self, name: &str) -> Result<proto::ContextSpec, Error> {
        self.get(&format!("/v1/contexts/{name}")).await
    }

    pub async fn preview(
        &self,
        request: &proto::PreviewRequest,
    ) -> Result<proto::PromptBundle, Error> {
        self.post("/v1/prompts/preview", request).await
    }

    pub async fn submit(
        &self,
        config: &proto::ExperimentConfig,
    ) -> Result<proto::SubmitResponse, Error> {
        self.post("/v1/experiments", config).await
    }

    pub async fn experiments(&self) -> Result<Vec<String>, Error> {
        self.get("/v1/experiments").await
    }

    pub async fn status(&self, id: &str) -> Result<proto::StatusResponse, Error> {
        self.get(&format!("/v1/experiments/{id}")).await
    }

    pub async fn resume(&self, id: &str) -> Result<proto::StatusResponse, Error> {
        self.post(
            &format!("/v1/experiments/{id}/resume"),
            &serde_json::json!({}),
        )
        .await
    }

    pub async fn tensors(&self, id: &str) -> Result<proto::TensorsResponse, Error> {
        self.get(&format!("/v1/experiments/{id}/tensors")).await
    }

    pub async fn report(
        &self,
        id: &str,
        request: &proto::ReportRequest,
    ) -> Result<proto::ReportResponse, Error> {
        self.post(&format!("/v1/experiments/{id}/report"), request)
            .await
    }

    pub async fn welch(
        &self,
        request: &proto::TwoSampleRequest,
    ) -> Result<proto::TestResult, Error> {
        self.post("/v1/stats/welch", request).await
    }

    pub async fn anova(&self, request: &proto::GroupsRequest) -> Result<proto::TestResult, Error> {
        self.post("/v1/stats/anova", request).await
    }

    pub async fn tukey(
        &self,
        request: &proto::GroupsRequest,
    ) -> Result<Vec<proto::PairwiseComparison>, Error> {
        self.post("/v1/stats/tukey", request).await
    }

    pub async fn pearson(
        &self,
        request: &proto::PairsRequest,
    ) -> Result<proto::CorrelationResponse, Error> {
        self.post("/v1/stats/pearson", request).await
    }

    pub async fn cohens_d(
        &self,
        request: &proto::TwoSampleRequest,
    ) -> Result<proto::EffectSizeResponse, Error> {
        self.post("/v1/stats/cohens-d", request).await
    }

    pub async fn bonferroni(
        &self,
        request: &proto::BonferroniRequest,
    ) -> Result<proto::BonferroniResponse, Error> {
        self.post("/v1/stats/bonferroni", request).await
    }

    pub async fn controllability(
        &self,
        request: &proto::ControllabilityRequest,
    ) -> Result<proto::ControllabilityReport, Error> {
        self.post("/v1/metrics/controllability", request).await
    }

    pub async fn stability(
        &self,
        request: &proto::StabilityRequest,
    ) -> Result<proto::StabilityReport, Error> {
        self.post("/v1/metrics/stability", request).await
    }
}
