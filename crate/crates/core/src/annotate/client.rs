use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::AnnotateError;

/// Which agent a call addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    AgentA,
    AgentB,
    Filter,
}

/// One model call: instructions plus a TSV payload of the batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub role: Role,
    pub prompt: String,
    pub payload_tsv: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("model call failed: {0}")]
pub struct LlmError(pub String);

/// A chat model answering with raw TSV.
pub trait LlmClient: Send + Sync {
    fn call(&self, request: &LlmRequest) -> Result<String, LlmError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmClientConfig {
    pub endpoint: String,
    pub role: Role,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    /// Name of the environment variable holding a bearer token, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_env: Option<String>,
}

fn default_max_retries() -> u32 {
    3
}

fn default_timeout_ms() -> u64 {
    120_000
}

impl LlmClientConfig {
    pub fn new(endpoint: impl Into<String>, role: Role) -> Self {
        LlmClientConfig {
            endpoint: endpoint.into(),
            role,
            temperature: 0.0,
            max_retries: default_max_retries(),
            timeout_ms: default_timeout_ms(),
            token_env: None,
        }
    }

    pub fn validate(&self) -> Result<(), AnnotateError> {
        if matches!(self.role, Role::AgentA | Role::AgentB) && self.temperature != 0.0 {
            return Err(AnnotateError::Config(format!(
                "{:?} must run at temperature 0, got {}",
                self.role, self.temperature
            )));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(AnnotateError::Config(format!("temperature {} out of range", self.temperature)));
        }
        if self.endpoint.is_empty() {
            return Err(AnnotateError::Config("empty endpoint".into()));
        }
        Ok(())
    }
}

/// `POST {role, prompt, payload_tsv}` answered by `{tsv}`.
#[derive(Debug, Clone)]
pub struct HttpLlmClient {
    config: LlmClientConfig,
    token: Option<String>,
}

#[derive(Deserialize)]
struct LlmResponse {
    tsv: String,
}

impl HttpLlmClient {
    pub fn new(config: LlmClientConfig) -> Result<Self, AnnotateError> {
        config.validate()?;
        let token = config.token_env.as_deref().and_then(|k| std::env::var(k).ok());
        Ok(HttpLlmClient { config, token })
    }
}

impl LlmClient for HttpLlmClient {
    fn call(&self, request: &LlmRequest) -> Result<String, LlmError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(self.config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        let mut req = agent.post(&self.config.endpoint);
        if let Some(t) = &self.token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        let mut resp = req.send_json(request).map_err(|e| LlmError(e.to_string()))?;
        if resp.status() != 200 {
            return Err(LlmError(format!("HTTP {}", resp.status())));
        }
        let body: LlmResponse = resp.body_mut().read_json().map_err(|e| LlmError(e.to_string()))?;
        Ok(body.tsv)
    }
}
