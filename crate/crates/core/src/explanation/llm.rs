//! Chat-completions realizer and the run log that audits every
//! realization.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use chrono::{DateTime, Utc};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::http::{post_json, CallError, DEFAULT_TIMEOUT};

use super::prompt::{PromptBundle, PromptMode};

pub const DEFAULT_CHAT_MODEL: &str = "gpt-4o";

#[derive(Debug, Clone)]
pub struct ChatEndpoint {
    /// Full chat-completions URL.
    pub url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub temperature: f64,
    pub timeout: Duration,
}

impl ChatEndpoint {
    pub fn new(url: impl Into<String>) -> Self {
        ChatEndpoint {
            url: url.into(),
            model: DEFAULT_CHAT_MODEL.into(),
            api_key: None,
            temperature: 0.0,
            timeout: DEFAULT_TIMEOUT,
        }
    }
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RunRecord {
    pub mode: PromptMode,
    /// `template`, `llm`, or `template-fallback`.
    pub realizer: String,
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub text: String,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Default)]
pub struct RunLog {
    pub records: Vec<RunRecord>,
}

impl RunLog {
    pub fn push(&mut self, record: RunRecord) {
        self.records.push(record);
    }

    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("run record serializes") + "\n")
            .collect()
    }

    /// Appends the records to a JSONL file.
    pub fn append_to(&self, path: &Path) -> Result<()> {
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        file.write_all(self.to_jsonl().as_bytes())?;
        Ok(())
    }
}

pub fn chat_request(bundle: &PromptBundle, endpoint: &ChatEndpoint) -> Value {
    json!({
        "model": endpoint.model,
        "temperature": endpoint.temperature,
        "messages": [
            {"role": "system", "content": bundle.system_instruction},
            {"role": "user", "content": bundle.user_message()},
        ],
    })
}

fn completion_text(body: &Value) -> Result<String> {
    let content = body
        .pointer("/choices/0/message/content")
        .ok_or_else(|| Error::ProtocolError("response has no choices[0].message.content".into()))?;
    match content {
        Value::Null => Err(Error::EmptyCompletion),
        Value::String(s) if s.trim().is_empty() => Err(Error::EmptyCompletion),
        Value::String(s) => Ok(s.clone()),
        other => Err(Error::ProtocolError(format!(
            "message content is not a string: {other}"
        ))),
    }
}

/// Sends one chat request and returns the completion verbatim. The
/// request, the response and any error are appended to `log`.
pub fn realize_llm(bundle: &PromptBundle, endpoint: &ChatEndpoint, log: &mut RunLog) -> Result<String> {
    let started_at = Utc::now();
    let request = chat_request(bundle, endpoint);
    let outcome = if endpoint.url.trim().is_empty() {
        Err(CallError::Transport("no chat endpoint configured".into()))
    } else {
        post_json(&endpoint.url, &request, endpoint.api_key.as_deref(), endpoint.timeout)
    };
    let (response, result) = match outcome {
        Ok(body) => {
            let text = completion_text(&body);
            (Some(body), text)
        }
        Err(CallError::Transport(msg)) => (None, Err(Error::RealizerUnavailable(msg))),
        Err(CallError::Malformed(msg)) => (None, Err(Error::ProtocolError(msg))),
    };
    log.push(RunRecord {
        mode: bundle.mode,
        realizer: "llm".into(),
        fallback: false,
        prompt: Some(request),
        response,
        error: result.as_ref().err().map(ToString::to_string),
        text: result.as_ref().cloned().unwrap_or_default(),
        started_at,
        finished_at: Utc::now(),
    });
    result
}
