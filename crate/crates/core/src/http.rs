//! Minimal blocking JSON-over-HTTP used by the remote scorer and realizer.

use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug)]
pub(crate) enum CallError {
    /// Connection, timeout or non-2xx status.
    Transport(String),
    /// The body was not JSON.
    Malformed(String),
}

pub(crate) fn post_json<B: Serialize>(
    url: &str,
    body: &B,
    bearer: Option<&str>,
    timeout: Duration,
) -> Result<Value, CallError> {
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    let mut request = agent.post(url).set("Content-Type", "application/json");
    if let Some(key) = bearer {
        request = request.set("Authorization", &format!("Bearer {key}"));
    }
    let response = request.send_json(body).map_err(|e| match e {
        ureq::Error::Status(code, _) => CallError::Transport(format!("{url} returned HTTP {code}")),
        ureq::Error::Transport(t) => CallError::Transport(t.to_string()),
    })?;
    let text = response
        .into_string()
        .map_err(|e| CallError::Transport(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| CallError::Malformed(e.to_string()))
}
