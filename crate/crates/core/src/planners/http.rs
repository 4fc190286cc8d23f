//! OpenAI-compatible chat-completions transport. Frames are attached as
//! base64 data URLs.

use base64::Engine;
use serde_json::{json, Value};

use super::provider::{ModelRequest, ProviderConfig, Transport, TransportError};

#[derive(Debug, Clone)]
pub struct ChatCompletionsTransport {
    endpoint: String,
    model_name: String,
    credential: String,
}

impl ChatCompletionsTransport {
    /// Resolves the credential from the environment variable named in the config.
    pub fn from_config(config: &ProviderConfig) -> Result<Self, TransportError> {
        let credential = std::env::var(&config.credential_env)
            .ok()
            .filter(|v| !v.is_empty())
            .ok_or_else(|| TransportError::MissingCredential(config.credential_env.clone()))?;
        Ok(Self {
            endpoint: config.endpoint.clone(),
            model_name: config.model_name.clone(),
            credential,
        })
    }

    fn body(&self, request: &ModelRequest) -> Result<Value, TransportError> {
        let mut content = vec![json!({"type": "text", "text": request.prompt})];
        for image in &request.images {
            let bytes = std::fs::read(image)
                .map_err(|e| TransportError::Failed(format!("{}: {e}", image.display())))?;
            let encoded = base64::engine::general_purpose::STANDARD.encode(bytes);
            content.push(json!({
                "type": "image_url",
                "image_url": {"url": format!("data:image/jpeg;base64,{encoded}")}
            }));
        }
        Ok(json!({
            "model": self.model_name,
            "messages": [{"role": "user", "content": content}],
        }))
    }
}

impl Transport for ChatCompletionsTransport {
    fn complete(&self, request: &ModelRequest) -> Result<String, TransportError> {
        let body = self.body(request)?;
        let mut response = ureq::post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.credential))
            .send_json(&body)
            .map_err(|e| TransportError::Failed(e.to_string()))?;
        let value: Value = response
            .body_mut()
            .read_json()
            .map_err(|e| TransportError::Failed(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| TransportError::Failed("response has no message content".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_credential_names_the_variable() {
        let config = ProviderConfig {
            provider_id: "p".into(),
            endpoint: "http://127.0.0.1:9/v1/chat/completions".into(),
            model_name: "m".into(),
            credential_env: "SCENTPLAN_TEST_SURELY_UNSET_KEY".into(),
            budget: 1,
        };
        let err = ChatCompletionsTransport::from_config(&config).unwrap_err();
        assert!(err.to_string().contains("SCENTPLAN_TEST_SURELY_UNSET_KEY"));
    }
}
