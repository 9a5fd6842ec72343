//! HTTP entropy provider.
//!
//! Contract: POST `{"sentence": "<text>"}` to the endpoint; the scorer
//! answers `{"tokens": [{"text", "start", "end", "entropy"}, ...]}` with
//! char spans into the sentence and entropies in nats. Any non-2xx status is
//! an error. If `PROMPTSHEAR_TOKEN` is set it is sent as a bearer token.

use promptshear_core::{EntropyProvider, ScoreError, ScoredToken};
use serde::{Deserialize, Serialize};

#[derive(Serialize)]
struct ScoreRequest<'a> {
    sentence: &'a str,
}

#[derive(Deserialize)]
struct ScoreResponse {
    tokens: Vec<WireToken>,
}

#[derive(Deserialize)]
struct WireToken {
    text: String,
    start: usize,
    end: usize,
    entropy: f64,
}

pub struct RemoteProvider {
    endpoint: String,
    token: Option<String>,
    client: reqwest::blocking::Client,
}

impl RemoteProvider {
    pub fn new(endpoint: &str) -> RemoteProvider {
        RemoteProvider {
            endpoint: endpoint.to_string(),
            token: std::env::var("PROMPTSHEAR_TOKEN").ok(),
            client: reqwest::blocking::Client::new(),
        }
    }
}

impl EntropyProvider for RemoteProvider {
    fn score_sentence(&self, sentence: &str) -> Result<Vec<ScoredToken>, ScoreError> {
        let mut request = self
            .client
            .post(&self.endpoint)
            .json(&ScoreRequest { sentence });
        if let Some(token) = &self.token {
            request = request.bearer_auth(token);
        }
        let response = request.send().map_err(|e| ScoreError::Provider {
            detail: format!("request to {} failed: {e}", self.endpoint),
        })?;
        let status = response.status();
        if !status.is_success() {
            return Err(ScoreError::Provider {
                detail: format!("scorer returned {status}"),
            });
        }
        let body: ScoreResponse = response.json().map_err(|e| ScoreError::Provider {
            detail: format!("malformed scorer response: {e}"),
        })?;
        Ok(body
            .tokens
            .into_iter()
            .map(|t| ScoredToken {
                text: t.text,
                span: (t.start, t.end),
                entropy: t.entropy,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use promptshear_core::validate_scored;
    use std::io::{Read, Write};
    use std::net::TcpListener;

    /// One-shot HTTP server answering a fixed JSON body.
    fn serve_once(body: &'static str, status: &'static str) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = [0u8; 4096];
            let _ = stream.read(&mut buf);
            let response = format!(
                "HTTP/1.1 {status}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(response.as_bytes()).unwrap();
        });
        format!("http://{addr}/score")
    }

    #[test]
    fn echoes_mock_payload() {
        let url = serve_once(
            r#"{"tokens":[{"text":"Hi","start":0,"end":2,"entropy":1.5},{"text":"!","start":2,"end":3,"entropy":0.25}]}"#,
            "200 OK",
        );
        let provider = RemoteProvider::new(&url);
        let scored = provider.score_sentence("Hi!").unwrap();
        assert_eq!(scored.len(), 2);
        assert_eq!(scored[0].text, "Hi");
        assert_eq!(scored[0].span, (0, 2));
        assert_eq!(scored[0].entropy, 1.5);
        validate_scored(0, "Hi!", &scored).unwrap();
    }

    #[test]
    fn overlapping_spans_fail_validation() {
        let url = serve_once(
            r#"{"tokens":[{"text":"Hi","start":0,"end":2,"entropy":1.0},{"text":"i!","start":1,"end":3,"entropy":1.0}]}"#,
            "200 OK",
        );
        let provider = RemoteProvider::new(&url);
        let scored = provider.score_sentence("Hi!").unwrap();
        assert!(validate_scored(0, "Hi!", &scored).is_err());
    }

    #[test]
    fn non_2xx_is_an_error() {
        let url = serve_once("{}", "500 Internal Server Error");
        let provider = RemoteProvider::new(&url);
        let err = provider.score_sentence("Hi!").unwrap_err();
        assert!(matches!(err, ScoreError::Provider { .. }));
    }

    #[test]
    fn malformed_body_is_an_error() {
        let url = serve_once("not json at all", "200 OK");
        let provider = RemoteProvider::new(&url);
        let err = provider.score_sentence("Hi!").unwrap_err();
        assert!(matches!(err, ScoreError::Provider { .. }));
    }
}
