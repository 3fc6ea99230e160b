//! Read-only HTTP API over one loaded model.
//!
//! | Endpoint | Query | Body |
//! |---|---|---|
//! | `GET /model` | none | canonical model document |
//! | `GET /scenarios` | none | scenario listing with assessable sources |
//! | `GET /assess` | `scenario`, `source`, and `controls=a,b` or `config=id` | assessment |
//! | `GET /whatif` | `scenario`, `source`, `base`/`base_controls`, `alt`/`alt_controls` | what-if diff |
//!
//! Unknown ids answer 404, malformed or incomplete queries 400, and pairs
//! that cannot be assessed (out of scope, no tree) 422. Every error body is
//! `{"error": <code>, "message": <text>}`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::State;
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Router;
use matra_core::engine::{assess, resolve_configuration};
use matra_core::model::{Configuration, ThreatModel};
use matra_core::whatif::whatif_diff;
use matra_core::EngineError;
use serde::Serialize;
use thiserror::Error;

use crate::io::{serialize_model, to_json};

pub const CONTENT_TYPE: &str = "application/json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiResponse {
    pub status: u16,
    pub body: String,
}

impl ApiResponse {
    fn ok(body: String) -> Self {
        ApiResponse { status: 200, body }
    }

    fn error(status: u16, code: &str, message: impl Into<String>) -> Self {
        #[derive(Serialize)]
        struct ErrorBody<'a> {
            error: &'a str,
            message: String,
        }
        ApiResponse { status, body: to_json(&ErrorBody { error: code, message: message.into() }) }
    }

    fn bad_query(message: impl Into<String>) -> Self {
        ApiResponse::error(400, "bad-query", message)
    }
}

impl From<EngineError> for ApiResponse {
    fn from(e: EngineError) -> Self {
        let (status, code) = match &e {
            EngineError::UnknownScenario(_) => (404, "unknown-scenario"),
            EngineError::UnknownSource(_) => (404, "unknown-source"),
            EngineError::UnknownConfiguration(_) => (404, "unknown-configuration"),
            EngineError::UnknownControl(_) => (404, "unknown-control"),
            EngineError::OutOfScope { .. } => (422, "out-of-scope"),
            EngineError::NoTree { .. } => (422, "no-tree"),
            EngineError::PathExplosion { .. } => (422, "path-explosion"),
            _ => (500, "engine-error"),
        };
        ApiResponse::error(status, code, e.to_string())
    }
}

#[derive(Serialize)]
struct ScenarioEntry<'a> {
    id: &'a str,
    asset: &'a str,
    dimensions: &'a [matra_core::model::CiaDimension],
    description: &'a str,
    impact: matra_core::Level,
    in_scope_sources: &'a [String],
    assessable_sources: Vec<&'a str>,
}

/// Parsed query string. Keys may appear once; unlisted keys are rejected.
struct Query(Vec<(String, String)>);

impl Query {
    fn parse(raw: Option<&str>, allowed: &[&str]) -> Result<Query, ApiResponse> {
        let pairs: Vec<(String, String)> = serde_urlencoded::from_str(raw.unwrap_or(""))
            .map_err(|e| ApiResponse::bad_query(format!("malformed query string: {e}")))?;
        for (i, (k, _)) in pairs.iter().enumerate() {
            if !allowed.contains(&k.as_str()) {
                return Err(ApiResponse::bad_query(format!("unexpected parameter `{k}`")));
            }
            if pairs[..i].iter().any(|(p, _)| p == k) {
                return Err(ApiResponse::bad_query(format!("parameter `{k}` given twice")));
            }
        }
        Ok(Query(pairs))
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn require(&self, key: &str) -> Result<&str, ApiResponse> {
        match self.get(key) {
            Some(v) if !v.is_empty() => Ok(v),
            _ => Err(ApiResponse::bad_query(format!("missing parameter `{key}`"))),
        }
    }
}

/// Comma-separated control ids; empty entries are ignored.
pub fn parse_control_list(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

/// The engine behind the HTTP endpoints, without any transport.
#[derive(Debug, Clone)]
pub struct Api {
    model: Arc<ThreatModel>,
    model_json: Arc<String>,
}

impl Api {
    pub fn new(model: ThreatModel) -> Self {
        let model_json = serialize_model(&model);
        Api { model: Arc::new(model), model_json: Arc::new(model_json) }
    }

    pub fn model(&self) -> &ThreatModel {
        &self.model
    }

    pub fn get(&self, path: &str, query: Option<&str>) -> ApiResponse {
        let result = match path {
            "/model" => Query::parse(query, &[]).map(|_| ApiResponse::ok(self.model_json.as_str().to_owned())),
            "/scenarios" => Query::parse(query, &[]).map(|_| self.scenarios()),
            "/assess" => {
                Query::parse(query, &["scenario", "source", "controls", "config"]).and_then(|q| self.assess(&q))
            }
            "/whatif" => Query::parse(query, &["scenario", "source", "base", "alt", "base_controls", "alt_controls"])
                .and_then(|q| self.whatif(&q)),
            _ => Err(ApiResponse::error(404, "not-found", format!("no endpoint {path}"))),
        };
        result.unwrap_or_else(|e| e)
    }

    fn scenarios(&self) -> ApiResponse {
        let entries: Vec<ScenarioEntry<'_>> = self
            .model
            .scenarios
            .iter()
            .map(|s| ScenarioEntry {
                id: &s.id,
                asset: &s.asset,
                dimensions: &s.dimensions,
                description: &s.description,
                impact: s.impact,
                in_scope_sources: &s.in_scope_sources,
                assessable_sources: self.model.assessable_sources(s).into_iter().map(|src| src.id.as_str()).collect(),
            })
            .collect();
        ApiResponse::ok(to_json(&entries))
    }

    fn configuration(&self, q: &Query, named: &str, controls: &str) -> Result<Configuration, ApiResponse> {
        match (q.get(named), q.get(controls)) {
            (Some(_), Some(_)) => {
                Err(ApiResponse::bad_query(format!("give either `{named}` or `{controls}`, not both")))
            }
            (Some(id), None) => Ok(resolve_configuration(&self.model, id)?),
            (None, Some(list)) => Ok(Configuration::ad_hoc(parse_control_list(list))),
            (None, None) => Err(ApiResponse::bad_query(format!("missing parameter `{named}` or `{controls}`"))),
        }
    }

    fn assess(&self, q: &Query) -> Result<ApiResponse, ApiResponse> {
        let scenario = q.require("scenario")?;
        let source = q.require("source")?;
        let config = match (q.get("config"), q.get("controls")) {
            (None, None) => self.model.default_configuration(),
            _ => self.configuration(q, "config", "controls")?,
        };
        let a = assess(&self.model, scenario, source, &config)?;
        Ok(ApiResponse::ok(to_json(&a)))
    }

    fn whatif(&self, q: &Query) -> Result<ApiResponse, ApiResponse> {
        let scenario = q.require("scenario")?;
        let source = q.require("source")?;
        let base = self.configuration(q, "base", "base_controls")?;
        let alt = self.configuration(q, "alt", "alt_controls")?;
        let diff = whatif_diff(&self.model, scenario, source, &base, &alt)?;
        Ok(ApiResponse::ok(to_json(&diff)))
    }
}

async fn dispatch(State(api): State<Api>, method: Method, uri: Uri) -> Response {
    if method != Method::GET {
        let r = ApiResponse::error(405, "method-not-allowed", "the service is read-only");
        return respond(r);
    }
    respond(api.get(uri.path(), uri.query()))
}

fn respond(r: ApiResponse) -> Response {
    let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, CONTENT_TYPE)], r.body).into_response()
}

pub fn router(api: Api) -> Router {
    Router::new().fallback(dispatch).with_state(api)
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Binds `addr` and returns the listener, so callers learn about bind
/// failures before the server starts.
pub async fn bind(addr: SocketAddr) -> Result<tokio::net::TcpListener, ServeError> {
    tokio::net::TcpListener::bind(addr).await.map_err(|source| ServeError::Bind { addr, source })
}

pub async fn serve(api: Api, listener: tokio::net::TcpListener) -> Result<(), ServeError> {
    axum::serve(listener, router(api)).await?;
    Ok(())
}
