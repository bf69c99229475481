//! Read-only HTTP API over an immutable dataset snapshot and its atlas.
//!
//! Every handler is a thin adapter over a core operation; request state
//! (year, mapping, filters) travels in the query string, so the server keeps
//! no per-session data and a replayed request returns the same bytes.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use livingglobe_core::explore::{
    country_detail, effective_extent, suggest_countries, FilterState, Interval, Intervals,
};
use livingglobe_core::mapping::{build_frame, ColorScale, MappingConfig};
use livingglobe_core::store::{IndicatorId, YearRange};
use livingglobe_core::{Error as CoreError, Iso3};
use serde::{Deserialize, Serialize};
use tower_http::compression::CompressionLayer;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

use crate::assets::{atlas_dir, BLEND_FILE, GREYMAP_FILE, LOOKUP_FILE, OUTLINE_FILE};
use crate::Bundle;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bundle_dir: PathBuf,
    pub host: String,
    pub port: u16,
    pub static_dir: Option<PathBuf>,
    pub default_config: MappingConfig,
}

impl ServiceConfig {
    pub fn new(bundle_dir: impl Into<PathBuf>, port: u16) -> Self {
        ServiceConfig {
            bundle_dir: bundle_dir.into(),
            host: "127.0.0.1".into(),
            port,
            static_dir: None,
            default_config: MappingConfig::default(),
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.port == 0 {
            bail!("port must be in 1-65535");
        }
        if !Bundle::path_in(&self.bundle_dir).is_file() {
            bail!("no bundle at {}", Bundle::path_in(&self.bundle_dir).display());
        }
        if let Some(dir) = &self.static_dir {
            if !dir.is_dir() {
                bail!("static directory {} not found", dir.display());
            }
        }
        Ok(())
    }
}

pub struct AppState {
    pub bundle: Bundle,
    pub default_config: MappingConfig,
    assets: BTreeMap<&'static str, (&'static str, Vec<u8>)>,
}

impl AppState {
    /// Loads the bundle and the four atlas files; any missing piece is an error.
    pub fn load(bundle_dir: &Path, default_config: MappingConfig) -> anyhow::Result<Self> {
        let bundle = Bundle::read(bundle_dir)?;
        default_config.validate(&bundle.table)?;
        let dir = atlas_dir(bundle_dir);
        let mut assets = BTreeMap::new();
        for (name, mime) in [
            (LOOKUP_FILE, "image/png"),
            (OUTLINE_FILE, "image/png"),
            (BLEND_FILE, "image/png"),
            (GREYMAP_FILE, "application/json"),
        ] {
            let path = dir.join(name);
            let bytes = std::fs::read(&path).with_context(|| {
                format!("missing atlas asset {} (run build-atlas first)", path.display())
            })?;
            assets.insert(name, (mime, bytes));
        }
        Ok(AppState {
            bundle,
            default_config,
            assets,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: String,
}

impl ApiError {
    fn bad_request(msg: impl ToString) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            error: msg.to_string(),
        }
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let status = match e {
            CoreError::UnknownCountry(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError {
            status,
            error: e.to_string(),
        }
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, json_body(&self)).into_response()
    }
}

fn json_body<T: Serialize>(value: &T) -> Response {
    match serde_json::to_vec(value) {
        Ok(bytes) => (
            [(header::CONTENT_TYPE, "application/json; charset=utf-8")],
            bytes,
        )
            .into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

type ApiResult = Result<Response, ApiError>;

#[derive(Debug, Serialize)]
pub struct Catalog<'a> {
    pub years: YearRange,
    pub indicators: &'a [IndicatorId],
    pub scales: Vec<&'static str>,
    pub default_config: &'a MappingConfig,
}

async fn indicators(State(state): State<Arc<AppState>>) -> Response {
    json_body(&Catalog {
        years: state.bundle.table.years(),
        indicators: state.bundle.table.indicators(),
        scales: ColorScale::preset_ids().collect(),
        default_config: &state.default_config,
    })
}

#[derive(Debug, Serialize)]
pub struct CountrySummary<'a> {
    pub iso3: Iso3,
    pub name: &'a str,
    pub lat: f64,
    pub lon: f64,
    pub has_data: bool,
    pub has_borders: bool,
}

async fn countries(State(state): State<Arc<AppState>>) -> Response {
    let table = &state.bundle.table;
    let list: Vec<_> = state
        .bundle
        .geography
        .records()
        .iter()
        .map(|r| CountrySummary {
            iso3: r.iso3,
            name: &r.name,
            lat: r.lat,
            lon: r.lon,
            has_data: table.has_country(r.iso3),
            has_borders: !r.rings.is_empty(),
        })
        .collect();
    json_body(&list)
}

#[derive(Debug, Deserialize)]
pub struct FrameQuery {
    pub year: i32,
    /// JSON-encoded mapping config; the service default when absent.
    pub config: Option<String>,
    /// JSON-encoded `{"height": [lo, hi] | null, ...}`.
    pub filters: Option<String>,
}

pub fn parse_config(text: Option<&str>, default: &MappingConfig) -> Result<MappingConfig, ApiError> {
    match text {
        None | Some("") => Ok(default.clone()),
        Some(t) => serde_json::from_str(t).map_err(|e| ApiError::bad_request(format!("config: {e}"))),
    }
}

pub fn parse_filters(text: Option<&str>) -> Result<FilterState, ApiError> {
    let intervals: Intervals = match text {
        None | Some("") => Intervals::default(),
        Some(t) => serde_json::from_str(t).map_err(|e| ApiError::bad_request(format!("filters: {e}")))?,
    };
    Ok(FilterState {
        intervals,
        sticky: true,
    })
}

async fn frame(
    State(state): State<Arc<AppState>>,
    query: Result<Query<FrameQuery>, QueryRejection>,
) -> ApiResult {
    let Query(q) = query?;
    let config = parse_config(q.config.as_deref(), &state.default_config)?;
    let filters = parse_filters(q.filters.as_deref())?;
    let frame = build_frame(
        &state.bundle.table,
        &state.bundle.geography,
        &config,
        q.year,
        &filters,
    )?;
    Ok(json_body(&frame))
}

#[derive(Debug, Deserialize)]
pub struct CountryQuery {
    pub year: Option<i32>,
}

async fn country(
    State(state): State<Arc<AppState>>,
    UrlPath(code): UrlPath<String>,
    query: Result<Query<CountryQuery>, QueryRejection>,
) -> ApiResult {
    let Query(q) = query?;
    let iso3 = Iso3::new(&code.to_ascii_uppercase())?;
    let table = &state.bundle.table;
    let year = q.year.unwrap_or(table.years().last());
    Ok(json_body(&country_detail(
        table,
        &state.bundle.geography,
        iso3,
        year,
    )?))
}

#[derive(Debug, Deserialize)]
pub struct SearchQuery {
    #[serde(default)]
    pub q: String,
}

async fn search(
    State(state): State<Arc<AppState>>,
    query: Result<Query<SearchQuery>, QueryRejection>,
) -> ApiResult {
    let Query(q) = query?;
    Ok(json_body(&suggest_countries(
        &q.q,
        state.bundle.geography.records(),
    )))
}

#[derive(Debug, Deserialize)]
pub struct ExtentQuery {
    pub indicator: String,
    pub year: i32,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

async fn extent(
    State(state): State<Arc<AppState>>,
    query: Result<Query<ExtentQuery>, QueryRejection>,
) -> ApiResult {
    let Query(q) = query?;
    let filter = match (q.lo, q.hi) {
        (None, None) => None,
        (lo, hi) => Some(Interval::new(
            lo.unwrap_or(f64::NEG_INFINITY),
            hi.unwrap_or(f64::INFINITY),
        )?),
    };
    Ok(json_body(&effective_extent(
        &state.bundle.table,
        &q.indicator,
        q.year,
        filter.as_ref(),
    )?))
}

async fn asset(State(state): State<Arc<AppState>>, UrlPath(name): UrlPath<String>) -> Response {
    match state.assets.get(name.as_str()) {
        Some((mime, bytes)) => ([(header::CONTENT_TYPE, *mime)], bytes.clone()).into_response(),
        None => ApiError {
            status: StatusCode::NOT_FOUND,
            error: format!("no asset {name:?}"),
        }
        .into_response(),
    }
}

pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET]);
    let mut app = Router::new()
        .route("/api/indicators", get(indicators))
        .route("/api/countries", get(countries))
        .route("/api/frame", get(frame))
        .route("/api/country/{iso3}", get(country))
        .route("/api/search", get(search))
        .route("/api/extent", get(extent))
        .route("/assets/{name}", get(asset))
        .with_state(state);
    if let Some(dir) = static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    app.layer(CompressionLayer::new()).layer(cors).layer(
        tower_http::set_header::SetResponseHeaderLayer::if_not_present(
            header::CACHE_CONTROL,
            HeaderValue::from_static("no-cache"),
        ),
    )
}

pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    config.validate()?;
    let state = Arc::new(AppState::load(&config.bundle_dir, config.default_config.clone())?);
    let app = router(state, config.static_dir.as_deref());
    let addr: SocketAddr = format!("{}:{}", config.host, config.port)
        .parse()
        .with_context(|| format!("bad listen address {}:{}", config.host, config.port))?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
