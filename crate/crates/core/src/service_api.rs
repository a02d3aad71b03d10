//! HTTP/JSON facade for the interactive planar board.
//!
//! Sessions live in memory and expire after a configurable idle time.
//! Mutations of one session are serialized by a per-session lock; the user
//! set of a session never changes after creation.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::Mutex;

use crate::best_response::{best_response, voronoi_cells};
use crate::epsilon_table::{approx_factor, build_table, parse_rational, rat, JsonRational, Rational};
use crate::error::VgError;
use crate::game_engine::{custom_strategy, evaluate, generate_users, GameResult, InstanceSpec};
use crate::geometry::{bbox_of, FacilitySet, Point, UserSet};
use crate::p1_strategies::{build_strategy, StrategyKind};

/// Largest user set a session accepts.
pub const MAX_USERS: usize = 2000;
/// Largest `kmax` served by the table endpoint.
pub const MAX_TABLE_K: i64 = 5000;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub ttl: Duration,
    pub persist: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { ttl: Duration::from_secs(3600), persist: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Move {
    Place { point: Point },
    Undo { point: Point },
}

/// Everything a session holds, in the form written to disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub session_id: String,
    pub n: usize,
    pub k: usize,
    pub users: Vec<Point>,
    pub f1: Vec<Point>,
    pub history: Vec<Move>,
    pub committed: bool,
}

struct Session {
    snap: SessionSnapshot,
    users: Arc<UserSet>,
    last_access: Instant,
}

struct Inner {
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    counter: AtomicU64,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState(Arc::new(Inner { config, sessions: RwLock::new(HashMap::new()), counter: AtomicU64::new(0) }))
    }

    pub fn session_count(&self) -> usize {
        self.0.sessions.read().expect("session map poisoned").len()
    }

    /// Drops sessions idle for longer than the TTL; returns how many.
    pub async fn evict_expired(&self) -> usize {
        let now = Instant::now();
        let entries: Vec<(String, Arc<Mutex<Session>>)> = {
            let map = self.0.sessions.read().expect("session map poisoned");
            map.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
        };
        let mut expired = Vec::new();
        for (id, s) in entries {
            if let Ok(guard) = s.try_lock() {
                if now.duration_since(guard.last_access) > self.0.config.ttl {
                    expired.push(id);
                }
            }
        }
        let mut map = self.0.sessions.write().expect("session map poisoned");
        for id in &expired {
            map.remove(id);
        }
        expired.len()
    }

    /// Reloads sessions previously dumped to the persist directory.
    pub fn load_persisted(&self) -> std::io::Result<usize> {
        let Some(dir) = &self.0.config.persist else { return Ok(0) };
        if !dir.exists() {
            return Ok(0);
        }
        let mut loaded = 0;
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let Ok(text) = std::fs::read_to_string(&path) else { continue };
            let Ok(snap) = serde_json::from_str::<SessionSnapshot>(&text) else { continue };
            let Ok(users) = UserSet::new(snap.users.clone()) else { continue };
            let session = Session { snap, users: Arc::new(users), last_access: Instant::now() };
            let id = session.snap.session_id.clone();
            self.0.sessions.write().expect("session map poisoned").insert(id, Arc::new(Mutex::new(session)));
            loaded += 1;
        }
        Ok(loaded)
    }

    fn lookup(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.0
            .sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("unknown session {id}")))
    }

    fn fresh_id(&self) -> String {
        let c = self.0.counter.fetch_add(1, Ordering::Relaxed);
        format!("s{c:x}-{:016x}", rand::random::<u64>())
    }

    fn persist(&self, snap: &SessionSnapshot) {
        if let Some(dir) = &self.0.config.persist {
            // Persistence is best effort; a failed dump never fails a request.
            if std::fs::create_dir_all(dir).is_ok() {
                if let Ok(text) = serde_json::to_string_pretty(snap) {
                    let _ = std::fs::write(dir.join(format!("{}.json", snap.session_id)), text);
                }
            }
        }
    }
}

/// JSON error body with an HTTP status.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }
    fn not_found(m: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, m)
    }
    fn conflict(m: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, m)
    }
    fn unprocessable(m: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, m)
    }
}

impl From<VgError> for ApiError {
    fn from(e: VgError) -> Self {
        let status = match e {
            VgError::FacilityCollision(_) => StatusCode::CONFLICT,
            VgError::Verification(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn planar_point(coords: &[f64]) -> ApiResult<Point> {
    if coords.len() != 2 {
        return Err(ApiError::unprocessable(format!("expected [x, y], got {} coordinates", coords.len())));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(ApiError::unprocessable("coordinates must be finite"));
    }
    Ok(Point::new2(coords[0], coords[1]))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("worker failed: {e}")))
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    pub users: Option<Vec<Vec<f64>>>,
    pub gen_spec: Option<String>,
    pub k: usize,
    #[serde(default)]
    pub allow_degenerate: bool,
}

async fn create_session(State(app): State<AppState>, Json(req): Json<CreateRequest>) -> ApiResult<Response> {
    app.evict_expired().await;
    if req.k == 0 {
        return Err(ApiError::unprocessable("k must be at least 1"));
    }
    let users = match (req.users, req.gen_spec) {
        (Some(_), Some(_)) => return Err(ApiError::unprocessable("give either users or gen_spec, not both")),
        (Some(raw), None) => {
            let pts = raw.iter().map(|c| planar_point(c)).collect::<ApiResult<Vec<_>>>()?;
            if pts.is_empty() || pts.len() > MAX_USERS {
                return Err(ApiError::unprocessable(format!("need between 1 and {MAX_USERS} users")));
            }
            UserSet::new_checked(pts, req.allow_degenerate)?
        }
        (None, Some(g)) => {
            let spec = InstanceSpec::parse(&g)?;
            if spec.dim != 2 {
                return Err(ApiError::unprocessable("the board is planar; use dim=2"));
            }
            if spec.n > MAX_USERS {
                return Err(ApiError::unprocessable(format!("at most {MAX_USERS} users")));
            }
            blocking(move || generate_users(&spec)).await??
        }
        (None, None) => return Err(ApiError::unprocessable("users or gen_spec is required")),
    };
    let id = app.fresh_id();
    let snap = SessionSnapshot {
        session_id: id.clone(),
        n: users.len(),
        k: req.k,
        users: users.points().to_vec(),
        f1: Vec::new(),
        history: Vec::new(),
        committed: false,
    };
    app.persist(&snap);
    let body = json!({ "session_id": id, "n": snap.n, "k": snap.k, "users": snap.users });
    let session = Session { snap, users: Arc::new(users), last_access: Instant::now() };
    app.0.sessions.write().expect("session map poisoned").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionSnapshot>> {
    app.evict_expired().await;
    let s = app.lookup(&id)?;
    let mut s = s.lock().await;
    s.last_access = Instant::now();
    Ok(Json(s.snap.clone()))
}

#[derive(Debug, Deserialize)]
pub struct PlaceRequest {
    pub point: Vec<f64>,
}

async fn place(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<PlaceRequest>,
) -> ApiResult<Json<SessionSnapshot>> {
    app.evict_expired().await;
    let p = planar_point(&req.point)?;
    let s = app.lookup(&id)?;
    let mut s = s.lock().await;
    s.last_access = Instant::now();
    if s.snap.committed {
        return Err(ApiError::conflict("session already committed"));
    }
    if s.snap.f1.len() >= s.snap.k {
        return Err(ApiError::conflict(format!("budget of {} facilities exhausted", s.snap.k)));
    }
    if s.snap.f1.iter().any(|q| q.dist2(&p) == 0.0) {
        return Err(ApiError::conflict("a facility already sits at this point"));
    }
    s.snap.f1.push(p);
    s.snap.history.push(Move::Place { point: p });
    app.persist(&s.snap);
    Ok(Json(s.snap.clone()))
}

async fn undo(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionSnapshot>> {
    app.evict_expired().await;
    let s = app.lookup(&id)?;
    let mut s = s.lock().await;
    s.last_access = Instant::now();
    if s.snap.committed {
        return Err(ApiError::conflict("session already committed"));
    }
    let Some(p) = s.snap.f1.pop() else {
        return Err(ApiError::conflict("no facility to undo"));
    };
    s.snap.history.push(Move::Undo { point: p });
    app.persist(&s.snap);
    Ok(Json(s.snap.clone()))
}

/// Current user set and placement, without holding the lock while computing.
async fn current_state(app: &AppState, id: &str) -> ApiResult<(Arc<UserSet>, FacilitySet, SessionSnapshot)> {
    let s = app.lookup(id)?;
    let mut s = s.lock().await;
    s.last_access = Instant::now();
    if s.snap.f1.is_empty() {
        return Err(ApiError::conflict("place at least one facility first"));
    }
    let f1 = FacilitySet::p1(s.snap.f1.clone())?;
    Ok((s.users.clone(), f1, s.snap.clone()))
}

async fn what_if(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    app.evict_expired().await;
    let (users, f1, _) = current_state(&app, &id).await?;
    let br = blocking(move || best_response(&users, &f1)).await??;
    Ok(Json(json!({ "point": br.location, "payoff": br.payoff, "served": br.served })))
}

/// Commit response: the game result plus the three reference bars, all
/// counted in users.
#[derive(Debug, Serialize)]
pub struct CommitResponse {
    #[serde(flatten)]
    pub result: GameResult,
    pub bars: Bars,
}

#[derive(Debug, Serialize)]
pub struct Bars {
    /// (1 − ε̄_k)·n for the session budget k.
    pub ek_lower: JsonRational,
    /// n/2.
    pub half: JsonRational,
    /// (2k − 1)/(2k)·n.
    pub upper: JsonRational,
}

fn bars(n: usize, k: usize) -> Result<Bars, VgError> {
    let table = build_table(2, k as i64)?;
    let nr = rat(n as i64, 1);
    let lower = (Rational::one() - table.value(k)?) * &nr;
    Ok(Bars {
        ek_lower: JsonRational(lower),
        half: JsonRational(&nr * rat(1, 2)),
        upper: JsonRational(rat(2 * k as i64 - 1, 2 * k as i64) * &nr),
    })
}

async fn commit(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<CommitResponse>> {
    app.evict_expired().await;
    let s = app.lookup(&id)?;
    let mut s = s.lock().await;
    s.last_access = Instant::now();
    if s.snap.f1.is_empty() {
        return Err(ApiError::conflict("place at least one facility first"));
    }
    let users = s.users.clone();
    let f1 = s.snap.f1.clone();
    let (k, sid) = (s.snap.k, s.snap.session_id.clone());
    let out = blocking(move || -> Result<CommitResponse, VgError> {
        let strategy = custom_strategy(f1)?;
        let result = evaluate(&users, &strategy, Some(sid))?;
        Ok(CommitResponse { bars: bars(result.n, k)?, result })
    })
    .await??;
    s.snap.committed = true;
    app.persist(&s.snap);
    Ok(Json(out))
}

/// Sutherland–Hodgman clip of a convex polygon by `a·p ≤ b`.
fn clip(poly: &[Point], a: &Point, b: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let fp = a.dot(&p) - b;
        let fq = a.dot(&q) - b;
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push(p.add(&q.sub(&p).scale(t)));
        }
    }
    out
}

/// Voronoi cells of the placed facilities clipped to a padded bounding box
/// of users and facilities.
pub fn voronoi_polygons(users: &UserSet, f1: &FacilitySet) -> (Point, Point, Vec<Vec<Point>>) {
    let mut all: Vec<Point> = users.points().to_vec();
    all.extend_from_slice(f1.points());
    let (lo, hi) = bbox_of(&all);
    let pad = 0.05 * (hi.x() - lo.x()).max(hi.y() - lo.y()).max(1.0);
    let lo = Point::new2(lo.x() - pad, lo.y() - pad);
    let hi = Point::new2(hi.x() + pad, hi.y() + pad);
    let frame = vec![lo, Point::new2(hi.x(), lo.y()), hi, Point::new2(lo.x(), hi.y())];
    let cells = f1
        .points()
        .iter()
        .map(|f| {
            let mut poly = frame.clone();
            for g in f1.points() {
                if g == f {
                    continue;
                }
                // Points closer to f than to g: (g − f)·p ≤ (|g|² − |f|²)/2.
                let a = g.sub(f);
                let b = 0.5 * (g.norm2() - f.norm2());
                poly = clip(&poly, &a, b);
                if poly.is_empty() {
                    break;
                }
            }
            poly
        })
        .collect();
    (lo, hi, cells)
}

async fn voronoi(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    app.evict_expired().await;
    let (users, f1, _) = current_state(&app, &id).await?;
    let (lo, hi, polys) = voronoi_polygons(&users, &f1);
    let members = voronoi_cells(&users, &f1);
    let cells: Vec<Value> = f1
        .points()
        .iter()
        .zip(polys)
        .zip(members)
        .map(|((f, poly), users)| json!({ "facility": f, "polygon": poly, "users": users }))
        .collect();
    Ok(Json(json!({ "bbox": [lo, hi], "cells": cells })))
}

#[derive(Debug, Deserialize)]
pub struct StrategyQuery {
    pub k: Option<usize>,
    pub epsilon: Option<String>,
    pub session: Option<String>,
}

async fn suggest(
    State(app): State<AppState>,
    Path(kind): Path<String>,
    Query(q): Query<StrategyQuery>,
) -> ApiResult<Json<Value>> {
    app.evict_expired().await;
    let kind = StrategyKind::parse(&kind).map_err(|e| ApiError::unprocessable(e.to_string()))?;
    if matches!(kind, StrategyKind::Custom | StrategyKind::BallNet) {
        return Err(ApiError::unprocessable(format!("no planar suggestion for {}", kind.as_str())));
    }
    let Some(sid) = q.session else {
        return Err(ApiError::unprocessable("the session query parameter is required"));
    };
    let users = {
        let s = app.lookup(&sid)?;
        let mut s = s.lock().await;
        s.last_access = Instant::now();
        s.users.clone()
    };
    let epsilon = q.epsilon.as_deref().map(parse_rational).transpose()?;
    let k = if kind == StrategyKind::Centerpoint { None } else { q.k };
    if kind == StrategyKind::MustafaRay && k.is_none() {
        return Err(ApiError::unprocessable("k is required"));
    }
    let strategy = blocking(move || build_strategy(&users, kind, k, epsilon, None)).await??;
    Ok(Json(strategy.to_json()))
}

#[derive(Debug, Deserialize)]
pub struct TableQuery {
    pub dim: Option<usize>,
    pub kmax: Option<i64>,
}

async fn epsilon_table(Query(q): Query<TableQuery>) -> ApiResult<Json<Value>> {
    let dim = q.dim.unwrap_or(2);
    let kmax = q.kmax.unwrap_or(10);
    if !(1..=MAX_TABLE_K).contains(&kmax) {
        return Err(ApiError::unprocessable(format!("kmax must lie in 1..={MAX_TABLE_K}")));
    }
    let table = blocking(move || build_table(dim, kmax)).await??;
    let mut entries = Vec::with_capacity(table.kmax());
    for k in 1..=table.kmax() {
        let e = table.entry(k)?;
        entries.push(json!({
            "k": k,
            "epsilon": JsonRational(e.value.clone()),
            "r": e.r,
            "s": e.s,
            "factor": JsonRational(approx_factor(k, &table)?),
        }));
    }
    Ok(Json(json!({ "dim": dim, "kmax": kmax, "entries": entries })))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/place", post(place))
        .route("/sessions/{id}/place/last", delete(undo))
        .route("/sessions/{id}/best-response", get(what_if))
        .route("/sessions/{id}/commit", post(commit))
        .route("/sessions/{id}/voronoi", get(voronoi))
        .route("/strategies/{kind}", get(suggest))
        .route("/epsilon-table", get(epsilon_table))
        .with_state(state)
}

/// Binds the port and serves until the process ends.
pub async fn serve(port: u16, config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::new(config);
    state.load_persisted()?;
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_expired().await;
        }
    });
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    axum::serve(listener, router(state)).await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_square_by_bisector() {
        let f1 = FacilitySet::p1(vec![Point::new2(0.0, 0.0), Point::new2(2.0, 0.0)]).unwrap();
        let users = UserSet::from_coords(&[vec![-1.0, -1.0], vec![3.0, 1.0]]).unwrap();
        let (_, _, cells) = voronoi_polygons(&users, &f1);
        assert!(cells[0].iter().all(|p| p.x() <= 1.0 + 1e-12));
        assert!(cells[1].iter().all(|p| p.x() >= 1.0 - 1e-12));
        assert!(cells[0].iter().any(|p| (p.x() - 1.0).abs() < 1e-12));
    }
}
