mod common;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use vgame::geometry::Point;
use vgame::service_api::{router, AppState, ServiceConfig};

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
    (status, v)
}

fn app() -> Router {
    router(AppState::new(ServiceConfig::default()))
}

async fn session(app: &Router, spec: &str, k: usize) -> (String, usize) {
    let (st, v) = call(app, "POST", "/sessions", Some(json!({ "gen_spec": spec, "k": k }))).await;
    assert_eq!(st, StatusCode::CREATED, "{v}");
    (v["session_id"].as_str().unwrap().to_string(), v["n"].as_u64().unwrap() as usize)
}

fn points(v: &Value) -> Vec<Point> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| Point::new2(p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect()
}

#[tokio::test]
async fn epsilon_table_serves_exact_fractions() {
    let app = app();
    let (st, v) = call(&app, "GET", "/epsilon-table?dim=2&kmax=2", None).await;
    assert_eq!(st, StatusCode::OK);
    let e = &v["entries"];
    assert_eq!(e[0]["epsilon"], json!({ "num": 2, "den": 3 }));
    assert_eq!(e[1]["epsilon"], json!({ "num": 4, "den": 7 }));
    assert_eq!(e[0]["factor"], json!({ "num": 3, "den": 2 }));

    let (st, v) = call(&app, "GET", "/epsilon-table?dim=3&kmax=4", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["entries"][3]["factor"], json!({ "num": 161, "den": 64 }));

    assert_eq!(call(&app, "GET", "/epsilon-table?dim=5&kmax=4", None).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(call(&app, "GET", "/epsilon-table?dim=2&kmax=0", None).await.0, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn placement_rules_and_status_codes() {
    let app = app();
    let (id, n) = session(&app, "uniform_square:20:seed=3", 2).await;
    assert_eq!(n, 20);
    let place = |p: Value| json!({ "point": p });
    let base = format!("/sessions/{id}");

    let (st, v) = call(&app, "POST", &format!("{base}/place"), Some(place(json!([0.5, 0.5])))).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["f1"].as_array().unwrap().len(), 1);
    let (st, _) = call(&app, "POST", &format!("{base}/place"), Some(place(json!([0.5, 0.5])))).await;
    assert_eq!(st, StatusCode::CONFLICT);
    let (st, _) = call(&app, "POST", &format!("{base}/place"), Some(place(json!([0.5])))).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
    let (st, _) = call(&app, "POST", &format!("{base}/place"), Some(json!({ "pt": [1, 2] }))).await;
    assert!(st.is_client_error());
    let (st, _) = call(&app, "POST", &format!("{base}/place"), Some(place(json!([0.2, 0.7])))).await;
    assert_eq!(st, StatusCode::OK);
    let (st, _) = call(&app, "POST", &format!("{base}/place"), Some(place(json!([0.9, 0.1])))).await;
    assert_eq!(st, StatusCode::CONFLICT, "budget of 2 exceeded");

    let (st, v) = call(&app, "DELETE", &format!("{base}/place/last"), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["f1"].as_array().unwrap().len(), 1);
    assert_eq!(v["history"].as_array().unwrap().len(), 3);
    assert_eq!(v["history"][2]["op"], "undo");
    let (st, _) = call(&app, "DELETE", &format!("{base}/place/last"), None).await;
    assert_eq!(st, StatusCode::OK);
    let (st, _) = call(&app, "DELETE", &format!("{base}/place/last"), None).await;
    assert_eq!(st, StatusCode::CONFLICT);
    let (st, _) = call(&app, "GET", &format!("{base}/best-response"), None).await;
    assert_eq!(st, StatusCode::CONFLICT, "nothing placed yet");

    assert_eq!(call(&app, "GET", "/sessions/nope", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(
        call(&app, "POST", "/sessions/nope/place", Some(place(json!([0.0, 0.0])))).await.0,
        StatusCode::NOT_FOUND
    );
}

#[tokio::test]
async fn malformed_sessions_are_rejected() {
    let app = app();
    let cases = [
        json!({ "k": 1 }),
        json!({ "k": 0, "gen_spec": "uniform_square:10:seed=1" }),
        json!({ "k": 1, "users": [[0.0, 0.0, 1.0]] }),
        json!({ "k": 1, "users": [] }),
        json!({ "k": 1, "gen_spec": "uniform_square:10:seed=1:dim=3" }),
        json!({ "k": 1, "users": [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]] }),
    ];
    for c in cases {
        let (st, v) = call(&app, "POST", "/sessions", Some(c.clone())).await;
        assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY, "{c} -> {v}");
        assert!(v["error"].is_string());
    }
    // Collinear users are fine once degeneracy is allowed.
    let ok = json!({ "k": 1, "users": [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], "allow_degenerate": true });
    assert_eq!(call(&app, "POST", "/sessions", Some(ok)).await.0, StatusCode::CREATED);
}

#[tokio::test]
async fn what_if_is_exact_and_repeatable() {
    let app = app();
    for (seed, k) in [(1u64, 1usize), (2, 2), (3, 3)] {
        let (id, n) = session(&app, &format!("gaussian_clusters:30:seed={seed}"), k).await;
        let (_, s) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
        let users = points(&s["users"]);
        let mut r = common::rng(seed);
        let placed = common::random_facilities(&vgame::geometry::UserSet::new(users.clone()).unwrap(), k, &mut r);
        for p in &placed {
            let body = json!({ "point": [p.x(), p.y()] });
            assert_eq!(call(&app, "POST", &format!("/sessions/{id}/place"), Some(body)).await.0, StatusCode::OK);
        }
        let (st, a) = call(&app, "GET", &format!("/sessions/{id}/best-response"), None).await;
        assert_eq!(st, StatusCode::OK);
        let (_, b) = call(&app, "GET", &format!("/sessions/{id}/best-response"), None).await;
        assert_eq!(a, b);
        let payoff = a["payoff"].as_u64().unwrap() as usize;
        // At least ⌈n/(2k)⌉.
        assert!(payoff * 2 * k >= n, "payoff {payoff}");
        let served = a["served"].as_array().unwrap();
        assert_eq!(served.len(), payoff);
        let loc = Point::new2(a["point"][0].as_f64().unwrap(), a["point"][1].as_f64().unwrap());
        assert_eq!(common::payoff(&users, &placed, &loc), payoff);
        assert_eq!(payoff, common::brute_best_response(&users, &placed));
        // The what-if did not place anything.
        let (_, s) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
        assert_eq!(s["f1"].as_array().unwrap().len(), k);
    }
}

#[tokio::test]
async fn commit_reports_bars_and_freezes_the_session() {
    let app = app();
    let (id, n) = session(&app, "uniform_square:30:seed=11", 1).await;
    assert_eq!(n, 30);
    let (st, s) = call(&app, "GET", &format!("/strategies/centerpoint?session={id}"), None).await;
    assert_eq!(st, StatusCode::OK, "{s}");
    assert_eq!(s["guarantee"], json!({ "num": 2, "den": 3 }));
    let c = &s["points"][0];
    let body = json!({ "point": [c[0], c[1]] });
    assert_eq!(call(&app, "POST", &format!("/sessions/{id}/place"), Some(body)).await.0, StatusCode::OK);

    let (st, r) = call(&app, "POST", &format!("/sessions/{id}/commit"), None).await;
    assert_eq!(st, StatusCode::OK, "{r}");
    let p1 = r["p1_payoff"].as_u64().unwrap();
    assert!(p1 >= 10, "p1 {p1}");
    assert_eq!(p1 + r["p2_payoff"].as_u64().unwrap(), 30);
    assert_eq!(r["bars"]["ek_lower"], json!({ "num": 10, "den": 1 }));
    assert_eq!(r["bars"]["half"], json!({ "num": 15, "den": 1 }));
    assert_eq!(r["bars"]["upper"], json!({ "num": 15, "den": 1 }));
    assert_eq!(r["strategy"], "custom");

    let body = json!({ "point": [0.1, 0.1] });
    assert_eq!(call(&app, "POST", &format!("/sessions/{id}/place"), Some(body)).await.0, StatusCode::CONFLICT);
    let (_, s) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(s["committed"], true);
}

#[tokio::test]
async fn voronoi_cells_partition_the_users() {
    let app = app();
    let (id, n) = session(&app, "annulus:25:seed=4", 3).await;
    for p in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] {
        let body = json!({ "point": p });
        assert_eq!(call(&app, "POST", &format!("/sessions/{id}/place"), Some(body)).await.0, StatusCode::OK);
    }
    let (st, v) = call(&app, "GET", &format!("/sessions/{id}/voronoi"), None).await;
    assert_eq!(st, StatusCode::OK);
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 3);
    let mut seen: Vec<u64> = cells.iter().flat_map(|c| c["users"].as_array().unwrap().iter().map(|u| u.as_u64().unwrap())).collect();
    seen.sort();
    assert_eq!(seen, (0..n as u64).collect::<Vec<_>>());
    for c in cells {
        let poly = points(&c["polygon"]);
        assert!(poly.len() >= 3);
        // Each facility lies inside its own clipped cell.
        let f = Point::new2(c["facility"][0].as_f64().unwrap(), c["facility"][1].as_f64().unwrap());
        let m = poly.len();
        let signs: Vec<f64> = (0..m)
            .map(|i| {
                let (a, b) = (poly[i], poly[(i + 1) % m]);
                (b.x() - a.x()) * (f.y() - a.y()) - (b.y() - a.y()) * (f.x() - a.x())
            })
            .collect();
        assert!(signs.iter().all(|s| *s >= -1e-12) || signs.iter().all(|s| *s <= 1e-12));
    }
}

#[tokio::test]
async fn strategy_suggestions_need_a_session() {
    let app = app();
    assert_eq!(call(&app, "GET", "/strategies/centerpoint", None).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    let (id, _) = session(&app, "uniform_square:40:seed=5", 2).await;
    assert_eq!(call(&app, "GET", &format!("/strategies/warp?session={id}"), None).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(call(&app, "GET", &format!("/strategies/ball_net?session={id}"), None).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(call(&app, "GET", "/strategies/centerpoint?session=missing", None).await.0, StatusCode::NOT_FOUND);

    let (st, v) = call(&app, "GET", &format!("/strategies/mustafa_ray?k=2&session={id}"), None).await;
    assert_eq!(st, StatusCode::OK, "{v}");
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
    assert_eq!(v["guarantee"], json!({ "num": 4, "den": 7 }));

    let (st, v) = call(&app, "GET", &format!("/strategies/disk_net?epsilon=1/2&session={id}"), None).await;
    assert_eq!(st, StatusCode::OK, "{v}");
    assert!(v["points"].as_array().unwrap().len() <= 14);
    assert_eq!(v["epsilon"], json!({ "num": 1, "den": 2 }));
}

#[tokio::test]
async fn persisted_sessions_survive_a_restart() {
    let dir = std::env::temp_dir().join(format!("vgame_api_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let config = ServiceConfig { persist: Some(dir.clone()), ..Default::default() };
    let first = router(AppState::new(config.clone()));
    let (id, _) = session(&first, "uniform_square:12:seed=2", 2).await;
    let body = json!({ "point": [0.25, 0.75] });
    assert_eq!(call(&first, "POST", &format!("/sessions/{id}/place"), Some(body)).await.0, StatusCode::OK);

    let state = AppState::new(config);
    assert_eq!(state.load_persisted().unwrap(), 1);
    let second = router(state);
    let (st, s) = call(&second, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(s["f1"], json!([[0.25, 0.75]]));
    let _ = std::fs::remove_dir_all(&dir);
}
