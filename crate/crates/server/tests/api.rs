mod common;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use common::*;
use fusalens::fixtures;
use fusalens::store::ProjectStore;
use fusalens::Registry;
use fusalens_server::{app, build_state, run, AppState, LogLevel, ServerConfig};
use serde_json::json;
use tokio::io::{AsyncReadExt, AsyncWriteExt};

#[tokio::test]
async fn lists_seeded_fixtures() {
    let app = demo_app();
    let r = get(&app, "/api/projects").await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    assert_schema("ProjectList", &v);
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|p| p["project_id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["F1", "F2", "F3"]);
    assert_eq!(v[0]["node_count"], 8);
    assert_eq!(v[0]["link_count"], 6);
}

#[tokio::test]
async fn unknown_route_and_project_are_404() {
    let app = demo_app();
    for uri in ["/api/nope", "/elsewhere", "/api/projects/ZZ/graph", "/api/projects/ZZ/checks"] {
        let r = get(&app, uri).await;
        assert_eq!(r.status, StatusCode::NOT_FOUND, "{uri}");
        assert_schema("Error", &r.json());
    }
    let r = get(&app, "/api/projects/F1/nodes/n99/neighbors").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert!(r.json()["error"].as_str().unwrap().contains("n99"));
}

#[tokio::test]
async fn malformed_parameters_are_named() {
    let app = demo_app();
    let cases = [
        ("/api/projects/F1/layout?seed=abc", "seed"),
        ("/api/projects/F1/layout?groupBy=colour", "groupBy"),
        ("/api/projects/F1/layout?sizeBy=huge", "sizeBy"),
        ("/api/projects/F1/layout?pinned=%7Bnot-json", "pinned"),
        ("/api/projects/F1/checks?degreeMin=-1", "degreeMin"),
        ("/api/projects/F1/checks?degreeMin=5&degreeMax=2", "degreeMax"),
        ("/api/projects/F1/checks?checks=orphans,bogus", "checks"),
        ("/api/projects/F1/checks?format=xml", "format"),
        ("/api/projects/F1/nodes/search", "q"),
        ("/api/summary", "projects"),
        ("/api/compare/shared?projects=F1", "projects"),
        ("/api/compare/shared?projects=F1,F1", "projects"),
    ];
    for (uri, parameter) in cases {
        let r = get(&app, uri).await;
        assert_eq!(r.status, StatusCode::BAD_REQUEST, "{uri}");
        let v = r.json();
        assert_schema("Error", &v);
        assert_eq!(v["parameter"], parameter, "{uri}");
    }
    let r = post_json(&app, "/api/projects/F1/trace", json!({"source": "n1"})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["parameter"], "body");
}

#[tokio::test]
async fn graph_round_trips_fixture() {
    let app = demo_app();
    let v = get(&app, "/api/projects/F1/graph").await.json();
    assert_schema("Graph", &v);
    let expected = serde_json::to_value(fixtures::f1()).unwrap();
    assert_eq!(v, expected);
}

#[tokio::test]
async fn checks_on_fixture() {
    let app = demo_app();
    let v = get(&app, "/api/projects/F1/checks").await.json();
    assert_schema("Checks", &v);
    assert_eq!(v["orphans"], json!(["n7"]));
    assert_eq!(v["unassigned"], json!(["n1", "n2", "n7", "n8"]));
    assert_eq!(v["inheritance"], json!([]));
    let rules: Vec<_> = v["missing"]["rules"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["rule"].clone(), r["node_ids"].clone()))
        .collect();
    assert_eq!(
        rules,
        [
            (json!("rule1"), json!(["n7"])),
            (json!("rule2"), json!(["n8"])),
            (json!("rule3"), json!([])),
            (json!("rule4"), json!([])),
        ]
    );

    let v = get(&app, "/api/projects/F1/checks?checks=unassigned&types=HzE").await.json();
    assert_eq!(v["unassigned"], json!(["n8"]));
    assert!(v.get("orphans").is_none());

    let v = get(&app, "/api/projects/F1/checks?degreeMin=3&degreeMax=99&checks=degree").await.json();
    assert_schema("Checks", &v);
    assert_eq!(v["degree"]["node_ids"], json!(["n2"]));

    let r = get(&app, "/api/projects/F1/checks?checks=orphans,missing&format=csv").await;
    assert!(r.content_type.starts_with("text/csv"));
    let text = r.text();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check,project,node_id,details"));
    assert_eq!(lines.count(), 3);
}

#[tokio::test]
async fn trace_endpoint() {
    let app = demo_app();
    let r = post_json(&app, "/api/projects/F1/trace", json!({"source": "n1", "destination": "n6"})).await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    assert_schema("Trace", &v);
    assert_eq!(v["found"], true);
    let asils: Vec<&str> = v["steps"].as_array().unwrap().iter().map(|s| s["asil"].as_str().unwrap()).collect();
    assert_eq!(asils, ["-", "-", "C", "C", "C", "C"]);
    assert_eq!(
        v["flags"],
        json!([{"node_id": "n4", "component": "controllability", "actual": "C2", "expected": "C3", "from_node": "n3"}])
    );

    let v = post_json(
        &app,
        "/api/projects/F1/trace",
        json!({"source": "n6", "destination": "n1", "mode": "forward"}),
    )
    .await
    .json();
    assert_schema("Trace", &v);
    assert_eq!(v["found"], false);
    assert_eq!(v["path"], json!(null));

    let r = post_json(&app, "/api/projects/F1/trace", json!({"source": "n1", "destination": "n99"})).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert!(r.json()["error"].as_str().unwrap().contains("n99"));
}

#[tokio::test]
async fn layout_endpoint() {
    let app = demo_app();
    let r = get(&app, "/api/projects/F1/layout").await;
    let v = r.json();
    assert_schema("Layout", &v);
    let labels: Vec<&str> = v["groups"].as_array().unwrap().iter().map(|g| g["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["FSR (1)", "HzE (2)", "MB (2)", "SB (1)", "SG (1)", "TSR (1)"]);

    let v = get(&app, "/api/projects/F1/layout?pinned=%7B%22HzE%22%3A%5B100%2C100%5D%7D&sizeBy=degree&groupBy=type")
        .await
        .json();
    assert_schema("Layout", &v);
    let hze = v["groups"].as_array().unwrap().iter().find(|g| g["key"] == "HzE").unwrap();
    assert_eq!((hze["cx"].as_f64(), hze["cy"].as_f64()), (Some(100.0), Some(100.0)));

    let v = get(&app, "/api/projects/F2/layout?groupBy=asil&seed=4&colorBy=type").await.json();
    assert_schema("Layout", &v);
    assert_eq!(v["color_by"], "type");
}

#[tokio::test]
async fn search_and_neighbors() {
    let app = demo_app();
    let v = get(&app, "/api/projects/F1/nodes/search?q=COLLISION").await.json();
    assert_schema("NodeSearch", &v);
    let ids: Vec<&str> = v["nodes"].as_array().unwrap().iter().map(|n| n["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["n3", "n8"]);

    let v = get(&app, "/api/projects/F1/nodes/n2/neighbors?relation=associatedHE").await.json();
    assert_schema("Neighbors", &v);
    let ids: Vec<&str> = v["neighbors"].as_array().unwrap().iter().map(|n| n["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["n3", "n8"]);
}

#[tokio::test]
async fn summary_and_compare() {
    let app = demo_app();
    let v = get(&app, "/api/summary?projects=F1").await.json();
    assert_schema("SummaryTable", &v);
    assert_eq!(v["node_totals"], json!([8]));
    assert_eq!(v["shared_nodes"], 0);

    let v = get(&app, "/api/summary?projects=F1,F2").await.json();
    assert_schema("SummaryTable", &v);
    assert_eq!(v["shared_nodes"], 3);
    assert_eq!(v["shared_links"], 1);

    let c = get(&app, "/api/compare/shared?projects=F1,F2").await.json();
    assert_schema("Comparison", &c);
    assert_eq!(c["counts"]["nodes"], v["shared_nodes"]);
    let ids: Vec<&str> = c["nodes"].as_array().unwrap().iter().map(|n| n["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["n2", "n3", "n7"]);
    assert_eq!(c["highlights"]["n7"][1]["count"], 6);

    let v = get(&app, "/api/compare/shared?projects=F1,F2,F3").await.json();
    assert_schema("Comparison", &v);
    assert_eq!(v["counts"]["nodes"], 1);

    let r = get(&app, "/api/compare/shared?projects=F1,F2&format=csv").await;
    assert!(r.text().starts_with("id,name,asil_F1,asil_F2,asil_conflict\n"));
}

#[tokio::test]
async fn export_selection() {
    let app = demo_app();
    let r = post_json(&app, "/api/export/csv", json!({"project": "F1", "nodeIds": ["n3"]})).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.text(), "type,asil,name,id\nHzE,C,\"Collision with lead vehicle\",n3\n");

    let r = post_json(&app, "/api/export/csv", json!({"project": "F1", "nodeIds": []})).await;
    assert_eq!(r.text(), "type,asil,name,id\n");

    let r = post_json(&app, "/api/export/csv", json!({"project": "F1", "nodeIds": ["n3", "n99"]})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let v = r.json();
    assert_eq!(v["details"]["unknown"], json!(["n99"]));

    let r = post_json(&app, "/api/export/csv", json!({"project": "ZZ", "nodeIds": []})).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn multipart_upload_creates_and_replaces() {
    let app = demo_app();
    let (nodes, links) = fixtures::csv_files("F1").unwrap();
    let meta = r#"{"project_id":"U1","name":"Uploaded","system":"ACC"}"#;
    let r = send(&app, multipart(&[("meta", meta), ("nodes.csv", nodes), ("links.csv", links)])).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text());
    let v = r.json();
    assert_schema("UploadResponse", &v);
    assert_eq!(v["revision"], 1);

    let extra = format!("{nodes}n9,Extra,SB,-,-,-,-\n");
    let r = send(&app, multipart(&[("meta", meta), ("nodes", &extra), ("links", links)])).await;
    assert_eq!(r.json()["revision"], 2);
    let g = get(&app, "/api/projects/U1/graph").await.json();
    assert_eq!(g["nodes"].as_array().unwrap().len(), 9);
    assert_eq!(g["revision"], 2);
}

#[tokio::test]
async fn invalid_upload_is_422_with_report() {
    let app = demo_app();
    let meta = r#"{"project_id":"U2","name":"Bad","system":"ACC"}"#;
    let nodes = "id,name,type,asil,severity,exposure,controllability\na,A,MB,-,-,-,-\na,A again,MB,-,-,-,-\n";
    let links = "source,target,relation\na,b,associatedHE\na,a,relatedMB\n";
    let r = send(&app, multipart(&[("meta", meta), ("nodes", nodes), ("links", links)])).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    let v = r.json();
    assert_schema("ValidationError", &v);
    let codes: Vec<&str> = v["details"]["errors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["code"].as_str().unwrap())
        .collect();
    for code in ["DUPLICATE_NODE_ID", "DANGLING_TARGET", "SELF_LOOP"] {
        assert!(codes.contains(&code), "{code} missing from {codes:?}");
    }
    assert_eq!(get(&app, "/api/projects/U2/graph").await.status, StatusCode::NOT_FOUND);

    let bad_header = "id,name,kind\n";
    let r = send(&app, multipart(&[("meta", meta), ("nodes", bad_header), ("links", links)])).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["details"]["errors"][0]["code"], "MALFORMED_RECORD");

    let r = send(&app, multipart(&[("meta", meta), ("nodes", nodes)])).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["parameter"], "links");
}

#[tokio::test]
async fn json_bundle_upload() {
    let app = demo_app();
    let mut bundle = serde_json::to_value(fixtures::bundle("F3").unwrap()).unwrap();
    bundle["meta"]["project_id"] = json!("J3");
    let r = post_json(&app, "/api/projects", bundle).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.text());
    let a = get(&app, "/api/projects/J3/graph").await.json();
    let b = get(&app, "/api/projects/F3/graph").await.json();
    assert_eq!(a["nodes"], b["nodes"]);
    assert_eq!(a["links"], b["links"]);
}

#[tokio::test]
async fn repeated_requests_are_byte_identical() {
    let app = demo_app();
    for uri in [
        "/api/projects",
        "/api/projects/F2/graph",
        "/api/projects/F2/layout?seed=7&sizeBy=asil-rank",
        "/api/projects/F2/checks",
        "/api/summary?projects=F1,F2,F3",
        "/api/compare/shared?projects=F2,F1",
    ] {
        let a = get(&app, uri).await;
        let b = get(&app, uri).await;
        assert_eq!(a.status, StatusCode::OK, "{uri}");
        assert_eq!(a.body, b.body, "{uri}");
    }
}

#[tokio::test]
async fn serves_over_tcp_and_shuts_down() {
    let dir = tempfile::tempdir().unwrap();
    let config = ServerConfig {
        port: 0,
        data_dir: dir.path().join("data"),
        log_level: LogLevel::Warn,
        seed_demo: true,
    };
    let state = build_state(&config).unwrap();
    assert!(dir.path().join("data/F1/graph.json").exists());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(run(listener, state, async {
        let _ = rx.await;
    }));

    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    stream
        .write_all(b"GET /api/projects HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n")
        .await
        .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).await.unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"project_id\":\"F3\""));

    tx.send(()).unwrap();
    server.await.unwrap().unwrap();

    // restart on the same directory: projects reload, seeding leaves revisions alone
    let state = build_state(&config).unwrap();
    assert_eq!(state.store.get_graph("F1").unwrap().revision(), 1);
}

#[test]
fn config_flags_and_environment() {
    use clap::Parser;
    let c = ServerConfig::try_parse_from(["fusalens-server"]).unwrap();
    assert_eq!(c.port, 8080);
    assert_eq!(c.log_level, LogLevel::Info);
    assert!(!c.seed_demo);
    let c = ServerConfig::try_parse_from([
        "fusalens-server",
        "--port",
        "9001",
        "--data-dir",
        "/tmp/x",
        "--log-level",
        "debug",
        "--seed-demo",
    ])
    .unwrap();
    assert_eq!((c.port, c.log_level, c.seed_demo), (9001, LogLevel::Debug, true));
    assert!(ServerConfig::try_parse_from(["fusalens-server", "--port", "70000"]).is_err());
    assert!(ServerConfig::try_parse_from(["fusalens-server", "--log-level", "trace"]).is_err());

    // only this test reads these variables
    std::env::set_var("FUSALENS_PORT", "9100");
    std::env::set_var("FUSALENS_DATA_DIR", "/tmp/from-env");
    let c = ServerConfig::try_parse_from(["fusalens-server"]).unwrap();
    assert_eq!((c.port, c.data_dir.to_str()), (9100, Some("/tmp/from-env")));
    let c = ServerConfig::try_parse_from(["fusalens-server", "--port", "9200", "--data-dir", "/tmp/flag"]).unwrap();
    assert_eq!((c.port, c.data_dir.to_str()), (9200, Some("/tmp/flag")));
    std::env::set_var("FUSALENS_PORT", "not-a-port");
    assert!(ServerConfig::try_parse_from(["fusalens-server"]).is_err());
    std::env::remove_var("FUSALENS_PORT");
    std::env::remove_var("FUSALENS_DATA_DIR");
}

#[tokio::test]
async fn empty_store_serves_empty_list() {
    let app = app(AppState::new(ProjectStore::in_memory(Registry::default())));
    let r = send(&app, Request::get("/api/projects").body(Body::empty()).unwrap()).await;
    assert_eq!(r.json(), json!([]));
    let r = get(&app, "/api/schema").await;
    assert_eq!(r.status, StatusCode::OK);
    assert!(r.json()["$defs"]["Layout"].is_object());
}
