//! Demo projects shipped with the crate.
//!
//! * `F1` (Project-A): an adaptive-cruise-control chain SB → MB → HzE → SG →
//!   FSR → TSR with an orphan MB (`n7`), an HzE without ASIL (`n8`) and an SG
//!   whose controllability disagrees with its hazard.
//! * `F2` (Project-C): shares `n2`, `n3`, `n7` and the `n2 → n3` link with F1;
//!   `n3` carries a different ASIL and `n7` has six hazardous events.
//! * `F3` (Project-B): a lane-keeping chain sharing only `n2`.

use crate::graph::{GraphSnapshot, ProjectMeta};
use crate::ingest::{parse_links_csv, parse_nodes_csv, ProjectBundle};
use crate::model::Registry;

struct Raw {
    meta: &'static str,
    nodes: &'static str,
    links: &'static str,
}

macro_rules! raw {
    ($id:literal) => {
        Raw {
            meta: include_str!(concat!("../fixtures/", $id, "/meta.json")),
            nodes: include_str!(concat!("../fixtures/", $id, "/nodes.csv")),
            links: include_str!(concat!("../fixtures/", $id, "/links.csv")),
        }
    };
}

pub const FIXTURE_IDS: [&str; 3] = ["F1", "F2", "F3"];

fn raw(id: &str) -> Option<Raw> {
    match id {
        "F1" => Some(raw!("F1")),
        "F2" => Some(raw!("F2")),
        "F3" => Some(raw!("F3")),
        _ => None,
    }
}

/// Raw CSV text of a fixture as `(nodes.csv, links.csv)`.
pub fn csv_files(id: &str) -> Option<(&'static str, &'static str)> {
    raw(id).map(|r| (r.nodes, r.links))
}

pub fn bundle(id: &str) -> Option<ProjectBundle> {
    let raw = raw(id)?;
    let registry = Registry::default();
    let meta: ProjectMeta = serde_json::from_str(raw.meta).expect("fixture meta is valid");
    let nodes = parse_nodes_csv(raw.nodes.as_bytes()).expect("fixture nodes are valid");
    let links = parse_links_csv(raw.links.as_bytes(), &registry).expect("fixture links are valid");
    Some(ProjectBundle { meta, nodes, links })
}

pub fn bundles() -> Vec<ProjectBundle> {
    FIXTURE_IDS.iter().filter_map(|id| bundle(id)).collect()
}

fn snapshot(id: &str) -> GraphSnapshot {
    let b = bundle(id).expect("known fixture");
    GraphSnapshot::new(b.meta, b.nodes, b.links, 1).expect("fixture is consistent")
}

pub fn f1() -> GraphSnapshot {
    snapshot("F1")
}

pub fn f2() -> GraphSnapshot {
    snapshot("F2")
}

pub fn f3() -> GraphSnapshot {
    snapshot("F3")
}
