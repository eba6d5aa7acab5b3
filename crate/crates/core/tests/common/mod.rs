#![allow(dead_code)]

use std::collections::BTreeSet;

use fusalens::graph::{ElementRecord, GraphSnapshot, LinkRecord, ProjectMeta};
use fusalens::model::{AsilValue, Controllability, Exposure, SecTriple, Severity};
use proptest::prelude::*;

pub const TYPES: [&str; 6] = ["SB", "MB", "HzE", "SG", "FSR", "TSR"];
pub const RELATIONS: [&str; 7] = [
    "relatedMB",
    "associatedHE",
    "associatedSG",
    "associatedFSR",
    "associatedTSR",
    "relatedFSR",
    "relatedTSR",
];

pub fn arb_asil() -> impl Strategy<Value = AsilValue> {
    prop::sample::select(AsilValue::ALL.to_vec())
}

/// Level 0 stands for unassigned, k for level k-1.
pub fn arb_sec() -> impl Strategy<Value = SecTriple> {
    (0..=4u8, 0..=5u8, 0..=4u8).prop_map(|(s, e, c)| {
        SecTriple::new(
            s.checked_sub(1).and_then(Severity::from_level).unwrap_or_default(),
            e.checked_sub(1).and_then(Exposure::from_level).unwrap_or_default(),
            c.checked_sub(1).and_then(Controllability::from_level).unwrap_or_default(),
        )
    })
}

pub fn meta(id: &str) -> ProjectMeta {
    ProjectMeta {
        project_id: id.to_string(),
        name: id.to_string(),
        system: "test".to_string(),
        ..ProjectMeta::default()
    }
}

#[derive(Debug, Clone)]
pub struct RawGraph {
    pub nodes: Vec<ElementRecord>,
    pub links: Vec<LinkRecord>,
}

impl RawGraph {
    pub fn snapshot(&self, id: &str) -> GraphSnapshot {
        GraphSnapshot::new(meta(id), self.nodes.clone(), self.links.clone(), 1).expect("consistent")
    }
}

/// Random graph with ids `v00..`, no self-loops and no duplicate links.
pub fn arb_graph(max_nodes: usize, max_links: usize) -> impl Strategy<Value = RawGraph> {
    (1..=max_nodes).prop_flat_map(move |n| {
        let nodes = prop::collection::vec((0..TYPES.len(), arb_asil(), arb_sec()), n);
        let links = prop::collection::vec((0..n, 0..n, 0..RELATIONS.len()), 0..=max_links);
        (nodes, links).prop_map(|(nodes, links)| {
            let nodes: Vec<ElementRecord> = nodes
                .into_iter()
                .enumerate()
                .map(|(i, (t, asil, sec))| {
                    ElementRecord::new(format!("v{i:02}"), format!("node {i}"), TYPES[t])
                        .with_asil(asil)
                        .with_sec(sec)
                })
                .collect();
            let mut seen = BTreeSet::new();
            let links = links
                .into_iter()
                .filter(|(s, t, _)| s != t)
                .map(|(s, t, r)| LinkRecord::new(format!("v{s:02}"), format!("v{t:02}"), RELATIONS[r]))
                .filter(|l| seen.insert(l.clone()))
                .collect();
            RawGraph { nodes, links }
        })
    })
}
