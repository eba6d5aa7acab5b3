//! Path finding between elements and the ASIL / S-E-C trace along a path.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graph::{GraphSnapshot, LinkRecord};
use crate::model::{AsilValue, SecComponent, SecTriple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathMode {
    /// Links are followed regardless of their stored orientation.
    #[default]
    Undirected,
    /// Only source → target.
    Forward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathQuery {
    pub source: String,
    pub destination: String,
    #[serde(default)]
    pub mode: PathMode,
}

impl PathQuery {
    pub fn new(source: impl Into<String>, destination: impl Into<String>, mode: PathMode) -> Self {
        PathQuery {
            source: source.into(),
            destination: destination.into(),
            mode,
        }
    }
}

/// A simple path: `links[i]` connects `nodes[i]` and `nodes[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePath {
    pub nodes: Vec<String>,
    pub links: Vec<LinkRecord>,
}

impl TracePath {
    pub fn edge_count(&self) -> usize {
        self.links.len()
    }
}

/// Links usable to leave `node` in the given mode, paired with the far end.
fn steps_from<'a>(
    snapshot: &'a GraphSnapshot,
    node: &'a str,
    mode: PathMode,
) -> impl Iterator<Item = (&'a str, &'a LinkRecord)> + 'a {
    snapshot
        .incident_links(node)
        .expect("node from snapshot")
        .filter_map(move |l| match mode {
            PathMode::Forward => (l.source == node).then_some((l.target.as_str(), l)),
            PathMode::Undirected => l.other_end(node).map(|o| (o, l)),
        })
}

/// Links arriving at `node` in the given mode, paired with the near end.
fn steps_into<'a>(
    snapshot: &'a GraphSnapshot,
    node: &'a str,
    mode: PathMode,
) -> impl Iterator<Item = &'a str> + 'a {
    snapshot
        .incident_links(node)
        .expect("node from snapshot")
        .filter_map(move |l| match mode {
            PathMode::Forward => (l.target == node).then_some(l.source.as_str()),
            PathMode::Undirected => l.other_end(node),
        })
}

/// Shortest path by edge count, or `None` when unreachable. Among equally
/// short paths the lexicographically smallest node-id sequence wins.
pub fn find_path(snapshot: &GraphSnapshot, query: &PathQuery) -> Result<Option<TracePath>, TraceError> {
    for id in [&query.source, &query.destination] {
        if !snapshot.contains(id) {
            return Err(TraceError::UnknownNode(id.clone()));
        }
    }
    // distance of every node to the destination
    let mut dist: HashMap<&str, usize> = HashMap::new();
    let dest = query.destination.as_str();
    dist.insert(dest, 0);
    let mut queue = VecDeque::from([dest]);
    while let Some(u) = queue.pop_front() {
        if u == query.source {
            break;
        }
        let d = dist[u];
        for v in steps_into(snapshot, u, query.mode) {
            if !dist.contains_key(v) {
                dist.insert(v, d + 1);
                queue.push_back(v);
            }
        }
    }
    let Some(&total) = dist.get(query.source.as_str()) else {
        return Ok(None);
    };

    let mut nodes = vec![query.source.clone()];
    let mut links = Vec::with_capacity(total);
    let mut current = query.source.as_str();
    for remaining in (0..total).rev() {
        let (next, link) = steps_from(snapshot, current, query.mode)
            .filter(|(v, _)| dist.get(v) == Some(&remaining))
            .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
            .expect("a node at distance d has a successor at distance d - 1");
        nodes.push(next.to_string());
        links.push(link.clone());
        current = next;
    }
    Ok(Some(TracePath { nodes, links }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub id: String,
    pub name: String,
    #[serde(rename = "type")]
    pub element_type: String,
    pub asil: AsilValue,
    #[serde(flatten)]
    pub sec: SecTriple,
}

/// A component that disagrees with the nearest upstream step that has it assigned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecMismatch {
    pub node_id: String,
    pub component: SecComponent,
    pub actual: String,
    pub expected: String,
    pub from_node: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceResult {
    pub path: TracePath,
    pub steps: Vec<TraceStep>,
    pub flags: Vec<SecMismatch>,
}

impl TraceResult {
    pub fn asil_sequence(&self) -> Vec<AsilValue> {
        self.steps.iter().map(|s| s.asil).collect()
    }
}

fn validate_path(snapshot: &GraphSnapshot, path: &TracePath) -> Result<(), TraceError> {
    if path.nodes.is_empty() {
        return Err(TraceError::InvalidPath("path has no nodes".into()));
    }
    if path.links.len() + 1 != path.nodes.len() {
        return Err(TraceError::InvalidPath(format!(
            "{} nodes need {} links, got {}",
            path.nodes.len(),
            path.nodes.len() - 1,
            path.links.len()
        )));
    }
    let mut seen = HashSet::new();
    for id in &path.nodes {
        if !snapshot.contains(id) {
            return Err(TraceError::UnknownNode(id.clone()));
        }
        if !seen.insert(id) {
            return Err(TraceError::InvalidPath(format!("node `{id}` repeats")));
        }
    }
    let stored: HashSet<&LinkRecord> = snapshot.links().iter().collect();
    for (i, link) in path.links.iter().enumerate() {
        if !stored.contains(link) {
            return Err(TraceError::InvalidPath(format!(
                "link {} -> {} ({}) is not in the project",
                link.source, link.target, link.relation
            )));
        }
        let (a, b) = (&path.nodes[i], &path.nodes[i + 1]);
        let joins = (&link.source == a && &link.target == b) || (&link.source == b && &link.target == a);
        if !joins {
            return Err(TraceError::InvalidPath(format!("link {i} does not join `{a}` and `{b}`")));
        }
    }
    Ok(())
}

/// Per-node ASIL and S-E-C along `path`, with consistency flags.
pub fn trace_asils(snapshot: &GraphSnapshot, path: &TracePath) -> Result<TraceResult, TraceError> {
    validate_path(snapshot, path)?;
    let steps: Vec<TraceStep> = path
        .nodes
        .iter()
        .map(|id| {
            let n = snapshot.node(id).expect("validated");
            TraceStep {
                id: n.id.clone(),
                name: n.name.clone(),
                element_type: n.element_type.clone(),
                asil: n.asil,
                sec: n.sec,
            }
        })
        .collect();
    let flags = check_sec_consistency(&steps);
    Ok(TraceResult {
        path: path.clone(),
        steps,
        flags,
    })
}

/// Compares each assigned component with the nearest preceding step that has
/// the same component assigned. Steps whose S-E-C is entirely unassigned are
/// skipped.
pub fn check_sec_consistency(steps: &[TraceStep]) -> Vec<SecMismatch> {
    let mut baseline: [Option<(&'static str, &str)>; 3] = [None; 3];
    let mut flags = Vec::new();
    for step in steps.iter().filter(|s| !s.sec.is_unassigned()) {
        for (slot, component) in SecComponent::ALL.into_iter().enumerate() {
            if !step.sec.component_assigned(component) {
                continue;
            }
            let value = step.sec.component(component);
            if let Some((expected, from)) = baseline[slot] {
                if expected != value {
                    flags.push(SecMismatch {
                        node_id: step.id.clone(),
                        component,
                        actual: value.to_string(),
                        expected: expected.to_string(),
                        from_node: from.to_string(),
                    });
                }
            }
            baseline[slot] = Some((value, step.id.as_str()));
        }
    }
    flags
}
