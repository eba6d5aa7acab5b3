//! Element/link records and the immutable, indexed per-project graph snapshot.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{AsilValue, SecTriple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("link {source_id} -> {target} ({relation}) references missing node `{missing}`")]
    DanglingLink {
        source_id: String,
        target: String,
        relation: String,
        missing: String,
    },
}

/// One safety-network element (node).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub id: String,
    pub name: String,
    #[serde(rename = "type")]
    pub element_type: String,
    #[serde(default)]
    pub asil: AsilValue,
    #[serde(flatten)]
    pub sec: SecTriple,
}

impl ElementRecord {
    pub fn new(id: impl Into<String>, name: impl Into<String>, element_type: impl Into<String>) -> Self {
        ElementRecord {
            id: id.into(),
            name: name.into(),
            element_type: element_type.into(),
            asil: AsilValue::Unassigned,
            sec: SecTriple::default(),
        }
    }

    pub fn with_asil(mut self, asil: AsilValue) -> Self {
        self.asil = asil;
        self
    }

    pub fn with_sec(mut self, sec: SecTriple) -> Self {
        self.sec = sec;
        self
    }
}

/// A typed relation between two elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkRecord {
    pub source: String,
    pub target: String,
    pub relation: String,
}

impl LinkRecord {
    pub fn new(source: impl Into<String>, target: impl Into<String>, relation: impl Into<String>) -> Self {
        LinkRecord {
            source: source.into(),
            target: target.into(),
            relation: relation.into(),
        }
    }

    /// The endpoint opposite `node`, if `node` is an endpoint.
    pub fn other_end(&self, node: &str) -> Option<&str> {
        if self.source == node {
            Some(&self.target)
        } else if self.target == node {
            Some(&self.source)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProjectMeta {
    pub project_id: String,
    pub name: String,
    pub system: String,
    #[serde(default)]
    pub department: String,
    #[serde(default)]
    pub in_charge: String,
    #[serde(default)]
    pub location: String,
}

/// Immutable indexed view of one project's network.
///
/// Construction checks referential integrity and node-id uniqueness; nothing
/// mutates a snapshot afterwards. Replacing a project produces a new snapshot
/// with a higher revision.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSnapshot {
    meta: ProjectMeta,
    nodes: BTreeMap<String, ElementRecord>,
    links: Vec<LinkRecord>,
    // node id -> indices into `links` of incident links
    adjacency: BTreeMap<String, Vec<usize>>,
    revision: u64,
}

impl GraphSnapshot {
    pub fn new(
        meta: ProjectMeta,
        nodes: impl IntoIterator<Item = ElementRecord>,
        links: Vec<LinkRecord>,
        revision: u64,
    ) -> Result<GraphSnapshot, GraphError> {
        let mut by_id = BTreeMap::new();
        for node in nodes {
            if let Some(prev) = by_id.insert(node.id.clone(), node) {
                return Err(GraphError::DuplicateNode(prev.id));
            }
        }
        let mut adjacency: BTreeMap<String, Vec<usize>> = by_id.keys().map(|id| (id.clone(), Vec::new())).collect();
        for (i, link) in links.iter().enumerate() {
            for end in [&link.source, &link.target] {
                if !by_id.contains_key(end) {
                    return Err(GraphError::DanglingLink {
                        source_id: link.source.clone(),
                        target: link.target.clone(),
                        relation: link.relation.clone(),
                        missing: end.clone(),
                    });
                }
            }
            adjacency.get_mut(&link.source).expect("checked").push(i);
            if link.target != link.source {
                adjacency.get_mut(&link.target).expect("checked").push(i);
            }
        }
        Ok(GraphSnapshot {
            meta,
            nodes: by_id,
            links,
            adjacency,
            revision,
        })
    }

    pub fn meta(&self) -> &ProjectMeta {
        &self.meta
    }

    pub fn project_id(&self) -> &str {
        &self.meta.project_id
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &ElementRecord> + Clone {
        self.nodes.values()
    }

    pub fn node_ids(&self) -> impl ExactSizeIterator<Item = &str> + Clone {
        self.nodes.keys().map(String::as_str)
    }

    pub fn links(&self) -> &[LinkRecord] {
        &self.links
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&ElementRecord> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    fn require(&self, id: &str) -> Result<&ElementRecord, GraphError> {
        self.node(id).ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    /// Links touching `node_id`, in stored order.
    pub fn incident_links(&self, node_id: &str) -> Result<impl Iterator<Item = &LinkRecord>, GraphError> {
        let idx = self
            .adjacency
            .get(node_id)
            .ok_or_else(|| GraphError::UnknownNode(node_id.to_string()))?;
        Ok(idx.iter().map(|&i| &self.links[i]))
    }

    /// Number of incident links, direction ignored.
    pub fn degree(&self, node_id: &str) -> Result<usize, GraphError> {
        self.adjacency
            .get(node_id)
            .map(Vec::len)
            .ok_or_else(|| GraphError::UnknownNode(node_id.to_string()))
    }

    /// Nodes sharing a link with `node_id` in either direction, sorted by id.
    pub fn neighbors(&self, node_id: &str, relation: Option<&str>) -> Result<Vec<&ElementRecord>, GraphError> {
        self.require(node_id)?;
        let ids: BTreeSet<&str> = self
            .incident_links(node_id)?
            .filter(|l| relation.is_none_or(|r| l.relation == r))
            .filter_map(|l| l.other_end(node_id))
            .collect();
        Ok(ids.into_iter().map(|id| &self.nodes[id]).collect())
    }

    /// Case-insensitive substring match on name. An empty query matches nothing.
    pub fn search_nodes(&self, query: &str) -> Vec<&ElementRecord> {
        if query.is_empty() {
            return Vec::new();
        }
        let needle = query.to_lowercase();
        self.nodes
            .values()
            .filter(|n| n.name.to_lowercase().contains(&needle))
            .collect()
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            meta: self.meta.clone(),
            revision: self.revision,
            nodes: self.nodes.values().cloned().collect(),
            links: self.links.clone(),
        }
    }
}

/// Serialized form of a snapshot (metadata, revision, and records).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub meta: ProjectMeta,
    pub revision: u64,
    pub nodes: Vec<ElementRecord>,
    pub links: Vec<LinkRecord>,
}

impl GraphDocument {
    pub fn into_snapshot(self) -> Result<GraphSnapshot, GraphError> {
        GraphSnapshot::new(self.meta, self.nodes, self.links, self.revision)
    }
}

impl Serialize for GraphSnapshot {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            meta: &'a ProjectMeta,
            revision: u64,
            nodes: Vec<&'a ElementRecord>,
            links: &'a [LinkRecord],
        }
        View {
            meta: &self.meta,
            revision: self.revision,
            nodes: self.nodes.values().collect(),
            links: &self.links,
        }
        .serialize(serializer)
    }
}
