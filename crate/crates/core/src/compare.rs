//! Cross-project comparison by exact identifier intersection.
//!
//! A node is shared when its id is present in every compared project; a link
//! when its exact `(source, target, relation)` triple is. With more than two
//! projects the intersection is taken across all of them.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::graph::{ElementRecord, GraphDocument, GraphSnapshot, LinkRecord, ProjectMeta};
use crate::model::{AsilValue, SecTriple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompareError {
    #[error("comparison needs at least two projects, got {0}")]
    TooFewProjects(usize),
    #[error("node `{0}` is not shared by every compared project")]
    NotShared(String),
}

fn require_two(snapshots: &[&GraphSnapshot]) -> Result<(), CompareError> {
    if snapshots.len() < 2 {
        Err(CompareError::TooFewProjects(snapshots.len()))
    } else {
        Ok(())
    }
}

/// Attributes of a shared node as recorded in one project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectAttributes {
    #[serde(rename = "type")]
    pub element_type: String,
    pub asil: AsilValue,
    #[serde(flatten)]
    pub sec: SecTriple,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedElement {
    pub id: String,
    pub name: String,
    pub per_project: BTreeMap<String, ProjectAttributes>,
    /// Two or more distinct assigned ASILs across projects.
    pub asil_conflict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedLink {
    pub source: String,
    pub target: String,
    pub relation: String,
    pub present_in: Vec<String>,
}

impl SharedLink {
    pub fn record(&self) -> LinkRecord {
        LinkRecord::new(&self.source, &self.target, &self.relation)
    }
}

/// Unassigned values never count towards a conflict.
pub fn has_asil_conflict(values: impl IntoIterator<Item = AsilValue>) -> bool {
    values
        .into_iter()
        .filter(|a| a.is_assigned())
        .collect::<HashSet<_>>()
        .len()
        >= 2
}

fn shared_ids<'a>(snapshots: &[&'a GraphSnapshot]) -> Vec<&'a str> {
    snapshots[0]
        .node_ids()
        .filter(|id| snapshots[1..].iter().all(|s| s.contains(id)))
        .collect()
}

pub fn shared_nodes(snapshots: &[&GraphSnapshot]) -> Result<Vec<SharedElement>, CompareError> {
    require_two(snapshots)?;
    Ok(shared_ids(snapshots)
        .into_iter()
        .map(|id| {
            let per_project: BTreeMap<String, ProjectAttributes> = snapshots
                .iter()
                .map(|s| {
                    let n = s.node(id).expect("present in every project");
                    (
                        s.project_id().to_string(),
                        ProjectAttributes {
                            element_type: n.element_type.clone(),
                            asil: n.asil,
                            sec: n.sec,
                            degree: s.degree(id).expect("present"),
                        },
                    )
                })
                .collect();
            let asil_conflict = has_asil_conflict(per_project.values().map(|a| a.asil));
            SharedElement {
                id: id.to_string(),
                name: snapshots[0].node(id).expect("present").name.clone(),
                per_project,
                asil_conflict,
            }
        })
        .collect())
}

/// Link triples present in every project, sorted by (source, target, relation).
pub fn shared_links(snapshots: &[&GraphSnapshot]) -> Result<Vec<SharedLink>, CompareError> {
    require_two(snapshots)?;
    let others: Vec<HashSet<&LinkRecord>> = snapshots[1..].iter().map(|s| s.links().iter().collect()).collect();
    let present_in: Vec<String> = snapshots.iter().map(|s| s.project_id().to_string()).collect();
    let first: BTreeSet<&LinkRecord> = snapshots[0].links().iter().collect();
    Ok(first
        .into_iter()
        .filter(|l| others.iter().all(|o| o.contains(l)))
        .map(|l| SharedLink {
            source: l.source.clone(),
            target: l.target.clone(),
            relation: l.relation.clone(),
            present_in: present_in.clone(),
        })
        .collect())
}

/// The graph of shared nodes and shared links. Node attributes come from the
/// first snapshot in argument order.
pub fn shared_subgraph(snapshots: &[&GraphSnapshot]) -> Result<GraphSnapshot, CompareError> {
    require_two(snapshots)?;
    let ids: BTreeSet<&str> = shared_ids(snapshots).into_iter().collect();
    let nodes: Vec<ElementRecord> = ids
        .iter()
        .map(|id| snapshots[0].node(id).expect("present").clone())
        .collect();
    let links: Vec<LinkRecord> = shared_links(snapshots)?
        .iter()
        .map(SharedLink::record)
        .filter(|l| ids.contains(l.source.as_str()) && ids.contains(l.target.as_str()))
        .collect();
    let project_ids: Vec<&str> = snapshots.iter().map(|s| s.project_id()).collect();
    let meta = ProjectMeta {
        project_id: format!("shared:{}", project_ids.join("+")),
        name: format!("Shared ({})", project_ids.join(", ")),
        system: "shared".to_string(),
        ..ProjectMeta::default()
    };
    Ok(GraphSnapshot::new(meta, nodes, links, 0).expect("intersection of consistent graphs is consistent"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectNeighbors {
    pub project_id: String,
    pub neighbors: Vec<String>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossHighlight {
    pub node_id: String,
    pub relation: Option<String>,
    pub projects: Vec<ProjectNeighbors>,
}

/// Neighbors of a shared node in each project, optionally restricted to one relation.
pub fn cross_highlight(
    node_id: &str,
    snapshots: &[&GraphSnapshot],
    relation: Option<&str>,
) -> Result<CrossHighlight, CompareError> {
    if snapshots.is_empty() || !snapshots.iter().all(|s| s.contains(node_id)) {
        return Err(CompareError::NotShared(node_id.to_string()));
    }
    let projects = snapshots
        .iter()
        .map(|s| {
            let neighbors: Vec<String> = s
                .neighbors(node_id, relation)
                .expect("node present")
                .into_iter()
                .map(|n| n.id.clone())
                .collect();
            ProjectNeighbors {
                project_id: s.project_id().to_string(),
                count: neighbors.len(),
                neighbors,
            }
        })
        .collect();
    Ok(CrossHighlight {
        node_id: node_id.to_string(),
        relation: relation.map(str::to_string),
        projects,
    })
}

/// Per-attribute tallies of shared entities, feeding the summary's "S" column.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SharedCounts {
    pub nodes: usize,
    pub links: usize,
    pub by_type: BTreeMap<String, usize>,
    pub by_relation: BTreeMap<String, usize>,
    pub by_asil: BTreeMap<String, usize>,
}

impl SharedCounts {
    /// Type and ASIL are read from the first project listed in each element.
    pub fn tally(nodes: &[SharedElement], links: &[SharedLink], first_project: &str) -> SharedCounts {
        let mut counts = SharedCounts {
            nodes: nodes.len(),
            links: links.len(),
            ..SharedCounts::default()
        };
        for n in nodes {
            let attrs = n
                .per_project
                .get(first_project)
                .or_else(|| n.per_project.values().next())
                .expect("shared element has attributes");
            *counts.by_type.entry(attrs.element_type.clone()).or_default() += 1;
            *counts.by_asil.entry(attrs.asil.to_string()).or_default() += 1;
        }
        for l in links {
            *counts.by_relation.entry(l.relation.clone()).or_default() += 1;
        }
        counts
    }
}

/// Everything the shared view needs from one request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub projects: Vec<String>,
    pub nodes: Vec<SharedElement>,
    pub links: Vec<SharedLink>,
    pub subgraph: GraphDocument,
    pub counts: SharedCounts,
    /// Shared node id → per-project neighbor ids.
    pub highlights: BTreeMap<String, Vec<ProjectNeighbors>>,
}

pub fn compare(snapshots: &[&GraphSnapshot]) -> Result<Comparison, CompareError> {
    let nodes = shared_nodes(snapshots)?;
    let links = shared_links(snapshots)?;
    let subgraph = shared_subgraph(snapshots)?.to_document();
    let counts = SharedCounts::tally(&nodes, &links, snapshots[0].project_id());
    let highlights = nodes
        .iter()
        .map(|n| {
            let h = cross_highlight(&n.id, snapshots, None).expect("shared");
            (n.id.clone(), h.projects)
        })
        .collect();
    Ok(Comparison {
        projects: snapshots.iter().map(|s| s.project_id().to_string()).collect(),
        nodes,
        links,
        subgraph,
        counts,
        highlights,
    })
}

/// CSV of shared nodes with one ASIL column per project.
pub fn shared_nodes_csv(nodes: &[SharedElement], projects: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string(), "name".to_string()];
    header.extend(projects.iter().map(|p| format!("asil_{p}")));
    header.push("asil_conflict".to_string());
    w.write_record(&header).expect("in-memory write");
    for n in nodes {
        let mut row = vec![n.id.clone(), n.name.clone()];
        row.extend(
            projects
                .iter()
                .map(|p| n.per_project.get(p).map_or(String::new(), |a| a.asil.to_string())),
        );
        row.push(n.asil_conflict.to_string());
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
