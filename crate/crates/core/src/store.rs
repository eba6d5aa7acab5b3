//! Project repository.
//!
//! Each project lives in `<data_dir>/<project_id>/` as `meta.json` plus
//! `graph.json`; adjacency indices are rebuilt on load. Writers are serialized
//! by a mutex. Readers clone an `Arc<GraphSnapshot>` out of the index and
//! never see a partially replaced project.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::graph::{ElementRecord, GraphSnapshot, LinkRecord, ProjectMeta};
use crate::ingest::{dedup_links, validate_meta, validate_project, ProjectBundle, ValidationReport};
use crate::model::Registry;

const META_FILE: &str = "meta.json";
const GRAPH_FILE: &str = "graph.json";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("project `{0}` not found")]
    NotFound(String),
    #[error("project failed validation with {} error(s)", .0.errors.len())]
    Validation(ValidationReport),
    #[error("storage I/O failure at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt project document at {path}: {message}")]
    Corrupt { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Serialize, Deserialize)]
struct StoredGraph {
    revision: u64,
    nodes: Vec<ElementRecord>,
    links: Vec<LinkRecord>,
}

/// Dashboard row: project metadata plus counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectSummary {
    #[serde(flatten)]
    pub meta: ProjectMeta,
    pub node_count: usize,
    pub link_count: usize,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitOutcome {
    pub project_id: String,
    pub revision: u64,
    /// Non-blocking findings such as deduplicated links.
    pub report: ValidationReport,
}

pub struct ProjectStore {
    root: Option<PathBuf>,
    registry: Registry,
    projects: RwLock<BTreeMap<String, Arc<GraphSnapshot>>>,
    writer: Mutex<()>,
}

impl ProjectStore {
    /// Opens (creating if needed) a directory-backed repository and loads every project in it.
    pub fn open(data_dir: impl Into<PathBuf>, registry: Registry) -> Result<ProjectStore, StoreError> {
        let root = data_dir.into();
        fs::create_dir_all(&root).map_err(io_err(&root))?;
        let mut projects = BTreeMap::new();
        let mut entries: Vec<_> = fs::read_dir(&root)
            .map_err(io_err(&root))?
            .collect::<Result<_, _>>()
            .map_err(io_err(&root))?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let dir = entry.path();
            if !dir.join(META_FILE).is_file() {
                continue;
            }
            let snapshot = load_project(&dir)?;
            tracing::debug!(project = snapshot.project_id(), revision = snapshot.revision(), "loaded project");
            projects.insert(snapshot.project_id().to_string(), Arc::new(snapshot));
        }
        Ok(ProjectStore {
            root: Some(root),
            registry,
            projects: RwLock::new(projects),
            writer: Mutex::new(()),
        })
    }

    /// A repository that keeps everything in memory.
    pub fn in_memory(registry: Registry) -> ProjectStore {
        ProjectStore {
            root: None,
            registry,
            projects: RwLock::new(BTreeMap::new()),
            writer: Mutex::new(()),
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    /// Validates and stores a project, replacing any previous version with
    /// the same id. Duplicate links are dropped (reported as warnings).
    pub fn commit_project(
        &self,
        meta: ProjectMeta,
        nodes: Vec<ElementRecord>,
        links: Vec<LinkRecord>,
    ) -> Result<CommitOutcome, StoreError> {
        let mut report = validate_project(&nodes, &links, &self.registry);
        validate_meta(&meta, &mut report);
        if !report.is_ok() {
            return Err(StoreError::Validation(report));
        }
        let links = dedup_links(links);

        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        let revision = self
            .projects
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(&meta.project_id)
            .map_or(1, |s| s.revision() + 1);
        let snapshot =
            GraphSnapshot::new(meta, nodes, links, revision).expect("validated records form a consistent graph");
        if let Some(root) = &self.root {
            persist(&root.join(snapshot.project_id()), &snapshot)?;
        }
        let project_id = snapshot.project_id().to_string();
        self.projects
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .insert(project_id.clone(), Arc::new(snapshot));
        tracing::info!(project = %project_id, revision, "committed project");
        Ok(CommitOutcome {
            project_id,
            revision,
            report,
        })
    }

    pub fn commit_bundle(&self, bundle: ProjectBundle) -> Result<CommitOutcome, StoreError> {
        self.commit_project(bundle.meta, bundle.nodes, bundle.links)
    }

    /// All projects sorted by id.
    pub fn list_projects(&self) -> Vec<ProjectSummary> {
        self.projects
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .values()
            .map(|s| ProjectSummary {
                meta: s.meta().clone(),
                node_count: s.node_count(),
                link_count: s.link_count(),
                revision: s.revision(),
            })
            .collect()
    }

    pub fn get_graph(&self, project_id: &str) -> Result<Arc<GraphSnapshot>, StoreError> {
        self.projects
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(project_id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(project_id.to_string()))
    }

    pub fn contains(&self, project_id: &str) -> bool {
        self.projects
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .contains_key(project_id)
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn persist(dir: &Path, snapshot: &GraphSnapshot) -> Result<(), StoreError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let graph = StoredGraph {
        revision: snapshot.revision(),
        nodes: snapshot.nodes().cloned().collect(),
        links: snapshot.links().to_vec(),
    };
    let graph_json = serde_json::to_vec_pretty(&graph).expect("graph serializes");
    let meta_json = serde_json::to_vec_pretty(snapshot.meta()).expect("meta serializes");
    write_atomically(&dir.join(GRAPH_FILE), &graph_json)?;
    write_atomically(&dir.join(META_FILE), &meta_json)
}

fn load_project(dir: &Path) -> Result<GraphSnapshot, StoreError> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read(&path).map_err(io_err(&path)).map(|b| (path, b))
    };
    let (meta_path, meta_bytes) = read(META_FILE)?;
    let meta: ProjectMeta = serde_json::from_slice(&meta_bytes).map_err(|e| StoreError::Corrupt {
        path: meta_path,
        message: e.to_string(),
    })?;
    let (graph_path, graph_bytes) = read(GRAPH_FILE)?;
    let graph: StoredGraph = serde_json::from_slice(&graph_bytes).map_err(|e| StoreError::Corrupt {
        path: graph_path.clone(),
        message: e.to_string(),
    })?;
    GraphSnapshot::new(meta, graph.nodes, graph.links, graph.revision).map_err(|e| StoreError::Corrupt {
        path: graph_path,
        message: e.to_string(),
    })
}
