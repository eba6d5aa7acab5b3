//! Functional-safety network analysis.
//!
//! Projects are graphs of safety elements (system behaviours, malfunctions,
//! hazardous events, safety goals and requirements) joined by typed
//! relations. This crate ingests them from CSV, keeps immutable versioned
//! snapshots, and runs consistency checks, ASIL traces, cross-project
//! comparison and a deterministic node-link-group layout over them.

pub mod analytics;
pub mod compare;
pub mod fixtures;
pub mod graph;
pub mod ingest;
pub mod layout;
pub mod model;
pub mod store;
pub mod synth;
pub mod trace;

pub use analytics::{
    check_asil_inheritance, check_missing_links, filter_by_degree, find_orphans, find_unassigned_asil, summarize,
    AnalyticsError, RuleSet, SummaryTable,
};
pub use compare::{compare, cross_highlight, shared_links, shared_nodes, shared_subgraph, CompareError, Comparison};
pub use graph::{ElementRecord, GraphError, GraphSnapshot, LinkRecord, ProjectMeta};
pub use ingest::{parse_links_csv, parse_nodes_csv, IngestError, IssueCode, ProjectBundle, ValidationReport};
pub use layout::{align_layouts, layout_project, LayoutConfig, LayoutError, LayoutResult, SizeBy};
pub use model::{asil_from_sec, compare_asil, parse_asil, parse_sec, AsilValue, Registry, RiskTable, SecTriple};
pub use store::{ProjectStore, StoreError};
pub use trace::{check_sec_consistency, find_path, trace_asils, PathMode, PathQuery, TraceError, TraceResult};
