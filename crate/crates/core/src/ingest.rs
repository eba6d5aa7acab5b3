//! Parsing and validation of project node/link files.
//!
//! Node files carry the header `id,name,type,asil,severity,exposure,controllability`
//! and link files `source,target,relation`. Columns may appear in any order but
//! must all be present; unknown columns are rejected. Row numbers in errors and
//! reports are 1-based and count data rows only.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{ElementRecord, LinkRecord, ProjectMeta};
use crate::model::{parse_asil, parse_sec, ModelError, Registry};

pub const NODE_COLUMNS: [&str; 7] = ["id", "name", "type", "asil", "severity", "exposure", "controllability"];
pub const LINK_COLUMNS: [&str; 3] = ["source", "target", "relation"];

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error("bad header: missing columns {missing:?}, unexpected columns {unexpected:?}")]
    Header {
        missing: Vec<String>,
        unexpected: Vec<String>,
    },
    #[error("row {row}: expected {expected} fields, found {found}")]
    Arity { row: usize, expected: usize, found: usize },
    #[error("row {row}: {source}")]
    Value {
        row: usize,
        #[source]
        source: ModelError,
    },
    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("malformed project bundle: {0}")]
    Bundle(String),
}

impl IngestError {
    /// The parse failure as a report entry against `file`.
    pub fn to_issue(&self, file: RecordKind) -> Issue {
        let row = match self {
            IngestError::Arity { row, .. } | IngestError::Value { row, .. } | IngestError::Csv { row, .. } => {
                Some(*row).filter(|r| *r > 0)
            }
            _ => None,
        };
        Issue {
            code: IssueCode::MalformedRecord,
            message: self.to_string(),
            file,
            row,
        }
    }
}

fn reader(content: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(content)
}

/// Maps each expected column to its position in the file header.
fn column_positions<const N: usize>(
    rdr: &mut csv::Reader<&[u8]>,
    expected: [&str; N],
) -> Result<[usize; N], IngestError> {
    let header = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(csv_error(e, 0)),
    };
    let names: Vec<String> = header.iter().map(|h| h.trim_start_matches('\u{feff}').to_string()).collect();
    let mut missing = Vec::new();
    let mut positions = [0usize; N];
    for (slot, col) in expected.iter().enumerate() {
        match names.iter().position(|n| n == col) {
            Some(p) => positions[slot] = p,
            None => missing.push(col.to_string()),
        }
    }
    let unexpected: Vec<String> = names
        .iter()
        .filter(|n| !expected.contains(&n.as_str()))
        .cloned()
        .collect();
    if !missing.is_empty() || !unexpected.is_empty() {
        return Err(IngestError::Header { missing, unexpected });
    }
    Ok(positions)
}

fn csv_error(err: csv::Error, row: usize) -> IngestError {
    match err.kind() {
        csv::ErrorKind::Utf8 { .. } => IngestError::Utf8,
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => IngestError::Arity {
            row,
            expected: *expected_len as usize,
            found: *len as usize,
        },
        _ => IngestError::Csv {
            row,
            message: err.to_string(),
        },
    }
}

fn rows<const N: usize>(
    content: &[u8],
    columns: [&str; N],
) -> Result<Vec<[String; N]>, IngestError> {
    std::str::from_utf8(content).map_err(|_| IngestError::Utf8)?;
    let mut rdr = reader(content);
    let positions = column_positions(&mut rdr, columns)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_error(e, row))?;
        out.push(positions.map(|p| rec.get(p).unwrap_or_default().to_string()));
    }
    Ok(out)
}

/// Parses a node file. Row order is preserved.
pub fn parse_nodes_csv(content: &[u8]) -> Result<Vec<ElementRecord>, IngestError> {
    rows(content, NODE_COLUMNS)?
        .into_iter()
        .enumerate()
        .map(|(i, [id, name, ty, asil, s, e, c])| {
            let row = i + 1;
            let asil = parse_asil(&asil).map_err(|source| IngestError::Value { row, source })?;
            let sec = parse_sec(&s, &e, &c).map_err(|source| IngestError::Value { row, source })?;
            Ok(ElementRecord {
                id,
                name,
                element_type: ty,
                asil,
                sec,
            })
        })
        .collect()
}

/// Parses a link file, resolving relation aliases to their canonical label.
pub fn parse_links_csv(content: &[u8], registry: &Registry) -> Result<Vec<LinkRecord>, IngestError> {
    Ok(rows(content, LINK_COLUMNS)?
        .into_iter()
        .map(|[source, target, relation]| {
            let relation = registry.canonical_relation(&relation).to_string();
            LinkRecord {
                source,
                target,
                relation,
            }
        })
        .collect())
}

pub fn write_nodes_csv<'a>(nodes: impl IntoIterator<Item = &'a ElementRecord>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(NODE_COLUMNS).expect("in-memory write");
    for n in nodes {
        w.write_record([
            n.id.as_str(),
            n.name.as_str(),
            n.element_type.as_str(),
            n.asil.as_str(),
            n.sec.severity.as_str(),
            n.sec.exposure.as_str(),
            n.sec.controllability.as_str(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 in, utf-8 out")
}

pub fn write_links_csv<'a>(links: impl IntoIterator<Item = &'a LinkRecord>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(LINK_COLUMNS).expect("in-memory write");
    for l in links {
        w.write_record([l.source.as_str(), l.target.as_str(), l.relation.as_str()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 in, utf-8 out")
}

/// JSON equivalent of a `meta` + `nodes.csv` + `links.csv` upload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectBundle {
    pub meta: ProjectMeta,
    #[serde(default)]
    pub nodes: Vec<ElementRecord>,
    #[serde(default)]
    pub links: Vec<LinkRecord>,
}

impl ProjectBundle {
    pub fn from_json(doc: &[u8], registry: &Registry) -> Result<ProjectBundle, IngestError> {
        let mut bundle: ProjectBundle =
            serde_json::from_slice(doc).map_err(|e| IngestError::Bundle(e.to_string()))?;
        for link in &mut bundle.links {
            link.relation = registry.canonical_relation(&link.relation).to_string();
        }
        Ok(bundle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    EmptyId,
    DuplicateNodeId,
    DanglingSource,
    DanglingTarget,
    SelfLoop,
    DuplicateLink,
    UnregisteredType,
    UnregisteredRelation,
    RelationTypeMismatch,
    InvalidMeta,
    /// The file could not be parsed at all (header, arity, token or encoding).
    MalformedRecord,
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum");
        f.write_str(s.as_str().expect("string repr"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Meta,
    Nodes,
    Links,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: IssueCode,
    pub message: String,
    pub file: RecordKind,
    /// 1-based data row, absent for metadata issues.
    pub row: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has_error(&self, code: IssueCode) -> bool {
        self.errors.iter().any(|i| i.code == code)
    }

    pub fn has_warning(&self, code: IssueCode) -> bool {
        self.warnings.iter().any(|i| i.code == code)
    }

    fn error(&mut self, code: IssueCode, file: RecordKind, row: Option<usize>, message: String) {
        self.errors.push(Issue { code, message, file, row });
    }

    fn warn(&mut self, code: IssueCode, file: RecordKind, row: Option<usize>, message: String) {
        self.warnings.push(Issue { code, message, file, row });
    }
}

/// Checks parsed records. Problems are collected into the report rather than
/// returned as failures; any entry in `errors` blocks a commit.
pub fn validate_project(nodes: &[ElementRecord], links: &[LinkRecord], registry: &Registry) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = HashSet::new();
    for (i, n) in nodes.iter().enumerate() {
        let row = Some(i + 1);
        if n.id.is_empty() {
            report.error(IssueCode::EmptyId, RecordKind::Nodes, row, "node id is empty".into());
        } else if !seen.insert(n.id.as_str()) {
            report.error(
                IssueCode::DuplicateNodeId,
                RecordKind::Nodes,
                row,
                format!("duplicate node id `{}`", n.id),
            );
        }
        if !registry.is_registered_type(&n.element_type) {
            report.warn(
                IssueCode::UnregisteredType,
                RecordKind::Nodes,
                row,
                format!("node `{}` has unregistered type `{}`", n.id, n.element_type),
            );
        }
    }

    let mut types: HashMap<&str, &str> = HashMap::new();
    for n in nodes {
        types.entry(n.id.as_str()).or_insert(n.element_type.as_str());
    }
    let type_of = |id: &str| types.get(id).copied();
    let mut seen_links = HashSet::new();
    for (i, l) in links.iter().enumerate() {
        let row = Some(i + 1);
        let desc = format!("{} -> {} ({})", l.source, l.target, l.relation);
        if l.source == l.target {
            report.error(IssueCode::SelfLoop, RecordKind::Links, row, format!("self-loop {desc}"));
        }
        let source_ty = type_of(&l.source);
        let target_ty = type_of(&l.target);
        if source_ty.is_none() {
            report.error(
                IssueCode::DanglingSource,
                RecordKind::Links,
                row,
                format!("link {desc}: unknown source `{}`", l.source),
            );
        }
        if target_ty.is_none() {
            report.error(
                IssueCode::DanglingTarget,
                RecordKind::Links,
                row,
                format!("link {desc}: unknown target `{}`", l.target),
            );
        }
        if !seen_links.insert(l) {
            report.warn(IssueCode::DuplicateLink, RecordKind::Links, row, format!("duplicate link {desc}"));
        }
        match registry.relation(&l.relation) {
            None => report.warn(
                IssueCode::UnregisteredRelation,
                RecordKind::Links,
                row,
                format!("link {desc}: unregistered relation `{}`", l.relation),
            ),
            Some(rel) => {
                if let (Some(s), Some(t)) = (source_ty, target_ty) {
                    let forward = s == rel.subject_type && t == rel.object_type;
                    let backward = t == rel.subject_type && s == rel.object_type;
                    if !forward && !backward {
                        report.warn(
                            IssueCode::RelationTypeMismatch,
                            RecordKind::Links,
                            row,
                            format!(
                                "link {desc}: `{}` connects {} and {}, found {s} and {t}",
                                rel.label, rel.subject_type, rel.object_type
                            ),
                        );
                    }
                }
            }
        }
    }
    report
}

pub fn validate_meta(meta: &ProjectMeta, report: &mut ValidationReport) {
    if !is_valid_project_id(&meta.project_id) {
        report.error(
            IssueCode::InvalidMeta,
            RecordKind::Meta,
            None,
            format!(
                "project_id `{}` must be non-empty and use only letters, digits, `-`, `_` or `.`",
                meta.project_id
            ),
        );
    }
    if meta.system.trim().is_empty() {
        report.error(IssueCode::InvalidMeta, RecordKind::Meta, None, "system must not be empty".into());
    }
}

/// Project ids double as directory names in the repository.
pub fn is_valid_project_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.len() <= 128
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// Drops repeated (source, target, relation) triples, keeping first occurrences.
pub fn dedup_links(links: Vec<LinkRecord>) -> Vec<LinkRecord> {
    let mut seen = BTreeSet::new();
    links.into_iter().filter(|l| seen.insert(l.clone())).collect()
}
