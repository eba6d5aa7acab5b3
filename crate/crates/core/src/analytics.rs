//! Consistency checks and summary metrics over project snapshots.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::compare::SharedCounts;
use crate::graph::GraphSnapshot;
use crate::model::{AsilValue, Registry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("degree range is empty: min {min} > max {max}")]
    InvalidRange { min: usize, max: usize },
    #[error("summary needs at least one project")]
    NoProjects,
    #[error("malformed rule set: {0}")]
    RuleSet(String),
}

/// Nodes with no incident links, sorted by id.
pub fn find_orphans(snapshot: &GraphSnapshot) -> Vec<String> {
    snapshot
        .node_ids()
        .filter(|id| snapshot.degree(id) == Ok(0))
        .map(str::to_string)
        .collect()
}

/// Nodes whose degree lies in `min..=max`, sorted by id.
pub fn filter_by_degree(snapshot: &GraphSnapshot, min: usize, max: usize) -> Result<Vec<String>, AnalyticsError> {
    if min > max {
        return Err(AnalyticsError::InvalidRange { min, max });
    }
    Ok(snapshot
        .node_ids()
        .filter(|id| {
            let d = snapshot.degree(id).expect("id from snapshot");
            (min..=max).contains(&d)
        })
        .map(str::to_string)
        .collect())
}

/// Nodes without an ASIL, optionally limited to the given types.
pub fn find_unassigned_asil(snapshot: &GraphSnapshot, types: Option<&BTreeSet<String>>) -> Vec<String> {
    snapshot
        .nodes()
        .filter(|n| !n.asil.is_assigned())
        .filter(|n| types.is_none_or(|t| t.contains(&n.element_type)))
        .map(|n| n.id.clone())
        .collect()
}

/// "Every `subject_type` node should have at least one `relation` link."
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkRule {
    pub subject_type: String,
    pub relation: String,
    pub object_type: String,
    #[serde(default)]
    pub description: String,
}

/// Children of `child_type` reached over `relation` from `parent_type` nodes
/// are expected to carry the highest parent ASIL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InheritanceRule {
    pub parent_type: String,
    pub relation: String,
    pub child_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub link_rules: Vec<LinkRule>,
    #[serde(default = "default_inheritance")]
    pub inheritance: Vec<InheritanceRule>,
}

fn default_inheritance() -> Vec<InheritanceRule> {
    [("HzE", "associatedSG", "SG"), ("SG", "associatedFSR", "FSR"), ("FSR", "associatedTSR", "TSR")]
        .into_iter()
        .map(|(p, r, c)| InheritanceRule {
            parent_type: p.into(),
            relation: r.into(),
            child_type: c.into(),
        })
        .collect()
}

impl Default for RuleSet {
    fn default() -> Self {
        let link_rules = [
            ("MB", "associatedHE", "HzE", "Each MB should have a Hazardous Event identified"),
            ("HzE", "associatedSG", "SG", "Each HzE should have a Safety Goal assigned"),
            ("SG", "associatedFSR", "FSR", "Each SG should have at least one FSR defined"),
            ("FSR", "associatedTSR", "TSR", "Each FSR should have at least one TSR defined"),
        ]
        .into_iter()
        .map(|(s, r, o, d)| LinkRule {
            subject_type: s.into(),
            relation: r.into(),
            object_type: o.into(),
            description: d.into(),
        })
        .collect();
        RuleSet {
            link_rules,
            inheritance: default_inheritance(),
        }
    }
}

impl RuleSet {
    /// Accepts either a bare list of link rules or a full `{link_rules, inheritance}` object.
    /// Relation labels are canonicalized through the registry.
    pub fn from_json(doc: &str, registry: &Registry) -> Result<RuleSet, AnalyticsError> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Doc {
            List(Vec<LinkRule>),
            Full(RuleSet),
        }
        let doc: Doc = serde_json::from_str(doc).map_err(|e| AnalyticsError::RuleSet(e.to_string()))?;
        let mut rules = match doc {
            Doc::List(link_rules) => RuleSet {
                link_rules,
                inheritance: default_inheritance(),
            },
            Doc::Full(r) => r,
        };
        for r in &mut rules.link_rules {
            r.relation = registry.canonical_relation(&r.relation).to_string();
        }
        for r in &mut rules.inheritance {
            r.relation = registry.canonical_relation(&r.relation).to_string();
        }
        Ok(rules)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleViolations {
    /// `rule1`, `rule2`, ... in rule-set order.
    pub rule: String,
    #[serde(flatten)]
    pub definition: LinkRule,
    pub node_ids: Vec<String>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleViolationReport {
    pub rules: Vec<RuleViolations>,
    pub total: usize,
}

impl RuleViolationReport {
    pub fn violations(&self, rule: &str) -> Option<&[String]> {
        self.rules.iter().find(|r| r.rule == rule).map(|r| r.node_ids.as_slice())
    }
}

/// A rule is satisfied by any incident link of the rule's relation, whichever
/// way the link is stored.
pub fn check_missing_links(snapshot: &GraphSnapshot, rules: &RuleSet) -> RuleViolationReport {
    let rules: Vec<RuleViolations> = rules
        .link_rules
        .iter()
        .enumerate()
        .map(|(i, rule)| {
            let node_ids: Vec<String> = snapshot
                .nodes()
                .filter(|n| n.element_type == rule.subject_type)
                .filter(|n| {
                    !snapshot
                        .incident_links(&n.id)
                        .expect("id from snapshot")
                        .any(|l| l.relation == rule.relation)
                })
                .map(|n| n.id.clone())
                .collect();
            RuleViolations {
                rule: format!("rule{}", i + 1),
                definition: rule.clone(),
                count: node_ids.len(),
                node_ids,
            }
        })
        .collect();
    let total = rules.iter().map(|r| r.count).sum();
    RuleViolationReport { rules, total }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InheritanceDiscrepancy {
    pub child_id: String,
    pub parent_ids: Vec<String>,
    pub expected_asil: AsilValue,
    pub actual_asil: AsilValue,
    pub relation: String,
}

/// Children whose assigned ASIL differs from the highest assigned ASIL among
/// their parents. Unassigned children and parents are skipped; the unassigned
/// check reports those.
pub fn check_asil_inheritance(snapshot: &GraphSnapshot, rules: &RuleSet) -> Vec<InheritanceDiscrepancy> {
    let mut out = Vec::new();
    for rule in &rules.inheritance {
        for child in snapshot.nodes().filter(|n| n.element_type == rule.child_type) {
            let Some(actual_rank) = child.asil.rank() else {
                continue;
            };
            let parents: BTreeSet<(&str, u8)> = snapshot
                .incident_links(&child.id)
                .expect("id from snapshot")
                .filter(|l| l.relation == rule.relation)
                .filter_map(|l| l.other_end(&child.id))
                .filter_map(|id| snapshot.node(id))
                .filter(|p| p.element_type == rule.parent_type)
                .filter_map(|p| p.asil.rank().map(|r| (p.id.as_str(), r)))
                .collect();
            let Some(expected_rank) = parents.iter().map(|&(_, r)| r).max() else {
                continue;
            };
            if expected_rank != actual_rank {
                out.push(InheritanceDiscrepancy {
                    child_id: child.id.clone(),
                    parent_ids: parents.iter().map(|&(id, _)| id.to_string()).collect(),
                    expected_asil: AsilValue::from_rank(expected_rank).expect("valid rank"),
                    actual_asil: child.asil,
                    relation: rule.relation.clone(),
                });
            }
        }
    }
    out.sort_by(|a, b| (&a.child_id, &a.relation).cmp(&(&b.child_id, &b.relation)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub label: String,
    /// One count per project, in table column order.
    pub counts: Vec<usize>,
    #[serde(rename = "S")]
    pub shared: usize,
}

/// Per-project distributions of node types, link relations and ASILs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub projects: Vec<String>,
    pub types: Vec<SummaryRow>,
    pub relations: Vec<SummaryRow>,
    pub asils: Vec<SummaryRow>,
    pub node_totals: Vec<usize>,
    pub link_totals: Vec<usize>,
    pub shared_nodes: usize,
    pub shared_links: usize,
}

impl SummaryTable {
    pub fn column(&self, project_id: &str) -> Option<usize> {
        self.projects.iter().position(|p| p == project_id)
    }

    pub fn type_row(&self, label: &str) -> Option<&SummaryRow> {
        self.types.iter().find(|r| r.label == label)
    }

    pub fn relation_row(&self, label: &str) -> Option<&SummaryRow> {
        self.relations.iter().find(|r| r.label == label)
    }

    pub fn asil_row(&self, label: &str) -> Option<&SummaryRow> {
        self.asils.iter().find(|r| r.label == label)
    }
}

/// Builds a row per registered label (zero rows kept) followed by any other
/// labels seen in the data, sorted.
fn rows<'a>(
    registered: impl Iterator<Item = &'a str>,
    per_project: &[BTreeMap<String, usize>],
    shared: Option<&BTreeMap<String, usize>>,
) -> Vec<SummaryRow> {
    let mut labels: Vec<String> = registered.map(str::to_string).collect();
    let extra: BTreeSet<&String> = per_project
        .iter()
        .flat_map(|m| m.keys())
        .chain(shared.into_iter().flat_map(|m| m.keys()))
        .filter(|l| !labels.contains(l))
        .collect();
    labels.extend(extra.into_iter().cloned());
    labels
        .into_iter()
        .map(|label| SummaryRow {
            counts: per_project.iter().map(|m| m.get(&label).copied().unwrap_or(0)).collect(),
            shared: shared.and_then(|m| m.get(&label)).copied().unwrap_or(0),
            label,
        })
        .collect()
}

/// Summary over one or more projects. `shared` feeds the "S" column; pass
/// `None` when fewer than two projects are compared.
pub fn summarize(
    snapshots: &[&GraphSnapshot],
    shared: Option<&SharedCounts>,
    registry: &Registry,
) -> Result<SummaryTable, AnalyticsError> {
    if snapshots.is_empty() {
        return Err(AnalyticsError::NoProjects);
    }
    let mut by_type = Vec::new();
    let mut by_relation = Vec::new();
    let mut by_asil = Vec::new();
    for s in snapshots {
        let mut t: BTreeMap<String, usize> = BTreeMap::new();
        let mut a: BTreeMap<String, usize> = BTreeMap::new();
        for n in s.nodes() {
            *t.entry(n.element_type.clone()).or_default() += 1;
            *a.entry(n.asil.to_string()).or_default() += 1;
        }
        let mut r: BTreeMap<String, usize> = BTreeMap::new();
        for l in s.links() {
            *r.entry(l.relation.clone()).or_default() += 1;
        }
        by_type.push(t);
        by_relation.push(r);
        by_asil.push(a);
    }
    Ok(SummaryTable {
        projects: snapshots.iter().map(|s| s.project_id().to_string()).collect(),
        types: rows(
            registry.types().iter().map(|t| t.label.as_str()),
            &by_type,
            shared.map(|s| &s.by_type),
        ),
        relations: rows(
            registry.relations().iter().map(|r| r.label.as_str()),
            &by_relation,
            shared.map(|s| &s.by_relation),
        ),
        asils: rows(AsilValue::ALL.iter().map(|a| a.as_str()), &by_asil, shared.map(|s| &s.by_asil)),
        node_totals: snapshots.iter().map(|s| s.node_count()).collect(),
        link_totals: snapshots.iter().map(|s| s.link_count()).collect(),
        shared_nodes: shared.map_or(0, |s| s.nodes),
        shared_links: shared.map_or(0, |s| s.links),
    })
}

/// One exported finding: check code, project, node and free-text details.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub check: String,
    pub project: String,
    pub node_id: String,
    pub details: String,
}

pub fn orphan_findings(project: &str, ids: &[String]) -> Vec<Finding> {
    ids.iter()
        .map(|id| Finding {
            check: "ORPHAN".into(),
            project: project.into(),
            node_id: id.clone(),
            details: "degree 0".into(),
        })
        .collect()
}

pub fn degree_findings(project: &str, ids: &[String], min: usize, max: usize) -> Vec<Finding> {
    let range = if max == usize::MAX {
        format!("degree >= {min}")
    } else {
        format!("degree in {min}..={max}")
    };
    ids.iter()
        .map(|id| Finding {
            check: "DEGREE_RANGE".into(),
            project: project.into(),
            node_id: id.clone(),
            details: range.clone(),
        })
        .collect()
}

pub fn unassigned_findings(project: &str, ids: &[String]) -> Vec<Finding> {
    ids.iter()
        .map(|id| Finding {
            check: "UNASSIGNED_ASIL".into(),
            project: project.into(),
            node_id: id.clone(),
            details: "ASIL -".into(),
        })
        .collect()
}

pub fn missing_link_findings(project: &str, report: &RuleViolationReport) -> Vec<Finding> {
    report
        .rules
        .iter()
        .flat_map(|r| {
            r.node_ids.iter().map(move |id| Finding {
                check: format!("MISSING_LINK:{}", r.rule),
                project: project.into(),
                node_id: id.clone(),
                details: format!("{} without {}", r.definition.subject_type, r.definition.relation),
            })
        })
        .collect()
}

pub fn inheritance_findings(project: &str, found: &[InheritanceDiscrepancy]) -> Vec<Finding> {
    found
        .iter()
        .map(|d| Finding {
            check: "ASIL_INHERITANCE".into(),
            project: project.into(),
            node_id: d.child_id.clone(),
            details: format!(
                "expected {} from {} via {}, found {}",
                d.expected_asil,
                d.parent_ids.join("|"),
                d.relation,
                d.actual_asil
            ),
        })
        .collect()
}

pub fn findings_csv(findings: &[Finding]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "project", "node_id", "details"]).expect("in-memory write");
    for f in findings {
        w.write_record([&f.check, &f.project, &f.node_id, &f.details])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
