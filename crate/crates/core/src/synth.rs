//! Seeded random projects for property tests, benchmarks and demos.

use std::collections::BTreeSet;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{ElementRecord, LinkRecord, ProjectMeta};
use crate::ingest::{IssueCode, ProjectBundle};
use crate::model::{AsilValue, Controllability, Exposure, Registry, SecTriple, Severity};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub max_nodes: usize,
    pub max_links: usize,
    /// Probability that a node's ASIL (and each SEC component) is left unassigned.
    pub unassigned_rate: f64,
    /// Probability that a link uses a label outside the registry.
    pub unregistered_relation_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_nodes: 200,
            max_links: 600,
            unassigned_rate: 0.2,
            unregistered_relation_rate: 0.02,
        }
    }
}

const NAME_WORDS: &[&str] = &[
    "brake", "torque", "sensor", "lane", "radar", "loss of", "unintended", "steering", "\"limp\" mode",
    "speed, high", "camera", "timeout", "driver", "warning",
];

fn meta(project_id: &str) -> ProjectMeta {
    ProjectMeta {
        project_id: project_id.to_string(),
        name: format!("Synthetic {project_id}"),
        system: "Synthetic system".to_string(),
        ..ProjectMeta::default()
    }
}

fn random_name(rng: &mut impl Rng) -> String {
    let words = rng.gen_range(1..=3);
    (0..words)
        .map(|_| *NAME_WORDS.choose(rng).expect("non-empty word list"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn maybe<T: Copy>(rng: &mut impl Rng, p_unassigned: f64, levels: &[T], unassigned: T) -> T {
    if rng.gen_bool(p_unassigned) {
        unassigned
    } else {
        *levels.choose(rng).expect("non-empty levels")
    }
}

/// A random element with registered type, random ASIL and S-E-C.
pub fn random_element(rng: &mut impl Rng, id: String, registry: &Registry, config: &SynthConfig) -> ElementRecord {
    let p = config.unassigned_rate;
    let element_type = registry.types().choose(rng).expect("registry has types").label.clone();
    let assigned = [AsilValue::Qm, AsilValue::A, AsilValue::B, AsilValue::C, AsilValue::D];
    ElementRecord {
        id,
        name: random_name(rng),
        element_type,
        asil: maybe(rng, p, &assigned, AsilValue::Unassigned),
        sec: SecTriple::new(
            maybe(rng, p, Severity::LEVELS, Severity::Unassigned),
            maybe(rng, p, Exposure::LEVELS, Exposure::Unassigned),
            maybe(rng, p, Controllability::LEVELS, Controllability::Unassigned),
        ),
    }
}

fn random_relation(rng: &mut impl Rng, registry: &Registry, config: &SynthConfig) -> String {
    if rng.gen_bool(config.unregistered_relation_rate) {
        "dependsOn".to_string()
    } else {
        registry.relations().choose(rng).expect("registry has relations").label.clone()
    }
}

/// Draws up to `count` distinct non-self-loop links over `ids`.
fn random_links(
    rng: &mut impl Rng,
    ids: &[String],
    count: usize,
    registry: &Registry,
    config: &SynthConfig,
    allow: impl Fn(&str, &str) -> bool,
) -> Vec<LinkRecord> {
    let mut seen = BTreeSet::new();
    let mut links = Vec::with_capacity(count);
    if ids.len() < 2 {
        return links;
    }
    let mut attempts = 0;
    while links.len() < count && attempts < count * 20 + 100 {
        attempts += 1;
        let s = &ids[rng.gen_range(0..ids.len())];
        let t = &ids[rng.gen_range(0..ids.len())];
        if s == t || !allow(s, t) {
            continue;
        }
        let link = LinkRecord::new(s.clone(), t.clone(), random_relation(rng, registry, config));
        if seen.insert(link.clone()) {
            links.push(link);
        }
    }
    links
}

/// A valid random project: unique ids, no self-loops, no duplicate links,
/// every link endpoint present. Node and link counts are uniform in
/// `0..=max_nodes` and `0..=max_links`.
pub fn random_project(project_id: &str, seed: u64, config: &SynthConfig) -> ProjectBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = Registry::default();
    let n = rng.gen_range(0..=config.max_nodes);
    let m = rng.gen_range(0..=config.max_links);
    let nodes: Vec<ElementRecord> = (0..n)
        .map(|i| random_element(&mut rng, format!("e{i}"), &registry, config))
        .collect();
    let ids: Vec<String> = nodes.iter().map(|n| n.id.clone()).collect();
    let links = random_links(&mut rng, &ids, m, &registry, config, |_, _| true);
    ProjectBundle {
        meta: meta(project_id),
        nodes,
        links,
    }
}

/// `count` projects drawn from a common node and link pool, so they overlap
/// by id and by link. Shared ids may carry different attributes per project.
pub fn random_family(seed: u64, count: usize, config: &SynthConfig) -> Vec<ProjectBundle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = Registry::default();
    let pool_size = rng.gen_range(1..=config.max_nodes.max(1));
    let pool: Vec<String> = (0..pool_size).map(|i| format!("e{i}")).collect();
    let link_pool = random_links(&mut rng, &pool, config.max_links, &registry, config, |_, _| true);
    (0..count)
        .map(|p| {
            let keep = rng.gen_range(0.3..=1.0);
            let ids: Vec<String> = pool.iter().filter(|_| rng.gen_bool(keep)).cloned().collect();
            let present: BTreeSet<&str> = ids.iter().map(String::as_str).collect();
            let nodes = ids
                .iter()
                .map(|id| random_element(&mut rng, id.clone(), &registry, config))
                .collect();
            let links = link_pool
                .iter()
                .filter(|l| present.contains(l.source.as_str()) && present.contains(l.target.as_str()))
                .filter(|_| rng.gen_bool(keep))
                .cloned()
                .collect();
            ProjectBundle {
                meta: meta(&format!("P{}", p + 1)),
                nodes,
                links,
            }
        })
        .collect()
}

/// Three projects where `P1` has 318 nodes and 675 links, and the three
/// share exactly 15 node ids and no link.
pub fn summary_trio(seed: u64) -> Vec<ProjectBundle> {
    const SHARED: usize = 15;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = Registry::default();
    let config = SynthConfig {
        unregistered_relation_rate: 0.0,
        ..SynthConfig::default()
    };
    let shared: Vec<String> = (1..=SHARED).map(|i| format!("s{i:02}")).collect();
    let sizes = [(318, 675), (140, 260), (90, 150)];
    sizes
        .iter()
        .enumerate()
        .map(|(p, &(n, m))| {
            let tag = p + 1;
            let mut ids = shared.clone();
            ids.extend((0..n - SHARED).map(|i| format!("p{tag}_{i}")));
            let nodes = ids
                .iter()
                .map(|id| random_element(&mut rng, id.clone(), &registry, &config))
                .collect();
            // only P1 may link two shared nodes, so no link is common to all three
            let links = random_links(&mut rng, &ids, m, &registry, &config, |s, t| {
                tag == 1 || !(s.starts_with('s') && t.starts_with('s'))
            });
            assert_eq!(links.len(), m, "link pool large enough");
            ProjectBundle {
                meta: meta(&format!("P{tag}")),
                nodes,
                links,
            }
        })
        .collect()
}

/// Validation defects that [`inject_defect`] can seed into a bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Defect {
    DanglingSource,
    DanglingTarget,
    DuplicateId,
    SelfLoop,
}

impl Defect {
    pub const ALL: [Defect; 4] = [
        Defect::DanglingSource,
        Defect::DanglingTarget,
        Defect::DuplicateId,
        Defect::SelfLoop,
    ];

    /// Error code validation must report for this defect.
    pub fn expected_code(self) -> IssueCode {
        match self {
            Defect::DanglingSource => IssueCode::DanglingSource,
            Defect::DanglingTarget => IssueCode::DanglingTarget,
            Defect::DuplicateId => IssueCode::DuplicateNodeId,
            Defect::SelfLoop => IssueCode::SelfLoop,
        }
    }
}

/// Seeds one defect into a copy of `bundle`. Nodes are added when the
/// bundle is too small to carry the defect.
pub fn inject_defect(bundle: &ProjectBundle, defect: Defect, seed: u64) -> ProjectBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = Registry::default();
    let config = SynthConfig::default();
    let mut out = bundle.clone();
    if out.nodes.is_empty() {
        out.nodes
            .push(random_element(&mut rng, "seed_node".to_string(), &registry, &config));
    }
    let existing = out.nodes.iter().choose(&mut rng).expect("non-empty").clone();
    let missing = "missing_node".to_string();
    let at = rng.gen_range(0..=out.links.len());
    match defect {
        Defect::DanglingSource => out
            .links
            .insert(at, LinkRecord::new(missing, existing.id, "relatedMB")),
        Defect::DanglingTarget => out
            .links
            .insert(at, LinkRecord::new(existing.id, missing, "relatedMB")),
        Defect::SelfLoop => out
            .links
            .insert(at, LinkRecord::new(existing.id.clone(), existing.id, "relatedFSR")),
        Defect::DuplicateId => {
            let at = rng.gen_range(0..=out.nodes.len());
            let mut dup = random_element(&mut rng, existing.id.clone(), &registry, &config);
            dup.name = format!("{} (copy)", existing.name);
            out.nodes.insert(at, dup);
        }
    }
    out
}
