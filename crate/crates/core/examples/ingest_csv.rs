// Parse a project from CSV, validate it and commit it to an in-memory store.

use std::error::Error;

use fusalens::graph::ProjectMeta;
use fusalens::ingest::{parse_links_csv, parse_nodes_csv, validate_project};
use fusalens::{ProjectStore, Registry};

const NODES: &str = "\
id,name,type,asil,severity,exposure,controllability
sb1,Keep distance,SB,-,-,-,-
mb1,\"Unintended braking, full force\",MB,-,-,-,-
he1,Rear-end collision,HzE,C,S3,E3,C3
sg1,Avoid unintended braking,SG,C,S3,E3,C3
fsr1,Plausibility check on brake request,FSR,C,-,-,-
";

const LINKS: &str = "\
source,target,relation
sb1,mb1,relatedMB
mb1,he1,associatedHE
he1,sg1,associatedSafetyGoal
sg1,fsr1,associatedFSR
sg1,fsr1,associatedFSR
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let registry = Registry::default();
    let nodes = parse_nodes_csv(NODES.as_bytes())?;
    let links = parse_links_csv(LINKS.as_bytes(), &registry)?;
    // the alias resolves to the canonical relation label
    assert_eq!(links[2].relation, "associatedSG");

    let report = validate_project(&nodes, &links, &registry);
    println!("errors: {}, warnings: {}", report.errors.len(), report.warnings.len());
    for w in &report.warnings {
        println!("  {} {}", w.code, w.message);
    }

    let store = ProjectStore::in_memory(registry);
    let meta = ProjectMeta {
        project_id: "acc-demo".into(),
        name: "ACC demo".into(),
        system: "Adaptive cruise control".into(),
        ..ProjectMeta::default()
    };
    let outcome = store.commit_project(meta, nodes, links)?;
    let graph = store.get_graph(&outcome.project_id)?;
    println!(
        "committed {} rev {}: {} nodes, {} links",
        outcome.project_id,
        outcome.revision,
        graph.node_count(),
        graph.link_count()
    );
    assert_eq!(graph.link_count(), 4);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
