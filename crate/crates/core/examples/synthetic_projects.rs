// Seeded random projects and injected defects, as used by the stress tests.

use std::error::Error;

use fusalens::synth::{inject_defect, random_family, random_project, Defect, SynthConfig};
use fusalens::{compare, GraphSnapshot, ProjectStore, Registry, StoreError};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let config = SynthConfig::default();
    let store = ProjectStore::in_memory(Registry::default());
    let bundle = random_project("rand-1", 42, &config);
    let outcome = store.commit_bundle(bundle.clone())?;
    println!("rand-1: {} warnings", outcome.report.warnings.len());

    for defect in Defect::ALL {
        match store.commit_bundle(inject_defect(&bundle, defect, 42)) {
            Err(StoreError::Validation(report)) => println!("{defect:?}: rejected with {}", report.errors[0].code),
            other => println!("{defect:?}: unexpected {:?}", other.map(|o| o.revision)),
        }
    }

    let family: Vec<GraphSnapshot> = random_family(3, 3, &config)
        .into_iter()
        .map(|b| GraphSnapshot::new(b.meta, b.nodes, fusalens::ingest::dedup_links(b.links), 1))
        .collect::<Result<_, _>>()?;
    let refs: Vec<&GraphSnapshot> = family.iter().collect();
    let cmp = compare(&refs)?;
    println!("family of {}: {} shared nodes, {} shared links", refs.len(), cmp.counts.nodes, cmp.counts.links);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
