// Orphans, degree filters, missing mandatory links and ASIL inheritance on a demo project.

use std::error::Error;

use fusalens::analytics::{findings_csv, missing_link_findings, orphan_findings};
use fusalens::{check_asil_inheritance, check_missing_links, filter_by_degree, find_orphans, fixtures, RuleSet};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let project = fixtures::f1();
    let rules = RuleSet::default();

    let orphans = find_orphans(&project);
    println!("orphans: {orphans:?}");
    println!("degree >= 3: {:?}", filter_by_degree(&project, 3, usize::MAX)?);

    let report = check_missing_links(&project, &rules);
    for r in &report.rules {
        println!("{} {} -[{}]-> {}: {:?}", r.rule, r.definition.subject_type, r.definition.relation, r.definition.object_type, r.node_ids);
    }

    for d in check_asil_inheritance(&project, &rules) {
        println!("{} is {} but parents {:?} expect {}", d.child_id, d.actual_asil, d.parent_ids, d.expected_asil);
    }

    let mut findings = orphan_findings(project.project_id(), &orphans);
    findings.extend(missing_link_findings(project.project_id(), &report));
    print!("{}", findings_csv(&findings));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
