// Shared elements and links across projects, with ASIL conflicts and per-project neighbors.

use std::error::Error;

use fusalens::compare::shared_nodes_csv;
use fusalens::{compare, fixtures};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (a, c) = (fixtures::f1(), fixtures::f2());
    let cmp = compare(&[&a, &c])?;
    println!("shared nodes: {}, shared links: {}", cmp.counts.nodes, cmp.counts.links);
    for n in &cmp.nodes {
        let asils: Vec<String> = n.per_project.iter().map(|(p, attrs)| format!("{p}={}", attrs.asil)).collect();
        let flag = if n.asil_conflict { "  conflict" } else { "" };
        println!("  {} {:30} {}{flag}", n.id, n.name, asils.join(" "));
    }
    for (id, per_project) in &cmp.highlights {
        for p in per_project {
            println!("  {id} in {}: {} neighbors", p.project_id, p.count);
        }
    }
    print!("{}", shared_nodes_csv(&cmp.nodes, &cmp.projects));

    let b = fixtures::f3();
    let three = compare(&[&a, &c, &b])?;
    println!("shared by all three: {:?}", three.nodes.iter().map(|n| &n.id).collect::<Vec<_>>());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
