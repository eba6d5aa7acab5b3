// Shortest path between two elements and the ASIL / S-E-C readings along it.

use std::error::Error;

use fusalens::{find_path, fixtures, trace_asils, PathMode, PathQuery};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let project = fixtures::f1();
    let query = PathQuery::new("n1", "n6", PathMode::Undirected);
    let Some(path) = find_path(&project, &query)? else {
        println!("no path");
        return Ok(());
    };
    println!("path: {}", path.nodes.join(" -> "));

    let trace = trace_asils(&project, &path)?;
    for step in &trace.steps {
        println!("  {:4} {:4} asil {:2} sec {}", step.id, step.element_type, step.asil, step.sec);
    }
    for f in &trace.flags {
        println!("  {} {}: {} but {} has {}", f.node_id, f.component, f.actual, f.from_node, f.expected);
    }

    let back = find_path(&project, &PathQuery::new("n6", "n1", PathMode::Forward))?;
    println!("forward n6 -> n1 reachable: {}", back.is_some());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
