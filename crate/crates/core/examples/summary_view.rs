// Per-project type, relation and ASIL distributions with a shared-entity column.

use std::error::Error;

use fusalens::{compare, fixtures, summarize, Registry};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let projects = [fixtures::f1(), fixtures::f2(), fixtures::f3()];
    let refs: Vec<_> = projects.iter().collect();
    let shared = compare(&refs)?.counts;
    let table = summarize(&refs, Some(&shared), &Registry::default())?;

    println!("{:16}{}  S", "", table.projects.iter().map(|p| format!("{p:>5}")).collect::<String>());
    for (title, rows) in [("types", &table.types), ("relations", &table.relations), ("asil", &table.asils)] {
        println!("{title}");
        for row in rows {
            let counts: String = row.counts.iter().map(|c| format!("{c:>5}")).collect();
            println!("  {:14}{counts}  {}", row.label, row.shared);
        }
    }
    println!("nodes {:?} links {:?}", table.node_totals, table.link_totals);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
