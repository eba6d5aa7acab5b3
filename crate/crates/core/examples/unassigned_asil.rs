// List elements that still lack an ASIL, overall and for selected types.

use std::collections::BTreeSet;
use std::error::Error;

use fusalens::{find_unassigned_asil, fixtures};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let project = fixtures::f1();
    let all = find_unassigned_asil(&project, None);
    println!("without ASIL: {all:?}");

    let hazards: BTreeSet<String> = ["HzE".to_string()].into();
    let only_hazards = find_unassigned_asil(&project, Some(&hazards));
    println!("hazardous events without ASIL: {only_hazards:?}");
    assert!(only_hazards.iter().all(|id| all.contains(id)));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
