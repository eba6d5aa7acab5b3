// Derive ASILs from S-E-C ratings with the default table and a custom one.

use std::error::Error;

use fusalens::model::{Controllability, Exposure, Severity};
use fusalens::{asil_from_sec, parse_sec, AsilValue, RiskTable, SecTriple};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let table = RiskTable::default();
    for (s, e, c) in [("S3", "E4", "C3"), ("S3", "E3", "C3"), ("S2", "E2", "C2"), ("S0", "E4", "C3")] {
        let sec = parse_sec(s, e, c)?;
        println!("{sec} -> {}", asil_from_sec(&sec, &table)?);
    }
    assert!(asil_from_sec(&parse_sec("S3", "-", "C3")?, &table).is_err());

    // a project-specific table, loaded from the same JSON document shape
    let mut entries = table.to_entries();
    entries.insert("S3E4C2".into(), "D".into());
    let custom = RiskTable::from_json_str(&serde_json::to_string(&entries)?)?;
    let sec = SecTriple::new(Severity::S3, Exposure::E4, Controllability::C2);
    println!("default {sec} -> {}", asil_from_sec(&sec, &table)?);
    println!("custom  {sec} -> {}", asil_from_sec(&sec, &custom)?);
    assert_eq!(asil_from_sec(&sec, &custom)?, AsilValue::D);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
