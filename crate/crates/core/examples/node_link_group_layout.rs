// Deterministic grouped layout, pinned groups and alignment across two projects.

use std::collections::BTreeMap;
use std::error::Error;

use fusalens::layout::Point;
use fusalens::{align_layouts, fixtures, layout_project, LayoutConfig, SizeBy};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let config = LayoutConfig {
        group_by: "type".into(),
        size_by: SizeBy::Degree,
        seed: 7,
        ..LayoutConfig::default()
    };
    let a = layout_project(&fixtures::f1(), &config, None)?;
    for g in &a.groups {
        println!("{:10} at ({:7.1}, {:7.1}) R {:5.1}, hull {} pts", g.label, g.cx, g.cy, g.radius, a.hulls[&g.key].len());
    }
    assert_eq!(layout_project(&fixtures::f1(), &config, None)?, a);

    let pinned = BTreeMap::from([("SG".to_string(), Point::new(100.0, 100.0))]);
    let p = layout_project(&fixtures::f1(), &config, Some(&pinned))?;
    println!("pinned SG at {:?}", p.group("SG").map(|g| g.center()));

    let c = layout_project(&fixtures::f2(), &config, None)?;
    let aligned = align_layouts(&[a, c], "F1")?;
    for g in &aligned[1].groups {
        println!("F2 {:10} -> ({:7.1}, {:7.1})", g.key, g.cx, g.cy);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
