//! Checks, tracing and comparison against brute-force reference implementations.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{arb_asil, arb_graph, arb_sec, RawGraph};
use fusalens::analytics::{
    check_asil_inheritance, check_missing_links, filter_by_degree, find_orphans, find_unassigned_asil, summarize,
    RuleSet,
};
use fusalens::compare::{compare, has_asil_conflict, shared_links, shared_nodes, shared_subgraph};
use fusalens::graph::{GraphSnapshot, LinkRecord};
use fusalens::model::{compare_asil, AsilValue, Registry, SecComponent};
use fusalens::trace::{check_sec_consistency, find_path, trace_asils, PathMode, PathQuery, TraceStep};
use proptest::prelude::*;

fn brute_degree(g: &RawGraph, id: &str) -> usize {
    g.links.iter().filter(|l| l.source == id || l.target == id).count()
}

fn ids(g: &RawGraph) -> Vec<String> {
    let mut v: Vec<String> = g.nodes.iter().map(|n| n.id.clone()).collect();
    v.sort();
    v
}

fn joins(l: &LinkRecord, a: &str, b: &str, mode: PathMode) -> bool {
    match mode {
        PathMode::Forward => l.source == a && l.target == b,
        PathMode::Undirected => (l.source == a && l.target == b) || (l.source == b && l.target == a),
    }
}

/// Every simple path from `src` to `dst`, as (node ids, links).
fn all_simple_paths(g: &RawGraph, src: &str, dst: &str, mode: PathMode) -> Vec<(Vec<String>, Vec<LinkRecord>)> {
    fn walk(
        g: &RawGraph,
        dst: &str,
        mode: PathMode,
        nodes: &mut Vec<String>,
        links: &mut Vec<LinkRecord>,
        out: &mut Vec<(Vec<String>, Vec<LinkRecord>)>,
    ) {
        let here = nodes.last().unwrap().clone();
        if here == dst {
            out.push((nodes.clone(), links.clone()));
            return;
        }
        for l in &g.links {
            for next in [&l.source, &l.target] {
                if nodes.contains(next) || !joins(l, &here, next, mode) {
                    continue;
                }
                nodes.push(next.clone());
                links.push(l.clone());
                walk(g, dst, mode, nodes, links, out);
                nodes.pop();
                links.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, dst, mode, &mut vec![src.to_string()], &mut Vec::new(), &mut out);
    out
}

fn sec_oracle(steps: &[TraceStep]) -> BTreeSet<(String, String, String, String, String)> {
    let mut flags = BTreeSet::new();
    for c in SecComponent::ALL {
        let assigned: Vec<&TraceStep> = steps.iter().filter(|s| s.sec.component_assigned(c)).collect();
        for pair in assigned.windows(2) {
            let (prev, cur) = (pair[0], pair[1]);
            if prev.sec.component(c) != cur.sec.component(c) {
                flags.insert((
                    cur.id.clone(),
                    c.as_str().to_string(),
                    cur.sec.component(c).to_string(),
                    prev.sec.component(c).to_string(),
                    prev.id.clone(),
                ));
            }
        }
    }
    flags
}

fn arb_family() -> impl Strategy<Value = Vec<RawGraph>> {
    prop::collection::vec(arb_graph(14, 40), 2..=4)
}

fn snapshots(family: &[RawGraph]) -> Vec<GraphSnapshot> {
    family.iter().enumerate().map(|(i, g)| g.snapshot(&format!("P{}", i + 1))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn degree_filters_match_brute_force(g in arb_graph(30, 80), min in 0usize..6, span in 0usize..6) {
        let s = g.snapshot("p");
        let max = min + span;
        let expected: Vec<String> = ids(&g)
            .into_iter()
            .filter(|id| (min..=max).contains(&brute_degree(&g, id)))
            .collect();
        prop_assert_eq!(filter_by_degree(&s, min, max).unwrap(), expected);
        for id in s.node_ids() {
            prop_assert_eq!(s.degree(id).unwrap(), brute_degree(&g, id));
        }
        prop_assert_eq!(find_orphans(&s), filter_by_degree(&s, 0, 0).unwrap());
        if span > 0 {
            prop_assert!(filter_by_degree(&s, max, min).is_err());
        }
    }

    #[test]
    fn unassigned_and_missing_links_match_brute_force(g in arb_graph(30, 80)) {
        let s = g.snapshot("p");
        let unassigned: Vec<String> =
            ids(&g).into_iter().filter(|id| !s.node(id).unwrap().asil.is_assigned()).collect();
        prop_assert_eq!(find_unassigned_asil(&s, None), unassigned);
        let sg: BTreeSet<String> = ["SG".to_string()].into();
        let only_sg: Vec<String> = g
            .nodes
            .iter()
            .filter(|n| n.element_type == "SG" && !n.asil.is_assigned())
            .map(|n| n.id.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        prop_assert_eq!(find_unassigned_asil(&s, Some(&sg)), only_sg);

        let rules = RuleSet::default();
        let report = check_missing_links(&s, &rules);
        prop_assert_eq!(report.rules.len(), rules.link_rules.len());
        for (i, rule) in rules.link_rules.iter().enumerate() {
            let expected: Vec<String> = ids(&g)
                .into_iter()
                .filter(|id| s.node(id).unwrap().element_type == rule.subject_type)
                .filter(|id| {
                    !g.links
                        .iter()
                        .any(|l| l.relation == rule.relation && (&l.source == id || &l.target == id))
                })
                .collect();
            prop_assert_eq!(report.violations(&format!("rule{}", i + 1)).unwrap(), expected.as_slice());
        }
        prop_assert_eq!(report.total, report.rules.iter().map(|r| r.node_ids.len()).sum::<usize>());
    }

    #[test]
    fn inheritance_is_sound_and_complete(g in arb_graph(24, 70)) {
        let s = g.snapshot("p");
        let rules = RuleSet::default();
        let mut expected = BTreeMap::new();
        for rule in &rules.inheritance {
            for child in g.nodes.iter().filter(|n| n.element_type == rule.child_type && n.asil.is_assigned()) {
                let mut parents: Vec<(String, u8)> = g
                    .links
                    .iter()
                    .filter(|l| l.relation == rule.relation)
                    .filter_map(|l| {
                        if l.source == child.id {
                            Some(&l.target)
                        } else if l.target == child.id {
                            Some(&l.source)
                        } else {
                            None
                        }
                    })
                    .filter_map(|id| g.nodes.iter().find(|n| &n.id == id))
                    .filter(|p| p.element_type == rule.parent_type)
                    .filter_map(|p| p.asil.rank().map(|r| (p.id.clone(), r)))
                    .collect();
                parents.sort();
                parents.dedup();
                if let Some(max) = parents.iter().map(|p| p.1).max() {
                    if Some(max) != child.asil.rank() {
                        let ids: Vec<String> = parents.into_iter().map(|p| p.0).collect();
                        expected.insert((child.id.clone(), rule.relation.clone()), (ids, max));
                    }
                }
            }
        }
        let found = check_asil_inheritance(&s, &rules);
        prop_assert_eq!(found.len(), expected.len());
        for d in found {
            let (parents, max) = &expected[&(d.child_id.clone(), d.relation.clone())];
            prop_assert_eq!(&d.parent_ids, parents);
            prop_assert_eq!(d.expected_asil.rank(), Some(*max));
            prop_assert_eq!(d.actual_asil, s.node(&d.child_id).unwrap().asil);
        }
    }

    #[test]
    fn compare_matches_naive_intersection(family in arb_family()) {
        let snaps = snapshots(&family);
        let refs: Vec<&GraphSnapshot> = snaps.iter().collect();
        let mut node_sets = family.iter().map(|g| g.nodes.iter().map(|n| n.id.clone()).collect::<BTreeSet<_>>());
        let first = node_sets.next().unwrap();
        let common_ids: BTreeSet<String> = node_sets.fold(first, |acc, s| &acc & &s);
        let mut link_sets = family.iter().map(|g| g.links.iter().cloned().collect::<BTreeSet<_>>());
        let first = link_sets.next().unwrap();
        let common_links: BTreeSet<LinkRecord> = link_sets.fold(first, |acc, s| &acc & &s);

        let nodes = shared_nodes(&refs).unwrap();
        let got: BTreeSet<String> = nodes.iter().map(|n| n.id.clone()).collect();
        prop_assert_eq!(&got, &common_ids);
        for n in &nodes {
            let asils: Vec<AsilValue> = snaps.iter().map(|s| s.node(&n.id).unwrap().asil).collect();
            let assigned: BTreeSet<&str> = asils.iter().filter(|a| a.is_assigned()).map(|a| a.as_str()).collect();
            prop_assert_eq!(n.asil_conflict, assigned.len() >= 2);
            prop_assert_eq!(n.per_project.len(), snaps.len());
        }
        let links: BTreeSet<LinkRecord> = shared_links(&refs).unwrap().iter().map(|l| l.record()).collect();
        prop_assert_eq!(&links, &common_links);
        let sub = shared_subgraph(&refs).unwrap();
        prop_assert_eq!(sub.node_ids().map(str::to_string).collect::<BTreeSet<_>>(), common_ids);
        prop_assert_eq!(sub.links().iter().cloned().collect::<BTreeSet<_>>(), common_links);
    }

    #[test]
    fn compare_is_order_independent(family in arb_family(), rot in 0usize..4) {
        let snaps = snapshots(&family);
        let mut refs: Vec<&GraphSnapshot> = snaps.iter().collect();
        let a = compare(&refs).unwrap();
        let k = rot % refs.len();
        refs.rotate_left(k);
        refs.reverse();
        let b = compare(&refs).unwrap();
        let ids = |c: &fusalens::compare::Comparison| c.nodes.iter().map(|n| n.id.clone()).collect::<Vec<_>>();
        prop_assert_eq!(ids(&a), ids(&b));
        let links = |c: &fusalens::compare::Comparison| c.links.iter().map(|l| l.record()).collect::<Vec<_>>();
        prop_assert_eq!(links(&a), links(&b));
        let conflicts = |c: &fusalens::compare::Comparison| c.nodes.iter().map(|n| n.asil_conflict).collect::<Vec<_>>();
        prop_assert_eq!(conflicts(&a), conflicts(&b));
        prop_assert_eq!(a.counts.nodes, b.counts.nodes);
        prop_assert_eq!(a.counts.links, b.counts.links);
        prop_assert_eq!(&a.counts.by_relation, &b.counts.by_relation);
    }

    #[test]
    fn summary_columns_add_up(family in arb_family()) {
        let snaps = snapshots(&family);
        let refs: Vec<&GraphSnapshot> = snaps.iter().collect();
        let cmp = compare(&refs).unwrap();
        let table = summarize(&refs, Some(&cmp.counts), &Registry::default()).unwrap();
        prop_assert_eq!(table.shared_nodes, cmp.nodes.len());
        prop_assert_eq!(table.shared_links, cmp.links.len());
        prop_assert_eq!(table.types.iter().map(|r| r.shared).sum::<usize>(), cmp.nodes.len());
        prop_assert_eq!(table.asils.iter().map(|r| r.shared).sum::<usize>(), cmp.nodes.len());
        prop_assert_eq!(table.relations.iter().map(|r| r.shared).sum::<usize>(), cmp.links.len());
        for (col, g) in family.iter().enumerate() {
            prop_assert_eq!(table.node_totals[col], g.nodes.len());
            prop_assert_eq!(table.link_totals[col], g.links.len());
            prop_assert_eq!(table.types.iter().map(|r| r.counts[col]).sum::<usize>(), g.nodes.len());
            prop_assert_eq!(table.asils.iter().map(|r| r.counts[col]).sum::<usize>(), g.nodes.len());
            prop_assert_eq!(table.relations.iter().map(|r| r.counts[col]).sum::<usize>(), g.links.len());
            for row in &table.types {
                let n = g.nodes.iter().filter(|n| n.element_type == row.label).count();
                prop_assert_eq!(row.counts[col], n);
            }
        }
        let single = summarize(&refs[..1], None, &Registry::default()).unwrap();
        prop_assert!(single.types.iter().chain(&single.asils).chain(&single.relations).all(|r| r.shared == 0));
    }

    #[test]
    fn shortest_path_matches_exhaustive_search(
        g in arb_graph(7, 12),
        a in 0usize..7,
        b in 0usize..7,
        forward in any::<bool>(),
    ) {
        let s = g.snapshot("p");
        let n = g.nodes.len();
        let (src, dst) = (format!("v{:02}", a % n), format!("v{:02}", b % n));
        let mode = if forward { PathMode::Forward } else { PathMode::Undirected };
        let found = find_path(&s, &PathQuery::new(&src, &dst, mode)).unwrap();
        let best = all_simple_paths(&g, &src, &dst, mode)
            .into_iter()
            .min_by(|x, y| (x.0.len(), &x.0, &x.1).cmp(&(y.0.len(), &y.0, &y.1)));
        match (found, best) {
            (None, None) => {}
            (Some(p), Some((nodes, links))) => {
                prop_assert_eq!(&p.nodes, &nodes);
                prop_assert_eq!(&p.links, &links);
                let trace = trace_asils(&s, &p).unwrap();
                prop_assert_eq!(trace.steps.len(), p.nodes.len());
            }
            (found, best) => prop_assert!(false, "find_path {:?} vs oracle {:?}", found, best),
        }
    }

    #[test]
    fn sec_flags_match_component_walk(secs in prop::collection::vec((arb_sec(), arb_asil()), 0..12)) {
        let steps: Vec<TraceStep> = secs
            .into_iter()
            .enumerate()
            .map(|(i, (sec, asil))| TraceStep {
                id: format!("t{i:02}"),
                name: String::new(),
                element_type: "SG".into(),
                asil,
                sec,
            })
            .collect();
        let got: BTreeSet<_> = check_sec_consistency(&steps)
            .into_iter()
            .map(|f| (f.node_id, f.component.as_str().to_string(), f.actual, f.expected, f.from_node))
            .collect();
        prop_assert_eq!(got, sec_oracle(&steps));
    }

    #[test]
    fn asil_comparison_is_antisymmetric(a in arb_asil(), b in arb_asil(), c in arb_asil()) {
        prop_assert_eq!(compare_asil(a, b), compare_asil(b, a).map(std::cmp::Ordering::reverse));
        prop_assert_eq!(compare_asil(a, b).is_none(), !a.is_assigned() || !b.is_assigned());
        if compare_asil(a, b) == Some(std::cmp::Ordering::Less) && compare_asil(b, c) == Some(std::cmp::Ordering::Less) {
            prop_assert_eq!(compare_asil(a, c), Some(std::cmp::Ordering::Less));
        }
        prop_assert_eq!(has_asil_conflict([a, b]), a.is_assigned() && b.is_assigned() && a != b);
    }
}
