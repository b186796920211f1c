use proptest::prelude::*;

use mws_plan::netmodel::{
    load_topology, Demand, Node, Scenario, SlotOwner, SpectrumGrid, Topology, SLOT_COUNT,
};
use mws_plan::qot::QotModel;
use mws_plan::rcsa::{plan_all, Planner, PlannerOptions, SourceType};
use mws_plan::study::laser_count;

fn two_nodes(km: f64) -> Topology {
    let nodes = ["A", "B"]
        .iter()
        .map(|id| Node {
            id: id.to_string(),
            weight: 1.0,
        })
        .collect();
    Topology::new(nodes, vec![("A".into(), "B".into(), km)]).unwrap()
}

fn germany() -> Topology {
    load_topology(concat!(env!("CARGO_MANIFEST_DIR"), "/data/germany.json")).unwrap()
}

#[test]
fn single_span_400g_needs_one_lightpath() {
    let topo = two_nodes(80.0);
    let model = QotModel::default();
    let feasible = model.feasible_configs(&[80.0], 36.0).unwrap();
    assert!(feasible[0].config.net_rate_gbps >= 400.0);

    let plan = plan_all(
        &topo,
        &[Demand::new(0, 1, 400.0).unwrap()],
        &Scenario::sws(),
    )
    .unwrap();
    assert_eq!(plan.lightpaths.len(), 1);
    assert_eq!(plan.lightpaths[0].carried_gbps, 400.0);
    assert_eq!(plan.unserved_gbps(), 0.0);
    plan.validate(&topo).unwrap();
}

#[test]
fn fixed_small_demand_uses_sws() {
    let topo = two_nodes(80.0);
    let plan = plan_all(
        &topo,
        &[Demand::new(0, 1, 100.0).unwrap()],
        &Scenario::fixed(1.0, 150.0),
    )
    .unwrap();
    assert_eq!(plan.lightpaths.len(), 1);
    assert_eq!(plan.lightpaths[0].source, SourceType::Sws);
    assert!(plan.blocks.is_empty());
    assert_eq!(laser_count(&plan), 1);
}

#[test]
fn fixed_large_demand_opens_one_block() {
    let topo = two_nodes(80.0);
    let plan = plan_all(
        &topo,
        &[Demand::new(0, 1, 2000.0).unwrap()],
        &Scenario::fixed(1.0, 150.0),
    )
    .unwrap();
    assert_eq!(plan.blocks.len(), 1);
    let block = &plan.blocks[0];
    assert_eq!(block.slot_range().len(), 48);
    assert_eq!(plan.grid.occupied_slots(0), 48);
    assert!(block.active_lines() >= 2 && block.active_lines() < 4);
    assert!(plan
        .lightpaths
        .iter()
        .all(|lp| matches!(lp.source, SourceType::FixedMws { block: 0, .. })));
    assert_eq!(plan.served_gbps(), 2000.0);
    assert_eq!(laser_count(&plan), 1);
    plan.validate(&topo).unwrap();
}

#[test]
fn fixed_remainder_fitting_one_lightpath_goes_to_sws() {
    let topo = two_nodes(80.0);
    // One full block (4 x 1200G) plus a 1200G remainder.
    let plan = plan_all(
        &topo,
        &[Demand::new(0, 1, 6000.0).unwrap()],
        &Scenario::fixed(1.0, 150.0),
    )
    .unwrap();
    assert_eq!(plan.blocks.len(), 1);
    assert_eq!(plan.blocks[0].active_lines(), 4);
    assert_eq!(
        plan.lightpaths
            .iter()
            .filter(|l| l.source == SourceType::Sws)
            .count(),
        1
    );
    assert_eq!(laser_count(&plan), 2);
    plan.validate(&topo).unwrap();
}

#[test]
fn fixed_demand_beyond_one_block_opens_another() {
    let topo = two_nodes(80.0);
    let plan = plan_all(
        &topo,
        &[Demand::new(0, 1, 8000.0).unwrap()],
        &Scenario::fixed(1.0, 150.0),
    )
    .unwrap();
    assert_eq!(plan.blocks.len(), 2);
    assert_eq!(plan.blocks[0].active_lines(), 4);
    assert_eq!(plan.blocks[1].active_lines(), 3);
    assert!(plan.lightpaths.iter().all(|l| l.source.is_mws()));
    assert_eq!(plan.grid.occupied_slots(0), 96);
    plan.validate(&topo).unwrap();
}

#[test]
fn nearly_full_grid_leaves_unserved_rate() {
    let topo = two_nodes(80.0);
    let mut grid = SpectrumGrid::new(1);
    grid.allocate(&[0], 0..SLOT_COUNT - 4, SlotOwner::Lightpath(usize::MAX))
        .unwrap();
    let planner = Planner::new(&topo, Scenario::sws(), PlannerOptions::default())
        .unwrap()
        .with_grid(grid);
    let plan = planner
        .plan_all(&[Demand::new(0, 1, 1000.0).unwrap()])
        .unwrap();
    assert_eq!(plan.lightpaths.len(), 1);
    let o = &plan.outcomes[0];
    assert!(o.unserved_gbps > 0.0);
    assert_eq!(o.served_gbps + o.unserved_gbps, 1000.0);
}

#[test]
fn unreachable_rate_is_unserved_not_an_error() {
    // Too long for any configuration.
    let topo = two_nodes(12_000.0);
    let plan = plan_all(
        &topo,
        &[Demand::new(0, 1, 100.0).unwrap()],
        &Scenario::sws(),
    )
    .unwrap();
    assert!(plan.lightpaths.is_empty());
    assert_eq!(plan.unserved_gbps(), 100.0);
}

#[test]
fn zero_demands_give_empty_plan() {
    let topo = germany();
    let plan = plan_all(&topo, &[], &Scenario::flex(1.0)).unwrap();
    assert!(plan.lightpaths.is_empty());
    assert_eq!(laser_count(&plan), 0);
}

fn some_demands(topo: &Topology) -> Vec<Demand> {
    let n = topo.node_count();
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .enumerate()
        .map(|(i, (a, b))| Demand::new(a, b, 25.0 + ((i * 37) % 11) as f64 * 150.0).unwrap())
        .collect()
}

#[test]
fn single_demand_plan_equals_plan_demand() {
    let topo = germany();
    let d = Demand::new(2, 9, 1700.0).unwrap();
    let plan = plan_all(
        &topo,
        std::slice::from_ref(&d),
        &Scenario::fixed(1.0, 150.0),
    )
    .unwrap();
    let mut planner = Planner::new(
        &topo,
        Scenario::fixed(1.0, 150.0),
        PlannerOptions::default(),
    )
    .unwrap();
    let outcome = planner.plan_demand(0, &d).unwrap();
    assert_eq!(plan.outcomes[0], outcome);
    assert_eq!(&plan.lightpaths, &planner.state().lightpaths);
}

#[test]
fn planning_is_deterministic() {
    let topo = germany();
    let demands = some_demands(&topo);
    for s in [
        Scenario::sws(),
        Scenario::flex(3.0),
        Scenario::fixed(1.0, 150.0),
    ] {
        let a = plan_all(&topo, &demands, &s).unwrap();
        let b = plan_all(&topo, &demands, &s).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn zero_penalty_flex_reproduces_sws() {
    let topo = germany();
    let demands = some_demands(&topo);
    let sws = plan_all(&topo, &demands, &Scenario::sws()).unwrap();
    let flex = plan_all(&topo, &demands, &Scenario::flex(0.0)).unwrap();
    assert_eq!(sws.lightpaths.len(), flex.lightpaths.len());
    for (a, b) in sws.lightpaths.iter().zip(&flex.lightpaths) {
        assert_eq!(
            (a.demand, &a.path, &a.config, &a.slots),
            (b.demand, &b.path, &b.config, &b.slots)
        );
        assert_eq!(a.snr_db, b.snr_db);
        assert_eq!(b.source, SourceType::FlexMws);
    }
    assert_eq!(sws.grid, flex.grid);
}

#[test]
fn penalty_never_raises_mws_snr() {
    let topo = germany();
    let demands = some_demands(&topo);
    let p1 = plan_all(&topo, &demands, &Scenario::flex(0.0)).unwrap();
    let p3 = plan_all(&topo, &demands, &Scenario::flex(3.0)).unwrap();
    let mean = |p: &mws_plan::rcsa::Plan| {
        p.lightpaths.iter().map(|l| l.snr_db).sum::<f64>() / p.lightpaths.len() as f64
    };
    assert!(mean(&p3) < mean(&p1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plans_satisfy_invariants(
        rates in prop::collection::vec((0usize..17, 0usize..17, 25.0f64..4000.0), 1..40),
        kind in 0usize..3,
        penalty in 0.0f64..3.0,
    ) {
        let topo = germany();
        let demands: Vec<Demand> = rates
            .into_iter()
            .filter(|(a, b, _)| a != b)
            .map(|(a, b, r)| Demand::new(a, b, r).unwrap())
            .collect();
        let scenario = match kind {
            0 => Scenario::sws(),
            1 => Scenario::flex(penalty),
            _ => Scenario::fixed(penalty, 150.0),
        };
        let plan = plan_all(&topo, &demands, &scenario).unwrap();
        prop_assert_eq!(plan.validate(&topo), Ok(()));
        for o in &plan.outcomes {
            prop_assert!((o.served_gbps + o.unserved_gbps - o.demand.rate_gbps).abs() < 1e-9);
        }
        let lasers = laser_count(&plan);
        prop_assert!(lasers <= plan.lightpaths.len());
        if kind == 1 {
            prop_assert!(lasers * 4 >= plan.lightpaths.len());
        }
    }
}
