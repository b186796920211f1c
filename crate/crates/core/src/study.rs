//! Traffic generation, scenario sweeps and study metrics.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path as FsPath;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netmodel::{Demand, LaserGrouping, Scenario, ScenarioKind, Topology};
use crate::rcsa::{Plan, Planner, PlannerOptions, SourceType};

/// Smallest generated demand, Gb/s.
pub const MIN_DEMAND_GBPS: f64 = 25.0;

/// SWS share of total transponder cost used for break-even analysis.
pub const SWS_COST_SHARE: f64 = 0.33;

/// Gravity-model demands: `rate(i, j) ∝ w_i · w_j` over unordered pairs
/// with positive weights, scaled to sum to `art_gbps`, then raised to at
/// least [`MIN_DEMAND_GBPS`].
pub fn gravity_demands(topo: &Topology, art_gbps: f64) -> Result<Vec<Demand>> {
    if !(art_gbps.is_finite() && art_gbps > 0.0) {
        return Err(Error::Traffic(format!(
            "ART must be positive, got {art_gbps}"
        )));
    }
    let active: Vec<usize> = (0..topo.node_count())
        .filter(|&n| topo.nodes[n].weight > 0.0)
        .collect();
    if active.len() < 2 {
        return Err(Error::Traffic(
            "need at least two nodes with positive weight".into(),
        ));
    }
    let mut pairs = Vec::new();
    for (k, &i) in active.iter().enumerate() {
        for &j in &active[k + 1..] {
            pairs.push((i, j, topo.nodes[i].weight * topo.nodes[j].weight));
        }
    }
    let total: f64 = pairs.iter().map(|p| p.2).sum();
    let scale = art_gbps / total;
    pairs
        .into_iter()
        .map(|(i, j, w)| Demand::new(i, j, (w * scale).max(MIN_DEMAND_GBPS)))
        .collect()
}

/// Replaces node weights from an `id,weight` CSV (with header).
pub fn apply_weights<R: Read>(topo: &Topology, reader: R) -> Result<Topology> {
    let mut out = topo.clone();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let (Some(id), Some(w)) = (rec.get(0), rec.get(1)) else {
            return Err(Error::Traffic(format!(
                "weights record {}: expected id,weight",
                i + 1
            )));
        };
        let w: f64 = w
            .parse()
            .map_err(|e| Error::Traffic(format!("weights record {}: {e}", i + 1)))?;
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::Traffic(format!(
                "weights record {}: invalid weight {w}",
                i + 1
            )));
        }
        let n = topo.node_index(id)?;
        out.nodes[n].weight = w;
    }
    Ok(out)
}

pub fn load_weights(topo: &Topology, path: impl AsRef<FsPath>) -> Result<Topology> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    apply_weights(topo, f)
}

/// Multiplies every weight by an independent factor in [0.5, 1.5).
pub fn randomize_weights(topo: &Topology, seed: u64) -> Topology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = topo.clone();
    for n in &mut out.nodes {
        n.weight *= rng.gen_range(0.5..1.5);
    }
    out
}

/// Number of optical power supplies (lasers or MWS units) in a plan.
///
/// SWS lightpaths need one laser each, every fixed-MWS block one unit, and
/// flex-MWS lines are packed `lines` at a time per source node (or per node
/// pair, depending on the scenario's grouping).
pub fn laser_count(plan: &Plan) -> usize {
    let scenario = &plan.scenario;
    let mut sws = 0usize;
    let mut flex_groups: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for lp in &plan.lightpaths {
        match lp.source {
            SourceType::Sws => sws += 1,
            SourceType::FlexMws => {
                let key = match scenario.grouping {
                    LaserGrouping::SourceNode => (lp.src, usize::MAX),
                    LaserGrouping::NodePair => (lp.src, lp.dst),
                };
                *flex_groups.entry(key).or_default() += 1;
            }
            SourceType::FixedMws { .. } => {}
        }
    }
    let flex: usize = flex_groups
        .values()
        .map(|&n| n.div_ceil(scenario.lines.max(1)))
        .sum();
    sws + flex + plan.blocks.len()
}

/// Metrics of one (scenario, ART) planning run.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub scenario: String,
    pub kind: ScenarioKind,
    pub penalty_db: f64,
    /// ART the demands were scaled to, Gb/s.
    pub art_target_gbps: f64,
    /// Sum of generated demands after the minimum-demand floor, Gb/s.
    pub art_gbps: f64,
    pub lightpaths: usize,
    pub lasers: usize,
    pub blocks: usize,
    pub served_gbps: f64,
    pub unserved_gbps: f64,
    pub underprovisioning: f64,
    /// Mean achieved SNR over deployed lightpaths; NaN for an empty plan.
    pub mean_snr_db: f64,
    pub occupancy: f64,
}

impl PlanResult {
    pub fn from_plan(plan: &Plan, art_target_gbps: f64) -> Self {
        let art = plan.requested_gbps();
        let served = plan.served_gbps();
        let n = plan.lightpaths.len();
        PlanResult {
            scenario: plan.scenario.to_string(),
            kind: plan.scenario.kind,
            penalty_db: plan.scenario.mws_penalty_db,
            art_target_gbps,
            art_gbps: art,
            lightpaths: n,
            lasers: laser_count(plan),
            blocks: plan.blocks.len(),
            served_gbps: served,
            unserved_gbps: plan.unserved_gbps(),
            underprovisioning: if art > 0.0 { (art - served) / art } else { 0.0 },
            mean_snr_db: if n == 0 {
                f64::NAN
            } else {
                plan.lightpaths.iter().map(|l| l.snr_db).sum::<f64>() / n as f64
            },
            occupancy: plan.grid.occupancy(),
        }
    }
}

/// Generates gravity demands at `art_gbps` and plans them.
pub fn plan_at(
    topo: &Topology,
    scenario: &Scenario,
    art_gbps: f64,
    options: &PlannerOptions,
) -> Result<(Plan, PlanResult)> {
    let demands = gravity_demands(topo, art_gbps)?;
    let plan = Planner::new(topo, scenario.clone(), options.clone())?.plan_all(&demands)?;
    let row = PlanResult::from_plan(&plan, art_gbps);
    Ok((plan, row))
}

/// Plans every (scenario, ART) cell. Rows are ordered by scenario (input
/// order), then ART.
pub fn run_sweep(
    topo: &Topology,
    scenarios: &[Scenario],
    art_grid: &[f64],
    options: &PlannerOptions,
) -> Result<Vec<PlanResult>> {
    if art_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Traffic("ART grid must be strictly ascending".into()));
    }
    let cells: Vec<(&Scenario, f64)> = scenarios
        .iter()
        .flat_map(|s| art_grid.iter().map(move |&a| (s, a)))
        .collect();
    cells
        .par_iter()
        .map(|&(s, a)| plan_at(topo, s, a, options).map(|(_, row)| row))
        .collect()
}

/// Flex-MWS penalty impact at one ART against the SWS plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyRow {
    pub penalty_db: f64,
    pub art_gbps: f64,
    pub lightpaths_sws: usize,
    pub lightpaths_mws: usize,
    pub delta_lp_pct: f64,
    pub mean_snr_sws_db: f64,
    pub mean_snr_mws_db: f64,
    /// Mean SNR of the MWS plan minus that of the SWS plan, dB.
    pub snr_diff_db: f64,
}

pub fn penalty_sweep(
    topo: &Topology,
    art_gbps: f64,
    penalties: &[f64],
    lines: usize,
    options: &PlannerOptions,
) -> Result<Vec<PenaltyRow>> {
    let (_, sws) = plan_at(topo, &Scenario::sws(), art_gbps, options)?;
    penalties
        .par_iter()
        .map(|&p| {
            let (_, mws) = plan_at(
                topo,
                &Scenario::flex(p).with_lines(lines),
                art_gbps,
                options,
            )?;
            Ok(PenaltyRow {
                penalty_db: p,
                art_gbps,
                lightpaths_sws: sws.lightpaths,
                lightpaths_mws: mws.lightpaths,
                delta_lp_pct: lp_inflation(&sws, &mws) * 100.0,
                mean_snr_sws_db: sws.mean_snr_db,
                mean_snr_mws_db: mws.mean_snr_db,
                snr_diff_db: mws.mean_snr_db - sws.mean_snr_db,
            })
        })
        .collect()
}

/// `1 − lasers_mws / lasers_sws`.
pub fn laser_saving(sws: &PlanResult, mws: &PlanResult) -> f64 {
    1.0 - mws.lasers as f64 / sws.lasers as f64
}

/// `lightpaths_mws / lightpaths_sws − 1`.
pub fn lp_inflation(sws: &PlanResult, mws: &PlanResult) -> f64 {
    mws.lightpaths as f64 / sws.lightpaths as f64 - 1.0
}

/// Largest MWS unit cost, as a multiple of one SWS laser, at which the
/// flex plan costs no more than the SWS plan. Each transponder costs
/// `share` (laser) plus `1 − share` (everything else).
pub fn cost_breakeven(
    sws_lasers: usize,
    sws_lightpaths: usize,
    flex_lasers: usize,
    flex_lightpaths: usize,
    share: f64,
) -> Result<f64> {
    if flex_lasers == 0 {
        return Err(Error::ZeroLasers);
    }
    let rest = 1.0 - share;
    let sws_cost = sws_lasers as f64 * share + sws_lightpaths as f64 * rest;
    Ok((sws_cost - flex_lightpaths as f64 * rest) / (flex_lasers as f64 * share))
}

pub fn cost_breakeven_plans(sws: &PlanResult, flex: &PlanResult) -> Result<f64> {
    cost_breakeven(
        sws.lasers,
        sws.lightpaths,
        flex.lasers,
        flex.lightpaths,
        SWS_COST_SHARE,
    )
}

fn kind_label(k: ScenarioKind) -> &'static str {
    match k {
        ScenarioKind::Sws => "sws",
        ScenarioKind::FlexMws => "flex",
        ScenarioKind::FixedMws => "fixed",
    }
}

fn f4(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.4}")
    }
}

pub fn write_results_csv<W: Write>(out: W, rows: &[PlanResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scenario",
        "kind",
        "penalty_db",
        "art_target_gbps",
        "art_gbps",
        "lightpaths",
        "lasers",
        "blocks",
        "served_gbps",
        "unserved_gbps",
        "up",
        "mean_snr_db",
        "occupancy",
    ])?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            kind_label(r.kind).to_string(),
            f4(r.penalty_db),
            f4(r.art_target_gbps),
            f4(r.art_gbps),
            r.lightpaths.to_string(),
            r.lasers.to_string(),
            r.blocks.to_string(),
            f4(r.served_gbps),
            f4(r.unserved_gbps),
            format!("{:.6}", r.underprovisioning),
            f4(r.mean_snr_db),
            format!("{:.6}", r.occupancy),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_penalty_csv<W: Write>(out: W, rows: &[PenaltyRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "penalty_db",
        "art_gbps",
        "lightpaths_sws",
        "lightpaths_mws",
        "delta_lp_pct",
        "mean_snr_sws_db",
        "mean_snr_mws_db",
        "snr_diff_db",
    ])?;
    for r in rows {
        w.write_record([
            f4(r.penalty_db),
            f4(r.art_gbps),
            r.lightpaths_sws.to_string(),
            r.lightpaths_mws.to_string(),
            f4(r.delta_lp_pct),
            f4(r.mean_snr_sws_db),
            f4(r.mean_snr_mws_db),
            f4(r.snr_diff_db),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::Node;

    fn line_topo(weights: &[f64]) -> Topology {
        let nodes = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Node {
                id: format!("n{i}"),
                weight: w,
            })
            .collect();
        let links = (1..weights.len())
            .map(|i| (format!("n{}", i - 1), format!("n{i}"), 100.0))
            .collect();
        Topology::new(nodes, links).unwrap()
    }

    #[test]
    fn gravity_examples() {
        let d = gravity_demands(&line_topo(&[1.0, 1.0]), 100.0).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0].rate_gbps - 100.0).abs() < 1e-9);

        let d = gravity_demands(&line_topo(&[1.0, 1.0, 1.0]), 300.0).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|x| (x.rate_gbps - 100.0).abs() < 1e-9));
    }

    #[test]
    fn gravity_scales_linearly_and_sums_to_art() {
        let t = line_topo(&[1.0, 3.0, 2.0, 5.0]);
        let a = gravity_demands(&t, 10_000.0).unwrap();
        let b = gravity_demands(&t, 20_000.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y.rate_gbps / x.rate_gbps - 2.0).abs() < 1e-12);
        }
        let sum: f64 = a.iter().map(|d| d.rate_gbps).sum();
        assert!((sum / 10_000.0 - 1.0).abs() < 1e-6);
        // 2·1 is the smallest product of 31 → 645 Gb/s, far above the floor
        assert!(a.iter().all(|d| d.rate_gbps >= MIN_DEMAND_GBPS));
    }

    #[test]
    fn gravity_floor_and_errors() {
        let t = line_topo(&[1.0, 1.0, 100.0]);
        let d = gravity_demands(&t, 1000.0).unwrap();
        assert!(d.iter().any(|x| x.rate_gbps == MIN_DEMAND_GBPS));
        assert!(gravity_demands(&line_topo(&[0.0, 0.0, 0.0]), 100.0).is_err());
        assert!(gravity_demands(&line_topo(&[1.0, 0.0, 0.0]), 100.0).is_err());
        assert!(gravity_demands(&line_topo(&[1.0, 1.0]), 0.0).is_err());
        // zero-weight nodes get no demand
        assert_eq!(
            gravity_demands(&line_topo(&[1.0, 0.0, 1.0]), 100.0)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn breakeven_examples() {
        let x = cost_breakeven(100, 100, 30, 107, SWS_COST_SHARE).unwrap();
        assert!((x - 2.8596).abs() < 1e-3, "{x}");
        assert!((cost_breakeven(40, 40, 40, 40, SWS_COST_SHARE).unwrap() - 1.0).abs() < 1e-12);
        assert!((cost_breakeven(100, 100, 25, 100, SWS_COST_SHARE).unwrap() - 4.0).abs() < 1e-12);
        assert!(matches!(
            cost_breakeven(1, 1, 0, 1, 0.33),
            Err(Error::ZeroLasers)
        ));
    }

    #[test]
    fn weights_file() {
        let t = line_topo(&[1.0, 1.0]);
        let t2 = apply_weights(&t, "id,weight\nn1,4\n".as_bytes()).unwrap();
        assert_eq!(t2.nodes[1].weight, 4.0);
        assert!(apply_weights(&t, "id,weight\nzz,4\n".as_bytes()).is_err());
        assert!(apply_weights(&t, "id,weight\nn1,-4\n".as_bytes()).is_err());
        let r1 = randomize_weights(&t, 7);
        assert_eq!(r1.nodes, randomize_weights(&t, 7).nodes);
        assert!(r1.nodes.iter().all(|n| (0.5..1.5).contains(&n.weight)));
    }

    #[test]
    fn ascending_grid_required() {
        let t = line_topo(&[1.0, 1.0]);
        let opts = PlannerOptions::default();
        assert!(run_sweep(&t, &[Scenario::sws()], &[200.0, 100.0], &opts).is_err());
    }
}
