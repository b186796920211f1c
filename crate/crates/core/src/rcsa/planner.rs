//! Greedy RCSA.
//!
//! Demands are served one at a time in descending rate order. Each step
//! places the lightpath that carries the most of the remaining rate over
//! the k candidate paths; ties prefer fewer projected lightpaths, then
//! narrower channels, then higher net rate, then the shorter path.
//! Spectrum is assigned first-fit with continuity and contiguity.
//!
//! Fixed-FSR MWS demands reserve a block of `lines × FSR` on one path and
//! activate lines inside it as needed. Idle lines of the demand's blocks
//! are used first; otherwise, if the remaining rate fits a single SWS
//! lightpath, an SWS is placed; otherwise a new block is opened.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::Write;
use std::ops::Range;

use crate::error::Result;
use crate::netmodel::{
    Demand, NodeId, Path, Scenario, ScenarioKind, SlotOwner, SpectrumGrid, Topology,
    TransponderConfig,
};
use crate::qot::{FeasibleConfig, QotModel};
use crate::txchain::sws_reference_osnr_db;

use super::{first_fit, k_shortest_paths, DEFAULT_K};

/// Rates below this are treated as fully served, Gb/s.
const RATE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceType {
    Sws,
    FlexMws,
    FixedMws { block: usize, line: usize },
}

impl SourceType {
    pub fn is_mws(self) -> bool {
        !matches!(self, SourceType::Sws)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lightpath {
    /// Index into the demand list given to the planner.
    pub demand: usize,
    pub src: NodeId,
    pub dst: NodeId,
    pub path: Path,
    pub config: TransponderConfig,
    /// Identical on every link of the path.
    pub slots: Range<usize>,
    pub source: SourceType,
    pub snr_db: f64,
    pub carried_gbps: f64,
}

/// A fixed-FSR MWS whose whole line comb is reserved on one path.
#[derive(Debug, Clone, PartialEq)]
pub struct MwsBlock {
    pub demand: usize,
    pub owner: NodeId,
    pub peer: NodeId,
    pub path: Path,
    pub start: usize,
    pub fsr_slots: usize,
    /// Lightpath index per line; `None` is reserved but idle.
    pub lines: Vec<Option<usize>>,
}

impl MwsBlock {
    pub fn slot_range(&self) -> Range<usize> {
        self.start..self.start + self.lines.len() * self.fsr_slots
    }

    pub fn line_window(&self, line: usize) -> Range<usize> {
        let s = self.start + line * self.fsr_slots;
        s..s + self.fsr_slots
    }

    pub fn active_lines(&self) -> usize {
        self.lines.iter().filter(|l| l.is_some()).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandOutcome {
    pub demand: Demand,
    pub served_gbps: f64,
    pub unserved_gbps: f64,
    pub lightpaths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub scenario: Scenario,
    pub lightpaths: Vec<Lightpath>,
    pub blocks: Vec<MwsBlock>,
    /// One entry per input demand, in input order.
    pub outcomes: Vec<DemandOutcome>,
    pub grid: SpectrumGrid,
}

impl Plan {
    pub fn requested_gbps(&self) -> f64 {
        self.outcomes.iter().map(|o| o.demand.rate_gbps).sum()
    }

    pub fn served_gbps(&self) -> f64 {
        self.outcomes.iter().map(|o| o.served_gbps).sum()
    }

    pub fn unserved_gbps(&self) -> f64 {
        self.outcomes.iter().map(|o| o.unserved_gbps).sum()
    }

    /// Checks every structural invariant of the plan; returns all
    /// violations found.
    pub fn validate(&self, topo: &Topology) -> std::result::Result<(), Vec<String>> {
        let mut errs = Vec::new();
        let mut grid = SpectrumGrid::with_slots(topo.link_count(), self.grid.slot_count());

        for (i, b) in self.blocks.iter().enumerate() {
            if grid
                .allocate(&b.path.links, b.slot_range(), SlotOwner::Block(i))
                .is_err()
            {
                errs.push(format!("block {i} overlaps another allocation"));
            }
        }
        for (i, lp) in self.lightpaths.iter().enumerate() {
            if lp.snr_db < lp.config.required_snr_db {
                errs.push(format!(
                    "lightpath {i}: SNR {:.2} below required {:.2}",
                    lp.snr_db, lp.config.required_snr_db
                ));
            }
            if lp.carried_gbps > lp.config.net_rate_gbps + RATE_EPS || lp.carried_gbps <= 0.0 {
                errs.push(format!(
                    "lightpath {i}: carried {} exceeds config rate",
                    lp.carried_gbps
                ));
            }
            if lp.slots.len() != lp.config.slots {
                errs.push(format!(
                    "lightpath {i}: slot range does not match channel width"
                ));
            }
            if topo.path_from_nodes(&lp.path.nodes).as_ref() != Some(&lp.path) {
                errs.push(format!("lightpath {i}: path is not a valid link sequence"));
            }
            match lp.source {
                SourceType::FixedMws { block, line } => {
                    let Some(b) = self.blocks.get(block) else {
                        errs.push(format!("lightpath {i}: unknown block {block}"));
                        continue;
                    };
                    if b.path != lp.path {
                        errs.push(format!(
                            "lightpath {i}: not co-propagating with block {block}"
                        ));
                    }
                    let w = b.line_window(line);
                    if lp.slots.start < w.start || lp.slots.end > w.end {
                        errs.push(format!(
                            "lightpath {i}: outside line window {line} of block {block}"
                        ));
                    }
                    if b.lines.get(line) != Some(&Some(i)) {
                        errs.push(format!(
                            "lightpath {i}: block {block} line {line} does not point back"
                        ));
                    }
                }
                _ => {
                    if grid
                        .allocate(&lp.path.links, lp.slots.clone(), SlotOwner::Lightpath(i))
                        .is_err()
                    {
                        errs.push(format!("lightpath {i}: spectrum overlap"));
                    }
                }
            }
        }
        if grid != self.grid {
            errs.push("recorded grid differs from the allocations".into());
        }
        for (d, o) in self.outcomes.iter().enumerate() {
            let carried: f64 = o
                .lightpaths
                .iter()
                .map(|&i| self.lightpaths[i].carried_gbps)
                .sum();
            let scale = o.demand.rate_gbps.max(1.0);
            if ((o.served_gbps + o.unserved_gbps) - o.demand.rate_gbps).abs() > 1e-9 * scale {
                errs.push(format!("demand {d}: served + unserved != requested"));
            }
            if (carried - o.served_gbps).abs() > 1e-6 * scale {
                errs.push(format!(
                    "demand {d}: lightpaths carry {carried}, served {}",
                    o.served_gbps
                ));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlannerOptions {
    pub k: usize,
    /// OSNR_TX of an SWS transmitter; MWS sources subtract the scenario
    /// penalty from it.
    pub sws_osnr_tx_db: f64,
    pub qot: QotModel,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            k: DEFAULT_K,
            sws_osnr_tx_db: sws_reference_osnr_db(),
            qot: QotModel::default(),
        }
    }
}

#[derive(Debug, Clone)]
struct Route {
    path: Path,
    /// Feasible configurations at SWS and MWS OSNR_TX.
    sws: Vec<FeasibleConfig>,
    mws: Vec<FeasibleConfig>,
}

/// Candidate for the next lightpath of a demand.
#[derive(Debug, Clone)]
struct Choice {
    route: usize,
    feasible: FeasibleConfig,
    carried: f64,
    projected: usize,
}

impl Choice {
    fn new(route: usize, feasible: &FeasibleConfig, remaining: f64) -> Self {
        let net = feasible.config.net_rate_gbps;
        Choice {
            route,
            feasible: feasible.clone(),
            carried: net.min(remaining),
            projected: (remaining / net - RATE_EPS).ceil().max(1.0) as usize,
        }
    }

    /// `Less` means `self` is preferred.
    fn rank(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.feasible.config, &other.feasible.config);
        other
            .carried
            .total_cmp(&self.carried)
            .then(self.projected.cmp(&other.projected))
            .then(a.slots.cmp(&b.slots))
            .then(b.net_rate_gbps.total_cmp(&a.net_rate_gbps))
            .then(self.route.cmp(&other.route))
            .then(a.required_snr_db.total_cmp(&b.required_snr_db))
    }
}

/// Planning state for one scenario run.
pub struct Planner<'a> {
    topo: &'a Topology,
    scenario: Scenario,
    options: PlannerOptions,
    routes: HashMap<(NodeId, NodeId), Vec<Route>>,
    plan: Plan,
}

impl<'a> Planner<'a> {
    pub fn new(topo: &'a Topology, scenario: Scenario, options: PlannerOptions) -> Result<Self> {
        scenario.validate()?;
        Ok(Planner {
            topo,
            plan: Plan {
                scenario: scenario.clone(),
                lightpaths: Vec::new(),
                blocks: Vec::new(),
                outcomes: Vec::new(),
                grid: SpectrumGrid::new(topo.link_count()),
            },
            scenario,
            options,
            routes: HashMap::new(),
        })
    }

    pub fn state(&self) -> &Plan {
        &self.plan
    }

    /// Replaces the spectrum grid, e.g. to start from a pre-loaded network.
    pub fn with_grid(mut self, grid: SpectrumGrid) -> Self {
        assert_eq!(grid.link_count(), self.topo.link_count());
        self.plan.grid = grid;
        self
    }

    fn mws_osnr_tx_db(&self) -> f64 {
        self.options.sws_osnr_tx_db - self.scenario.mws_penalty_db
    }

    fn routes(&mut self, src: NodeId, dst: NodeId) -> Result<&[Route]> {
        if !self.routes.contains_key(&(src, dst)) {
            let sws_tx = self.options.sws_osnr_tx_db;
            let mws_tx = self.mws_osnr_tx_db();
            let mut routes = Vec::new();
            for path in k_shortest_paths(self.topo, src, dst, self.options.k) {
                let spans: Vec<f64> = path.spans(self.topo).collect();
                let sws = self.options.qot.feasible_configs(&spans, sws_tx)?;
                let mws = if self.scenario.kind == ScenarioKind::Sws {
                    sws.clone()
                } else {
                    self.options.qot.feasible_configs(&spans, mws_tx)?
                };
                routes.push(Route { path, sws, mws });
            }
            self.routes.insert((src, dst), routes);
        }
        Ok(&self.routes[&(src, dst)])
    }

    /// Best single lightpath for `remaining` among configs that currently
    /// fit in the spectrum.
    fn best_lightpath(
        &self,
        routes: &[Route],
        mws: bool,
        remaining: f64,
    ) -> Option<(Choice, usize)> {
        let mut best: Option<(Choice, usize)> = None;
        for (r, route) in routes.iter().enumerate() {
            let configs = if mws { &route.mws } else { &route.sws };
            let mut fits: HashMap<usize, Option<usize>> = HashMap::new();
            for f in configs {
                let start = *fits.entry(f.config.slots).or_insert_with(|| {
                    first_fit(&self.plan.grid, &route.path.links, f.config.slots)
                });
                let Some(start) = start else { continue };
                let c = Choice::new(r, f, remaining);
                if best
                    .as_ref()
                    .is_none_or(|(b, _)| c.rank(b) == Ordering::Less)
                {
                    best = Some((c, start));
                }
            }
        }
        best
    }

    fn push_lightpath(
        &mut self,
        demand_idx: usize,
        demand: &Demand,
        path: Path,
        choice: &Choice,
        slots: Range<usize>,
        source: SourceType,
    ) -> usize {
        let idx = self.plan.lightpaths.len();
        self.plan.lightpaths.push(Lightpath {
            demand: demand_idx,
            src: demand.src,
            dst: demand.dst,
            path,
            config: choice.feasible.config.clone(),
            slots,
            source,
            snr_db: choice.feasible.snr_db,
            carried_gbps: choice.carried,
        });
        idx
    }

    fn place_standalone(
        &mut self,
        demand_idx: usize,
        demand: &Demand,
        routes: &[Route],
        choice: Choice,
        start: usize,
        source: SourceType,
    ) -> usize {
        let path = routes[choice.route].path.clone();
        let slots = start..start + choice.feasible.config.slots;
        let idx = self.plan.lightpaths.len();
        self.plan
            .grid
            .allocate(&path.links, slots.clone(), SlotOwner::Lightpath(idx))
            .expect("first-fit returned a free range");
        self.push_lightpath(demand_idx, demand, path, &choice, slots, source)
    }

    /// Activates one idle line of an existing block of this demand.
    fn activate_block_line(
        &mut self,
        demand_idx: usize,
        demand: &Demand,
        remaining: f64,
    ) -> Option<usize> {
        let fsr_slots = self.scenario.fsr_slots();
        let mut best: Option<(Choice, usize, usize)> = None;
        for (b, block) in self.plan.blocks.iter().enumerate() {
            if block.demand != demand_idx {
                continue;
            }
            let Some(line) = block.lines.iter().position(Option::is_none) else {
                continue;
            };
            let route = self.routes[&(demand.src, demand.dst)]
                .iter()
                .position(|r| r.path == block.path)
                .expect("block path is a candidate route");
            for f in &self.routes[&(demand.src, demand.dst)][route].mws {
                if f.config.slots > fsr_slots {
                    continue;
                }
                let c = Choice::new(route, f, remaining);
                if best
                    .as_ref()
                    .is_none_or(|(x, _, _)| c.rank(x) == Ordering::Less)
                {
                    best = Some((c, b, line));
                }
            }
        }
        let (choice, b, line) = best?;
        let block = &self.plan.blocks[b];
        let start = block.line_window(line).start;
        let path = block.path.clone();
        let slots = start..start + choice.feasible.config.slots;
        let idx = self.push_lightpath(
            demand_idx,
            demand,
            path,
            &choice,
            slots,
            SourceType::FixedMws { block: b, line },
        );
        self.plan.blocks[b].lines[line] = Some(idx);
        Some(idx)
    }

    /// Reserves a new block on the candidate path that lets it carry the
    /// most of `remaining`. Returns the block index.
    fn open_block(
        &mut self,
        demand_idx: usize,
        demand: &Demand,
        routes: &[Route],
        remaining: f64,
    ) -> Option<usize> {
        let lines = self.scenario.lines;
        let fsr_slots = self.scenario.fsr_slots();
        let width = lines * fsr_slots;
        let mut best: Option<(f64, usize, usize)> = None;
        for (r, route) in routes.iter().enumerate() {
            let Some(top) = route.mws.iter().find(|f| f.config.slots <= fsr_slots) else {
                continue;
            };
            let Some(start) = first_fit(&self.plan.grid, &route.path.links, width) else {
                continue;
            };
            let carried = (top.config.net_rate_gbps * lines as f64).min(remaining);
            if best.is_none_or(|(c, _, _)| carried > c) {
                best = Some((carried, r, start));
            }
        }
        let (_, r, start) = best?;
        let path = routes[r].path.clone();
        let b = self.plan.blocks.len();
        self.plan
            .grid
            .allocate(&path.links, start..start + width, SlotOwner::Block(b))
            .expect("first-fit returned a free range");
        self.plan.blocks.push(MwsBlock {
            demand: demand_idx,
            owner: demand.src,
            peer: demand.dst,
            path,
            start,
            fsr_slots,
            lines: vec![None; lines],
        });
        Some(b)
    }

    /// Serves one demand as far as spectrum and reach allow.
    pub fn plan_demand(&mut self, demand_idx: usize, demand: &Demand) -> Result<DemandOutcome> {
        let routes = self.routes(demand.src, demand.dst)?.to_vec();
        let mut remaining = demand.rate_gbps;
        let mut placed = Vec::new();

        while remaining > RATE_EPS {
            let next = match self.scenario.kind {
                ScenarioKind::Sws | ScenarioKind::FlexMws => {
                    let source = if self.scenario.kind == ScenarioKind::Sws {
                        SourceType::Sws
                    } else {
                        SourceType::FlexMws
                    };
                    self.best_lightpath(&routes, source.is_mws(), remaining)
                        .map(|(c, start)| {
                            self.place_standalone(demand_idx, demand, &routes, c, start, source)
                        })
                }
                ScenarioKind::FixedMws => {
                    if let Some(i) = self.activate_block_line(demand_idx, demand, remaining) {
                        Some(i)
                    } else if let Some((c, start)) = self
                        .best_lightpath(&routes, false, remaining)
                        .filter(|(c, _)| c.carried >= remaining - RATE_EPS)
                    {
                        Some(self.place_standalone(
                            demand_idx,
                            demand,
                            &routes,
                            c,
                            start,
                            SourceType::Sws,
                        ))
                    } else if self
                        .open_block(demand_idx, demand, &routes, remaining)
                        .is_some()
                    {
                        self.activate_block_line(demand_idx, demand, remaining)
                    } else {
                        None
                    }
                }
            };
            let Some(i) = next else { break };
            remaining -= self.plan.lightpaths[i].carried_gbps;
            placed.push(i);
        }

        let unserved = if remaining > RATE_EPS { remaining } else { 0.0 };
        Ok(DemandOutcome {
            demand: demand.clone(),
            served_gbps: demand.rate_gbps - unserved,
            unserved_gbps: unserved,
            lightpaths: placed,
        })
    }

    /// Plans all demands, largest first (ties by node pair), and returns the
    /// plan with outcomes in input order.
    pub fn plan_all(mut self, demands: &[Demand]) -> Result<Plan> {
        let mut order: Vec<usize> = (0..demands.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&demands[a], &demands[b]);
            y.rate_gbps
                .total_cmp(&x.rate_gbps)
                .then((x.src, x.dst).cmp(&(y.src, y.dst)))
                .then(a.cmp(&b))
        });
        let mut outcomes: Vec<Option<DemandOutcome>> = vec![None; demands.len()];
        for i in order {
            outcomes[i] = Some(self.plan_demand(i, &demands[i])?);
        }
        self.plan.outcomes = outcomes.into_iter().map(Option::unwrap).collect();
        Ok(self.plan)
    }
}

/// Plans `demands` under `scenario` with default options.
pub fn plan_all(topo: &Topology, demands: &[Demand], scenario: &Scenario) -> Result<Plan> {
    Planner::new(topo, scenario.clone(), PlannerOptions::default())?.plan_all(demands)
}

fn source_label(s: SourceType, lines: usize) -> String {
    match s {
        SourceType::Sws => "sws".into(),
        SourceType::FlexMws => "flex-mws".into(),
        SourceType::FixedMws { block, line } => format!("fixed-mws:{block}:{}/{lines}", line + 1),
    }
}

/// One row per lightpath plus a trailing summary row.
pub fn write_plan_csv<W: Write>(out: W, plan: &Plan, topo: &Topology, lasers: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "src",
        "dst",
        "path",
        "config",
        "slots",
        "snr_db",
        "source_type",
    ])?;
    for lp in &plan.lightpaths {
        w.write_record([
            topo.nodes[lp.src].id.clone(),
            topo.nodes[lp.dst].id.clone(),
            lp.path.display(topo),
            lp.config.label(),
            format!("{}-{}", lp.slots.start, lp.slots.end - 1),
            format!("{:.4}", lp.snr_db),
            source_label(lp.source, plan.scenario.lines),
        ])?;
    }
    let mean_snr = if plan.lightpaths.is_empty() {
        String::new()
    } else {
        let m =
            plan.lightpaths.iter().map(|l| l.snr_db).sum::<f64>() / plan.lightpaths.len() as f64;
        format!("{m:.4}")
    };
    w.write_record([
        "summary".to_string(),
        String::new(),
        format!(
            "lightpaths={};lasers={};blocks={};requested_gbps={:.3};served_gbps={:.3};unserved_gbps={:.3}",
            plan.lightpaths.len(),
            lasers,
            plan.blocks.len(),
            plan.requested_gbps(),
            plan.served_gbps(),
            plan.unserved_gbps()
        ),
        String::new(),
        String::new(),
        mean_snr,
        plan.scenario.to_string(),
    ])?;
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
