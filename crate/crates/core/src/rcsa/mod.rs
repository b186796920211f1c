//! Routing, configuration and spectrum assignment.

mod planner;
mod routing;
mod spectrum;

pub use planner::{
    plan_all, write_plan_csv, DemandOutcome, Lightpath, MwsBlock, Plan, Planner, PlannerOptions,
    SourceType,
};
pub use routing::{dijkstra, k_shortest_paths, DEFAULT_K};
pub use spectrum::first_fit;
