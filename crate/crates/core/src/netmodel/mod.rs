//! Domain types for the physical plant and the planning inputs.

mod demand;
mod scenario;
mod spectrum;
mod topology;
mod transponder;

pub use demand::{load_demands, parse_demands, Demand};
pub use scenario::{LaserGrouping, Scenario, ScenarioKind};
pub use spectrum::{SlotOwner, SpectrumGrid, C_BAND_GHZ, SLOT_COUNT, SLOT_WIDTH_GHZ};
pub use topology::{
    load_topology, split_spans, Link, LinkId, Node, NodeId, Path, Topology, MAX_SPAN_KM,
};
pub use transponder::{
    channel_width_ghz, implementation_penalty_db, Modulation, SymbolRate, TransponderConfig,
};
