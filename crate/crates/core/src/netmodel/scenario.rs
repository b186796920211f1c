use std::fmt;

use crate::error::{Error, Result};

use super::{SymbolRate, SLOT_WIDTH_GHZ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    /// Conventional single-wavelength transponders only.
    Sws,
    /// MWS with freely chosen FSR; every line is routed independently.
    FlexMws,
    /// Fixed-FSR MWS with co-propagating lines, plus SWS for demands a
    /// single lightpath can carry.
    FixedMws,
}

/// How flex-MWS lines are grouped onto one multi-wavelength source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaserGrouping {
    /// Any lines leaving the same node may share a source.
    SourceNode,
    /// Only lines of the same node pair may share a source.
    NodePair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// OSNR_TX penalty of the MWS relative to an SWS, dB.
    pub mws_penalty_db: f64,
    pub lines: usize,
    /// Line spacing of a fixed MWS, GHz.
    pub fsr_ghz: f64,
    pub grouping: LaserGrouping,
}

impl Scenario {
    pub const DEFAULT_LINES: usize = 4;
    pub const DEFAULT_FSR_GHZ: f64 = 150.0;

    pub fn sws() -> Self {
        Scenario {
            kind: ScenarioKind::Sws,
            mws_penalty_db: 0.0,
            lines: 1,
            fsr_ghz: Self::DEFAULT_FSR_GHZ,
            grouping: LaserGrouping::SourceNode,
        }
    }

    pub fn flex(penalty_db: f64) -> Self {
        Scenario {
            kind: ScenarioKind::FlexMws,
            mws_penalty_db: penalty_db,
            lines: Self::DEFAULT_LINES,
            ..Self::sws()
        }
    }

    pub fn fixed(penalty_db: f64, fsr_ghz: f64) -> Self {
        Scenario {
            kind: ScenarioKind::FixedMws,
            mws_penalty_db: penalty_db,
            lines: Self::DEFAULT_LINES,
            fsr_ghz,
            grouping: LaserGrouping::SourceNode,
        }
    }

    pub fn with_lines(mut self, lines: usize) -> Self {
        self.lines = lines;
        self
    }

    pub fn with_grouping(mut self, grouping: LaserGrouping) -> Self {
        self.grouping = grouping;
        self
    }

    /// Slots spanned by one FSR period.
    pub fn fsr_slots(&self) -> usize {
        (self.fsr_ghz / SLOT_WIDTH_GHZ).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidScenario(msg));
        if !(self.mws_penalty_db.is_finite() && self.mws_penalty_db >= 0.0) {
            return fail(format!(
                "penalty must be >= 0 dB, got {}",
                self.mws_penalty_db
            ));
        }
        match self.kind {
            ScenarioKind::Sws => {
                if self.mws_penalty_db != 0.0 {
                    return fail("SWS scenario carries no MWS penalty".into());
                }
            }
            ScenarioKind::FlexMws | ScenarioKind::FixedMws => {
                if self.lines < 2 {
                    return fail(format!("MWS needs at least 2 lines, got {}", self.lines));
                }
            }
        }
        if self.kind == ScenarioKind::FixedMws {
            let widest = super::channel_width_ghz(SymbolRate::Gbd140);
            if !(self.fsr_ghz >= widest) {
                return fail(format!(
                    "FSR {} GHz narrower than widest channel {widest} GHz",
                    self.fsr_ghz
                ));
            }
            let slots = self.fsr_ghz / SLOT_WIDTH_GHZ;
            if (slots - slots.round()).abs() > 1e-9 {
                return fail(format!(
                    "FSR {} GHz is not a multiple of {SLOT_WIDTH_GHZ} GHz",
                    self.fsr_ghz
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ScenarioKind::Sws => f.write_str("sws"),
            ScenarioKind::FlexMws => write!(f, "flex-{:.1}dB", self.mws_penalty_db),
            ScenarioKind::FixedMws => write!(f, "fixed-{:.1}dB", self.mws_penalty_db),
        }
    }
}
