use std::fmt;

use serde::Serialize;

use super::SLOT_WIDTH_GHZ;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub const ALL: [Modulation; 3] = [Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64];

    /// Constellation size M.
    pub fn order(self) -> u32 {
        match self {
            Modulation::Qpsk => 4,
            Modulation::Qam16 => 16,
            Modulation::Qam64 => 64,
        }
    }

    pub fn bits_per_symbol(self) -> u32 {
        self.order().trailing_zeros()
    }

    pub fn from_order(m: u32) -> Option<Self> {
        match m {
            4 => Some(Modulation::Qpsk),
            16 => Some(Modulation::Qam16),
            64 => Some(Modulation::Qam64),
            _ => None,
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Qpsk => "QPSK",
            Modulation::Qam16 => "16QAM",
            Modulation::Qam64 => "64QAM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SymbolRate {
    Gbd35,
    Gbd70,
    Gbd105,
    Gbd140,
}

impl SymbolRate {
    pub const ALL: [SymbolRate; 4] = [
        SymbolRate::Gbd35,
        SymbolRate::Gbd70,
        SymbolRate::Gbd105,
        SymbolRate::Gbd140,
    ];

    pub fn gbaud(self) -> f64 {
        match self {
            SymbolRate::Gbd35 => 35.0,
            SymbolRate::Gbd70 => 70.0,
            SymbolRate::Gbd105 => 105.0,
            SymbolRate::Gbd140 => 140.0,
        }
    }

    pub fn from_gbaud(gbd: f64) -> Option<Self> {
        SymbolRate::ALL.into_iter().find(|s| s.gbaud() == gbd)
    }
}

/// Implementation penalty of commercial transponders, dB.
pub fn implementation_penalty_db(modulation: Modulation, rate: SymbolRate) -> f64 {
    let base = match modulation {
        Modulation::Qpsk => 1.0,
        Modulation::Qam16 => 1.5,
        Modulation::Qam64 => 2.0,
    };
    let step = match rate {
        SymbolRate::Gbd35 => 0.0,
        SymbolRate::Gbd70 => 0.5,
        SymbolRate::Gbd105 => 1.0,
        SymbolRate::Gbd140 => 1.5,
    };
    base + step
}

/// Occupied channel width: symbol rate plus 5% roll-off, rounded up to
/// whole 12.5 GHz slots.
pub fn channel_width_ghz(rate: SymbolRate) -> f64 {
    (rate.gbaud() * 1.05 / SLOT_WIDTH_GHZ).ceil() * SLOT_WIDTH_GHZ
}

/// One transponder operating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransponderConfig {
    pub modulation: Modulation,
    pub symbol_rate: SymbolRate,
    pub penalty_db: f64,
    pub net_rate_gbps: f64,
    pub width_ghz: f64,
    pub slots: usize,
    pub required_snr_db: f64,
}

impl TransponderConfig {
    pub fn new(modulation: Modulation, symbol_rate: SymbolRate) -> Self {
        let width_ghz = channel_width_ghz(symbol_rate);
        TransponderConfig {
            modulation,
            symbol_rate,
            penalty_db: implementation_penalty_db(modulation, symbol_rate),
            // 100G per 35 GBd of dual-polarization QPSK after FEC overhead.
            net_rate_gbps: 100.0
                * (symbol_rate.gbaud() / 35.0)
                * (modulation.bits_per_symbol() as f64 / 2.0),
            width_ghz,
            slots: (width_ghz / SLOT_WIDTH_GHZ).round() as usize,
            required_snr_db: crate::qot::required_snr_db(modulation, symbol_rate),
        }
    }

    /// All 12 (modulation, symbol rate) combinations.
    pub fn all() -> Vec<TransponderConfig> {
        Modulation::ALL
            .into_iter()
            .flat_map(|m| {
                SymbolRate::ALL
                    .into_iter()
                    .map(move |r| TransponderConfig::new(m, r))
            })
            .collect()
    }

    pub fn label(&self) -> String {
        format!("{}@{}", self.modulation, self.symbol_rate.gbaud())
    }
}
