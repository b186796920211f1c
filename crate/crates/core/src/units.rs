//! Unit conventions: powers in dBm, ratios in dB, frequencies in GHz,
//! distances in km, data rates in Gb/s. OSNR and OCNR are referenced to
//! [`REF_BANDWIDTH_GHZ`] unless a function says otherwise.

use crate::error::{Error, Result};

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Reference optical frequency (1550 nm), Hz.
pub const CENTER_FREQUENCY_HZ: f64 = 193.414e12;

/// OSNR reference bandwidth (0.1 nm at 1550 nm), GHz.
pub const REF_BANDWIDTH_GHZ: f64 = 12.5;

/// Photon energy at [`CENTER_FREQUENCY_HZ`], J.
pub fn photon_energy() -> f64 {
    PLANCK * CENTER_FREQUENCY_HZ
}

/// Quantum noise floor h·ν·B_ref in dBm (about −57.95 dBm).
pub fn ase_floor_dbm() -> f64 {
    10.0 * (photon_energy() * REF_BANDWIDTH_GHZ * 1e9 * 1e3).log10()
}

pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn lin_to_db(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(10.0 * x.log10())
    } else {
        Err(Error::Domain(format!(
            "lin_to_db of non-positive value {x}"
        )))
    }
}

/// dBm to mW.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_lin(dbm)
}

pub fn mw_to_dbm(mw: f64) -> Result<f64> {
    lin_to_db(mw)
}

/// Inverse-linear sum of ratios given in dB: `-10 log10 Σ 10^(-x/10)`.
/// An empty iterator yields `+inf` (no noise).
pub fn cascade_db<I: IntoIterator<Item = f64>>(ratios_db: I) -> f64 {
    let inv: f64 = ratios_db.into_iter().map(|r| db_to_lin(-r)).sum();
    if inv == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * inv.log10()
    }
}
