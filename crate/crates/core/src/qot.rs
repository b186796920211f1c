//! Quality of transmission: required SNR per transponder configuration and
//! achieved SNR of a lightpath.
//!
//! Link noise is the incoherent per-span sum of EDFA ASE and GN-model
//! nonlinear interference for a fully loaded C-band, so a lightpath's SNR
//! does not depend on the current spectrum occupancy.

use std::f64::consts::{E, PI};
use std::sync::OnceLock;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::netmodel::{
    channel_width_ghz, implementation_penalty_db, Modulation, SymbolRate, TransponderConfig,
    C_BAND_GHZ,
};
use crate::units::{db_to_lin, lin_to_db, photon_energy, REF_BANDWIDTH_GHZ};

/// Pre-FEC bit error rate the FEC can correct.
pub const FEC_BER_THRESHOLD: f64 = 0.035;

fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Gray-coded square M-QAM bit error rate at linear SNR `snr`.
pub fn ber_square_qam(snr: f64, modulation: Modulation) -> f64 {
    let m = modulation.order() as f64;
    let k = modulation.bits_per_symbol() as f64;
    (4.0 / k) * (1.0 - 1.0 / m.sqrt()) * q_function((3.0 * snr / (m - 1.0)).sqrt())
}

/// Linear SNR at which [`ber_square_qam`] equals [`FEC_BER_THRESHOLD`],
/// by bisection in the log domain.
pub fn fec_threshold_snr(modulation: Modulation) -> f64 {
    let (mut lo, mut hi) = (1e-3f64.ln(), 1e6f64.ln());
    while (hi - lo) > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if ber_square_qam(mid.exp(), modulation) > FEC_BER_THRESHOLD {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Required SNR in dB: FEC threshold plus implementation penalty.
pub fn required_snr_db(modulation: Modulation, rate: SymbolRate) -> f64 {
    static BASE: OnceLock<[f64; 3]> = OnceLock::new();
    let base = BASE.get_or_init(|| Modulation::ALL.map(|m| 10.0 * fec_threshold_snr(m).log10()));
    let i = Modulation::ALL
        .iter()
        .position(|&m| m == modulation)
        .unwrap();
    base[i] + implementation_penalty_db(modulation, rate)
}

/// Required SNR for an arbitrary constellation order.
pub fn required_snr_for_order(order: u32, rate: SymbolRate) -> Result<f64> {
    let m = Modulation::from_order(order).ok_or(Error::UnsupportedModulation(order))?;
    Ok(required_snr_db(m, rate))
}

pub fn required_snr(config: &TransponderConfig) -> f64 {
    required_snr_db(config.modulation, config.symbol_rate)
}

/// Standard single-mode fiber spans with lumped EDFAs that exactly
/// compensate each span's loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    pub attenuation_db_per_km: f64,
    pub beta2_ps2_per_km: f64,
    pub gamma_per_w_km: f64,
    pub edfa_nf_db: f64,
    /// Loaded bandwidth assumed for NLI, GHz.
    pub loaded_bandwidth_ghz: f64,
}

impl Default for FiberParams {
    fn default() -> Self {
        FiberParams {
            attenuation_db_per_km: 0.2,
            beta2_ps2_per_km: -21.3,
            gamma_per_w_km: 1.3,
            edfa_nf_db: 5.0,
            loaded_bandwidth_ghz: C_BAND_GHZ,
        }
    }
}

impl FiberParams {
    /// Field attenuation coefficient, 1/km.
    pub fn alpha_per_km(&self) -> f64 {
        self.attenuation_db_per_km / (20.0 * E.log10())
    }

    pub fn span_gain_db(&self, length_km: f64) -> f64 {
        self.attenuation_db_per_km * length_km
    }

    pub fn effective_length_km(&self, length_km: f64) -> f64 {
        let a2 = 2.0 * self.alpha_per_km();
        (1.0 - (-a2 * length_km).exp()) / a2
    }

    pub fn asymptotic_effective_length_km(&self) -> f64 {
        1.0 / (2.0 * self.alpha_per_km())
    }
}

/// Launch condition: one PSD for every symbol rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaunchSpec {
    pub psd_dbm_per_ghz: f64,
}

impl Default for LaunchSpec {
    /// 0 dBm for the widest (140 GBd) carrier.
    fn default() -> Self {
        LaunchSpec {
            psd_dbm_per_ghz: -10.0 * 140f64.log10(),
        }
    }
}

impl LaunchSpec {
    pub fn channel_power_dbm(&self, rate: SymbolRate) -> f64 {
        self.psd_dbm_per_ghz + 10.0 * rate.gbaud().log10()
    }
}

/// ASE power added by one span's EDFA within `width_ghz`, mW.
pub fn span_ase_power(fiber: &FiberParams, length_km: f64, width_ghz: f64) -> f64 {
    let gain = db_to_lin(fiber.span_gain_db(length_km));
    db_to_lin(fiber.edfa_nf_db) * photon_energy() * (gain - 1.0) * width_ghz * 1e9 * 1e3
}

/// Closed-form GN nonlinear interference power of one span within
/// `width_ghz`, mW.
pub fn span_nli_power(
    fiber: &FiberParams,
    length_km: f64,
    launch: &LaunchSpec,
    width_ghz: f64,
) -> Result<f64> {
    let beta2 = fiber.beta2_ps2_per_km.abs() * 1e-24; // s²/km
    if beta2 == 0.0 {
        return Err(Error::ZeroDispersion);
    }
    let psd = db_to_lin(launch.psd_dbm_per_ghz) * 1e-3 / 1e9; // W/Hz
    let l_eff = fiber.effective_length_km(length_km);
    let l_eff_a = fiber.asymptotic_effective_length_km();
    let b_tot = fiber.loaded_bandwidth_ghz * 1e9;
    let g_nli = (8.0 / 27.0)
        * fiber.gamma_per_w_km.powi(2)
        * l_eff.powi(2)
        * psd.powi(3)
        * ((PI * PI / 2.0) * beta2 * l_eff_a * b_tot * b_tot).asinh()
        / (PI * beta2 * l_eff_a);
    Ok(g_nli * width_ghz * 1e9 * 1e3)
}

/// Accumulated link noise in the channel bandwidth, mW.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LinkNoise {
    pub ase_mw: f64,
    pub nli_mw: f64,
}

impl LinkNoise {
    pub fn total_mw(&self) -> f64 {
        self.ase_mw + self.nli_mw
    }

    pub fn combine(self, other: LinkNoise) -> LinkNoise {
        LinkNoise {
            ase_mw: self.ase_mw + other.ase_mw,
            nli_mw: self.nli_mw + other.nli_mw,
        }
    }
}

pub fn link_noise(
    fiber: &FiberParams,
    spans: impl IntoIterator<Item = f64>,
    launch: &LaunchSpec,
    width_ghz: f64,
) -> Result<LinkNoise> {
    spans.into_iter().try_fold(LinkNoise::default(), |acc, l| {
        Ok(acc.combine(LinkNoise {
            ase_mw: span_ase_power(fiber, l, width_ghz),
            nli_mw: span_nli_power(fiber, l, launch, width_ghz)?,
        }))
    })
}

/// Converts OSNR_TX (12.5 GHz reference) to SNR in the signal bandwidth.
pub fn snr_tx_db(osnr_tx_db: f64, symbol_rate_gbaud: f64) -> f64 {
    osnr_tx_db + 10.0 * (REF_BANDWIDTH_GHZ / symbol_rate_gbaud).log10()
}

/// Combines transmitter SNR and accumulated link noise into the end-to-end
/// SNR, dB.
pub fn combine_snr_db(
    rate: SymbolRate,
    launch: &LaunchSpec,
    osnr_tx_db: f64,
    noise: LinkNoise,
) -> f64 {
    let p_ch = db_to_lin(launch.channel_power_dbm(rate));
    let inv = db_to_lin(-snr_tx_db(osnr_tx_db, rate.gbaud())) + noise.total_mw() / p_ch;
    -10.0 * inv.log10()
}

/// End-to-end SNR of a carrier using `config` over the given spans.
pub fn path_snr(
    fiber: &FiberParams,
    spans: impl IntoIterator<Item = f64>,
    config: &TransponderConfig,
    launch: &LaunchSpec,
    osnr_tx_db: f64,
) -> Result<f64> {
    let noise = link_noise(fiber, spans, launch, config.width_ghz)?;
    Ok(combine_snr_db(
        config.symbol_rate,
        launch,
        osnr_tx_db,
        noise,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleConfig {
    pub config: TransponderConfig,
    pub snr_db: f64,
}

/// Fiber, launch and configuration grid bundled for repeated evaluation.
#[derive(Debug, Clone)]
pub struct QotModel {
    pub fiber: FiberParams,
    pub launch: LaunchSpec,
    pub configs: Vec<TransponderConfig>,
}

impl Default for QotModel {
    fn default() -> Self {
        QotModel {
            fiber: FiberParams::default(),
            launch: LaunchSpec::default(),
            configs: TransponderConfig::all(),
        }
    }
}

impl QotModel {
    /// SNR per symbol rate for one span list, in [`SymbolRate::ALL`] order.
    pub fn snr_by_rate(&self, spans: &[f64], osnr_tx_db: f64) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (i, rate) in SymbolRate::ALL.into_iter().enumerate() {
            let noise = link_noise(
                &self.fiber,
                spans.iter().copied(),
                &self.launch,
                channel_width_ghz(rate),
            )?;
            out[i] = combine_snr_db(rate, &self.launch, osnr_tx_db, noise);
        }
        Ok(out)
    }

    /// Configurations whose required SNR is met on `spans`, by net rate
    /// descending, ties by lower required SNR.
    pub fn feasible_configs(&self, spans: &[f64], osnr_tx_db: f64) -> Result<Vec<FeasibleConfig>> {
        let snr = self.snr_by_rate(spans, osnr_tx_db)?;
        Ok(select_feasible(&self.configs, &snr))
    }
}

/// Filters and orders `configs` given the per-symbol-rate SNR.
pub fn select_feasible(
    configs: &[TransponderConfig],
    snr_by_rate: &[f64; 4],
) -> Vec<FeasibleConfig> {
    let mut out: Vec<FeasibleConfig> = configs
        .iter()
        .filter_map(|c| {
            let i = SymbolRate::ALL
                .iter()
                .position(|&r| r == c.symbol_rate)
                .unwrap();
            let snr_db = snr_by_rate[i];
            (snr_db >= c.required_snr_db).then(|| FeasibleConfig {
                config: c.clone(),
                snr_db,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.config
            .net_rate_gbps
            .total_cmp(&a.config.net_rate_gbps)
            .then(
                a.config
                    .required_snr_db
                    .total_cmp(&b.config.required_snr_db),
            )
    });
    out
}

/// Linear SNR of the link noise alone (no transmitter term), dB.
pub fn link_only_snr_db(rate: SymbolRate, launch: &LaunchSpec, noise: LinkNoise) -> Result<f64> {
    lin_to_db(db_to_lin(launch.channel_power_dbm(rate)) / noise.total_mw())
}
