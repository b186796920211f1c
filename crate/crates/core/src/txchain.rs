//! Transmit OSNR of single- and multi-wavelength transmitters.
//!
//! A transmitter is modelled as a chain of lossy elements and amplifiers
//! acting on a per-carrier power level. Every amplifier contributes ASE
//! according to its per-carrier input power; passive losses scale signal
//! and accumulated noise alike and therefore leave the OSNR untouched. The
//! source's own OCNR is the first term of the cascade.

use std::fmt;
use std::io::Write;

use log::warn;

use crate::error::{Error, Result};
use crate::units::{ase_floor_dbm, cascade_db};

/// Amplifier gains above this are flagged as unrealistic.
pub const MAX_REALISTIC_GAIN_DB: f64 = 40.0;

/// OSNR contribution of one amplifier, dB in 12.5 GHz:
/// `P_in − NF − 10 log10(h ν B_ref)`.
pub fn amp_osnr(input_dbm: f64, nf_db: f64) -> f64 {
    input_dbm - nf_db - ase_floor_dbm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Sws,
    Mws,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LightSourceSpec {
    pub kind: SourceKind,
    pub ocnr_db: f64,
    pub line_power_dbm: f64,
    pub lines: usize,
    /// `None` means flexible spacing.
    pub fsr_ghz: Option<f64>,
}

impl LightSourceSpec {
    pub fn sws(ocnr_db: f64, line_power_dbm: f64) -> Self {
        LightSourceSpec {
            kind: SourceKind::Sws,
            ocnr_db,
            line_power_dbm,
            lines: 1,
            fsr_ghz: None,
        }
    }

    /// Four-line MWS with flexible spacing.
    pub fn mws(ocnr_db: f64, line_power_dbm: f64) -> Self {
        LightSourceSpec {
            kind: SourceKind::Mws,
            ocnr_db,
            line_power_dbm,
            lines: 4,
            fsr_ghz: None,
        }
    }

    pub fn with_lines(mut self, lines: usize) -> Self {
        self.lines = lines;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.lines == 0 {
            return Err(Error::Domain("light source needs at least one line".into()));
        }
        if self.kind == SourceKind::Sws && self.lines != 1 {
            return Err(Error::Domain(format!(
                "SWS has exactly one line, got {}",
                self.lines
            )));
        }
        if !self.ocnr_db.is_finite() || !self.line_power_dbm.is_finite() {
            return Err(Error::Domain("OCNR and line power must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxScheme {
    /// One comb amplifier for all lines, then demux, modulate, mux, boost.
    JointCa,
    /// Same chain as [`TxScheme::JointCa`] with the amplifier cap applied
    /// per line instead of shared.
    PerLineCa,
    /// Laser, modulator, mux, booster.
    SwsDirect,
}

impl fmt::Display for TxScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TxScheme::JointCa => "joint-ca",
            TxScheme::PerLineCa => "per-line-ca",
            TxScheme::SwsDirect => "sws",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TxArchitecture {
    pub scheme: TxScheme,
    /// Comb amplifier output cap, dBm (total for joint, per line otherwise).
    pub ca_cap_dbm: f64,
    pub nf_db: f64,
    pub demux_loss_db: f64,
    pub mux_loss_db: f64,
    pub modulation_loss_db: f64,
    /// Modulator insertion and remaining transmitter losses.
    pub insertion_loss_db: f64,
    /// Booster output per carrier, dBm.
    pub launch_dbm: f64,
}

impl TxArchitecture {
    pub fn new(scheme: TxScheme) -> Self {
        TxArchitecture {
            scheme,
            ca_cap_dbm: 26.0,
            nf_db: 5.0,
            demux_loss_db: 5.0,
            mux_loss_db: 5.0,
            modulation_loss_db: 5.0,
            insertion_loss_db: 23.0,
            launch_dbm: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let losses = [
            self.demux_loss_db,
            self.mux_loss_db,
            self.modulation_loss_db,
            self.insertion_loss_db,
        ];
        if losses.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::Domain(
                "transmitter losses must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Element chain for this scheme, in signal order.
    pub fn stages(&self) -> Vec<Stage> {
        let ca = |output| Stage::Amplifier {
            name: "CA",
            nf_db: self.nf_db,
            output,
        };
        let mut stages = match self.scheme {
            TxScheme::SwsDirect => vec![],
            TxScheme::JointCa => vec![
                ca(AmpOutput::TotalCap(self.ca_cap_dbm)),
                Stage::loss("demux", self.demux_loss_db),
            ],
            TxScheme::PerLineCa => vec![
                ca(AmpOutput::PerCarrier(self.ca_cap_dbm)),
                Stage::loss("demux", self.demux_loss_db),
            ],
        };
        stages.extend([
            Stage::loss("modulation", self.modulation_loss_db),
            Stage::loss("insertion", self.insertion_loss_db),
            Stage::loss("mux", self.mux_loss_db),
            Stage::Amplifier {
                name: "BA",
                nf_db: self.nf_db,
                output: AmpOutput::PerCarrier(self.launch_dbm),
            },
        ]);
        stages
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmpOutput {
    PerCarrier(f64),
    /// Total output power shared by all carriers.
    TotalCap(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Loss {
        name: &'static str,
        loss_db: f64,
    },
    Amplifier {
        name: &'static str,
        nf_db: f64,
        output: AmpOutput,
    },
}

impl Stage {
    pub fn loss(name: &'static str, loss_db: f64) -> Self {
        Stage::Loss { name, loss_db }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub name: &'static str,
    pub input_dbm: f64,
    pub output_dbm: f64,
    /// ASE-limited OSNR of this stage; `None` for passive elements.
    pub osnr_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TxReport {
    pub osnr_tx_db: f64,
    pub stages: Vec<StageReport>,
    pub warnings: Vec<String>,
}

/// Propagates the per-carrier power of `source` through `stages`.
pub fn evaluate_chain(source: &LightSourceSpec, stages: &[Stage]) -> TxReport {
    let carrier_share_db = 10.0 * (source.lines as f64).log10();
    let mut power = source.line_power_dbm;
    let mut reports = Vec::with_capacity(stages.len());
    let mut warnings = Vec::new();

    for stage in stages {
        let input = power;
        let osnr = match *stage {
            Stage::Loss { loss_db, .. } => {
                power -= loss_db;
                None
            }
            Stage::Amplifier {
                name,
                nf_db,
                output,
            } => {
                let target = match output {
                    AmpOutput::PerCarrier(p) => p,
                    AmpOutput::TotalCap(p) => p - carrier_share_db,
                };
                let gain = (target - input).max(0.0);
                if gain > MAX_REALISTIC_GAIN_DB {
                    let msg = format!("unrealistic gain: {name} needs {gain:.1} dB");
                    warn!("{msg}");
                    warnings.push(msg);
                }
                power = input + gain;
                Some(amp_osnr(input, nf_db))
            }
        };
        reports.push(StageReport {
            name: match stage {
                Stage::Loss { name, .. } | Stage::Amplifier { name, .. } => name,
            },
            input_dbm: input,
            output_dbm: power,
            osnr_db: osnr,
        });
    }

    let osnr_tx_db =
        cascade_db(std::iter::once(source.ocnr_db).chain(reports.iter().filter_map(|r| r.osnr_db)));
    TxReport {
        osnr_tx_db,
        stages: reports,
        warnings,
    }
}

pub fn osnr_tx_report(source: &LightSourceSpec, arch: &TxArchitecture) -> Result<TxReport> {
    source.validate()?;
    arch.validate()?;
    Ok(evaluate_chain(source, &arch.stages()))
}

/// Transmit OSNR per carrier, dB in 12.5 GHz.
pub fn osnr_tx(source: &LightSourceSpec, arch: &TxArchitecture) -> Result<f64> {
    osnr_tx_report(source, arch).map(|r| r.osnr_tx_db)
}

/// OSNR_TX of the reference SWS (OCNR 55 dB, 16 dBm laser).
pub fn sws_reference_osnr_db() -> f64 {
    evaluate_chain(
        &LightSourceSpec::sws(55.0, 16.0),
        &TxArchitecture::new(TxScheme::SwsDirect).stages(),
    )
    .osnr_tx_db
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    LinePower,
    Ocnr,
}

impl SweepAxis {
    fn apply(self, template: &LightSourceSpec, value: f64) -> LightSourceSpec {
        let mut s = template.clone();
        match self {
            SweepAxis::LinePower => s.line_power_dbm = value,
            SweepAxis::Ocnr => s.ocnr_db = value,
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub osnr_tx_db: f64,
}

/// Evaluates OSNR_TX on `start, start + step, …` up to `end` inclusive.
pub fn sweep_osnr_tx(
    template: &LightSourceSpec,
    arch: &TxArchitecture,
    axis: SweepAxis,
    start: f64,
    end: f64,
    step: f64,
) -> Result<Vec<SweepPoint>> {
    if !(start.is_finite() && end.is_finite() && step > 0.0) || end < start {
        return Err(Error::EmptyRange { start, end, step });
    }
    template.validate()?;
    arch.validate()?;
    let stages = arch.stages();
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let axis_value = start + i as f64 * step;
            let source = axis.apply(template, axis_value);
            SweepPoint {
                axis_value,
                osnr_tx_db: evaluate_chain(&source, &stages).osnr_tx_db,
            }
        })
        .collect())
}

pub fn write_sweep_csv<W: Write>(out: W, points: &[SweepPoint], scheme: TxScheme) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["axis_value", "osnr_tx_db", "scheme"])?;
    for p in points {
        w.write_record([
            format!("{:.4}", p.axis_value),
            format!("{:.4}", p.osnr_tx_db),
            scheme.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Smallest value of `axis` in `[lo, hi]` at which OSNR_TX is within
/// `max_penalty_db` of `reference_db`. Relies on monotonicity of the chain
/// along either axis. `None` if even `hi` misses the target.
pub fn penalty_threshold(
    template: &LightSourceSpec,
    arch: &TxArchitecture,
    axis: SweepAxis,
    reference_db: f64,
    max_penalty_db: f64,
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let stages = arch.stages();
    let ok = |v: f64| {
        evaluate_chain(&axis.apply(template, v), &stages).osnr_tx_db
            >= reference_db - max_penalty_db
    };
    if !ok(hi) {
        return None;
    }
    if ok(lo) {
        return Some(lo);
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > 1e-9 {
        let m = 0.5 * (a + b);
        if ok(m) {
            b = m;
        } else {
            a = m;
        }
    }
    Some(b)
}
