//! Planning engine for optical networks built from single-wavelength (SWS)
//! and multi-wavelength (MWS, e.g. frequency comb) transponders.
//!
//! The crate is layered bottom-up:
//!
//! - [`units`]: dB/linear conversions and physical constants.
//! - [`netmodel`]: topology, spectrum grid, transponder configurations,
//!   demands and scenarios, plus file ingestion.
//! - [`txchain`]: transmit OSNR of SWS and MWS transmitter architectures.
//! - [`qot`]: required SNR per configuration and achieved lightpath SNR
//!   (ASE + closed-form GN nonlinear interference + transmitter noise).
//! - [`rcsa`]: k-shortest-path routing, configuration selection and
//!   first-fit spectrum assignment, including fixed-FSR MWS blocks.
//! - [`study`]: traffic generation, scenario sweeps and metrics.

pub mod error;
pub mod netmodel;
pub mod qot;
pub mod rcsa;
pub mod study;
pub mod txchain;
pub mod units;

pub use error::{Error, Result};
