//! Simulation and closed-form analysis of controlled remote state preparation
//! over a three-qubit GHZ-class channel with per-qubit Pauli-type noise.

pub mod analysis;
pub mod catalog;
pub mod channels;
pub mod cli;
pub mod error;
pub mod protocol;
pub mod qlin;

pub use catalog::CatalogKey;
pub use channels::{NoiseConfig, NoiseKind, NoiseSpec};
pub use error::{Error, Result};
pub use protocol::{AliceConvention, ProtocolParams, ProtocolResult, TargetState};
