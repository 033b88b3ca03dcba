//! Simulation and exact second-order oracles for generalized mixed fractional
//! Brownian motion time-changed by a tempered stable subordinator or a Gamma
//! process.

pub mod error;
pub mod fbm;
pub mod gmfbm;
pub mod mclab;
pub mod quadrature;
pub mod randkit;
pub mod subordinators;
pub mod theory;

pub use error::{Error, Result};
pub use fbm::{HurstIndex, TimeGrid};
pub use gmfbm::{GmfbmParams, ProcessPath, TimeChangedSpec};
pub use mclab::{DecayFit, LrdReport, McConfig, MomentEstimate};
pub use randkit::{derive_stream, RngStream};
pub use subordinators::{GammaParams, SubordinatorPath, SubordinatorSpec, TimeChange, TssParams};
pub use theory::DecayPrediction;
