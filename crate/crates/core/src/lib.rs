//! CPM (GMSK, `h = 1/2`) training waveforms built from differentially
//! encoded Golay complementary pairs.
//!
//! * [`gcp`]: exact sequence algebra (GBFs, Davis-Jedwab pairs, correlations,
//!   differential encoding, pseudo-symbols).
//! * [`cpm`]: GMSK pulse shaping, modulator state and tail symbols.
//! * [`laurent`]: Laurent PAM decomposition and its dominant-pulse approximation.
//! * [`burst`]: training burst assembly and segment correlations.
//! * [`chansim`]: multipath channel, least-squares estimation, CRLB, MSE and
//!   SC-FDE BER sweeps.

pub mod builtins;
pub mod burst;
pub mod chansim;
pub mod cpm;
pub mod error;
pub mod experiment;
pub mod export;
pub mod gcp;
pub mod laurent;

pub use error::{Error, Result};
