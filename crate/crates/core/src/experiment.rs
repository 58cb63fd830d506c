//! Experiment assembly shared by the command-line tool and the tests.
//!
//! A training source is written `<encoding>:<sequence>`, for example
//! `diff:gcp1`, `unc:hp` or `unc:random:7` (random binary sequence from seed 7).
//! All bursts of one experiment are rescaled to the energy of a unit-envelope
//! two-sequence burst, `(4N + 2Z) T`.

use std::fmt;
use std::str::FromStr;

use crate::builtins::{random_binary, Builtin};
use crate::burst::{sidelobe_peak, sum_correlation, BurstBuilder, CorrelationProfile, Encoding, Route, TrainingBurst};
use crate::chansim::{ber_sweep, mse_sweep, BerReport, BerScheme, BerSetup, CsiMode, MseReport};
use crate::cpm::CpmConfig;
use crate::error::{Error, Result};
use crate::export::CsvTable;
use crate::gcp::ZqSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct CpmParams {
    pub bt: f64,
    pub pulse_len: usize,
    pub z: usize,
    pub oversampling: usize,
    /// Length of random training sequences.
    pub random_len: usize,
}

impl Default for CpmParams {
    fn default() -> Self {
        CpmParams {
            bt: 0.3,
            pulse_len: 3,
            z: 3,
            oversampling: 8,
            random_len: 16,
        }
    }
}

impl CpmParams {
    pub fn config(&self) -> Result<CpmConfig> {
        CpmConfig::gmsk(self.bt, self.pulse_len, self.oversampling)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSource {
    Builtin(Builtin),
    Random { seed: u64 },
    /// Sequences supplied directly (e.g. read from a file).
    Explicit { name: String, seqs: Vec<ZqSequence> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub encoding: Encoding,
    pub sequence: SequenceSource,
}

impl Source {
    pub fn new(encoding: Encoding, sequence: SequenceSource) -> Self {
        Source { encoding, sequence }
    }

    pub fn label(&self) -> String {
        let enc = match self.encoding {
            Encoding::Differential => "Diff",
            Encoding::Uncoded => "Unc",
        };
        let seq = match &self.sequence {
            SequenceSource::Builtin(b) => b.name().to_ascii_uppercase(),
            SequenceSource::Random { seed } => format!("RAND{seed}"),
            SequenceSource::Explicit { name, .. } => name.clone(),
        };
        format!("{enc}-{seq}")
    }

    pub fn sequences(&self, params: &CpmParams) -> Vec<ZqSequence> {
        match &self.sequence {
            SequenceSource::Builtin(b) => b.sequences(),
            SequenceSource::Random { seed } => vec![random_binary(params.random_len, *seed)],
            SequenceSource::Explicit { seqs, .. } => seqs.clone(),
        }
    }

    pub fn burst(&self, params: &CpmParams) -> Result<TrainingBurst> {
        let seqs = self.sequences(params);
        let refs: Vec<&ZqSequence> = seqs.iter().collect();
        BurstBuilder::new(&params.config()?, params.z)
            .encoding(self.encoding)
            .build(&refs)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidExperiment(format!("bad source {s:?}, expected e.g. diff:gcp1 or unc:random:7"));
        let mut parts = s.trim().split(':');
        let encoding = match parts.next().map(str::to_ascii_lowercase).as_deref() {
            Some("diff") => Encoding::Differential,
            Some("unc") => Encoding::Uncoded,
            _ => return Err(bad()),
        };
        let name = parts.next().ok_or_else(bad)?;
        let sequence = if name.eq_ignore_ascii_case("random") {
            let seed = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            SequenceSource::Random { seed }
        } else {
            SequenceSource::Builtin(name.parse()?)
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Source { encoding, sequence })
    }
}

/// Bursts for `sources`, rescaled to the common reference energy.
pub fn build_bursts(sources: &[Source], params: &CpmParams) -> Result<Vec<(String, TrainingBurst)>> {
    let bursts = sources
        .iter()
        .map(|s| Ok((s.label(), s.burst(params)?)))
        .collect::<Result<Vec<_>>>()?;
    let Some((_, first)) = bursts.first() else {
        return Err(Error::InvalidExperiment("no training sources".into()));
    };
    let energy = (4 * first.n_len + 2 * params.z) as f64 * first.config.symbol_period();
    Ok(bursts
        .into_iter()
        .map(|(l, b)| (l, b.with_energy(energy)))
        .collect())
}

#[derive(Debug, Clone)]
pub struct AutocorrEntry {
    pub label: String,
    pub profile: CorrelationProfile,
    pub sidelobe_peak: f64,
    pub single: bool,
}

pub fn run_autocorr(sources: &[Source], params: &CpmParams, route: Route) -> Result<Vec<AutocorrEntry>> {
    build_bursts(sources, params)?
        .into_iter()
        .map(|(label, b)| {
            let sum = sum_correlation(&b, route)?;
            Ok(AutocorrEntry {
                sidelobe_peak: sidelobe_peak(&sum.profile, params.pulse_len, b.n_len)?,
                label,
                profile: sum.profile,
                single: sum.single,
            })
        })
        .collect()
}

/// `lag_over_T,magnitude` for one profile; `lag_over_T,<label>_magnitude...`
/// for several.
pub fn autocorr_table(entries: &[AutocorrEntry]) -> Result<CsvTable> {
    let first = entries
        .first()
        .ok_or_else(|| Error::InvalidExperiment("no profiles".into()))?;
    if entries.len() == 1 {
        return Ok(crate::export::profile_table(&first.profile));
    }
    if entries.iter().any(|e| e.profile.lags != first.profile.lags) {
        return Err(Error::InvalidExperiment("profiles use different lag grids".into()));
    }
    let mut header = vec!["lag_over_T".to_string()];
    header.extend(entries.iter().map(|e| format!("{}_magnitude", e.label)));
    let mags: Vec<Vec<f64>> = entries.iter().map(|e| e.profile.magnitudes()).collect();
    let rows = first
        .profile
        .lags
        .iter()
        .enumerate()
        .map(|(k, &lag)| {
            let mut row = vec![lag / first.profile.symbol_period];
            row.extend(mags.iter().map(|m| m[k]));
            row
        })
        .collect();
    Ok(CsvTable { header, rows })
}

pub fn run_mse(
    sources: &[Source],
    params: &CpmParams,
    taps: usize,
    snr_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<MseReport> {
    mse_sweep(&build_bursts(sources, params)?, taps, snr_grid, trials, seed)
}

/// Label of the perfect-CSI reference curve in BER reports.
pub const PERFECT_CSI: &str = "Perfect-CSI";

/// Estimated-CSI BER for every source plus one perfect-CSI reference curve.
pub fn run_ber(
    sources: &[Source],
    params: &CpmParams,
    taps: usize,
    payload_len: usize,
    snr_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<BerReport> {
    let bursts = build_bursts(sources, params)?;
    let mut schemes = vec![BerScheme {
        label: PERFECT_CSI.into(),
        burst: bursts[0].1.clone(),
        csi: CsiMode::Perfect,
    }];
    schemes.extend(bursts.into_iter().map(|(label, burst)| BerScheme {
        label,
        burst,
        csi: CsiMode::Estimated,
    }));
    let setup = BerSetup::new(&params.config()?, payload_len, taps, trials, seed);
    ber_sweep(&schemes, &setup, snr_grid)
}
