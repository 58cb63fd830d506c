//! Training bursts and their segment correlations.
//!
//! A two-sequence burst is laid out as `[tail | I_C | tail | I_D]`, where each
//! `I` block holds `2N` symbols: the encoded sequence sent twice. The second
//! half of each block (`S2`) is the observation window; the first half (`S1`)
//! serves as its cyclic prefix. A single-sequence burst stops after `I_C`.
//!
//! Tails are chosen so the settled phase is zero at the start of each block.
//! An `I` block always has an even symbol sum, so with odd `Z` the tail after
//! it cannot reach zero; the builder then settles for a quarter-turn residual
//! and records it in [`TrainingBurst::block_rotations`]. Correlations are
//! invariant to such constant rotations.

use num_complex::Complex64;

use crate::cpm::{tail_bits, tail_patterns, ComplexWaveform, CpmConfig, CpmSymbols, Modulator, ModulatorState};
use crate::error::{Error, Result};
use crate::gcp::{diff_encode, ZqSequence};
use crate::laurent::LaurentModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// Symbols from `diff_encode`.
    Differential,
    /// The bipolar sequence repeated twice, used directly as symbols.
    Uncoded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    /// The modulated waveform, correlating `S1` against `S2`.
    True,
    /// The modulated waveform, periodic autocorrelation of `S2`. Unlike `S1`,
    /// this window carries no overlap from the tail symbols' pulses.
    Steady,
    /// The dominant-pulse approximation, periodic autocorrelation of `S2`.
    Approx,
}

/// Sampled correlation over lags in time units.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    pub lags: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Divisor applied by [`Self::magnitudes`].
    pub normalization: f64,
    /// Lags are taken modulo this when set.
    pub period: Option<f64>,
    pub symbol_period: f64,
}

impl CorrelationProfile {
    pub fn new(lags: Vec<f64>, values: Vec<Complex64>) -> Self {
        CorrelationProfile {
            lags,
            values,
            normalization: 1.0,
            period: None,
            symbol_period: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_at_zero(&self) -> Option<Complex64> {
        self.lags
            .iter()
            .position(|&t| t == 0.0)
            .map(|i| self.values[i])
    }

    /// Same values, normalized by the magnitude at lag zero.
    pub fn normalized(mut self) -> Self {
        if let Some(v) = self.value_at_zero() {
            if v.norm() > 0.0 {
                self.normalization = v.norm();
            }
        }
        self
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v.norm() / self.normalization)
            .collect()
    }

    fn add(&self, other: &CorrelationProfile) -> Result<CorrelationProfile> {
        if self.lags != other.lags {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(out)
    }
}

/// One training block's two windows.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPair {
    pub s1: ComplexWaveform,
    pub s2: ComplexWaveform,
}

#[derive(Debug, Clone)]
pub struct TrainingBurst {
    pub waveform: ComplexWaveform,
    pub symbols: CpmSymbols,
    pub n_len: usize,
    pub z_len: usize,
    /// Symbol index where each `I` block starts.
    pub block_starts: Vec<usize>,
    /// Settled phase, in quarter turns, entering each `I` block.
    pub block_rotations: Vec<u8>,
    pub encoding: Encoding,
    pub sources: Vec<ZqSequence>,
    pub config: CpmConfig,
    /// Amplitude applied to the unit-envelope modulator output.
    pub amplitude: f64,
}

impl TrainingBurst {
    pub fn is_single(&self) -> bool {
        self.block_starts.len() == 1
    }

    pub fn oversampling(&self) -> usize {
        self.config.oversampling()
    }

    /// Sample index where each `S2` window starts.
    pub fn observation_starts(&self) -> Vec<usize> {
        let q = self.oversampling();
        self.block_starts
            .iter()
            .map(|&b| (b + self.n_len) * q)
            .collect()
    }

    /// Sample boundaries `[tail, I_C, tail, I_D, end]` (or `[tail, I_C, end]`).
    pub fn boundaries(&self) -> Vec<usize> {
        let q = self.oversampling();
        let mut out = Vec::new();
        for &b in &self.block_starts {
            out.push((b - self.z_len) * q);
            out.push(b * q);
        }
        out.push(self.symbols.len() * q);
        out
    }

    /// Copy rescaled to total energy `energy`.
    pub fn with_energy(&self, energy: f64) -> TrainingBurst {
        let factor = (energy / self.waveform.energy()).sqrt();
        TrainingBurst {
            waveform: self.waveform.scaled(factor),
            amplitude: self.amplitude * factor,
            ..self.clone()
        }
    }

    /// Dominant-pulse approximation of the whole burst, at the burst's amplitude.
    pub fn approx_waveform(&self) -> Result<ComplexWaveform> {
        let model = LaurentModel::new(&self.config)?;
        Ok(model.approx(&self.symbols).scaled(self.amplitude))
    }
}

#[derive(Debug, Clone)]
pub struct BurstBuilder {
    config: CpmConfig,
    z: usize,
    encoding: Encoding,
    lead_in: ModulatorState,
    strict_tails: bool,
}

impl BurstBuilder {
    pub fn new(config: &CpmConfig, z: usize) -> Self {
        BurstBuilder {
            config: config.clone(),
            z,
            encoding: Encoding::Differential,
            lead_in: ModulatorState::at_rest(config.pulse_len()),
            strict_tails: false,
        }
    }

    pub fn encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = encoding;
        self
    }

    /// Modulator state before the first tail (defaults to at rest).
    pub fn lead_in(mut self, state: ModulatorState) -> Self {
        self.lead_in = state;
        self
    }

    /// Fail with `Unreachable` instead of accepting a quarter-turn residual.
    pub fn strict_tails(mut self, strict: bool) -> Self {
        self.strict_tails = strict;
        self
    }

    fn encode(&self, seq: &ZqSequence) -> Result<CpmSymbols> {
        match self.encoding {
            Encoding::Differential => diff_encode(seq),
            Encoding::Uncoded => {
                let b = seq.to_bipolar()?;
                CpmSymbols::from_bipolar(&[b.as_slice(), b.as_slice()].concat())
            }
        }
    }

    fn tail(&self, state: &ModulatorState) -> Result<CpmSymbols> {
        match tail_bits(state, self.z, &self.config) {
            Err(Error::Unreachable { .. }) if !self.strict_tails => {
                let residue = state.settled_quarters() as i64;
                let distance = |p: &Vec<i8>| {
                    let r = (residue + p.iter().map(|&s| s as i64).sum::<i64>()).rem_euclid(4);
                    r.min(4 - r)
                };
                let best = tail_patterns(self.z)
                    .min_by_key(distance)
                    .expect("z >= 1 has patterns");
                CpmSymbols::new(best)
            }
            other => other,
        }
    }

    pub fn build(&self, seqs: &[&ZqSequence]) -> Result<TrainingBurst> {
        let first = seqs
            .first()
            .ok_or_else(|| Error::InvalidBurst("no training sequence".into()))?;
        let n = first.len();
        let l = self.config.pulse_len();
        if seqs.len() > 2 {
            return Err(Error::InvalidBurst(format!("{} sequences, expected 1 or 2", seqs.len())));
        }
        if seqs.iter().any(|s| s.len() != n) {
            return Err(Error::InvalidBurst("sequences differ in length".into()));
        }
        if n % 4 != 0 || n <= l + 1 {
            return Err(Error::InvalidBurst(format!(
                "N = {n} must be a multiple of 4 and exceed L + 1 = {}",
                l + 1
            )));
        }
        let modulator = Modulator::new(&self.config)?;
        let mut state = self.lead_in.clone();
        let mut symbols = CpmSymbols::default();
        let mut block_starts = Vec::new();
        let mut block_rotations = Vec::new();
        for seq in seqs {
            let tail = self.tail(&state)?;
            state = modulator.phase_state_after(&tail, &state)?;
            symbols = symbols.concat(&tail);
            block_starts.push(symbols.len());
            block_rotations.push(state.settled_quarters());
            let block = self.encode(seq)?;
            state = modulator.phase_state_after(&block, &state)?;
            symbols = symbols.concat(&block);
        }
        let waveform = modulator.modulate(&symbols, &self.lead_in)?;
        Ok(TrainingBurst {
            waveform,
            symbols,
            n_len: n,
            z_len: self.z,
            block_starts,
            block_rotations,
            encoding: self.encoding,
            sources: seqs.iter().map(|&s| s.clone()).collect(),
            config: self.config.clone(),
            amplitude: 1.0,
        })
    }
}

/// Differentially encoded two-sequence burst, modulated from rest.
pub fn build_burst(c: &ZqSequence, d: &ZqSequence, config: &CpmConfig, z: usize) -> Result<TrainingBurst> {
    BurstBuilder::new(config, z).build(&[c, d])
}

/// Differentially encoded single-sequence burst `[tail | I_C]`.
pub fn build_single_burst(c: &ZqSequence, config: &CpmConfig, z: usize) -> Result<TrainingBurst> {
    BurstBuilder::new(config, z).build(&[c])
}

fn windows_of(burst: &TrainingBurst, wave: &ComplexWaveform) -> Result<Vec<SegmentPair>> {
    let q = burst.oversampling();
    let span = burst.n_len * q;
    burst
        .block_starts
        .iter()
        .map(|&b| {
            let s1 = b * q;
            if s1 + 2 * span > wave.len() {
                return Err(Error::InvalidBurst(format!(
                    "block at symbol {b} runs past the waveform end"
                )));
            }
            Ok(SegmentPair {
                s1: wave.slice(s1..s1 + span),
                s2: wave.slice(s1 + span..s1 + 2 * span),
            })
        })
        .collect()
}

/// `S1`/`S2` windows of each block, `N Q` samples each.
pub fn segments(burst: &TrainingBurst) -> Result<Vec<SegmentPair>> {
    windows_of(burst, &burst.waveform)
}

/// `phi(tau) = sum_t s2(t) conj(s1(t + tau mod NT)) dt` for `tau` on the
/// sample grid over one period.
pub fn periodic_xcorr(s1: &ComplexWaveform, s2: &ComplexWaveform) -> Result<CorrelationProfile> {
    if s1.len() != s2.len() {
        return Err(Error::LengthMismatch(s1.len(), s2.len()));
    }
    if s1.is_empty() {
        return Err(Error::InvalidBurst("empty window".into()));
    }
    let len = s1.len();
    let dt = s1.sample_period;
    let values = (0..len)
        .map(|m| {
            let acc: Complex64 = s2
                .samples
                .iter()
                .enumerate()
                .map(|(t, &v)| v * s1.samples[(t + m) % len].conj())
                .sum();
            acc * dt
        })
        .collect();
    Ok(CorrelationProfile {
        lags: (0..len).map(|m| m as f64 * dt).collect(),
        values,
        normalization: 1.0,
        period: Some(len as f64 * dt),
        symbol_period: 1.0,
    })
}

#[derive(Debug, Clone)]
pub struct SumCorrelation {
    /// Normalized by the magnitude at lag zero.
    pub profile: CorrelationProfile,
    /// The burst had a single block, so no complementary sum was formed.
    pub single: bool,
}

/// Sum of the per-block periodic correlations.
pub fn sum_correlation(burst: &TrainingBurst, route: Route) -> Result<SumCorrelation> {
    let pairs = match route {
        Route::True | Route::Steady => segments(burst)?,
        Route::Approx => windows_of(burst, &burst.approx_waveform()?)?,
    };
    let mut total: Option<CorrelationProfile> = None;
    for pair in &pairs {
        let prof = match route {
            Route::True => periodic_xcorr(&pair.s1, &pair.s2)?,
            Route::Steady | Route::Approx => periodic_xcorr(&pair.s2, &pair.s2)?,
        };
        total = Some(match total {
            None => prof,
            Some(t) => t.add(&prof)?,
        });
    }
    let mut profile = total.expect("bursts have at least one block").normalized();
    profile.symbol_period = burst.config.symbol_period();
    Ok(SumCorrelation {
        profile,
        single: pairs.len() == 1,
    })
}

/// Largest normalized magnitude over `(L+1)T < |tau| <= (N-L-1)T`. For a
/// periodic profile a lag qualifies if any of its periodic images does.
pub fn sidelobe_peak(profile: &CorrelationProfile, l: usize, n: usize) -> Result<f64> {
    if n <= 2 * l + 2 {
        return Err(Error::EmptyRegion { n, l });
    }
    let t = profile.symbol_period;
    let lo = (l + 1) as f64 * t;
    let hi = (n - l - 1) as f64 * t;
    let eps = 1e-9 * t;
    let inside = |tau: f64| tau.abs() > lo + eps && tau.abs() <= hi + eps;
    let mags = profile.magnitudes();
    Ok(profile
        .lags
        .iter()
        .zip(mags)
        .filter(|(&tau, _)| match profile.period {
            Some(p) => inside(tau) || inside(tau - p) || inside(tau + p),
            None => inside(tau),
        })
        .map(|(_, m)| m)
        .fold(0.0, f64::max))
}
