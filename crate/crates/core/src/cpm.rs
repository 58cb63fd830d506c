//! Binary GMSK modulator with explicit state.
//!
//! On symbol interval `n` the phase is
//! `theta_n + 2 pi h sum_{k=n-L+1}^{n} I_k q(t - kT)`, where the phase state
//! `theta_n` collects every symbol that has fully passed through the
//! length-`L` phase pulse and the correlative state holds the last `L-1`
//! symbols. With `h = 1/2` the phase state is a whole number of quarter
//! turns, so it is tracked as an integer.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Rational modulation index `num/den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModIndex {
    num: u32,
    den: u32,
}

impl ModIndex {
    pub const HALF: ModIndex = ModIndex { num: 1, den: 2 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num == 0 {
            return Err(Error::InvalidConfig(format!("modulation index {num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(ModIndex {
            num: num / g,
            den: den / g,
        })
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Binary CPM parameters. Only `h = 1/2`, `M = 2` is accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct CpmConfig {
    h: ModIndex,
    pulse_len: usize,
    bt: f64,
    oversampling: usize,
    symbol_period: f64,
}

impl CpmConfig {
    pub const M_ARY: usize = 2;

    /// GMSK with bandwidth-time product `bt`, pulse length `pulse_len`
    /// symbols and `oversampling` samples per symbol.
    pub fn gmsk(bt: f64, pulse_len: usize, oversampling: usize) -> Result<Self> {
        Self::new(ModIndex::HALF, bt, pulse_len, oversampling, 1.0)
    }

    pub fn new(
        h: ModIndex,
        bt: f64,
        pulse_len: usize,
        oversampling: usize,
        symbol_period: f64,
    ) -> Result<Self> {
        if h != ModIndex::HALF {
            return Err(Error::InvalidConfig(format!(
                "modulation index {}/{} unsupported, only 1/2",
                h.num, h.den
            )));
        }
        if pulse_len == 0 {
            return Err(Error::InvalidConfig("pulse length L must be >= 1".into()));
        }
        if oversampling < 4 {
            return Err(Error::InvalidConfig(format!(
                "oversampling {oversampling} below 4"
            )));
        }
        if !(bt > 0.0 && bt.is_finite()) {
            return Err(Error::InvalidConfig(format!("BT = {bt} must be positive")));
        }
        if !(symbol_period > 0.0 && symbol_period.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "symbol period {symbol_period} must be positive"
            )));
        }
        Ok(CpmConfig {
            h,
            pulse_len,
            bt,
            oversampling,
            symbol_period,
        })
    }

    pub fn h(&self) -> ModIndex {
        self.h
    }

    pub fn pulse_len(&self) -> usize {
        self.pulse_len
    }

    pub fn bt(&self) -> f64 {
        self.bt
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    pub fn sample_period(&self) -> f64 {
        self.symbol_period / self.oversampling as f64
    }

    pub fn with_oversampling(&self, oversampling: usize) -> Result<Self> {
        Self::new(self.h, self.bt, self.pulse_len, oversampling, self.symbol_period)
    }
}

/// Real pulse sampled at `start_time + k * sample_period`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPulse {
    pub samples: Vec<f64>,
    pub sample_period: f64,
    pub start_time: f64,
}

impl SampledPulse {
    /// Composite trapezoidal integral.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.samples) * self.sample_period
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() * self.sample_period
    }

    pub fn duration(&self) -> f64 {
        self.samples.len().saturating_sub(1) as f64 * self.sample_period
    }

    /// Sample at index `k`, zero outside the stored support.
    pub fn at(&self, k: isize) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.samples.get(k as usize).copied().unwrap_or(0.0)
        }
    }
}

fn trapezoid(samples: &[f64]) -> f64 {
    match samples {
        [] | [_] => 0.0,
        [first, inner @ .., last] => inner.iter().sum::<f64>() + 0.5 * (first + last),
    }
}

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// GMSK frequency pulse
/// `g(t) = [Q((t/T - 1/2)/sigma) - Q((t/T + 1/2)/sigma)] / 2T`,
/// `sigma^2 = ln 2 / (4 pi^2 BT^2)`, centred on `[0, LT]`, truncated there and
/// rescaled so its trapezoidal integral is exactly 1/2.
pub fn gmsk_frequency_pulse(config: &CpmConfig) -> Result<SampledPulse> {
    let t_sym = config.symbol_period;
    let sigma = (2f64.ln()).sqrt() / (2.0 * PI * config.bt);
    let q = config.oversampling;
    let total = config.pulse_len * q;
    let dt = config.sample_period();
    let centre = config.pulse_len as f64 * t_sym / 2.0;
    let raw = |k: usize| {
        let t = (k as f64 * dt - centre) / t_sym;
        (q_function((t - 0.5) / sigma) - q_function((t + 0.5) / sigma)) / (2.0 * t_sym)
    };
    // Evaluate the left half and mirror it so the pulse is exactly even.
    let mut samples = vec![0.0; total + 1];
    for k in 0..=total / 2 {
        let v = raw(k);
        samples[k] = v;
        samples[total - k] = v;
    }
    let pulse = SampledPulse {
        samples,
        sample_period: dt,
        start_time: 0.0,
    };
    let scale = 0.5 / pulse.integral();
    Ok(SampledPulse {
        samples: pulse.samples.iter().map(|v| v * scale).collect(),
        ..pulse
    })
}

/// Phase pulse `q(t)`: cumulative trapezoidal integral of a normalized `g`.
pub fn phase_shaping(g: &SampledPulse) -> Result<SampledPulse> {
    let integral = g.integral();
    if (integral - 0.5).abs() > 1e-9 {
        return Err(Error::Unnormalized { integral });
    }
    let mut acc = 0.0;
    let mut samples = Vec::with_capacity(g.samples.len());
    samples.push(0.0);
    for w in g.samples.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * g.sample_period;
        samples.push(acc);
    }
    if let Some(last) = samples.last_mut() {
        *last = 0.5;
    }
    Ok(SampledPulse {
        samples,
        sample_period: g.sample_period,
        start_time: g.start_time,
    })
}

/// Binary CPM symbols in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CpmSymbols(Vec<i8>);

impl CpmSymbols {
    pub fn new<T: Copy + Into<i32>>(values: Vec<T>) -> Result<Self> {
        values
            .into_iter()
            .map(|v| match v.into() {
                1 => Ok(1),
                -1 => Ok(-1),
                other => Err(Error::InvalidSymbol(other)),
            })
            .collect::<Result<Vec<i8>>>()
            .map(CpmSymbols)
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().map(|&s| s as i64).sum()
    }

    pub fn concat(&self, other: &CpmSymbols) -> CpmSymbols {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        CpmSymbols(v)
    }

    /// Bipolar copy of a sequence, used for the uncoded baselines.
    pub fn from_bipolar(values: &[i8]) -> Result<Self> {
        Self::new(values.to_vec())
    }
}

/// Phase state (in quarter turns) and correlative state
/// `[I_{n-1}, I_{n-2}, ..., I_{n-L+1}]`. A correlative entry of 0 marks a
/// symbol slot before the modulator started.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModulatorState {
    phase_quarters: u8,
    correlative: Vec<i8>,
}

impl ModulatorState {
    /// Modulator before any symbol: zero phase, empty memory.
    pub fn at_rest(pulse_len: usize) -> Self {
        ModulatorState {
            phase_quarters: 0,
            correlative: vec![0; pulse_len.saturating_sub(1)],
        }
    }

    pub fn new(phase_quarters: u8, correlative: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = correlative.iter().find(|&&s| !(-1..=1).contains(&s)) {
            return Err(Error::InvalidSymbol(bad as i32));
        }
        Ok(ModulatorState {
            phase_quarters: phase_quarters % 4,
            correlative,
        })
    }

    pub fn phase_quarters(&self) -> u8 {
        self.phase_quarters
    }

    /// `theta_n` in radians, in `[0, 2 pi)`.
    pub fn phase_state(&self) -> f64 {
        self.phase_quarters as f64 * PI / 2.0
    }

    pub fn correlative_state(&self) -> &[i8] {
        &self.correlative
    }

    /// Phase state once the correlative symbols have fully entered it.
    pub fn settled_quarters(&self) -> u8 {
        let s: i64 = self.phase_quarters as i64 + self.correlative.iter().map(|&v| v as i64).sum::<i64>();
        s.rem_euclid(4) as u8
    }
}

/// Uniformly sampled complex baseband signal.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexWaveform {
    pub samples: Vec<Complex64>,
    pub sample_period: f64,
    pub start_time: f64,
}

impl ComplexWaveform {
    pub fn new(samples: Vec<Complex64>, sample_period: f64) -> Self {
        ComplexWaveform {
            samples,
            sample_period,
            start_time: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `sum |x|^2 * dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.sample_period
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> ComplexWaveform {
        ComplexWaveform {
            start_time: self.start_time + range.start as f64 * self.sample_period,
            samples: self.samples[range].to_vec(),
            sample_period: self.sample_period,
        }
    }

    pub fn scaled(&self, factor: f64) -> ComplexWaveform {
        ComplexWaveform {
            samples: self.samples.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn concat(&self, other: &ComplexWaveform) -> ComplexWaveform {
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        ComplexWaveform {
            samples,
            ..self.clone()
        }
    }
}

/// Modulator for one configuration; pulses are computed once.
#[derive(Debug, Clone)]
pub struct Modulator {
    config: CpmConfig,
    freq_pulse: SampledPulse,
    phase_pulse: SampledPulse,
}

impl Modulator {
    pub fn new(config: &CpmConfig) -> Result<Self> {
        let freq_pulse = gmsk_frequency_pulse(config)?;
        let phase_pulse = phase_shaping(&freq_pulse)?;
        Ok(Modulator {
            config: config.clone(),
            freq_pulse,
            phase_pulse,
        })
    }

    pub fn config(&self) -> &CpmConfig {
        &self.config
    }

    pub fn frequency_pulse(&self) -> &SampledPulse {
        &self.freq_pulse
    }

    pub fn phase_pulse(&self) -> &SampledPulse {
        &self.phase_pulse
    }

    fn check_state(&self, state: &ModulatorState) -> Result<()> {
        let expected = self.config.pulse_len - 1;
        if state.correlative.len() != expected {
            return Err(Error::StateLength {
                expected,
                got: state.correlative.len(),
            });
        }
        Ok(())
    }

    /// Prior symbols (oldest first) followed by the new ones.
    fn history(&self, symbols: &CpmSymbols, initial: &ModulatorState) -> Vec<i8> {
        let mut ext: Vec<i8> = initial.correlative.iter().rev().copied().collect();
        ext.extend_from_slice(symbols.values());
        ext
    }

    /// `|I| * Q` samples of `exp(j phi(t; I))`, starting from `initial`.
    pub fn modulate(
        &self,
        symbols: &CpmSymbols,
        initial: &ModulatorState,
    ) -> Result<ComplexWaveform> {
        self.check_state(initial)?;
        let l = self.config.pulse_len;
        let q = self.config.oversampling;
        let two_pi_h = 2.0 * PI * self.config.h.value();
        let ext = self.history(symbols, initial);
        let mem = l - 1;
        let qp = &self.phase_pulse.samples;

        let mut theta = initial.phase_quarters as i64;
        let mut samples = Vec::with_capacity(symbols.len() * q);
        for n in 0..symbols.len() {
            let pos = n + mem;
            let base = theta.rem_euclid(4) as f64 * PI / 2.0;
            for k in 0..q {
                let mut phase = 0.0;
                for i in 0..l {
                    phase += ext[pos - i] as f64 * qp[k + i * q];
                }
                samples.push(Complex64::from_polar(1.0, base + two_pi_h * phase));
            }
            // The oldest symbol in the window leaves the pulse after this interval.
            theta += ext[pos + 1 - l] as i64;
        }
        Ok(ComplexWaveform::new(samples, self.config.sample_period()))
    }

    /// State at the start of the symbol following `symbols`.
    pub fn phase_state_after(
        &self,
        symbols: &CpmSymbols,
        initial: &ModulatorState,
    ) -> Result<ModulatorState> {
        self.check_state(initial)?;
        let l = self.config.pulse_len;
        let ext = self.history(symbols, initial);
        let n = symbols.len();
        let entered: i64 = ext[..n].iter().map(|&s| s as i64).sum();
        let theta = (initial.phase_quarters as i64 + entered).rem_euclid(4) as u8;
        let correlative = (1..l).map(|i| ext[n + l - 1 - i]).collect();
        Ok(ModulatorState {
            phase_quarters: theta,
            correlative,
        })
    }
}

/// Convenience wrapper around [`Modulator::modulate`].
pub fn modulate(
    symbols: &CpmSymbols,
    config: &CpmConfig,
    initial: &ModulatorState,
) -> Result<ComplexWaveform> {
    Modulator::new(config)?.modulate(symbols, initial)
}

/// Convenience wrapper around [`Modulator::phase_state_after`].
pub fn phase_state_after(
    symbols: &CpmSymbols,
    config: &CpmConfig,
    initial: &ModulatorState,
) -> Result<ModulatorState> {
    Modulator::new(config)?.phase_state_after(symbols, initial)
}

const MAX_TAIL: usize = 24;

/// `z`-symbol patterns in lexicographic order (`-1 < +1`).
pub(crate) fn tail_patterns(z: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u32..1 << z).map(move |code| {
        (0..z)
            .map(|pos| if (code >> (z - 1 - pos)) & 1 == 1 { 1 } else { -1 })
            .collect()
    })
}

/// Smallest `z`-symbol pattern that returns the settled phase state to zero.
pub fn tail_bits(state: &ModulatorState, z: usize, config: &CpmConfig) -> Result<CpmSymbols> {
    if z == 0 || z > MAX_TAIL {
        return Err(Error::InvalidConfig(format!("tail length {z} outside 1..={MAX_TAIL}")));
    }
    if state.correlative.len() + 1 != config.pulse_len {
        return Err(Error::StateLength {
            expected: config.pulse_len - 1,
            got: state.correlative.len(),
        });
    }
    let residue = state.settled_quarters() as i64;
    tail_patterns(z)
        .find(|p| (residue + p.iter().map(|&s| s as i64).sum::<i64>()).rem_euclid(4) == 0)
        .map(CpmSymbols)
        .ok_or(Error::Unreachable {
            residue: residue as u8,
            z,
        })
}
