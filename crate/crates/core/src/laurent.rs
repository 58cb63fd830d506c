//! Laurent decomposition of binary CPM into `2^(L-1)` PAM pulses.
//!
//! All pulses live on the modulator's sample grid. Every shift used in the
//! products is a whole number of symbols, so no interpolation is needed.
//!
//! The decomposition assumes binary symbols for all time. A modulator that
//! starts from rest has no such past, so the PAM sum only reproduces its
//! output once the first `L` symbols have entered; [`LaurentModel::settled_start`]
//! gives the first sample index where the two agree.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::burst::CorrelationProfile;
use crate::cpm::{ComplexWaveform, CpmConfig, CpmSymbols, Modulator, SampledPulse};
use crate::error::{Error, Result};
use crate::gcp::{pseudo_symbols, GaussInt};

/// `s0(t)`: `sin(2 pi h q(t)) / sin(pi h)` on `[0, LT]` and
/// `sin(pi h - 2 pi h q(t - LT)) / sin(pi h)` on `[LT, 2LT]`.
pub fn s0_pulse(config: &CpmConfig) -> Result<SampledPulse> {
    let h = config.h();
    if h.is_integer() {
        return Err(Error::InvalidConfig("s0 undefined for integer h".into()));
    }
    let modulator = Modulator::new(config)?;
    let q = &modulator.phase_pulse().samples;
    let h = h.value();
    let denom = (PI * h).sin();
    let lq = q.len() - 1;
    let mut samples = vec![0.0; 2 * lq + 1];
    for (k, &qk) in q.iter().enumerate() {
        samples[k] = (2.0 * PI * h * qk).sin() / denom;
    }
    for (k, &qk) in q.iter().enumerate() {
        samples[lq + k] = (PI * h - 2.0 * PI * h * qk).sin() / denom;
    }
    // Both halves meet at t = LT where q = 1/2 and s0 = 1.
    samples[lq] = 1.0;
    Ok(SampledPulse {
        samples,
        sample_period: config.sample_period(),
        start_time: 0.0,
    })
}

/// Binary digits `a_{p,m}`, `m = 1..L-1`, of `p = sum 2^(m-1) a_{p,m}`.
pub fn binary_digits(p: usize, pulse_len: usize) -> Vec<u8> {
    (1..pulse_len).map(|m| ((p >> (m - 1)) & 1) as u8).collect()
}

#[derive(Debug, Clone)]
pub struct LaurentPulseSet {
    pub pulses: Vec<SampledPulse>,
    pub binary_digits: Vec<Vec<u8>>,
    pub config: CpmConfig,
}

impl LaurentPulseSet {
    /// Energy of each pulse as a fraction of the total.
    pub fn energy_fractions(&self) -> Vec<f64> {
        let energies: Vec<f64> = self.pulses.iter().map(SampledPulse::energy).collect();
        let total: f64 = energies.iter().sum();
        energies.iter().map(|e| e / total).collect()
    }

    pub fn c0(&self) -> &SampledPulse {
        &self.pulses[0]
    }
}

/// `c_p(t) = s0(t) prod_{i=1}^{L-1} s0(t + (i + L a_{p,i}) T)` on its support
/// `[0, T min_i (L(2 - a_{p,i}) - i)]` (`[0, 2T]` when `L = 1`).
pub fn laurent_pulses(config: &CpmConfig) -> Result<LaurentPulseSet> {
    let s0 = s0_pulse(config)?;
    let l = config.pulse_len();
    let q = config.oversampling();
    let count = 1usize << (l - 1);
    let mut pulses = Vec::with_capacity(count);
    let mut digits = Vec::with_capacity(count);
    for p in 0..count {
        let a = binary_digits(p, l);
        let support_symbols = (1..l)
            .map(|i| l * (2 - a[i - 1] as usize) - i)
            .min()
            .unwrap_or(2 * l);
        let samples = (0..=support_symbols * q)
            .map(|k| {
                (1..l).fold(s0.at(k as isize), |acc, i| {
                    let shift = (i + l * a[i - 1] as usize) * q;
                    acc * s0.at((k + shift) as isize)
                })
            })
            .collect();
        pulses.push(SampledPulse {
            samples,
            sample_period: s0.sample_period,
            start_time: 0.0,
        });
        digits.push(a);
    }
    Ok(LaurentPulseSet {
        pulses,
        binary_digits: digits,
        config: config.clone(),
    })
}

/// Pulse set plus the synthesis routines that use it.
#[derive(Debug, Clone)]
pub struct LaurentModel {
    set: LaurentPulseSet,
}

impl LaurentModel {
    pub fn new(config: &CpmConfig) -> Result<Self> {
        Ok(LaurentModel {
            set: laurent_pulses(config)?,
        })
    }

    pub fn pulses(&self) -> &LaurentPulseSet {
        &self.set
    }

    /// First sample index where [`Self::exact`] equals the output of a
    /// modulator started from rest.
    pub fn settled_start(&self) -> usize {
        self.set.config.pulse_len() * self.set.config.oversampling()
    }

    fn synthesize(&self, symbols: &CpmSymbols, pulses: usize) -> ComplexWaveform {
        let cfg = &self.set.config;
        let q = cfg.oversampling();
        let l = cfg.pulse_len();
        let total = symbols.len() * q;
        let mut out = vec![Complex64::new(0.0, 0.0); total];
        let sym = symbols.values();
        let mut cumulative: i64 = 0;
        for n in 0..sym.len() {
            cumulative += sym[n] as i64;
            for p in 0..pulses {
                let a = &self.set.binary_digits[p];
                let dropped: i64 = (1..l)
                    .filter(|&m| m <= n && a[m - 1] == 1)
                    .map(|m| sym[n - m] as i64)
                    .sum();
                // h = 1/2: exp(j pi h A) = j^A.
                let weight = GaussInt::quarter_turn((cumulative - dropped).rem_euclid(4) as u32)
                    .to_complex();
                let start = n * q;
                for (k, &c) in self.set.pulses[p].samples.iter().enumerate() {
                    match out.get_mut(start + k) {
                        Some(slot) => *slot += weight * c,
                        None => break,
                    }
                }
            }
        }
        ComplexWaveform::new(out, cfg.sample_period())
    }

    /// Full PAM sum over every pulse.
    pub fn exact(&self, symbols: &CpmSymbols) -> ComplexWaveform {
        self.synthesize(symbols, self.set.pulses.len())
    }

    /// `alpha(t) = sum_n gamma_n c0(t - nT)`.
    pub fn approx(&self, symbols: &CpmSymbols) -> ComplexWaveform {
        let gamma = pseudo_symbols(symbols, self.set.config.h());
        self.pam(gamma.values())
    }

    /// `sum_n w_n c0(t - nT)` over `|w| * Q` samples.
    pub fn pam(&self, weights: &[Complex64]) -> ComplexWaveform {
        let q = self.set.config.oversampling();
        let total = weights.len() * q;
        let mut out = vec![Complex64::new(0.0, 0.0); total];
        for (n, &w) in weights.iter().enumerate() {
            for (k, &c) in self.set.c0().samples.iter().enumerate() {
                match out.get_mut(n * q + k) {
                    Some(slot) => *slot += w * c,
                    None => break,
                }
            }
        }
        ComplexWaveform::new(out, self.set.config.sample_period())
    }

    /// `rho_c0(tau) = int c0(t) c0(t + tau) dt` at `tau = m dt`; zero once
    /// `|m|` exceeds the pulse support.
    pub fn c0_rho(&self, m: isize) -> f64 {
        let c0 = &self.set.c0().samples;
        let shift = m.unsigned_abs();
        if shift >= c0.len() {
            return 0.0;
        }
        c0.iter()
            .zip(&c0[shift..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.set.c0().sample_period
    }

    pub fn c0_aacf(&self) -> CorrelationProfile {
        let dt = self.set.config.sample_period();
        let reach = (self.set.c0().samples.len() - 1) as isize;
        let lags: Vec<f64> = (-reach..=reach).map(|m| m as f64 * dt).collect();
        let values = (-reach..=reach)
            .map(|m| Complex64::new(self.c0_rho(m), 0.0))
            .collect();
        CorrelationProfile::new(lags, values)
    }
}

/// Full Laurent PAM sum for `symbols`.
pub fn laurent_exact(symbols: &CpmSymbols, config: &CpmConfig) -> Result<ComplexWaveform> {
    Ok(LaurentModel::new(config)?.exact(symbols))
}

/// Dominant-pulse approximation.
pub fn laurent_approx(symbols: &CpmSymbols, config: &CpmConfig) -> Result<ComplexWaveform> {
    Ok(LaurentModel::new(config)?.approx(symbols))
}

pub fn c0_aacf(config: &CpmConfig) -> Result<CorrelationProfile> {
    Ok(LaurentModel::new(config)?.c0_aacf())
}
