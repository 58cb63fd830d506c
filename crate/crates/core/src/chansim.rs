//! Symbol-spaced multipath channels, least-squares channel estimation and
//! Monte Carlo sweeps.
//!
//! SNR is `E_s / N_0` for a unit-envelope signal, so `N_0 = T 10^(-snr/10)`
//! and the per-sample noise variance is `N_0 / dt`. Bursts used in a sweep
//! are rescaled to equal total energy, which leaves this reference fixed.
//!
//! Every trial draws from its own ChaCha stream selected by the trial index,
//! and results are accumulated in trial order, so reports do not depend on
//! the thread count.

use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::burst::TrainingBurst;
use crate::cpm::{ComplexWaveform, CpmConfig, CpmSymbols, Modulator, ModulatorState};
use crate::error::{Error, Result};
use crate::gcp::GaussInt;
use crate::laurent::LaurentModel;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Stream offset separating training noise from payload randomness.
const TRAINING_STREAM: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTaps {
    pub taps: Vec<Complex64>,
    /// Tap spacing in time units.
    pub spacing: f64,
}

impl ChannelTaps {
    pub fn new(taps: Vec<Complex64>, spacing: f64) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidChannel("channel needs at least one tap".into()));
        }
        if spacing <= 0.0 {
            return Err(Error::InvalidChannel(format!("tap spacing {spacing} must be positive")));
        }
        Ok(ChannelTaps { taps, spacing })
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn power(&self) -> f64 {
        self.taps.iter().map(Complex64::norm_sqr).sum()
    }

    /// `sum |a_i - b_i|^2`.
    pub fn squared_error(&self, truth: &ChannelTaps) -> f64 {
        self.taps
            .iter()
            .zip(&truth.taps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }
}

fn complex_gaussian(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `p` independent taps, zero-mean complex Gaussian with variance `1/p`, at
/// unit spacing.
pub fn draw_channel_with(rng: &mut impl Rng, p: usize) -> Result<ChannelTaps> {
    if p == 0 {
        return Err(Error::InvalidChannel("p must be at least 1".into()));
    }
    let var = 1.0 / p as f64;
    ChannelTaps::new((0..p).map(|_| complex_gaussian(rng, var)).collect(), 1.0)
}

pub fn draw_channel(p: usize, seed: u64) -> Result<ChannelTaps> {
    draw_channel_with(&mut ChaCha8Rng::seed_from_u64(seed), p)
}

/// Per-sample noise variance for `snr_db` (`E_s / N_0`) at sample period `dt`.
pub fn noise_variance(snr_db: f64, symbol_period: f64, dt: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    symbol_period * 10f64.powf(-snr_db / 10.0) / dt
}

fn samples_per_tap(x: &ComplexWaveform, taps: &ChannelTaps) -> Result<usize> {
    let ratio = taps.spacing / x.sample_period;
    let q = ratio.round();
    if q < 1.0 || (ratio - q).abs() > 1e-9 * ratio {
        return Err(Error::InvalidChannel(format!(
            "tap spacing {} is not a whole number of samples of {}",
            taps.spacing, x.sample_period
        )));
    }
    Ok(q as usize)
}

/// Sample `k` of the noiseless channel output.
fn convolve_at(x: &[Complex64], taps: &[Complex64], q: usize, k: usize) -> Complex64 {
    taps.iter()
        .enumerate()
        .filter(|(i, _)| i * q <= k && k - i * q < x.len())
        .map(|(i, h)| h * x[k - i * q])
        .sum()
}

/// Full linear convolution with the taps plus white noise; `snr_db = inf`
/// switches the noise off. Output has `len + (P-1) Q` samples.
pub fn propagate(x: &ComplexWaveform, taps: &ChannelTaps, snr_db: f64, seed: u64) -> Result<ComplexWaveform> {
    propagate_with(x, taps, snr_db, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn propagate_with(
    x: &ComplexWaveform,
    taps: &ChannelTaps,
    snr_db: f64,
    rng: &mut impl Rng,
) -> Result<ComplexWaveform> {
    let q = samples_per_tap(x, taps)?;
    let len = x.len() + (taps.len() - 1) * q;
    let var = noise_variance(snr_db, taps.spacing, x.sample_period);
    let samples = (0..len)
        .map(|k| {
            let clean = convolve_at(&x.samples, &taps.taps, q, k);
            if var > 0.0 {
                clean + complex_gaussian(rng, var)
            } else {
                clean
            }
        })
        .collect();
    Ok(ComplexWaveform {
        samples,
        sample_period: x.sample_period,
        start_time: x.start_time,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsDiagnostics {
    pub condition: f64,
    pub smallest_singular: f64,
    pub largest_singular: f64,
    /// Smallest singular value below `1e-10` times the largest.
    pub rank_deficient: bool,
}

/// Least-squares estimator for a known reference observed on fixed windows.
#[derive(Debug, Clone)]
pub struct LsEstimator {
    pinv: DMatrix<Complex64>,
    windows: Vec<Range<usize>>,
    p: usize,
    spacing: f64,
    observation_energy: f64,
    diagnostics: LsDiagnostics,
}

impl LsEstimator {
    /// Column `i` of the model matrix is `reference` delayed by `i * q`
    /// samples, restricted to `windows`.
    pub fn new(reference: &ComplexWaveform, windows: &[Range<usize>], q: usize, p: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidChannel("p and samples per tap must be positive".into()));
        }
        let rows: Vec<usize> = windows.iter().flat_map(|w| w.clone()).collect();
        if rows.len() < p {
            return Err(Error::InvalidChannel(format!(
                "{} observations cannot determine {p} taps",
                rows.len()
            )));
        }
        let x = &reference.samples;
        let a = DMatrix::from_fn(rows.len(), p, |r, i| {
            let k = rows[r];
            if k >= i * q && k - i * q < x.len() {
                x[k - i * q]
            } else {
                ZERO
            }
        });
        let svd = a.svd(true, true);
        let sv = &svd.singular_values;
        let largest = sv.max();
        let smallest = sv.min();
        let rank_deficient = smallest < 1e-10 * largest;
        let pinv = svd
            .pseudo_inverse(1e-10 * largest)
            .map_err(|e| Error::InvalidChannel(e.into()))?;
        let observation_energy = rows
            .iter()
            .map(|&k| x.get(k).map_or(0.0, Complex64::norm_sqr))
            .sum::<f64>()
            * reference.sample_period;
        Ok(LsEstimator {
            pinv,
            windows: windows.to_vec(),
            p,
            spacing: q as f64 * reference.sample_period,
            observation_energy,
            diagnostics: LsDiagnostics {
                condition: largest / smallest,
                smallest_singular: smallest,
                largest_singular: largest,
                rank_deficient,
            },
        })
    }

    /// Observes the `S2` windows of `burst`.
    pub fn for_burst(burst: &TrainingBurst, p: usize) -> Result<Self> {
        let span = burst.n_len * burst.oversampling();
        let windows: Vec<Range<usize>> = burst
            .observation_starts()
            .into_iter()
            .map(|s| s..s + span)
            .collect();
        Self::new(&burst.waveform, &windows, burst.oversampling(), p)
    }

    pub fn diagnostics(&self) -> LsDiagnostics {
        self.diagnostics
    }

    /// Reference energy inside the observation windows.
    pub fn observation_energy(&self) -> f64 {
        self.observation_energy
    }

    pub fn windows(&self) -> &[Range<usize>] {
        &self.windows
    }

    fn estimate_from(&self, observed: impl Iterator<Item = Complex64>) -> ChannelTaps {
        let y = DVector::from_iterator(self.pinv.ncols(), observed);
        let h = &self.pinv * y;
        ChannelTaps {
            taps: h.iter().copied().collect(),
            spacing: self.spacing,
        }
    }

    pub fn estimate(&self, received: &ComplexWaveform) -> Result<ChannelTaps> {
        let end = self.windows.iter().map(|w| w.end).max().unwrap_or(0);
        if received.len() < end {
            return Err(Error::InvalidChannel(format!(
                "received {} samples, windows need {end}",
                received.len()
            )));
        }
        Ok(self.estimate_from(
            self.windows
                .iter()
                .flat_map(|w| received.samples[w.clone()].iter().copied()),
        ))
    }

    pub fn taps(&self) -> usize {
        self.p
    }
}

/// LS estimate of `p` taps from `received`, with diagnostics.
pub fn ls_estimate(received: &ComplexWaveform, burst: &TrainingBurst, p: usize) -> Result<(ChannelTaps, LsDiagnostics)> {
    let est = LsEstimator::for_burst(burst, p)?;
    Ok((est.estimate(received)?, est.diagnostics()))
}

/// `P N_0 / E` for symbol period 1.
pub fn crlb(p: usize, snr_db: f64, ref_energy: f64) -> f64 {
    p as f64 * 10f64.powf(-snr_db / 10.0) / ref_energy
}

/// Frank sequence of length `n = m^2`: `x[a m + b] = exp(j 2 pi a b / m)`.
/// Its periodic autocorrelation vanishes at every nonzero shift.
pub fn frank_sequence(n: usize) -> Result<Vec<Complex64>> {
    let m = (n as f64).sqrt().round() as usize;
    if m == 0 || m * m != n {
        return Err(Error::InvalidChannel(format!("Frank sequence length {n} is not a square")));
    }
    Ok((0..n)
        .map(|k| {
            let (a, b) = (k / m, k % m);
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (a * b) as f64 / m as f64)
        })
        .collect())
}

/// Symbol-rate training with zero periodic sidelobes: a Frank sequence with a
/// `p - 1` symbol cyclic prefix, observed over the sequence itself.
pub fn ideal_training(n: usize, p: usize) -> Result<(ComplexWaveform, Range<usize>)> {
    let seq = frank_sequence(n)?;
    if p == 0 || p > n {
        return Err(Error::InvalidChannel(format!("{p} taps need 1..={n}")));
    }
    let mut samples: Vec<Complex64> = seq[n - (p - 1)..].to_vec();
    samples.extend_from_slice(&seq);
    Ok((ComplexWaveform::new(samples, 1.0), p - 1..p - 1 + n))
}

fn check_grid(snr_grid: &[f64], trials: usize) -> Result<()> {
    if snr_grid.is_empty() {
        return Err(Error::InvalidExperiment("empty SNR grid".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidExperiment("trials must be positive".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseReport {
    pub snr_grid: Vec<f64>,
    pub labels: Vec<String>,
    /// `mse[label][snr]`: mean of `sum_i |h_i - est_i|^2`.
    pub mse: Vec<Vec<f64>>,
    /// Standard error of each mean.
    pub stderr: Vec<Vec<f64>>,
    /// `per_tap[label][snr][i]`: mean `|h_i - est_i|^2`.
    pub per_tap: Vec<Vec<Vec<f64>>>,
    pub diagnostics: Vec<LsDiagnostics>,
    pub crlb: Vec<f64>,
    pub ref_energy: f64,
    pub trials: usize,
    pub seed: u64,
}

impl MseReport {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Mean of `10 log10(mse / crlb)` over grid points with `snr >= min_snr`.
    pub fn gap_db(&self, label: usize, min_snr: f64) -> f64 {
        let gaps: Vec<f64> = self
            .snr_grid
            .iter()
            .enumerate()
            .filter(|(_, &s)| s >= min_snr)
            .map(|(k, _)| 10.0 * (self.mse[label][k] / self.crlb[k]).log10())
            .collect();
        gaps.iter().sum::<f64>() / gaps.len() as f64
    }
}

/// Rescales every burst to total energy `energy`.
pub fn equalize_energy(bursts: &[(String, TrainingBurst)], energy: f64) -> Vec<(String, TrainingBurst)> {
    bursts
        .iter()
        .map(|(l, b)| (l.clone(), b.with_energy(energy)))
        .collect()
}

struct MseTrial {
    /// `[label][snr][tap]` squared errors.
    errors: Vec<Vec<Vec<f64>>>,
}

/// Monte Carlo LS MSE. All bursts see the same channel draw in a trial and
/// independent noise.
pub fn mse_sweep(
    bursts: &[(String, TrainingBurst)],
    p: usize,
    snr_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<MseReport> {
    check_grid(snr_grid, trials)?;
    if bursts.is_empty() {
        return Err(Error::InvalidExperiment("no bursts to sweep".into()));
    }
    let e0 = bursts[0].1.waveform.energy();
    if let Some((l, _)) = bursts
        .iter()
        .find(|(_, b)| (b.waveform.energy() - e0).abs() > 1e-9 * e0)
    {
        return Err(Error::InvalidExperiment(format!("burst {l} differs in energy")));
    }
    let estimators = bursts
        .iter()
        .map(|(_, b)| LsEstimator::for_burst(b, p))
        .collect::<Result<Vec<_>>>()?;
    let ref_energy = estimators
        .iter()
        .map(LsEstimator::observation_energy)
        .fold(0.0, f64::max);

    let run = |trial: usize| -> MseTrial {
        let mut rng = trial_rng(seed, trial as u64);
        let h = draw_channel_with(&mut rng, p).expect("p >= 1");
        let errors = bursts
            .iter()
            .zip(&estimators)
            .map(|((_, b), est)| {
                let q = b.oversampling();
                let dt = b.waveform.sample_period;
                let clean: Vec<Complex64> = est
                    .windows()
                    .iter()
                    .flat_map(|w| w.clone())
                    .map(|k| convolve_at(&b.waveform.samples, &h.taps, q, k))
                    .collect();
                snr_grid
                    .iter()
                    .map(|&snr| {
                        let var = noise_variance(snr, b.config.symbol_period(), dt);
                        let noisy = clean.iter().map(|&c| c + complex_gaussian(&mut rng, var));
                        let hat = est.estimate_from(noisy);
                        hat.taps
                            .iter()
                            .zip(&h.taps)
                            .map(|(a, b)| (a - b).norm_sqr())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        MseTrial { errors }
    };
    let results: Vec<MseTrial> = (0..trials).into_par_iter().map(run).collect();

    let (nl, ns) = (bursts.len(), snr_grid.len());
    let mut sum = vec![vec![0.0; ns]; nl];
    let mut sum_sq = vec![vec![0.0; ns]; nl];
    let mut per_tap = vec![vec![vec![0.0; p]; ns]; nl];
    for r in &results {
        for l in 0..nl {
            for s in 0..ns {
                let e = &r.errors[l][s];
                let total: f64 = e.iter().sum();
                sum[l][s] += total;
                sum_sq[l][s] += total * total;
                for (acc, v) in per_tap[l][s].iter_mut().zip(e) {
                    *acc += v;
                }
            }
        }
    }
    let t = trials as f64;
    let mse: Vec<Vec<f64>> = sum.iter().map(|row| row.iter().map(|v| v / t).collect()).collect();
    let stderr = mse
        .iter()
        .zip(&sum_sq)
        .map(|(m, sq)| {
            m.iter()
                .zip(sq)
                .map(|(&mean, &s2)| ((s2 / t - mean * mean).max(0.0) / t).sqrt())
                .collect()
        })
        .collect();
    for row in per_tap.iter_mut().flatten() {
        for v in row.iter_mut() {
            *v /= t;
        }
    }
    Ok(MseReport {
        snr_grid: snr_grid.to_vec(),
        labels: bursts.iter().map(|(l, _)| l.clone()).collect(),
        mse,
        stderr,
        per_tap,
        diagnostics: estimators.iter().map(LsEstimator::diagnostics).collect(),
        crlb: snr_grid.iter().map(|&s| crlb(p, s, ref_energy)).collect(),
        ref_energy,
        trials,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CsiMode {
    Perfect,
    Estimated,
}

/// Block transmission parameters for the BER experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct BerSetup {
    pub config: CpmConfig,
    /// Symbols per FDE block, a multiple of 4.
    pub payload_len: usize,
    /// Cyclic prefix in symbols; must cover the channel memory plus the
    /// modulator's startup and pulse memory.
    pub cp_len: usize,
    pub taps: usize,
    pub trials: usize,
    pub seed: u64,
}

impl BerSetup {
    /// Prefix of `P + L` symbols.
    pub fn new(config: &CpmConfig, payload_len: usize, taps: usize, trials: usize, seed: u64) -> Self {
        BerSetup {
            config: config.clone(),
            payload_len,
            cp_len: taps + config.pulse_len(),
            taps,
            trials,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.payload_len == 0 || self.payload_len % 4 != 0 {
            return Err(Error::InvalidExperiment(format!(
                "payload length {} must be a positive multiple of 4",
                self.payload_len
            )));
        }
        if self.taps == 0 {
            return Err(Error::InvalidExperiment("taps must be positive".into()));
        }
        if self.cp_len < self.taps + self.config.pulse_len() {
            return Err(Error::InvalidExperiment(format!(
                "cyclic prefix {} shorter than P + L = {}",
                self.cp_len,
                self.taps + self.config.pulse_len()
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidExperiment("trials must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BerScheme {
    pub label: String,
    pub burst: TrainingBurst,
    pub csi: CsiMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerReport {
    pub snr_grid: Vec<f64>,
    pub labels: Vec<String>,
    /// `ber[scheme][snr]`.
    pub ber: Vec<Vec<f64>>,
    /// Bits per scheme per SNR point.
    pub bits_simulated: u64,
    pub seed: u64,
}

impl BerReport {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Receiver state shared by all trials.
struct FdeReceiver {
    c0: Vec<f64>,
    dt: f64,
    q: usize,
    /// DFT of `rho_c0(mT)` over one block.
    rho_bins: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl FdeReceiver {
    fn new(config: &CpmConfig, nb: usize) -> Result<Self> {
        let model = LaurentModel::new(config)?;
        let q = config.oversampling();
        let reach = (config.pulse_len() + 1) as isize;
        let mut rho = vec![ZERO; nb];
        for m in -reach..=reach {
            rho[m.rem_euclid(nb as isize) as usize] += Complex64::new(model.c0_rho(m * q as isize), 0.0);
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(nb);
        let ifft = planner.plan_fft_inverse(nb);
        fft.process(&mut rho);
        Ok(FdeReceiver {
            c0: model.pulses().c0().samples.clone(),
            dt: config.sample_period(),
            q,
            rho_bins: rho.iter().map(|v| v.re).collect(),
            fft,
            ifft,
        })
    }

    /// Cyclic matched filter to `c0`, sampled once per symbol, in the DFT domain.
    fn matched_bins(&self, window: &[Complex64]) -> Vec<Complex64> {
        let len = window.len();
        let nb = len / self.q;
        let mut z: Vec<Complex64> = (0..nb)
            .map(|n| {
                self.c0
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| window[(n * self.q + k) % len] * c)
                    .sum::<Complex64>()
                    * self.dt
            })
            .collect();
        self.fft.process(&mut z);
        z
    }

    fn channel_bins(&self, taps: &ChannelTaps, nb: usize) -> Vec<Complex64> {
        let mut h = vec![ZERO; nb];
        for (i, &t) in taps.taps.iter().enumerate() {
            h[i % nb] += t;
        }
        self.fft.process(&mut h);
        h
    }

    /// MMSE estimate of the pseudo-symbols.
    fn equalize(&self, z: &[Complex64], h: &[Complex64], n0: f64) -> Vec<Complex64> {
        let nb = z.len();
        let mut g: Vec<Complex64> = z
            .iter()
            .zip(h)
            .zip(&self.rho_bins)
            .map(|((&zk, &hk), &rk)| {
                let gk = hk * rk;
                zk * gk.conj() / (gk.norm_sqr() + n0 * rk)
            })
            .collect();
        self.ifft.process(&mut g);
        g.iter().map(|v| v / nb as f64).collect()
    }
}

/// Payload frame: bits `a` (cyclically prefixed) with symbols
/// `I_m = a_m a_(m-1)`. The initial phase is chosen so the pseudo-symbols are
/// `gamma_m = j^(m+1) a_m`.
fn payload_frame(bits: &[i8], cp: usize, pulse_len: usize) -> Result<(CpmSymbols, ModulatorState)> {
    let nb = bits.len();
    let ext = |m: isize| bits[(m - cp as isize).rem_euclid(nb as isize) as usize];
    let symbols = (0..(cp + nb) as isize).map(|m| ext(m) * ext(m - 1)).collect::<Vec<i8>>();
    let phase = if ext(-1) == 1 { 0 } else { 2 };
    Ok((
        CpmSymbols::new(symbols)?,
        ModulatorState::new(phase, vec![0; pulse_len - 1])?,
    ))
}

/// BER of several schemes over common channel, payload and payload noise.
pub fn ber_sweep(schemes: &[BerScheme], setup: &BerSetup, snr_grid: &[f64]) -> Result<BerReport> {
    setup.validate()?;
    check_grid(snr_grid, setup.trials)?;
    if schemes.is_empty() {
        return Err(Error::InvalidExperiment("no schemes to sweep".into()));
    }
    if let Some(s) = schemes.iter().find(|s| s.burst.config != setup.config) {
        return Err(Error::InvalidExperiment(format!("scheme {} uses another CPM config", s.label)));
    }
    let cfg = &setup.config;
    let (nb, cp, p, q) = (setup.payload_len, setup.cp_len, setup.taps, cfg.oversampling());
    let modulator = Modulator::new(cfg)?;
    let receiver = FdeReceiver::new(cfg, nb)?;
    let estimators = schemes
        .iter()
        .map(|s| LsEstimator::for_burst(&s.burst, p))
        .collect::<Result<Vec<_>>>()?;
    let dt = cfg.sample_period();
    let big_t = cfg.symbol_period();

    let run = |trial: usize| -> Result<Vec<Vec<u64>>> {
        let mut rng = trial_rng(setup.seed, trial as u64);
        let mut train_rng = trial_rng(setup.seed, TRAINING_STREAM + trial as u64);
        let h = draw_channel_with(&mut rng, p)?;
        let bits: Vec<i8> = (0..nb).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let (symbols, start) = payload_frame(&bits, cp, cfg.pulse_len())?;
        let tx = modulator.modulate(&symbols, &start)?;
        let clean: Vec<Complex64> = (cp * q..(cp + nb) * q)
            .map(|k| convolve_at(&tx.samples, &h.taps, q, k))
            .collect();
        let perfect = receiver.channel_bins(&h, nb);
        let mut errors = vec![vec![0u64; snr_grid.len()]; schemes.len()];
        for (si, &snr) in snr_grid.iter().enumerate() {
            let var = noise_variance(snr, big_t, dt);
            let n0 = var * dt / big_t;
            let window: Vec<Complex64> = clean.iter().map(|&c| c + complex_gaussian(&mut rng, var)).collect();
            let z = receiver.matched_bins(&window);
            for (k, (scheme, est)) in schemes.iter().zip(&estimators).enumerate() {
                let bins = match scheme.csi {
                    CsiMode::Perfect => perfect.clone(),
                    CsiMode::Estimated => {
                        let b = &scheme.burst;
                        let tvar = noise_variance(snr, big_t, b.waveform.sample_period);
                        let observed = est
                            .windows()
                            .iter()
                            .flat_map(|w| w.clone())
                            .map(|idx| {
                                convolve_at(&b.waveform.samples, &h.taps, q, idx)
                                    + complex_gaussian(&mut train_rng, tvar)
                            })
                            .collect::<Vec<_>>();
                        receiver.channel_bins(&est.estimate_from(observed.into_iter()), nb)
                    }
                };
                let gamma = receiver.equalize(&z, &bins, n0);
                errors[k][si] = gamma
                    .iter()
                    .enumerate()
                    .filter(|(n, g)| {
                        let reference = GaussInt::quarter_turn(((cp + n + 1) % 4) as u32).to_complex();
                        let decided: i8 = if (*g * reference.conj()).re >= 0.0 { 1 } else { -1 };
                        decided != bits[*n]
                    })
                    .count() as u64;
            }
        }
        Ok(errors)
    };
    let results = (0..setup.trials)
        .into_par_iter()
        .map(run)
        .collect::<Result<Vec<_>>>()?;
    let mut totals = vec![vec![0u64; snr_grid.len()]; schemes.len()];
    for r in &results {
        for (acc, row) in totals.iter_mut().zip(r) {
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
    }
    let bits = (setup.trials * nb) as u64;
    Ok(BerReport {
        snr_grid: snr_grid.to_vec(),
        labels: schemes.iter().map(|s| s.label.clone()).collect(),
        ber: totals
            .iter()
            .map(|row| row.iter().map(|&e| e as f64 / bits as f64).collect())
            .collect(),
        bits_simulated: bits,
        seed: setup.seed,
    })
}

/// BER of one burst under one CSI mode.
pub fn scfde_ber(burst: &TrainingBurst, setup: &BerSetup, snr_grid: &[f64], csi: CsiMode) -> Result<BerReport> {
    let scheme = BerScheme {
        label: "ber".into(),
        burst: burst.clone(),
        csi,
    };
    ber_sweep(&[scheme], setup, snr_grid)
}

/// SNR where a BER curve crosses `target`, interpolating `log10(ber)`
/// linearly between grid points. `None` if the curve never crosses.
pub fn snr_at_ber(snr_grid: &[f64], ber: &[f64], target: f64) -> Option<f64> {
    let lt = target.log10();
    snr_grid
        .windows(2)
        .zip(ber.windows(2))
        .find(|(_, b)| b[0] >= target && b[1] < target)
        .map(|(s, b)| {
            if b[1] <= 0.0 {
                return s[1];
            }
            let (l0, l1) = (b[0].log10(), b[1].log10());
            s[0] + (s[1] - s[0]) * (l0 - lt) / (l0 - l1)
        })
}
