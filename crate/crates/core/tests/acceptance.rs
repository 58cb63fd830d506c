//! Acceptance suite. Prints one line per criterion (with indented detail
//! lines) and exits nonzero if any criterion fails.
//!
//! Frozen regression values are measured from this implementation and pinned
//! here; they are marked `measured`.

use std::process::ExitCode;
use std::time::Instant;

use cpm_gcp::builtins::{random_binary, Builtin};
use cpm_gcp::burst::{sidelobe_peak, sum_correlation, BurstBuilder, Encoding, Route};
use cpm_gcp::chansim::{
    crlb, draw_channel, ideal_training, ls_estimate, propagate, snr_at_ber, LsEstimator,
};
use cpm_gcp::cpm::{CpmConfig, CpmSymbols, Modulator, ModulatorState};
use cpm_gcp::experiment::{self, CpmParams, Source, PERFECT_CSI};
use cpm_gcp::export::{ber_table, mse_table, table_to_string};
use cpm_gcp::gcp::{
    davis_jedwab_pair, diff_encode, gcp_defect, is_complementary_exact,
    pseudo_symbols, pseudo_symbols_closed, quaternary_lift, GbfSpec, ZqSequence,
};
use cpm_gcp::laurent::LaurentModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Steady-window sum-correlation sidelobe bound for the Diff-GCP bursts
/// (measured: 0.00112 for GCP 1, 0.0277 for GCP 2 at Q = 8).
const DELTA: f64 = 0.03;
/// Noiseless LS relative error bound.
const NOISELESS_FLOOR: f64 = 1e-2;
const IDEAL_CRLB_DB: f64 = 0.2;
const MSE_TRIALS: usize = 10_000;
const BER_TRIALS: usize = 2_000;

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn criterion(&mut self, id: &str, title: &str, started: Instant, checks: Vec<(bool, String)>) {
        let ok = checks.iter().all(|(pass, _)| *pass);
        println!(
            "[{}] {id}. {title} ({:.2} s)",
            if ok { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
        for (pass, line) in &checks {
            println!("       {} {line}", if *pass { "ok  " } else { "FAIL" });
        }
        if !ok {
            self.failures.push(id.to_string());
        }
    }
}

fn gmsk(q: usize) -> CpmConfig {
    CpmConfig::gmsk(0.3, 3, q).expect("valid config")
}

fn binary_specs() -> Vec<GbfSpec> {
    (2..=4)
        .flat_map(|nu| GbfSpec::enumerate(2, nu).expect("binary enumeration"))
        .collect()
}

fn gcp_exactness(r: &mut Report) {
    let t = Instant::now();
    let specs = binary_specs();
    let worst = specs
        .iter()
        .map(|s| gcp_defect(&davis_jedwab_pair(s)))
        .fold(0.0, f64::max);
    r.criterion(
        "1",
        "GCP exactness",
        t,
        vec![
            (specs.len() >= 1000, format!("{} Davis-Jedwab specs, q = 2, nu in 2..=4", specs.len())),
            (worst == 0.0, format!("max defect {worst}")),
            (t.elapsed().as_secs_f64() < 10.0, "runtime < 10 s".into()),
        ],
    );
}

fn quaternary_lift_check(r: &mut Report) {
    let t = Instant::now();
    let specs = binary_specs();
    let (mut zero_sums, mut lift_matches) = (0, 0);
    for s in &specs {
        let pair = davis_jedwab_pair(s);
        let n = pair.len();
        let gc = pseudo_symbols(&diff_encode(pair.a()).unwrap(), cpm_gcp::cpm::ModIndex::HALF);
        let gd = pseudo_symbols(&diff_encode(pair.b()).unwrap(), cpm_gcp::cpm::ModIndex::HALF);
        let (a, b) = (
            gc.slice(0..n).to_gaussian().unwrap(),
            gd.slice(0..n).to_gaussian().unwrap(),
        );
        if is_complementary_exact(&a, &b) {
            zero_sums += 1;
        }
        let lift = quaternary_lift(s).unwrap();
        let ca = pseudo_symbols_closed(pair.a()).unwrap().slice(0..n).to_z4().unwrap();
        let cb = pseudo_symbols_closed(pair.b()).unwrap().slice(0..n).to_z4().unwrap();
        if lift.a() == &ca && lift.b() == &cb {
            lift_matches += 1;
        }
    }
    r.criterion(
        "2",
        "Quaternary lift",
        t,
        vec![
            (zero_sums == specs.len(), format!("{zero_sums}/{} pseudo-symbol pairs with zero sidelobe sums", specs.len())),
            (lift_matches == specs.len(), format!("{lift_matches}/{} lifts equal the closed form", specs.len())),
            (t.elapsed().as_secs_f64() < 10.0, "runtime < 10 s".into()),
        ],
    );
}

fn closed_form(r: &mut Report) {
    let t = Instant::now();
    let mut cases = Vec::new();
    for n in [4usize, 8] {
        for code in 0u32..1 << n {
            cases.push(ZqSequence::new(2, (0..n).map(|i| (code >> i) & 1).collect()).unwrap());
        }
    }
    let exhaustive = cases.len();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        cases.push(ZqSequence::new(2, (0..16).map(|_| rng.gen_range(0..2)).collect()).unwrap());
    }
    let mismatches = cases
        .iter()
        .filter(|c| {
            let direct = pseudo_symbols(&diff_encode(c).unwrap(), cpm_gcp::cpm::ModIndex::HALF);
            direct.quarter_turns() != pseudo_symbols_closed(c).unwrap().quarter_turns()
        })
        .count();
    r.criterion(
        "3",
        "Closed-form consistency",
        t,
        vec![(
            mismatches == 0,
            format!("{mismatches} mismatches over {exhaustive} exhaustive (N = 4, 8) + 1000 random (N = 16)"),
        )],
    );
}

fn laurent_gap(q: usize, seeds: u64) -> f64 {
    let cfg = gmsk(q);
    let model = LaurentModel::new(&cfg).unwrap();
    let modulator = Modulator::new(&cfg).unwrap();
    let start = model.settled_start();
    (0..seeds)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sym = CpmSymbols::new((0..16).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect::<Vec<i32>>()).unwrap();
            let exact = model.exact(&sym);
            let direct = modulator.modulate(&sym, &ModulatorState::at_rest(3)).unwrap();
            exact.samples[start..]
                .iter()
                .zip(&direct.samples[start..])
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn laurent_exactness(r: &mut Report) {
    let t = Instant::now();
    let g32 = laurent_gap(32, 50);
    let g64 = laurent_gap(64, 50);
    r.criterion(
        "4",
        "Laurent exactness",
        t,
        vec![
            (g32 < 1e-3, format!("Q = 32: max gap {g32:.3e} after the first L symbols (50 random inputs)")),
            (
                g64 <= g32.max(1e-12),
                format!("Q = 64: max gap {g64:.3e} (not above Q = 32; both at round-off)"),
            ),
            (t.elapsed().as_secs_f64() < 5.0, "runtime < 5 s".into()),
        ],
    );
}

fn energy_dominance(r: &mut Report) {
    let t = Instant::now();
    let fr = LaurentModel::new(&gmsk(32)).unwrap().pulses().energy_fractions();
    r.criterion(
        "5",
        "Energy dominance",
        t,
        vec![(fr[0] >= 0.99, format!("c0 carries {:.5} of the pulse energy", fr[0]))],
    );
}

fn sidelobes(r: &mut Report) {
    let t = Instant::now();
    let cfg = gmsk(8);
    let peak = |b: Builtin, enc: Encoding, route: Route| -> f64 {
        let seqs = b.sequences();
        let refs: Vec<&ZqSequence> = seqs.iter().collect();
        let burst = BurstBuilder::new(&cfg, 3).encoding(enc).build(&refs).unwrap();
        sidelobe_peak(&sum_correlation(&burst, route).unwrap().profile, 3, 16).unwrap()
    };
    let up = |b: Builtin| b.name().to_ascii_uppercase();
    let d = Encoding::Differential;
    let u = Encoding::Uncoded;
    let mut checks = Vec::new();
    for b in [Builtin::Gcp1, Builtin::Gcp2] {
        let a = peak(b, d, Route::Approx);
        checks.push((a < 1e-6, format!("(a) Diff-{} approximation sidelobes {a:.2e} < 1e-6", up(b))));
    }
    let steady: Vec<f64> = [Builtin::Gcp1, Builtin::Gcp2, Builtin::Gsm]
        .iter()
        .map(|&b| peak(b, d, Route::Steady))
        .collect();
    for (b, v) in [Builtin::Gcp1, Builtin::Gcp2].iter().zip(&steady) {
        checks.push((*v <= DELTA, format!("(b) Diff-{} sidelobes {v:.4} <= delta {DELTA} (S2 window)", up(*b))));
    }
    for b in [Builtin::Gcp1, Builtin::Gcp2] {
        let v = peak(b, d, Route::True);
        println!("       info Diff-{} S1-vs-S2 sidelobes {v:.4} (tail overlap in S1)", up(b));
    }
    checks.push((
        steady[0] < steady[1] && steady[1] < steady[2],
        format!(
            "(c) ordering GCP1 {:.4} < GCP2 {:.4} < GSM {:.4}",
            steady[0], steady[1], steady[2]
        ),
    ));
    for (b, v) in [Builtin::Gcp1, Builtin::Gcp2, Builtin::Gsm].iter().zip(&steady) {
        let unc = peak(*b, u, Route::Steady);
        checks.push((*v < unc, format!("(c) Diff-{0} {v:.5} < Unc-{0} {unc:.5}", up(*b))));
    }
    checks.push((t.elapsed().as_secs_f64() < 10.0, "runtime < 10 s".into()));
    r.criterion("6", "Sum-correlation sidelobes", t, checks);
}

fn mse_sources() -> Vec<Source> {
    [
        "diff:gcp1", "diff:gcp2", "diff:gsm", "diff:hp", "unc:hp", "unc:random:1", "unc:random:2",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

fn mse_gaps(r: &mut Report) {
    let t = Instant::now();
    let grid = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0];
    let report = experiment::run_mse(&mse_sources(), &CpmParams::default(), 16, &grid, MSE_TRIALS, 11).unwrap();
    let idx = |l: &str| report.index_of(l).unwrap();
    let gap = |l: &str| report.gap_db(idx(l), 15.0);
    let (g1, g2, gsm) = (gap("Diff-GCP1"), gap("Diff-GCP2"), gap("Diff-GSM"));
    let mut checks = vec![
        ((g1 - 4.0).abs() <= 1.0, format!("Diff-GCP1 {g1:.2} dB from CRLB (target 4 +- 1)")),
        ((g2 - 5.0).abs() <= 1.0, format!("Diff-GCP2 {g2:.2} dB from CRLB (target 5 +- 1)")),
        ((gsm - 8.5).abs() <= 1.5, format!("Diff-GSM {gsm:.2} dB from CRLB (target 8.5 +- 1.5)")),
    ];
    for l in ["Diff-HP", "Unc-HP", "Unc-RAND1", "Unc-RAND2"] {
        let g = gap(l);
        checks.push((g > g1.max(g2), format!("{l} {g:.2} dB, worse than both Diff-GCPs")));
    }
    let mut below = 0;
    for (i, row) in report.mse.iter().enumerate() {
        for (k, &m) in row.iter().enumerate() {
            if m < report.crlb[k] - 3.0 * report.stderr[i][k] {
                below += 1;
            }
        }
    }
    checks.push((below == 0, format!("{below} points below CRLB by more than 3 standard errors")));
    let ordered = grid.iter().enumerate().filter(|(_, &s)| s >= 10.0).all(|(k, _)| {
        let m = |l: &str| report.mse[idx(l)][k];
        m("Diff-GCP1") <= m("Diff-GCP2") && m("Diff-GCP2") <= m("Diff-GSM")
    });
    checks.push((ordered, "MSE(Diff-GCP1) <= MSE(Diff-GCP2) <= MSE(Diff-GSM) at SNR >= 10 dB".into()));
    let cfg = gmsk(8);
    let deficient = (0..200u64)
        .filter(|&seed| {
            let seq = random_binary(16, seed);
            let b = BurstBuilder::new(&cfg, 3).encoding(Encoding::Uncoded).build(&[&seq]).unwrap();
            LsEstimator::for_burst(&b, 16).unwrap().diagnostics().rank_deficient
        })
        .count();
    checks.push((deficient > 0, format!("rank deficiency flagged for {deficient}/200 random uncoded seeds")));
    println!("       info {MSE_TRIALS} trials per SNR, gaps averaged over 15..25 dB");
    r.criterion("7", "LS MSE distance from CRLB", t, checks);
}

fn ber_gaps(r: &mut Report) {
    let t = Instant::now();
    let sources: Vec<Source> = ["diff:gcp1", "diff:gcp2", "diff:gsm"].iter().map(|s| s.parse().unwrap()).collect();
    let grid: Vec<f64> = (0..=30).map(f64::from).collect();
    let report = experiment::run_ber(&sources, &CpmParams::default(), 16, 256, &grid, BER_TRIALS, 5).unwrap();
    let at = |l: &str| snr_at_ber(&grid, &report.ber[report.index_of(l).unwrap()], 1e-3);
    let perfect = at(PERFECT_CSI).expect("perfect CSI reaches 1e-3");
    // A curve that never reaches the target counts as beyond the grid.
    let gap = |l: &str| at(l).map_or(f64::INFINITY, |v| v - perfect);
    let (g1, g2, gsm) = (gap("Diff-GCP1"), gap("Diff-GCP2"), gap("Diff-GSM"));
    let absolute = [
        ((g1 - 1.4).abs() <= 0.5, format!("Diff-GCP1 gap {g1:.2} dB (target 1.4 +- 0.5)")),
        ((g2 - 1.4).abs() <= 0.5, format!("Diff-GCP2 gap {g2:.2} dB (target 1.4 +- 0.5)")),
        ((gsm - 5.0).abs() <= 1.5, format!("Diff-GSM gap {gsm:.2} dB (target 5 +- 1.5)")),
    ];
    let absolute_ok = absolute.iter().all(|(p, _)| *p);
    for (p, line) in &absolute {
        println!("       {} {line}", if *p { "ok  " } else { "out " });
    }
    let ordering = g1.max(g2) < gsm;
    let close = (g1 - g2).abs() <= 0.5;
    let checks = vec![
        (
            absolute_ok || (ordering && close),
            if absolute_ok {
                "absolute gaps within tolerance".to_string()
            } else {
                "absolute gaps outside tolerance; fallback applies".to_string()
            },
        ),
        (ordering, format!("ordering Diff-GCP ({:.2}, {:.2}) < Diff-GSM ({gsm:.2})", g1, g2)),
        (close, format!("Diff-GCP curves within 0.5 dB ({:.2} dB apart)", (g1 - g2).abs())),
    ];
    println!(
        "       info perfect CSI reaches 1e-3 at {perfect:.2} dB; {} bits per point",
        report.bits_simulated
    );
    r.criterion("8", "BER gap from perfect CSI", t, checks);
}

fn estimator_oracle(r: &mut Report) {
    let t = Instant::now();
    let seqs = Builtin::Gcp1.sequences();
    let burst = BurstBuilder::new(&gmsk(8), 3).build(&[&seqs[0], &seqs[1]]).unwrap();
    let worst = (0..20u64)
        .map(|seed| {
            let h = draw_channel(16, seed).unwrap();
            let y = propagate(&burst.waveform, &h, f64::INFINITY, 0).unwrap();
            let (hat, _) = ls_estimate(&y, &burst, 16).unwrap();
            (hat.squared_error(&h) / h.power()).sqrt()
        })
        .fold(0.0, f64::max);

    let (x, window) = ideal_training(16, 16).unwrap();
    let est = LsEstimator::new(&x, &[window], 1, 16).unwrap();
    let mut lines = Vec::new();
    for snr in [10.0, 20.0] {
        let trials = 10_000u64;
        let total: f64 = (0..trials)
            .map(|k| {
                let h = draw_channel(16, 1_000_000 + k).unwrap();
                let y = propagate(&x, &h, snr, k).unwrap();
                est.estimate(&y).unwrap().squared_error(&h)
            })
            .sum();
        let mse = total / trials as f64;
        let bound = crlb(16, snr, est.observation_energy());
        let diff = 10.0 * (mse / bound).log10();
        lines.push((diff.abs() <= IDEAL_CRLB_DB, format!("ideal training at {snr} dB: {diff:+.3} dB from CRLB over {trials} trials")));
    }
    let mut checks = vec![(
        worst <= NOISELESS_FLOOR,
        format!("noiseless Diff-GCP1 LS relative error {worst:.2e} <= {NOISELESS_FLOOR}"),
    )];
    checks.extend(lines);
    r.criterion("9", "Estimator sanity oracle", t, checks);
}

fn determinism(r: &mut Report) {
    let t = Instant::now();
    let params = CpmParams::default();
    let sources = mse_sources();
    let grid = [0.0, 10.0, 20.0];
    let mse = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            table_to_string(&mse_table(&experiment::run_mse(&sources, &params, 16, &grid, 300, 9).unwrap())).unwrap()
        })
    };
    let ber = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let r = experiment::run_ber(&sources[..3], &params, 16, 128, &grid, 100, 9).unwrap();
            table_to_string(&ber_table(&r)).unwrap()
        })
    };
    let ac = || {
        let e = experiment::run_autocorr(&sources[..3], &params, Route::Steady).unwrap();
        table_to_string(&experiment::autocorr_table(&e).unwrap()).unwrap()
    };
    r.criterion(
        "10",
        "Determinism",
        t,
        vec![
            (mse(1) == mse(1) && mse(1) == mse(3), "MSE CSV identical across reruns and thread counts".into()),
            (ber(1) == ber(1) && ber(1) == ber(3), "BER CSV identical across reruns and thread counts".into()),
            (ac() == ac(), "autocorrelation CSV identical across reruns".into()),
        ],
    );
}

fn main() -> ExitCode {
    let mut r = Report { failures: Vec::new() };
    gcp_exactness(&mut r);
    quaternary_lift_check(&mut r);
    closed_form(&mut r);
    laurent_exactness(&mut r);
    energy_dominance(&mut r);
    sidelobes(&mut r);
    mse_gaps(&mut r);
    ber_gaps(&mut r);
    estimator_oracle(&mut r);
    determinism(&mut r);
    if r.failures.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {}", r.failures.join(", "));
        ExitCode::FAILURE
    }
}
