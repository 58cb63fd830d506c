use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cpm_gcp::builtins::{self, Builtin};
use cpm_gcp::chansim::snr_at_ber;
use cpm_gcp::experiment::{self, PERFECT_CSI};
use cpm_gcp::export::{ber_table, mse_table, write_table, CsvTable};
use cpm_gcp::gcp::{aacf, davis_jedwab_pair, gcp_defect, GbfSpec};

mod config;

use config::Settings;

const AUTOCORR_SOURCES: &str = "diff:gcp1,diff:gcp2,diff:gsm,unc:gcp1,unc:gcp2,unc:gsm";
const MSE_SOURCES: &str =
    "diff:gcp1,diff:gcp2,diff:gsm,diff:hp,unc:gcp1,unc:gcp2,unc:gsm,unc:hp,unc:random:1";
const BER_SOURCES: &str = "diff:gcp1,diff:gcp2,diff:gsm";

#[derive(Parser)]
#[command(name = "cpmgcp", version, about = "GMSK training waveforms from Golay complementary pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Shared {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Training source such as `diff:gcp1` or `unc:random:7` (repeatable).
    #[arg(long = "source")]
    sources: Vec<String>,
    /// SNR grid in dB: `start:step:stop` or a comma-separated list.
    #[arg(long)]
    snr: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a Davis-Jedwab pair and its complementarity defect.
    Gcp(Shared),
    /// Normalized sum correlation of each training burst.
    Autocorr(Shared),
    /// LS channel-estimation MSE against the CRLB.
    Mse(Shared),
    /// SC-FDE bit error rate with estimated and perfect CSI.
    Ber(Shared),
    /// Check a builtin sequence.
    Verify { builtin: String },
    /// Run the experiment named by the config file's `experiment` key.
    Run(Shared),
}

fn settings(shared: &Shared, experiment: &str) -> Result<Settings> {
    let mut s = Settings::load(shared.config.as_deref())?;
    if let Some(e) = s.get("experiment") {
        if e != experiment {
            bail!("config names experiment {e:?} but {experiment:?} was requested");
        }
    }
    s.set("seed", shared.seed.map(|v| v.to_string()));
    s.set("trials", shared.trials.map(|v| v.to_string()));
    s.set("out", shared.out.as_ref().map(|p| p.display().to_string()));
    s.set("snr", shared.snr.clone());
    if !shared.sources.is_empty() {
        s.set("sources", Some(shared.sources.join(",")));
    }
    Ok(s)
}

fn write_csv(table: &CsvTable, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_table(table, &mut w)?;
    w.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_gcp(s: &Settings) -> Result<()> {
    let (q, nu, perm, coeffs, c, c_prime) = s.gbf()?;
    let spec = GbfSpec::new(q, nu, perm, coeffs, c, c_prime)?;
    let pair = davis_jedwab_pair(&spec);
    println!("{} / {}", pair.a(), pair.b());
    println!("length {}  defect {}", pair.len(), gcp_defect(&pair));
    if let Some(out) = s.get("out") {
        std::fs::write(out, format!("{}\n{}\n", pair.a(), pair.b()))
            .with_context(|| format!("writing {out}"))?;
        println!("wrote {out}");
    }
    Ok(())
}

fn run_autocorr(s: &Settings) -> Result<()> {
    let params = s.params()?;
    let entries = experiment::run_autocorr(&s.sources(AUTOCORR_SOURCES)?, &params, s.route()?)?;
    println!("{:<14} {:>14} {:>8}", "source", "peak sidelobe", "blocks");
    for e in &entries {
        println!(
            "{:<14} {:>14.6} {:>8}",
            e.label,
            e.sidelobe_peak,
            if e.single { 1 } else { 2 }
        );
    }
    write_csv(&experiment::autocorr_table(&entries)?, &s.out("autocorr.csv"))
}

fn run_mse(s: &Settings) -> Result<()> {
    let params = s.params()?;
    let grid = s.snr_grid("0:5:25")?;
    let report = experiment::run_mse(
        &s.sources(MSE_SOURCES)?,
        &params,
        s.taps()?,
        &grid,
        s.trials(10_000)?,
        s.seed()?,
    )?;
    let high = grid.iter().copied().filter(|&v| v >= 15.0).fold(f64::NAN, f64::min);
    let from = if high.is_nan() { grid[grid.len() - 1] } else { high };
    println!("{:<14} {:>18} {:>12} {:>10}", "source", "dB from CRLB", "condition", "deficient");
    for (i, label) in report.labels.iter().enumerate() {
        let d = report.diagnostics[i];
        println!(
            "{:<14} {:>18.2} {:>12.3e} {:>10}",
            label,
            report.gap_db(i, from),
            d.condition,
            d.rank_deficient
        );
    }
    println!("(gap averaged over SNR >= {from} dB, {} trials)", report.trials);
    write_csv(&mse_table(&report), &s.out("mse.csv"))
}

fn run_ber(s: &Settings) -> Result<()> {
    let params = s.params()?;
    let grid = s.snr_grid("0:2:30")?;
    let report = experiment::run_ber(
        &s.sources(BER_SOURCES)?,
        &params,
        s.taps()?,
        s.payload_len()?,
        &grid,
        s.trials(1000)?,
        s.seed()?,
    )?;
    let target = 1e-3;
    let perfect = report
        .index_of(PERFECT_CSI)
        .and_then(|i| snr_at_ber(&grid, &report.ber[i], target));
    println!("{:<14} {:>16} {:>14}", "scheme", "SNR @ BER 1e-3", "gap (dB)");
    for (i, label) in report.labels.iter().enumerate() {
        let at = snr_at_ber(&grid, &report.ber[i], target);
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
        let gap = at.zip(perfect).map(|(a, p)| a - p);
        println!("{:<14} {:>16} {:>14}", label, fmt(at), fmt(gap));
    }
    println!("({} bits per point)", report.bits_simulated);
    write_csv(&ber_table(&report), &s.out("ber.csv"))
}

fn run_verify(name: &str) -> Result<()> {
    let b: Builtin = name.parse()?;
    let seqs = b.sequences();
    for (text, seq) in b.printed().iter().zip(&seqs) {
        println!("{text}  (length {})", seq.len());
    }
    if let Some(spec) = b.spec() {
        let pair = davis_jedwab_pair(&spec);
        println!("complementary pair, defect {}", gcp_defect(&pair));
    } else {
        let r = aacf(&seqs[0].to_unit_circle())?;
        let n = seqs[0].len() as isize;
        let (peak_lag, peak) = (1..n)
            .map(|k| (k, r.at(k).norm()))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        println!("aperiodic autocorrelation: peak sidelobe {peak} at shift {peak_lag} (main lobe {n})");
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<ExitCode> {
    builtins::self_check()?;
    match command {
        Command::Gcp(sh) => run_gcp(&settings(&sh, "gcp")?)?,
        Command::Autocorr(sh) => run_autocorr(&settings(&sh, "autocorr")?)?,
        Command::Mse(sh) => run_mse(&settings(&sh, "mse")?)?,
        Command::Ber(sh) => run_ber(&settings(&sh, "ber")?)?,
        Command::Verify { builtin } => run_verify(&builtin)?,
        Command::Run(sh) => {
            let loaded = Settings::load(sh.config.as_deref())?;
            let name = loaded.get("experiment").unwrap_or("").to_string();
            match name.as_str() {
                "gcp" => run_gcp(&settings(&sh, "gcp")?)?,
                "autocorr" => run_autocorr(&settings(&sh, "autocorr")?)?,
                "mse" => run_mse(&settings(&sh, "mse")?)?,
                "ber" => run_ber(&settings(&sh, "ber")?)?,
                other => {
                    eprintln!("error: unknown experiment {other:?} (expected gcp, autocorr, mse or ber)");
                    return Ok(ExitCode::from(2));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
