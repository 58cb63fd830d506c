//! `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cpm_gcp::burst::{Encoding, Route};
use cpm_gcp::experiment::{CpmParams, SequenceSource, Source};
use cpm_gcp::gcp::text::parse_sequences;

const KEYS: &[&str] = &[
    "experiment",
    "sources",
    "file",
    "file_encoding",
    "bt",
    "l",
    "z",
    "oversampling",
    "random_len",
    "taps",
    "snr",
    "trials",
    "seed",
    "out",
    "payload_len",
    "route",
    "q",
    "nu",
    "perm",
    "coeffs",
    "c",
    "c_prime",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key = value", no + 1))?;
        let key = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            bail!("config line {}: unknown key {key:?}", no + 1);
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// `a:step:b` (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let grid = if parts.len() == 3 {
        let [a, step, b] = [parts[0], parts[1], parts[2]].map(|p| p.parse::<f64>());
        let (a, step, b) = (a?, step?, b?);
        if step <= 0.0 || b < a {
            bail!("bad SNR range {text:?}");
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        (0..=count).map(|k| a + k as f64 * step).collect()
    } else {
        text.split(',')
            .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad SNR value {v:?}")))
            .collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() {
        bail!("empty SNR grid");
    }
    Ok(grid)
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|v| v.trim().parse::<T>().map_err(|e| anyhow!("{v:?}: {e}")))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub values: BTreeMap<String, String>,
    pub base_dir: PathBuf,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Ok(Settings {
                    values: parse_pairs(&text)?,
                    base_dir: p.parent().map(Path::to_path_buf).unwrap_or_default(),
                })
            }
            None => Ok(Settings {
                values: BTreeMap::new(),
                base_dir: PathBuf::new(),
            }),
        }
    }

    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.values.insert(key.into(), v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            Some(v) => v.parse().map_err(|e| anyhow!("config {key} = {v:?}: {e}")),
            None => Ok(default),
        }
    }

    fn positive(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.parsed(key, default)?;
        if v == 0 {
            bail!("config {key} must be positive");
        }
        Ok(v)
    }

    pub fn params(&self) -> Result<CpmParams> {
        let d = CpmParams::default();
        let bt: f64 = self.parsed("bt", d.bt)?;
        if bt <= 0.0 {
            bail!("config bt must be positive");
        }
        Ok(CpmParams {
            bt,
            pulse_len: self.positive("l", d.pulse_len)?,
            z: self.positive("z", d.z)?,
            oversampling: self.positive("oversampling", d.oversampling)?,
            random_len: self.positive("random_len", d.random_len)?,
        })
    }

    pub fn sources(&self, default: &str) -> Result<Vec<Source>> {
        let mut out: Vec<Source> = match self.get("sources") {
            Some("") => Vec::new(),
            Some(list) => parse_list(list)?,
            None if self.get("file").is_some() => Vec::new(),
            None => parse_list(default)?,
        };
        if let Some(file) = self.get("file") {
            let path = self.base_dir.join(file);
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let seqs = parse_sequences(&text, 2)?;
            if seqs.is_empty() || seqs.len() > 2 {
                bail!("{}: expected one or two sequences, found {}", path.display(), seqs.len());
            }
            let encoding = match self.get("file_encoding").unwrap_or("diff") {
                "diff" => Encoding::Differential,
                "unc" => Encoding::Uncoded,
                other => bail!("config file_encoding = {other:?}: expected diff or unc"),
            };
            let name = Path::new(file)
                .file_stem()
                .map(|s| s.to_string_lossy().to_ascii_uppercase())
                .unwrap_or_else(|| "FILE".into());
            out.push(Source::new(encoding, SequenceSource::Explicit { name, seqs }));
        }
        if out.is_empty() {
            bail!("no training sources configured");
        }
        Ok(out)
    }

    pub fn route(&self) -> Result<Route> {
        match self.get("route").unwrap_or("steady") {
            "true" => Ok(Route::True),
            "steady" => Ok(Route::Steady),
            "approx" => Ok(Route::Approx),
            other => bail!("config route = {other:?}: expected true, steady or approx"),
        }
    }

    pub fn snr_grid(&self, default: &str) -> Result<Vec<f64>> {
        parse_grid(self.get("snr").unwrap_or(default))
    }

    pub fn trials(&self, default: usize) -> Result<usize> {
        self.positive("trials", default)
    }

    pub fn seed(&self) -> Result<u64> {
        self.parsed("seed", 1)
    }

    pub fn taps(&self) -> Result<usize> {
        self.positive("taps", 16)
    }

    pub fn payload_len(&self) -> Result<usize> {
        self.positive("payload_len", 256)
    }

    pub fn out(&self, default: &str) -> PathBuf {
        PathBuf::from(self.get("out").unwrap_or(default))
    }

    /// GBF spec fields: `(q, nu, perm, coeffs, c, c_prime)`.
    pub fn gbf(&self) -> Result<(u32, usize, Vec<usize>, Vec<u32>, u32, u32)> {
        let q = self.parsed("q", 2u32)?;
        let nu = self.positive("nu", 4)?;
        let perm = match self.get("perm") {
            Some(p) => parse_list(p)?,
            None => (1..=nu).collect(),
        };
        let coeffs = match self.get("coeffs") {
            Some(c) => parse_list(c)?,
            None => vec![0; nu],
        };
        Ok((q, nu, perm, coeffs, self.parsed("c", 0)?, self.parsed("c_prime", 0)?))
    }
}
