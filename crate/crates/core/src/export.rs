//! CSV tables for correlation profiles and sweep reports.
//!
//! Numbers are written in Rust's shortest round-trip form, so reading a
//! table back yields bit-identical values.

use std::io::{Read, Write};

use crate::burst::CorrelationProfile;
use crate::chansim::{BerReport, MseReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

fn db(v: f64) -> f64 {
    10.0 * v.log10()
}

/// `lag_over_T,magnitude`, normalized magnitudes.
pub fn profile_table(profile: &CorrelationProfile) -> CsvTable {
    CsvTable {
        header: vec!["lag_over_T".into(), "magnitude".into()],
        rows: profile
            .lags
            .iter()
            .zip(profile.magnitudes())
            .map(|(&lag, m)| vec![lag / profile.symbol_period, m])
            .collect(),
    }
}

/// `snr_db,<label>_mse_db...,crlb_db`.
pub fn mse_table(report: &MseReport) -> CsvTable {
    let mut header = vec!["snr_db".to_string()];
    header.extend(report.labels.iter().map(|l| format!("{l}_mse_db")));
    header.push("crlb_db".into());
    let rows = report
        .snr_grid
        .iter()
        .enumerate()
        .map(|(k, &snr)| {
            let mut row = vec![snr];
            row.extend(report.mse.iter().map(|m| db(m[k])));
            row.push(db(report.crlb[k]));
            row
        })
        .collect();
    CsvTable { header, rows }
}

/// `snr_db,<label>_ber...`.
pub fn ber_table(report: &BerReport) -> CsvTable {
    let mut header = vec!["snr_db".to_string()];
    header.extend(report.labels.iter().map(|l| format!("{l}_ber")));
    let rows = report
        .snr_grid
        .iter()
        .enumerate()
        .map(|(k, &snr)| {
            let mut row = vec![snr];
            row.extend(report.ber.iter().map(|b| b[k]));
            row
        })
        .collect();
    CsvTable { header, rows }
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::InvalidExperiment(format!("csv: {e}"))
}

pub fn write_table<W: Write>(table: &CsvTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(csv_error)?;
    }
    w.flush().map_err(csv_error)
}

pub fn read_table<R: Read>(input: R) -> Result<CsvTable> {
    let mut r = csv::Reader::from_reader(input);
    let header = r
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.map_err(csv_error)?
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| csv_error(format!("{f:?}: {e}"))))
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(CsvTable { header, rows })
}

pub fn table_to_string(table: &CsvTable) -> Result<String> {
    let mut buf = Vec::new();
    write_table(table, &mut buf)?;
    String::from_utf8(buf).map_err(csv_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn profile_header_and_scaling() {
        let mut p = CorrelationProfile::new(
            vec![0.0, 0.5, 1.0],
            vec![Complex64::new(4.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 0.0)],
        )
        .normalized();
        p.symbol_period = 0.5;
        let t = profile_table(&p);
        assert_eq!(t.header, vec!["lag_over_T", "magnitude"]);
        assert_eq!(t.rows[1], vec![1.0, 0.5]);
        let text = table_to_string(&t).unwrap();
        assert!(text.starts_with("lag_over_T,magnitude\n0,1\n"));
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_table("a,b\n1,x\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(rows in prop::collection::vec(prop::collection::vec(any::<f64>(), 3), 0..20)) {
            let table = CsvTable { header: vec!["a".into(), "b".into(), "c".into()], rows };
            let back = read_table(table_to_string(&table).unwrap().as_bytes()).unwrap();
            prop_assert_eq!(back.header, table.header);
            for (x, y) in back.rows.iter().flatten().zip(table.rows.iter().flatten()) {
                prop_assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
            }
        }
    }
}
