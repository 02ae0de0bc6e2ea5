//! CSV rendering: UTF-8, LF line endings, header row, `.` decimal point.
//! Floats use Rust's shortest round-trip formatting, so identical values
//! always print identically.

use std::fmt::Write as _;
use std::path::Path;

use super::experiments::{BerResult, ErrorHistResult, MaeResult};
use crate::error::Result;

pub trait CsvTable {
    fn header(&self) -> &'static str;
    fn records(&self) -> Vec<String>;

    fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.header()).unwrap();
        for r in self.records() {
            writeln!(out, "{r}").unwrap();
        }
        out
    }
}

impl CsvTable for MaeResult {
    fn header(&self) -> &'static str {
        "snr_db,L,mae,trials"
    }

    fn records(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| format!("{},{},{},{}", r.snr_db, r.pairs, r.mae, r.trials))
            .collect()
    }
}

impl CsvTable for ErrorHistResult {
    fn header(&self) -> &'static str {
        "epsilon,probability"
    }

    fn records(&self) -> Vec<String> {
        self.pmf().iter().map(|(e, p)| format!("{e},{p}")).collect()
    }
}

impl CsvTable for BerResult {
    fn header(&self) -> &'static str {
        "snr_db,N,ber_no_comp,ber_comp,ber_ideal,bits"
    }

    fn records(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{}",
                    r.snr_db, r.n, r.ber_no_comp, r.ber_comp, r.ber_ideal, r.bits
                )
            })
            .collect()
    }
}

pub fn write_csv(path: &Path, table: &impl CsvTable) -> Result<()> {
    std::fs::write(path, table.to_csv())?;
    Ok(())
}
