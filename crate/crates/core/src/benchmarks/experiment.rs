//! Experiment driver and CSV output.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::adaptivity::{afem_loop, AdaptiveHistory};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "level,ndof,ntriangles,estimator,err_energy_rel,err_weighted,efficiency,unreliable,k,alpha,ell,theta,weight_mode,c_omega";

/// One refinement level of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub level: usize,
    pub ndof: usize,
    pub ntriangles: usize,
    /// Square root of the total functional.
    pub estimator: f64,
    pub err_energy_rel: f64,
    pub err_weighted: f64,
    pub efficiency: f64,
    #[serde(serialize_with = "flag")]
    pub unreliable: bool,
    pub k: usize,
    pub alpha: i32,
    pub ell: f64,
    pub theta: f64,
    pub weight_mode: String,
    pub c_omega: f64,
    #[serde(skip)]
    pub relative_residual: f64,
    #[serde(skip)]
    pub formulation_gap: Option<f64>,
}

fn flag<S: Serializer>(value: &bool, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u8(u8::from(*value))
}

/// Writes `records` as CSV with a header row.
pub fn write_records<W: Write>(records: &[ConvergenceRecord], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_HEADER.split(','))?;
    for r in records {
        writer.serialize(r)?;
    }
    writer
        .flush()
        .map_err(|e| Error::Csv(csv::Error::from(e)))?;
    Ok(())
}

pub fn write_csv(records: &[ConvergenceRecord], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, file)
}

/// Runs the adaptive loop for `config` and writes its CSV to `config.output`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<AdaptiveHistory> {
    let history = afem_loop(config)?;
    write_csv(&history.records, &config.output)?;
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> ConvergenceRecord {
        ConvergenceRecord {
            level: 2,
            ndof: 100,
            ntriangles: 32,
            estimator: 0.1,
            err_energy_rel: 0.25,
            err_weighted: 1.0 / 3.0,
            efficiency: 0.3,
            unreliable: true,
            k: 0,
            alpha: -1,
            ell: 10.0,
            theta: 0.5,
            weight_mode: "friedrichs".into(),
            c_omega: 1.5,
            relative_residual: 1e-3,
            formulation_gap: None,
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_records(&[record()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "2,100,32,0.1,0.25,0.3333333333333333,0.3,1,0,-1,10.0,0.5,friedrichs,1.5"
        );
        assert!(lines.next().is_none());
    }
}
