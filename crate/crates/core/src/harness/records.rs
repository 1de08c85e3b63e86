//! CSV run records, JSON manifests and output-directory resolution.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::sweep::{RunRecord, SweepOutcome};

/// Column order of record files.
pub const HEADER: [&str; 16] = [
    "experiment_id",
    "lambda",
    "norm",
    "exponent_target",
    "slope",
    "pass",
    "config_hash",
    "seed",
    "slack",
    "grid_points",
    "quadrature_nodes",
    "saturator_index",
    "constant_norm",
    "net_counts",
    "omega_estimates",
    "shell_constants",
];

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "SIMSAT_OUTPUT_DIR";

fn join<T: Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn split<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|x| x.parse().map_err(|_| format!("bad list entry {x:?}")))
        .collect()
}

fn row(r: &RunRecord) -> Vec<String> {
    vec![
        r.experiment_id.clone(),
        r.lambda.to_string(),
        r.norm.to_string(),
        r.exponent_target.to_string(),
        r.slope.to_string(),
        r.pass.to_string(),
        r.config_hash.clone(),
        r.seed.to_string(),
        r.slack.to_string(),
        r.grid_points.to_string(),
        join(&r.quadrature_nodes),
        r.saturator_index.to_string(),
        r.constant_norm.to_string(),
        join(&r.net_counts),
        join(&r.omega_estimates),
        join(&r.shell_constants),
    ]
}

/// Writes records with the fixed header. Floats use their shortest exact
/// decimal form, so reading the file back reproduces every value.
pub fn write_records<W: std::io::Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_file(path: &Path, records: &[RunRecord]) -> Result<()> {
    write_records(std::fs::File::create(path)?, records)
}

fn parse_record(fields: &csv::StringRecord) -> std::result::Result<RunRecord, String> {
    if fields.len() != HEADER.len() {
        return Err(format!("{} fields, expected {}", fields.len(), HEADER.len()));
    }
    fn num<T: FromStr>(fields: &csv::StringRecord, i: usize) -> std::result::Result<T, String> {
        fields[i]
            .parse()
            .map_err(|_| format!("column {} has bad value {:?}", HEADER[i], &fields[i]))
    }
    Ok(RunRecord {
        experiment_id: fields[0].to_string(),
        lambda: num(fields, 1)?,
        norm: num(fields, 2)?,
        exponent_target: num(fields, 3)?,
        slope: num(fields, 4)?,
        pass: num(fields, 5)?,
        config_hash: fields[6].to_string(),
        seed: num(fields, 7)?,
        slack: num(fields, 8)?,
        grid_points: num(fields, 9)?,
        quadrature_nodes: split(&fields[10])?,
        saturator_index: num(fields, 11)?,
        constant_norm: num(fields, 12)?,
        net_counts: split(&fields[13])?,
        omega_estimates: split(&fields[14])?,
        shell_constants: split(&fields[15])?,
    })
}

/// Reads records written by [`write_records`]. `name` labels errors, which
/// carry the 1-based line number.
pub fn read_records<R: std::io::Read>(input: R, name: &str) -> Result<Vec<RunRecord>> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let parse_err = |line: u64, message: String| Error::Parse {
        path: name.to_string(),
        line,
        message,
    };
    let mut out = Vec::new();
    let mut saw_header = false;
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 {
            if rec.iter().ne(HEADER.iter().copied()) {
                return Err(parse_err(line, "unexpected header".into()));
            }
            saw_header = true;
            continue;
        }
        out.push(parse_record(&rec).map_err(|m| parse_err(line, m))?);
    }
    if !saw_header {
        return Err(parse_err(1, "missing header".into()));
    }
    Ok(out)
}

pub fn read_records_file(path: &Path) -> Result<Vec<RunRecord>> {
    read_records(std::fs::File::open(path)?, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub hash: String,
    pub seed: u64,
    pub slope: f64,
    pub pass: bool,
    pub constant_spread: Option<f64>,
    /// File name of the records, relative to the manifest.
    pub records: String,
}

/// Command-line directory, then the environment, then the configuration,
/// then the working directory.
pub fn resolve_output_dir(cli: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Writes `<id>.csv` and `<id>.manifest.json` into `dir`, returning both paths.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, outcome: &SweepOutcome) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_name = format!("{}.csv", cfg.experiment_id);
    let csv_path = dir.join(&csv_name);
    write_records_file(&csv_path, &outcome.records)?;
    let manifest = Manifest {
        config: cfg.clone(),
        hash: cfg.hash(),
        seed: cfg.seed,
        slope: outcome.slope,
        pass: outcome.pass,
        constant_spread: outcome.constant_spread,
        records: csv_name,
    };
    let manifest_path = dir.join(format!("{}.manifest.json", cfg.experiment_id));
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok((csv_path, manifest_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(lambda: f64) -> RunRecord {
        RunRecord {
            experiment_id: "demo".into(),
            lambda,
            norm: 0.1 + 1.0 / 3.0 / lambda,
            exponent_target: -1.0,
            slope: -0.987_654_321_012_345_6,
            pass: true,
            config_hash: "ab".repeat(32),
            seed: 42,
            slack: 0.15,
            grid_points: 91,
            quadrature_nodes: vec![192, 200],
            saturator_index: 3,
            constant_norm: std::f64::consts::PI / 7.0,
            net_counts: vec![12, 0, 5],
            omega_estimates: vec![1e-3, 0.0, 2.5e-17],
            shell_constants: vec![],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let recs = vec![sample(16.0), sample(32.0)];
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("experiment_id,lambda,norm,exponent_target,slope,pass,"));
        assert_eq!(read_records(buf.as_slice(), "mem").unwrap(), recs);
    }

    #[test]
    fn empty_list_is_header_only() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().count(), 1);
        assert!(read_records(buf.as_slice(), "mem").unwrap().is_empty());
        assert!(read_records("".as_bytes(), "mem").is_err());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let mut buf = Vec::new();
        write_records(&mut buf, &[sample(16.0)]).unwrap();
        let mut text = String::from_utf8(buf).unwrap();
        text.push_str("demo,not-a-number\n");
        match read_records(text.as_bytes(), "f.csv") {
            Err(Error::Parse { path, line, .. }) => {
                assert_eq!(path, "f.csv");
                assert_eq!(line, 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_records("a,b\n".as_bytes(), "x"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn cli_directory_wins() {
        let mut cfg = crate::harness::config::bilinear_transversal();
        cfg.output_dir = Some("from_config".into());
        assert_eq!(resolve_output_dir(Some(Path::new("cli")), &cfg), PathBuf::from("cli"));
    }
}
