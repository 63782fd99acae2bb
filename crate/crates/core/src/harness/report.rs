//! Per-size summaries and their CSV form.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::fit::{fit_power_law, PowerFit};
use super::stats::{wilson_interval, Z95, Z99};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "n",
    "trials",
    "singular_count",
    "p_hat",
    "wilson95_lo",
    "wilson95_hi",
    "wilson99_lo",
    "wilson99_hi",
    "mean_deficiency",
    "bound_value",
];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub normal: u64,
    pub abnormal: u64,
    pub perfect: u64,
    pub imperfect: u64,
    /// Trials whose classification ran out of subset budget.
    pub unclassified: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessStats {
    /// Sample mean of `X_n`.
    pub mean: f64,
    pub ci99: (f64, f64),
    /// Counts of rank increments 0, 1, 2 on the step into size `n`.
    pub increments: [u64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    /// Number of trials by count of isolated vertices.
    pub isolated: BTreeMap<usize, u64>,
    /// Trials with an isolated vertex yet full rank (must stay zero).
    pub zero_row_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeRow {
    pub n: usize,
    pub trials: u64,
    pub singular_count: u64,
    pub p_hat: f64,
    pub wilson95: (f64, f64),
    pub wilson99: (f64, f64),
    pub mean_deficiency: f64,
    pub bound_value: Option<f64>,
    /// Number of trials by rank deficiency.
    pub deficiency: BTreeMap<usize, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<ClassCounts>,
}

impl SizeRow {
    pub fn from_deficiencies(n: usize, deficiency: BTreeMap<usize, u64>, bound_value: Option<f64>) -> Self {
        let trials: u64 = deficiency.values().sum();
        let singular_count: u64 = deficiency.iter().filter(|(d, _)| **d > 0).map(|(_, c)| c).sum();
        let total_def: u128 = deficiency.iter().map(|(d, c)| *d as u128 * *c as u128).sum();
        SizeRow {
            n,
            trials,
            singular_count,
            p_hat: singular_count as f64 / trials as f64,
            wilson95: wilson_interval(singular_count, trials, Z95),
            wilson99: wilson_interval(singular_count, trials, Z99),
            mean_deficiency: total_def as f64 / trials as f64,
            bound_value,
            deficiency,
            process: None,
            graph: None,
            classes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub config: ExperimentConfig,
    pub rows: Vec<SizeRow>,
    pub fit: Option<PowerFit>,
    pub warnings: Vec<String>,
}

impl SummaryReport {
    pub fn new(config: ExperimentConfig, rows: Vec<SizeRow>) -> Self {
        let mut warnings = Vec::new();
        let zeros: Vec<usize> = rows.iter().filter(|r| r.singular_count == 0).map(|r| r.n).collect();
        if !zeros.is_empty() {
            warnings.push(format!("no singular draws at n = {zeros:?}; excluded from the fit"));
        }
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.p_hat)).collect();
        let fit = match fit_power_law(&points) {
            Ok(f) => Some(f),
            Err(e) => {
                warnings.push(format!("no rate fit: {e}"));
                None
            }
        };
        SummaryReport { config, rows, fit, warnings }
    }

    pub fn row(&self, n: usize) -> Option<&SizeRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.trials.to_string(),
                r.singular_count.to_string(),
                r.p_hat.to_string(),
                r.wilson95.0.to_string(),
                r.wilson95.1.to_string(),
                r.wilson99.0.to_string(),
                r.wilson99.1.to_string(),
                r.mean_deficiency.to_string(),
                r.bound_value.map(|b| b.to_string()).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// `(n, p_hat)` pairs from a CSV with the report header.
pub fn read_rate_points<R: std::io::Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name}")))
    };
    let (cn, cp) = (col("n")?, col("p_hat")?);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let parse = |k: usize| {
            rec.get(k)
                .unwrap_or("")
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{:?}: {e}", rec.get(k))))
        };
        out.push((parse(cn)?, parse(cp)?));
    }
    Ok(out)
}
