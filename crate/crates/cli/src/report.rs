use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Gate {
    /// Passes when `value ≤ tolerance`; NaN never passes.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Gate { name: name.into(), value, tolerance, pass: value <= tolerance }
    }

    /// Passes when `value < tolerance`.
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Gate { name: name.into(), value, tolerance, pass: value < tolerance }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub gates: Vec<Gate>,
    pub seed: u64,
    pub version: String,
}

impl Report {
    pub fn new(gates: Vec<Gate>, seed: u64) -> Self {
        Report { gates, seed, version: env!("CARGO_PKG_VERSION").to_string() }
    }

    pub fn all_pass(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// One CSV line of a sweep: a grid point and one method's estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u32,
    pub tx_snr_db: f64,
    pub rs: f64,
    pub method: String,
    pub sop: Option<f64>,
    pub uncertainty: Option<f64>,
    /// `ok`, or `error: <message>` when the method failed at this point.
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize().map(|row| row.map_err(anyhow::Error::from)).collect()
}
