//! Experiment driver for `lpdde`: JSON configs in, CSV tables and certificate
//! summaries out.

pub mod config;
pub mod csv;
pub mod experiments;

use std::path::Path;

use anyhow::Result;

use crate::csv::Table;
use crate::experiments::Outcome;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CERTIFICATE_FAILED: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
}

/// One line per certificate, in experiment order.
pub fn summary_table(outcomes: &[Outcome]) -> Table {
    let mut t = Table::new(["experiment", "claim", "bound", "measured", "status"]);
    for o in outcomes {
        for c in &o.certificates {
            t.push(vec![
                o.name.as_str().into(),
                c.claim.as_str().into(),
                c.bound.into(),
                c.measured.into(),
                if c.passed { "PASS" } else { "FAIL" }.into(),
            ]);
        }
    }
    t
}

/// Writes one CSV per experiment plus `summary.csv`.
pub fn write_outputs(dir: &Path, outcomes: &[Outcome]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for o in outcomes {
        o.table.write(&dir.join(&o.file))?;
    }
    summary_table(outcomes).write(&dir.join("summary.csv"))?;
    Ok(())
}
