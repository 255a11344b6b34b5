//! Runs a parsed configuration and writes its artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use lkpz_core::diagnostics::csv::{write_diagnostics, write_fits};
use lkpz_core::spectral::snapshot;

use crate::config::{ExperimentConfig, Preset};
use crate::error::{CliError, CliResult};
use crate::kernel::{kernel_table, validate, write_kernel_csv};
use crate::presets::{run_single, RunOutcome};
use crate::report::Report;
use crate::sweep::{sweep_q, write_sweep};

pub struct Execution {
    pub report: Report,
    pub output: PathBuf,
}

impl Execution {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code()
    }
}

fn write_file(path: PathBuf, bytes: &[u8]) -> CliResult<()> {
    fs::write(&path, bytes).map_err(|source| CliError::Write { path, source })
}

fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// `diagnostics.csv`, `fits.csv`, `report.txt` and optional snapshots.
pub fn write_run_outputs(dir: &Path, outcome: &RunOutcome, snapshots: bool) -> CliResult<()> {
    create_dir(dir)?;
    let mut buf = Vec::new();
    write_diagnostics(&mut buf, &outcome.trajectory.records).expect("writing to memory");
    write_file(dir.join("diagnostics.csv"), &buf)?;
    let mut buf = Vec::new();
    write_fits(&mut buf, outcome.fits.iter().map(|(n, f)| (n.as_str(), f))).expect("writing to memory");
    write_file(dir.join("fits.csv"), &buf)?;
    write_file(dir.join("report.txt"), outcome.report.to_string().as_bytes())?;
    if snapshots {
        let snap_dir = dir.join("snapshots");
        create_dir(&snap_dir)?;
        let traj = &outcome.trajectory;
        for (i, (field, record)) in traj.fields.iter().zip(&traj.records).enumerate() {
            snapshot::write(&snap_dir.join(format!("u_{i:03}.bin")), field, Some(record.t))?;
        }
    }
    Ok(())
}

/// Executes the configured preset under `config.output`.
pub fn execute(config: &ExperimentConfig) -> CliResult<Execution> {
    let out = config.output.clone();
    log::info!("{} -> {}", config.preset, out.display());
    create_dir(&out)?;
    let report = match config.preset {
        Preset::SweepQ => {
            let outcome = sweep_q(config, &out)?;
            write_sweep(&out, &outcome)?;
            outcome.report
        }
        Preset::KernelTable => {
            let table = kernel_table(config)?;
            let mut buf = Vec::new();
            write_kernel_csv(&mut buf, &table.values).expect("writing to memory");
            write_file(out.join("kernel.csv"), &buf)?;
            table.report
        }
        Preset::Validate => validate(config)?,
        _ => {
            let outcome = run_single(config)?;
            write_run_outputs(&out, &outcome, config.snapshots)?;
            return Ok(Execution {
                report: outcome.report,
                output: out,
            });
        }
    };
    write_file(out.join("report.txt"), report.to_string().as_bytes())?;
    Ok(Execution { report, output: out })
}
