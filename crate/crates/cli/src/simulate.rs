//! `simulate`: one scenario run to CSV, metrics and manifest.

use std::path::{Path, PathBuf};

use dualpol_core::propagation::{StepObserver, TimeSeries};
use dualpol_core::protocol::{compute_metrics, run_scenario, MemoryMetrics};
use dualpol_core::Error;

use crate::config::RunConfig;
use crate::csv;
use crate::output::{write_atomic, Manifest, MetricsFile, RunStatus, VERSION};
use crate::plot::write_panel;
use crate::{with_workers, CliError};

#[derive(Clone, Debug)]
pub struct SimulateOutput {
    pub csv: PathBuf,
    pub metrics: PathBuf,
    pub manifest: PathBuf,
    pub plot: Option<PathBuf>,
    pub series: TimeSeries,
    pub metrics_value: MemoryMetrics,
}

fn failure_tau(e: &Error, partial: &TimeSeries) -> f64 {
    match e {
        Error::Numerical { tau, .. } if tau.is_finite() => *tau,
        _ => partial.tau.last().copied().unwrap_or(0.0),
    }
}

/// Runs the configured scenario and writes its output bundle into `out_dir`.
///
/// On solver failure the samples computed so far are still written, the manifest records
/// where the run stopped, and the error is returned.
pub fn simulate(
    cfg: &RunConfig,
    out_dir: &Path,
    observer: &mut (dyn StepObserver + Send),
) -> Result<SimulateOutput, CliError> {
    let resolved = cfg.resolve()?;
    let manifest_cfg = cfg.resolved_copy()?;
    let paths = (
        out_dir.join(&cfg.output.csv),
        out_dir.join(&cfg.output.metrics),
        out_dir.join(&cfg.output.manifest),
    );
    log::info!(
        "simulating {} on {} points, dt_max = {:e} s",
        resolved.preset.name(),
        resolved.model.medium.spatial_points,
        resolved.ctrl.dt_max
    );
    let started = std::time::Instant::now();
    let run = with_workers(resolved.workers, || {
        run_scenario(&resolved.model, &resolved.scenario, &resolved.ctrl, resolved.samples, observer)
    })?;
    let manifest = |status: RunStatus| Manifest {
        version: VERSION.into(),
        command: "simulate".into(),
        status,
        config: manifest_cfg.clone(),
    };
    let series = match run {
        Ok(ts) => ts,
        Err(failure) => {
            let tau = failure_tau(&failure.error, &failure.partial);
            write_atomic(&paths.0, csv::write(&csv::rows(&failure.partial)).as_bytes())?;
            let status = RunStatus {
                state: "failed".into(),
                samples_written: failure.partial.len(),
                failed_at_tau_us: Some(tau * 1e6),
                message: Some(failure.error.to_string()),
            };
            write_atomic(&paths.2, manifest(status).to_toml().as_bytes())?;
            log::error!("run failed at tau = {:.6} us: {}", tau * 1e6, failure.error);
            return Err(failure.error.into());
        }
    };
    log::info!(
        "{} accepted / {} rejected steps in {:.1} s",
        series.stats.accepted,
        series.stats.rejected,
        started.elapsed().as_secs_f64()
    );
    let metrics = compute_metrics(&series, &resolved.scenario)?;
    let rows = csv::rows(&series);
    write_atomic(&paths.0, csv::write(&rows).as_bytes())?;
    let mf = MetricsFile::new(resolved.preset.name(), &metrics, series.stats.accepted, series.stats.rejected);
    write_atomic(&paths.1, mf.to_toml().as_bytes())?;
    let status = RunStatus { state: "completed".into(), samples_written: series.len(), failed_at_tau_us: None, message: None };
    write_atomic(&paths.2, manifest(status).to_toml().as_bytes())?;
    let plot = if cfg.output.plot {
        let p = out_dir.join(format!("{}.svg", resolved.preset.name()));
        write_panel(&rows, resolved.preset.name(), &p)?;
        Some(p)
    } else {
        None
    };
    Ok(SimulateOutput { csv: paths.0, metrics: paths.1, manifest: paths.2, plot, series, metrics_value: metrics })
}
