//! `figures`: one SVG (plus CSV, metrics and manifest) per preset panel.

use std::path::{Path, PathBuf};

use dualpol_core::protocol::Preset;

use crate::config::RunConfig;
use crate::csv;
use crate::plot::write_panel;
use crate::simulate::simulate;
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct PanelFiles {
    pub panel: Preset,
    pub svg: PathBuf,
    pub csv: PathBuf,
}

/// Runs `panel` with the rest of `cfg` unchanged and renders it.
pub fn render_panel(cfg: &RunConfig, panel: Preset, out_dir: &Path) -> Result<PanelFiles, CliError> {
    let mut c = cfg.clone();
    let name = panel.name();
    c.scenario.preset = name.into();
    if c.scenario.preset != cfg.scenario.preset {
        c.scenario.read_controls = None;
        c.scenario.probe_peak_power_pw = None;
    }
    c.output.csv = format!("{name}.csv");
    c.output.metrics = format!("{name}_metrics.toml");
    c.output.manifest = format!("{name}_manifest.toml");
    c.output.plot = false;
    let run = simulate(&c, out_dir, &mut ())?;
    let svg = out_dir.join(format!("{name}.svg"));
    write_panel(&csv::rows(&run.series), name, &svg)?;
    Ok(PanelFiles { panel, svg, csv: run.csv })
}

/// Re-renders a panel from an existing CSV without simulating.
pub fn render_from_csv(csv_path: &Path, title: &str, svg: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(csv_path).map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
    let rows = csv::parse(&text)?;
    write_panel(&rows, title, svg)
}
