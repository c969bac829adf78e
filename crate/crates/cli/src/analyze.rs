//! `analyze`: dark-mode and group-velocity sweeps over the polariton parameters.

use std::path::{Path, PathBuf};

use dualpol_core::atomic::{AtomicModel, Control, Probe};
use dualpol_core::constants::mhz_to_rad;
use dualpol_core::polariton::{analytic_dark_mode, build_polariton_matrix, find_dark_mode, group_velocity, PolaritonParams};
use dualpol_core::{Complex64, Error};

use crate::config::{RunConfig, SweepAxis};
use crate::output::write_atomic;
use crate::CliError;

pub const PARAMETERS: [&str; 6] = ["omega", "omega1", "omega2", "omega3", "delta1", "delta3"];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    /// Swept values in MHz, in axis order.
    pub values: Vec<f64>,
    pub darkness: f64,
    /// Dark-mode eigenfrequency, rad/s.
    pub omega: f64,
    /// m/s
    pub v_g: f64,
    /// NaN where the closed form is outside its validity range.
    pub overlap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub axes: Vec<String>,
    pub points: Vec<SweepPoint>,
}

impl Sweep {
    pub fn header(&self) -> String {
        let mut cols: Vec<String> = self.axes.iter().map(|a| format!("{a}_mhz")).collect();
        cols.extend(["darkness", "omega_rad_s", "v_g_m_s", "overlap"].map(String::from));
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for p in &self.points {
            let cells: Vec<String> = p
                .values
                .iter()
                .chain([p.darkness, p.omega, p.v_g, p.overlap].iter())
                .map(|v| format!("{v:.9e}"))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Polariton parameters at the configured peak control strengths.
pub fn base_params(model: &AtomicModel, omega_c_prime: f64, ck: f64) -> PolaritonParams {
    let r = |x: f64| Complex64::new(x, 0.0);
    let det = model.controls.detunings;
    PolaritonParams {
        omega: r(model.control_rabi(Control::Omega)),
        omega1: r(model.control_rabi(Control::Omega1)),
        omega2: r(model.control_rabi(Control::Omega2)),
        omega3: r(model.control_rabi(Control::Omega3)),
        delta1: det.delta1,
        delta3: det.delta3,
        g: model.collective_coupling(Probe::A),
        g_prime: model.collective_coupling(Probe::B),
        omega_c_prime,
        ck,
    }
}

fn set(p: &mut PolaritonParams, name: &str, mhz: f64) {
    let v = mhz_to_rad(mhz);
    match name {
        "omega" => p.omega = Complex64::new(v, 0.0),
        "omega1" => p.omega1 = Complex64::new(v, 0.0),
        "omega2" => p.omega2 = Complex64::new(v, 0.0),
        "omega3" => p.omega3 = Complex64::new(v, 0.0),
        "delta1" => p.delta1 = v,
        "delta3" => p.delta3 = v,
        _ => unreachable!("axis names are validated"),
    }
}

fn axis_values(axis: &SweepAxis) -> Vec<f64> {
    if axis.points == 1 {
        return vec![axis.start_mhz];
    }
    (0..axis.points)
        .map(|k| {
            if k == axis.points - 1 {
                axis.stop_mhz
            } else {
                axis.start_mhz + (axis.stop_mhz - axis.start_mhz) * k as f64 / (axis.points - 1) as f64
            }
        })
        .collect()
}

fn check_axes(axes: &[SweepAxis]) -> Result<(), CliError> {
    if axes.is_empty() {
        return Err(CliError::Validation("analysis.sweep: at least one axis is required".into()));
    }
    let mut total: usize = 1;
    for (i, a) in axes.iter().enumerate() {
        let key = format!("analysis.sweep[{i}]");
        if !PARAMETERS.contains(&a.parameter.as_str()) {
            return Err(CliError::Validation(format!(
                "{key}.parameter: unknown parameter '{}' (expected one of {})",
                a.parameter,
                PARAMETERS.join(", ")
            )));
        }
        if axes[..i].iter().any(|b| b.parameter == a.parameter) {
            return Err(CliError::Validation(format!("{key}.parameter: '{}' is swept twice", a.parameter)));
        }
        if a.points == 0 {
            return Err(CliError::Validation(format!("{key}.points: must be >= 1")));
        }
        if !(a.start_mhz.is_finite() && a.stop_mhz.is_finite()) {
            return Err(CliError::Validation(format!("{key}: start_mhz and stop_mhz must be finite")));
        }
        if a.parameter == "delta3" && !(a.start_mhz > 0.0 && a.stop_mhz > 0.0) {
            return Err(CliError::Validation(format!("{key}: delta3 must stay > 0")));
        }
        total = total.saturating_mul(a.points);
    }
    if total > 1_000_000 {
        return Err(CliError::Validation(format!("analysis.sweep: {total} points exceeds the limit of 1000000")));
    }
    Ok(())
}

/// Evaluates one parameter set.
pub fn evaluate(p: &PolaritonParams) -> Result<(f64, f64, f64, f64), Error> {
    let m = build_polariton_matrix(p)?;
    let found = find_dark_mode(&m)?;
    let v_g = group_velocity(p)?;
    let overlap = match analytic_dark_mode(p) {
        Ok(a) => {
            let o = found.mode.overlap(&a);
            match &found.degenerate_with {
                Some(second) => (o * o + second.overlap(&a).powi(2)).sqrt().min(1.0),
                None => o,
            }
        }
        Err(Error::Validity(_)) => f64::NAN,
        Err(e) => return Err(e),
    };
    Ok((found.mode.darkness, found.mode.omega, v_g, overlap))
}

pub fn sweep(cfg: &RunConfig) -> Result<Sweep, CliError> {
    let a = &cfg.analysis;
    check_axes(&a.sweep)?;
    let omega_c_prime = mhz_to_rad(a.omega_c_prime_mhz);
    let ck = mhz_to_rad(a.ck_mhz);
    if !(omega_c_prime.is_finite() && ck.is_finite()) {
        return Err(CliError::Validation("analysis: omega_c_prime_mhz and ck_mhz must be finite".into()));
    }
    let base = base_params(&cfg.model()?, omega_c_prime, ck);
    let values: Vec<Vec<f64>> = a.sweep.iter().map(axis_values).collect();
    let total: usize = values.iter().map(Vec::len).product();
    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; values.len()];
    for _ in 0..total {
        let mut p = base;
        let vals: Vec<f64> = idx.iter().enumerate().map(|(k, &i)| values[k][i]).collect();
        for (axis, v) in a.sweep.iter().zip(&vals) {
            set(&mut p, &axis.parameter, *v);
        }
        let (darkness, omega, v_g, overlap) =
            evaluate(&p).map_err(|e| CliError::Validation(format!("analysis.sweep at {vals:?} MHz: {e}")))?;
        points.push(SweepPoint { values: vals, darkness, omega, v_g, overlap });
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < values[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(Sweep { axes: a.sweep.iter().map(|x| x.parameter.clone()).collect(), points })
}

pub fn analyze(cfg: &RunConfig, out_dir: &Path) -> Result<(PathBuf, Sweep), CliError> {
    let s = sweep(cfg)?;
    let path = out_dir.join(&cfg.analysis.output);
    write_atomic(&path, s.to_csv().as_bytes())?;
    Ok((path, s))
}
