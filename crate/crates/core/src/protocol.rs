//! Pulse shapes, the six storage/retrieval presets, and post-run memory metrics.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::atomic::{AtomicModel, Control, Probe};
use crate::dynamics::StepControl;
use crate::propagation::{co_integrate, CoState, Grid, Schedule, SimulationFailure, StepObserver, TimeSeries};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PulseShape {
    /// amplitude·exp(−(t − t0)²/(2σ²))
    Gaussian { t0: f64, sigma: f64, amplitude: f64 },
    /// amplitude/(1 + exp((t − t_off)/σ_t))
    SigmoidOff { t_off: f64, sigma_t: f64, amplitude: f64 },
    /// amplitude/(1 + exp(−(t − t_on)/σ_t))
    SigmoidOn { t_on: f64, sigma_t: f64, amplitude: f64 },
    Constant { amplitude: f64 },
    /// Write/read gate: on before `t_off` and after `t_on`, off in between.
    /// Evaluates 1 − (1 − f_off)(1 − f_on) = f_off + f_on − f_off·f_on.
    Product { t_off: f64, t_on: f64, sigma_t: f64, amplitude: f64 },
}

/// 1/(1 + e^{−x}) without overflow.
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl PulseShape {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PulseShape::Gaussian { t0, sigma, amplitude } => sigma > 0.0 && t0.is_finite() && amplitude.is_finite(),
            PulseShape::SigmoidOff { t_off: t, sigma_t, amplitude } | PulseShape::SigmoidOn { t_on: t, sigma_t, amplitude } => {
                sigma_t > 0.0 && t.is_finite() && amplitude.is_finite()
            }
            PulseShape::Constant { amplitude } => amplitude.is_finite(),
            PulseShape::Product { t_off, t_on, sigma_t, amplitude } => {
                sigma_t > 0.0 && t_off.is_finite() && t_on.is_finite() && amplitude.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("invalid pulse shape {self:?}")))
        }
    }
}

pub fn envelope(shape: &PulseShape, t: f64) -> f64 {
    match *shape {
        PulseShape::Gaussian { t0, sigma, amplitude } => {
            let x = (t - t0) / sigma;
            amplitude * (-0.5 * x * x).exp()
        }
        PulseShape::SigmoidOff { t_off, sigma_t, amplitude } => amplitude * logistic(-(t - t_off) / sigma_t),
        PulseShape::SigmoidOn { t_on, sigma_t, amplitude } => amplitude * logistic((t - t_on) / sigma_t),
        PulseShape::Constant { amplitude } => amplitude,
        PulseShape::Product { t_off, t_on, sigma_t, amplitude } => {
            let off = logistic(-(t - t_off) / sigma_t);
            let on = logistic((t - t_on) / sigma_t);
            amplitude * (off + on - off * on)
        }
    }
}

/// Subset of the four controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ControlSet([bool; 4]);

impl ControlSet {
    pub fn of(controls: &[Control]) -> Self {
        let mut s = [false; 4];
        for c in controls {
            s[c.index()] = true;
        }
        Self(s)
    }

    pub fn contains(&self, c: Control) -> bool {
        self.0[c.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = Control> + '_ {
        Control::ALL.into_iter().filter(|c| self.contains(*c))
    }

    /// Write set for the given input mode.
    pub fn write_for(mode: Probe) -> Self {
        match mode {
            Probe::A => Self::of(&[Control::Omega3, Control::Omega]),
            Probe::B => Self::of(&[Control::Omega3, Control::Omega1, Control::Omega2]),
        }
    }

    /// The three allowed read sets.
    pub fn read_sets() -> [Self; 3] {
        [
            Self::of(&[Control::Omega3, Control::Omega]),
            Self::of(&[Control::Omega3, Control::Omega1, Control::Omega2]),
            Self::of(&Control::ALL),
        ]
    }

    /// Probe modes that can be retrieved with this read set.
    pub fn enables(&self, mode: Probe) -> bool {
        match mode {
            Probe::A => self.contains(Control::Omega),
            Probe::B => self.contains(Control::Omega1) && self.contains(Control::Omega2),
        }
    }
}

impl fmt::Display for ControlSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(Control::name).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3a,
    Fig3b,
    Fig3c,
}

impl Preset {
    pub const ALL: [Preset; 6] = [Preset::Fig2a, Preset::Fig2b, Preset::Fig2c, Preset::Fig3a, Preset::Fig3b, Preset::Fig3c];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig2c => "fig2c",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig3c => "fig3c",
        }
    }

    pub fn input_mode(self) -> Probe {
        match self {
            Preset::Fig2a | Preset::Fig2b | Preset::Fig2c => Probe::A,
            _ => Probe::B,
        }
    }

    pub fn read_controls(self) -> ControlSet {
        let [a, b, all] = ControlSet::read_sets();
        match self {
            Preset::Fig2a | Preset::Fig3b => a,
            Preset::Fig2b | Preset::Fig3a => b,
            Preset::Fig2c | Preset::Fig3c => all,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let key = key.strip_prefix("fig").unwrap_or(&key);
        Preset::ALL
            .into_iter()
            .find(|p| &p.name()[3..] == key)
            .ok_or_else(|| Error::Validation(format!("unknown preset '{s}' (expected fig2a..fig3c)")))
    }
}

/// Timing of a run, s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    pub t0: f64,
    pub sigma: f64,
    pub t_off: f64,
    pub t_on: f64,
    pub sigma_t: f64,
    pub t_end: f64,
}

impl Default for Timing {
    fn default() -> Self {
        Self { t0: 4.3e-6, sigma: 0.5e-6, t_off: 5.0e-6, t_on: 13.0e-6, sigma_t: 0.1e-6, t_end: 20e-6 }
    }
}

impl Timing {
    /// Storage window with a 5σ_t guard band on either side.
    pub fn storage_window(&self) -> (f64, f64) {
        (self.t_off + 5.0 * self.sigma_t, self.t_on - 5.0 * self.sigma_t)
    }
}

/// Peak probe power for each input mode, W.
pub fn default_probe_power(mode: Probe) -> f64 {
    match mode {
        Probe::A => 280e-12,
        Probe::B => 160e-12,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub input_mode: Probe,
    pub write_controls: ControlSet,
    pub read_controls: ControlSet,
    pub timing: Timing,
    /// W
    pub probe_peak_power: f64,
    /// Hold every used control at full strength for the whole run.
    pub continuous_controls: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScenarioOverrides {
    pub read_controls: Option<ControlSet>,
    pub timing: Option<Timing>,
    pub probe_peak_power: Option<f64>,
    pub continuous_controls: Option<bool>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.write_controls != ControlSet::write_for(self.input_mode) {
            return Err(Error::Validation(format!(
                "scenario.write_controls {} does not match input mode {:?}",
                self.write_controls, self.input_mode
            )));
        }
        if !ControlSet::read_sets().contains(&self.read_controls) {
            return Err(Error::Validation(format!(
                "scenario.read_controls {} is not one of the allowed read sets",
                self.read_controls
            )));
        }
        let t = &self.timing;
        let all = [t.t0, t.sigma, t.t_off, t.t_on, t.sigma_t, t.t_end];
        if all.iter().any(|v| !v.is_finite()) || !(t.sigma > 0.0) || !(t.sigma_t > 0.0) {
            return Err(Error::Validation("scenario.timing: sigma and sigma_t must be > 0".into()));
        }
        if !(t.t_end > 0.0) {
            return Err(Error::Validation("scenario.timing.t_end must be > 0".into()));
        }
        if !(t.t_off < t.t_on) {
            return Err(Error::Validation("scenario.timing: t_off must precede t_on".into()));
        }
        if !(self.probe_peak_power >= 0.0 && self.probe_peak_power.is_finite()) {
            return Err(Error::Validation("scenario.probe_peak_power must be >= 0".into()));
        }
        Ok(())
    }

    pub fn control_shape(&self, c: Control) -> PulseShape {
        let (w, r) = (self.write_controls.contains(c), self.read_controls.contains(c));
        let t = &self.timing;
        if self.continuous_controls {
            return PulseShape::Constant { amplitude: if w || r { 1.0 } else { 0.0 } };
        }
        match (w, r) {
            (true, true) => PulseShape::Product { t_off: t.t_off, t_on: t.t_on, sigma_t: t.sigma_t, amplitude: 1.0 },
            (true, false) => PulseShape::SigmoidOff { t_off: t.t_off, sigma_t: t.sigma_t, amplitude: 1.0 },
            (false, true) => PulseShape::SigmoidOn { t_on: t.t_on, sigma_t: t.sigma_t, amplitude: 1.0 },
            (false, false) => PulseShape::Constant { amplitude: 0.0 },
        }
    }

    /// Input Gaussian normalized to unit peak.
    pub fn probe_shape(&self) -> PulseShape {
        PulseShape::Gaussian { t0: self.timing.t0, sigma: self.timing.sigma, amplitude: 1.0 }
    }

    pub fn drive(&self, model: &AtomicModel) -> ScenarioDrive {
        ScenarioDrive {
            controls: Control::ALL.map(|c| self.control_shape(c)),
            probe: self.probe_shape(),
            input_mode: self.input_mode,
            peak_field: model.probe_field(self.probe_peak_power),
        }
    }
}

pub fn make_scenario(preset: Preset, overrides: &ScenarioOverrides) -> Result<Scenario> {
    let input_mode = preset.input_mode();
    let s = Scenario {
        input_mode,
        write_controls: ControlSet::write_for(input_mode),
        read_controls: overrides.read_controls.unwrap_or(preset.read_controls()),
        timing: overrides.timing.unwrap_or_default(),
        probe_peak_power: overrides.probe_peak_power.unwrap_or(default_probe_power(input_mode)),
        continuous_controls: overrides.continuous_controls.unwrap_or(false),
    };
    s.validate()?;
    Ok(s)
}

/// Control and probe envelopes of a scenario, evaluated on demand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioDrive {
    pub controls: [PulseShape; 4],
    pub probe: PulseShape,
    pub input_mode: Probe,
    /// V/m
    pub peak_field: f64,
}

impl Schedule for ScenarioDrive {
    fn controls(&self, tau: f64) -> [f64; 4] {
        self.controls.map(|s| envelope(&s, tau))
    }

    fn probe_input(&self, tau: f64) -> [Complex64; 2] {
        let mut out = [Complex64::new(0.0, 0.0); 2];
        out[self.input_mode.index()] = Complex64::new(self.peak_field * envelope(&self.probe, tau), 0.0);
        out
    }
}

/// Runs a scenario from the all-|b⟩ state at τ = 0 to the end of its timing window.
pub fn run_scenario(
    model: &AtomicModel,
    scenario: &Scenario,
    ctrl: &StepControl,
    samples: usize,
    observer: &mut dyn StepObserver,
) -> std::result::Result<TimeSeries, SimulationFailure> {
    let setup = scenario
        .validate()
        .and_then(|_| Grid::new(model.medium.spatial_points, model.medium.length));
    let grid = match setup {
        Ok(g) => g,
        Err(error) => return Err(SimulationFailure { partial: TimeSeries::default(), error }),
    };
    let drive = scenario.drive(model);
    let mut state = CoState::initial(grid, &drive, 0.0);
    co_integrate(model, &mut state, &drive, ctrl, scenario.timing.t_end, samples, observer)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryMetrics {
    /// ∫|𝓔_in|²dτ, V²s/m²
    pub input_energy: f64,
    /// Output energy of both modes in [0, t_on) over the input energy.
    pub leakage: f64,
    /// ∫_{t_on}^{T}|𝓔_m,out|²dτ over the input energy, indexed by [`Probe`].
    pub retrieval_efficiency: [f64; 2],
    /// All output energy of both modes over the input energy.
    pub transmitted_total: f64,
    /// max |ρ_cb(L, τ) − ρ_cb(L, τ_start)| / |ρ_cb(L, τ_start)| over the storage window.
    pub spinwave_plateau_drift: f64,
    /// Largest output amplitude of either mode in the storage window over the input peak.
    pub storage_peak_ratio: f64,
    /// Retrieved energy of mode a over mode b.
    pub splitting_ratio: f64,
    /// Peak time of each retrieved mode after t_on, if any output is present.
    pub retrieval_peak_time: [Option<f64>; 2],
    pub storage_window: (f64, f64),
}

/// ∫_{lo}^{hi} f dτ for samples f(τ_k), trapezoid rule, partial end segments interpolated linearly.
pub fn integrate(tau: &[f64], f: &[f64], lo: f64, hi: f64) -> f64 {
    let mut acc = 0.0;
    for k in 1..tau.len() {
        let (t0, t1) = (tau[k - 1], tau[k]);
        let (a, b) = (t0.max(lo), t1.min(hi));
        if b <= a || t1 <= t0 {
            continue;
        }
        let at = |t: f64| f[k - 1] + (f[k] - f[k - 1]) * (t - t0) / (t1 - t0);
        acc += 0.5 * (at(a) + at(b)) * (b - a);
    }
    acc
}

/// Time of the largest sample in (lo, hi), refined by a parabola through its neighbors.
pub fn peak_time(tau: &[f64], f: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let k = (0..tau.len())
        .filter(|&k| tau[k] > lo && tau[k] < hi)
        .max_by(|&i, &j| f[i].total_cmp(&f[j]))?;
    if f[k] <= 0.0 {
        return None;
    }
    if k == 0 || k + 1 >= tau.len() {
        return Some(tau[k]);
    }
    let (ym, y0, yp) = (f[k - 1], f[k], f[k + 1]);
    let den = ym - 2.0 * y0 + yp;
    let h = 0.5 * (tau[k + 1] - tau[k - 1]);
    if den >= 0.0 {
        return Some(tau[k]);
    }
    Some(tau[k] + 0.5 * h * (ym - yp) / den)
}

pub fn compute_metrics(ts: &TimeSeries, scenario: &Scenario) -> Result<MemoryMetrics> {
    let t = &scenario.timing;
    let Some(&last) = ts.tau.last() else {
        return Err(Error::Validation("time series is empty".into()));
    };
    if last < t.t_end * (1.0 - 1e-12) {
        return Err(Error::Validation(format!(
            "time series is truncated at {last:e} s, expected {:e} s",
            t.t_end
        )));
    }
    let sq = |v: &[f64]| v.iter().map(|x| x * x).collect::<Vec<_>>();
    let input = sq(&ts.input[scenario.input_mode.index()]);
    let out = [sq(&ts.ea), sq(&ts.eb)];
    let t_start = ts.tau[0];
    let input_energy = integrate(&ts.tau, &input, t_start, last);
    let frac = |e: f64| if input_energy > 0.0 { e / input_energy } else { 0.0 };
    let leak: f64 = out.iter().map(|o| integrate(&ts.tau, o, t_start, t.t_on)).sum();
    let retrieved = [integrate(&ts.tau, &out[0], t.t_on, last), integrate(&ts.tau, &out[1], t.t_on, last)];
    let total: f64 = out.iter().map(|o| integrate(&ts.tau, o, t_start, last)).sum();

    let (w0, w1) = t.storage_window();
    let in_window: Vec<usize> = (0..ts.len()).filter(|&k| ts.tau[k] >= w0 && ts.tau[k] <= w1).collect();
    let drift = match in_window.first() {
        None => 0.0,
        Some(&k0) => {
            let r0 = ts.rho_cb[k0];
            let dev = in_window.iter().map(|&k| (ts.rho_cb[k] - r0).abs()).fold(0.0, f64::max);
            if dev == 0.0 {
                0.0
            } else if r0 == 0.0 {
                f64::INFINITY
            } else {
                dev / r0
            }
        }
    };
    let in_peak = ts.input[scenario.input_mode.index()].iter().copied().fold(0.0, f64::max);
    let window_peak = in_window.iter().map(|&k| ts.ea[k].max(ts.eb[k])).fold(0.0, f64::max);
    let storage_peak_ratio = if in_peak > 0.0 { window_peak / in_peak } else { 0.0 };
    let splitting_ratio = if retrieved[1] > 0.0 {
        retrieved[0] / retrieved[1]
    } else if retrieved[0] > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    };
    let peak = |v: &[f64]| peak_time(&ts.tau, v, t.t_on, f64::INFINITY);
    Ok(MemoryMetrics {
        input_energy,
        leakage: frac(leak),
        retrieval_efficiency: [frac(retrieved[0]), frac(retrieved[1])],
        transmitted_total: frac(total),
        spinwave_plateau_drift: drift,
        storage_peak_ratio,
        splitting_ratio,
        retrieval_peak_time: [peak(&ts.ea), peak(&ts.eb)],
        storage_window: (w0, w1),
    })
}
