//! Run configuration: TOML schema in user units, validation and conversion to SI.
//!
//! Units at the boundary: MHz for detunings, rates and Rabi frequencies (cyclic, Ω/2π),
//! µs for times, mW for control powers, pW for probe power, cm and mm for lengths.

use std::path::PathBuf;

use dualpol_core::atomic::{
    AtomicData, AtomicModel, Control, ControlSettings, Detunings, Field, Level, MediumConfig, Probe, TransitionData,
};
use dualpol_core::constants::{mhz_to_rad, rad_to_mhz};
use dualpol_core::dynamics::StepControl;
use dualpol_core::protocol::{make_scenario, ControlSet, Preset, Scenario, ScenarioOverrides, Timing};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Largest grid step, in units of the resonant absorption length, for which the field march is stable.
pub const MAX_STEP_ABSORPTION: f64 = 3.0;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub medium: MediumSection,
    pub atoms: AtomsSection,
    pub fields: FieldsSection,
    pub scenario: ScenarioSection,
    pub solver: SolverSection,
    pub output: OutputSection,
    pub analysis: AnalysisSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumSection {
    pub density_per_m3: f64,
    pub length_cm: f64,
    pub beam_diameter_mm: f64,
    pub spatial_points: usize,
}

impl Default for MediumSection {
    fn default() -> Self {
        let m = MediumConfig::default();
        Self {
            density_per_m3: m.density,
            length_cm: m.length * 1e2,
            beam_diameter_mm: m.beam_diameter * 1e3,
            spatial_points: m.spatial_points,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub wavelength_nm: f64,
    /// C·m
    pub dipole_coulomb_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionTable {
    pub probe_a: TransitionEntry,
    pub probe_b: TransitionEntry,
    pub omega: TransitionEntry,
    pub omega1: TransitionEntry,
    pub omega2: TransitionEntry,
    pub omega3: TransitionEntry,
}

impl TransitionTable {
    fn entries(&self) -> [(&'static str, &TransitionEntry); 6] {
        [
            ("probe_a", &self.probe_a),
            ("probe_b", &self.probe_b),
            ("omega", &self.omega),
            ("omega1", &self.omega1),
            ("omega2", &self.omega2),
            ("omega3", &self.omega3),
        ]
    }
}

/// Total decay rate Γ/2π of each excited level, MHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayTable {
    pub a: f64,
    pub e: f64,
    pub f: f64,
    pub d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchEntry {
    pub upper: String,
    pub lower: String,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AtomsSection {
    pub transitions: TransitionTable,
    pub decay_mhz: DecayTable,
    pub branching: Vec<BranchEntry>,
}

impl Default for TransitionTable {
    fn default() -> Self {
        AtomsSection::default().transitions
    }
}

impl Default for DecayTable {
    fn default() -> Self {
        AtomsSection::default().decay_mhz
    }
}

impl Default for AtomsSection {
    fn default() -> Self {
        let data = AtomicData::rubidium87();
        let entry = |f: Field| {
            let t = data.transition(f);
            TransitionEntry { wavelength_nm: t.wavelength * 1e9, dipole_coulomb_m: t.dipole }
        };
        let g = |l: Level| rad_to_mhz(data.gamma[l.index()]);
        Self {
            transitions: TransitionTable {
                probe_a: entry(Field::ProbeA),
                probe_b: entry(Field::ProbeB),
                omega: entry(Field::Omega),
                omega1: entry(Field::Omega1),
                omega2: entry(Field::Omega2),
                omega3: entry(Field::Omega3),
            },
            decay_mhz: DecayTable { a: g(Level::A), e: g(Level::E), f: g(Level::F), d: g(Level::D) },
            branching: data
                .branching
                .iter()
                .map(|&(u, l, fraction)| BranchEntry { upper: u.label().into(), lower: l.label().into(), fraction })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlPowers {
    pub omega: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetuningTable {
    pub delta_l: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldsSection {
    pub power_mw: ControlPowers,
    pub detuning_mhz: DetuningTable,
    pub compensate_stark_shift: bool,
    pub enforce_closure: bool,
}

impl Default for ControlPowers {
    fn default() -> Self {
        FieldsSection::default().power_mw
    }
}

impl Default for DetuningTable {
    fn default() -> Self {
        FieldsSection::default().detuning_mhz
    }
}

impl Default for FieldsSection {
    fn default() -> Self {
        let c = ControlSettings::default();
        let p = |k: Control| c.power[k.index()] * 1e3;
        let d = |x: f64| rad_to_mhz(x);
        Self {
            power_mw: ControlPowers {
                omega: p(Control::Omega),
                omega1: p(Control::Omega1),
                omega2: p(Control::Omega2),
                omega3: p(Control::Omega3),
            },
            detuning_mhz: DetuningTable {
                delta_l: d(c.detunings.delta_l),
                delta1: d(c.detunings.delta1),
                delta2: d(c.detunings.delta2),
                delta3: d(c.detunings.delta3),
            },
            compensate_stark_shift: c.compensate_stark_shift,
            enforce_closure: c.enforce_closure,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingTable {
    pub t0: f64,
    pub sigma: f64,
    pub t_off: f64,
    pub t_on: f64,
    pub sigma_t: f64,
    pub t_end: f64,
}

impl Default for TimingTable {
    fn default() -> Self {
        let t = Timing::default();
        let us = |x: f64| x * 1e6;
        Self { t0: us(t.t0), sigma: us(t.sigma), t_off: us(t.t_off), t_on: us(t.t_on), sigma_t: us(t.sigma_t), t_end: us(t.t_end) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub preset: String,
    /// Control names; the preset's read set when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub read_controls: Option<Vec<String>>,
    /// Peak probe power; the preset's value when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_peak_power_pw: Option<f64>,
    pub continuous_controls: bool,
    pub timing_us: TimingTable,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            preset: Preset::Fig2a.name().into(),
            read_controls: None,
            probe_peak_power_pw: None,
            continuous_controls: false,
            timing_us: TimingTable::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_min_us: f64,
    pub dt_max_us: f64,
    pub dt_initial_us: f64,
    pub samples: usize,
    /// Worker threads for the per-point atomic update; 0 uses every core.
    pub workers: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = StepControl::default();
        Self {
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            dt_min_us: c.dt_min * 1e6,
            dt_max_us: c.dt_max * 1e6,
            dt_initial_us: c.dt_initial * 1e6,
            samples: 2000,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub csv: String,
    pub metrics: String,
    pub manifest: String,
    /// Also render the panel plot after `simulate`.
    pub plot: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            csv: "timeseries.csv".into(),
            metrics: "metrics.toml".into(),
            manifest: "manifest.toml".into(),
            plot: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// One of omega, omega1, omega2, omega3, delta1, delta3.
    pub parameter: String,
    pub start_mhz: f64,
    pub stop_mhz: f64,
    pub points: usize,
}

/// Polariton sweep. Unswept Rabi frequencies and detunings come from `fields`; couplings
/// come from `medium` and `atoms`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub output: String,
    pub omega_c_prime_mhz: f64,
    pub ck_mhz: f64,
    pub sweep: Vec<SweepAxis>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            output: "analysis.csv".into(),
            omega_c_prime_mhz: 0.0,
            ck_mhz: 0.0,
            sweep: vec![SweepAxis { parameter: "omega".into(), start_mhz: 0.0, stop_mhz: 20.0, points: 41 }],
        }
    }
}

/// Everything a run needs, in SI units.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub model: AtomicModel,
    pub scenario: Scenario,
    pub preset: Preset,
    pub ctrl: StepControl,
    pub samples: usize,
    pub workers: usize,
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{key}: {msg}"))
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be a positive finite number, got {v}")))
    }
}

fn finite(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be finite, got {v}")))
    }
}

fn level_named(key: &str, s: &str) -> Result<Level, CliError> {
    Level::ALL
        .into_iter()
        .find(|l| l.label() == s)
        .ok_or_else(|| invalid(key, format!("unknown level '{s}' (expected one of b, c, a, e, f, d)")))
}

pub fn control_named(s: &str) -> Option<Control> {
    Control::ALL.into_iter().find(|c| c.name() == s)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.message().trim())))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn medium(&self) -> Result<MediumConfig, CliError> {
        let m = &self.medium;
        let medium = MediumConfig {
            density: positive("medium.density_per_m3", m.density_per_m3)?,
            length: positive("medium.length_cm", m.length_cm)? * 1e-2,
            beam_diameter: positive("medium.beam_diameter_mm", m.beam_diameter_mm)? * 1e-3,
            spatial_points: m.spatial_points,
        };
        medium.validate().map_err(|e| invalid("medium.spatial_points", e))?;
        Ok(medium)
    }

    pub fn atomic_data(&self) -> Result<AtomicData, CliError> {
        let a = &self.atoms;
        let mut transitions = [TransitionData { wavelength: 0.0, dipole: 0.0 }; 6];
        for (i, (name, e)) in a.transitions.entries().into_iter().enumerate() {
            transitions[i] = TransitionData {
                wavelength: positive(&format!("atoms.transitions.{name}.wavelength_nm"), e.wavelength_nm)? * 1e-9,
                dipole: positive(&format!("atoms.transitions.{name}.dipole_coulomb_m"), e.dipole_coulomb_m)?,
            };
        }
        let mut gamma = [0.0; 6];
        for (l, v, key) in [
            (Level::A, a.decay_mhz.a, "atoms.decay_mhz.a"),
            (Level::E, a.decay_mhz.e, "atoms.decay_mhz.e"),
            (Level::F, a.decay_mhz.f, "atoms.decay_mhz.f"),
            (Level::D, a.decay_mhz.d, "atoms.decay_mhz.d"),
        ] {
            gamma[l.index()] = mhz_to_rad(positive(key, v)?);
        }
        let mut branching = Vec::with_capacity(a.branching.len());
        for (i, b) in a.branching.iter().enumerate() {
            let key = format!("atoms.branching[{i}]");
            let upper = level_named(&format!("{key}.upper"), &b.upper)?;
            let lower = level_named(&format!("{key}.lower"), &b.lower)?;
            if !(b.fraction > 0.0 && b.fraction <= 1.0) {
                return Err(invalid(&format!("{key}.fraction"), format!("must be in (0, 1], got {}", b.fraction)));
            }
            branching.push((upper, lower, b.fraction));
        }
        Ok(AtomicData { transitions, gamma, branching })
    }

    pub fn control_settings(&self) -> Result<ControlSettings, CliError> {
        let f = &self.fields;
        let p = &f.power_mw;
        let mut power = [0.0; 4];
        for (c, v) in [(Control::Omega, p.omega), (Control::Omega1, p.omega1), (Control::Omega2, p.omega2), (Control::Omega3, p.omega3)] {
            let key = format!("fields.power_mw.{}", c.name());
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(&key, format!("must be >= 0, got {v}")));
            }
            power[c.index()] = v * 1e-3;
        }
        let d = &f.detuning_mhz;
        let detunings = Detunings {
            delta_l: mhz_to_rad(finite("fields.detuning_mhz.delta_l", d.delta_l)?),
            delta1: mhz_to_rad(finite("fields.detuning_mhz.delta1", d.delta1)?),
            delta2: mhz_to_rad(finite("fields.detuning_mhz.delta2", d.delta2)?),
            delta3: mhz_to_rad(finite("fields.detuning_mhz.delta3", d.delta3)?),
        };
        if f.enforce_closure {
            detunings.check_closure().map_err(|e| invalid("fields.detuning_mhz.delta2", e))?;
        }
        if !(d.delta3 > 0.0) {
            return Err(invalid("fields.detuning_mhz.delta3", format!("must be > 0 (far-detuned dressing), got {}", d.delta3)));
        }
        Ok(ControlSettings {
            power,
            detunings,
            compensate_stark_shift: f.compensate_stark_shift,
            enforce_closure: f.enforce_closure,
        })
    }

    pub fn model(&self) -> Result<AtomicModel, CliError> {
        let model = AtomicModel::new(self.atomic_data()?, self.control_settings()?, self.medium()?)
            .map_err(|e| CliError::Validation(format!("model: {e}")))?;
        let h = model.medium.grid_spacing();
        for p in Probe::ALL {
            let ha = h * model.resonant_absorption(p);
            if ha >= MAX_STEP_ABSORPTION {
                let need = (model.medium.length * model.resonant_absorption(p) / MAX_STEP_ABSORPTION).ceil() as usize + 1;
                return Err(invalid(
                    "medium.spatial_points",
                    format!(
                        "grid step is {ha:.3} absorption lengths for probe {p:?} (must be < {MAX_STEP_ABSORPTION}); use at least {need} points"
                    ),
                ));
            }
        }
        Ok(model)
    }

    pub fn preset(&self) -> Result<Preset, CliError> {
        self.scenario.preset.parse().map_err(|e| invalid("scenario.preset", e))
    }

    pub fn timing(&self) -> Result<Timing, CliError> {
        let t = &self.scenario.timing_us;
        let k = |name: &str| format!("scenario.timing_us.{name}");
        let timing = Timing {
            t0: finite(&k("t0"), t.t0)? * 1e-6,
            sigma: positive(&k("sigma"), t.sigma)? * 1e-6,
            t_off: finite(&k("t_off"), t.t_off)? * 1e-6,
            t_on: finite(&k("t_on"), t.t_on)? * 1e-6,
            sigma_t: positive(&k("sigma_t"), t.sigma_t)? * 1e-6,
            t_end: positive(&k("t_end"), t.t_end)? * 1e-6,
        };
        if !(timing.t_off < timing.t_on) {
            return Err(invalid(&k("t_on"), "must be later than t_off"));
        }
        Ok(timing)
    }

    pub fn scenario(&self) -> Result<(Preset, Scenario), CliError> {
        let preset = self.preset()?;
        let s = &self.scenario;
        let read_controls = match &s.read_controls {
            None => None,
            Some(names) => {
                let mut list = Vec::with_capacity(names.len());
                for n in names {
                    let c = control_named(n).ok_or_else(|| {
                        invalid("scenario.read_controls", format!("unknown control '{n}' (expected omega, omega1, omega2, omega3)"))
                    })?;
                    list.push(c);
                }
                Some(ControlSet::of(&list))
            }
        };
        let probe_peak_power = match s.probe_peak_power_pw {
            None => None,
            Some(v) if v >= 0.0 && v.is_finite() => Some(v * 1e-12),
            Some(v) => return Err(invalid("scenario.probe_peak_power_pw", format!("must be >= 0, got {v}"))),
        };
        let overrides = ScenarioOverrides {
            read_controls,
            timing: Some(self.timing()?),
            probe_peak_power,
            continuous_controls: Some(s.continuous_controls),
        };
        let scenario = make_scenario(preset, &overrides).map_err(|e| {
            let msg = e.to_string();
            if msg.contains("read_controls") {
                invalid("scenario.read_controls", msg)
            } else {
                invalid("scenario", msg)
            }
        })?;
        Ok((preset, scenario))
    }

    pub fn step_control(&self) -> Result<StepControl, CliError> {
        let s = &self.solver;
        let ctrl = StepControl {
            rel_tol: positive("solver.rel_tol", s.rel_tol)?,
            abs_tol: positive("solver.abs_tol", s.abs_tol)?,
            dt_min: positive("solver.dt_min_us", s.dt_min_us)? * 1e-6,
            dt_max: positive("solver.dt_max_us", s.dt_max_us)? * 1e-6,
            dt_initial: positive("solver.dt_initial_us", s.dt_initial_us)? * 1e-6,
        };
        if ctrl.dt_min > ctrl.dt_max {
            return Err(invalid("solver.dt_min_us", "must not exceed dt_max_us"));
        }
        ctrl.validate().map_err(|e| invalid("solver", e))?;
        Ok(ctrl)
    }

    /// Validates every section and converts to SI.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let model = self.model()?;
        let (preset, scenario) = self.scenario()?;
        let ctrl = self.step_control()?;
        if self.solver.samples < 2 {
            return Err(invalid("solver.samples", format!("must be >= 2, got {}", self.solver.samples)));
        }
        for (key, name) in [("output.csv", &self.output.csv), ("output.metrics", &self.output.metrics), ("output.manifest", &self.output.manifest)] {
            if name.is_empty() || name.contains('/') {
                return Err(invalid(key, "must be a plain file name"));
            }
        }
        Ok(Resolved { model, scenario, preset, ctrl, samples: self.solver.samples, workers: self.solver.workers })
    }

    /// Copy with the optional scenario fields filled in from the preset.
    pub fn resolved_copy(&self) -> Result<RunConfig, CliError> {
        let (_, scenario) = self.scenario()?;
        let mut out = self.clone();
        out.scenario.read_controls = Some(scenario.read_controls.iter().map(|c| c.name().to_string()).collect());
        out.scenario.probe_peak_power_pw = Some(scenario.probe_peak_power * 1e12);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let c = RunConfig::default();
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn default_resolves_to_core_defaults() {
        let r = RunConfig::default().resolve().unwrap();
        let m = MediumConfig::default();
        assert!((r.model.medium.length - m.length).abs() < 1e-15);
        assert_eq!(r.model.medium.spatial_points, 100);
        let c = ControlSettings::default();
        for k in 0..4 {
            assert!((r.model.controls.power[k] - c.power[k]).abs() <= 1e-15 * c.power[k]);
        }
        assert!((r.model.controls.detunings.delta1 - c.detunings.delta1).abs() < 1e-6);
        assert_eq!(r.preset, Preset::Fig2a);
        assert!((r.scenario.probe_peak_power - 280e-12).abs() < 1e-24);
        assert_eq!(r.samples, 2000);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let e = RunConfig::from_toml("[medium]\nlenght_cm = 2.0\n").unwrap_err();
        assert!(matches!(e, CliError::Validation(ref m) if m.contains("lenght_cm")), "{e}");
    }

    #[test]
    fn partial_config_fills_defaults() {
        let c = RunConfig::from_toml("[scenario]\npreset = \"fig3b\"\n").unwrap();
        assert_eq!(c.medium, MediumSection::default());
        assert_eq!(c.preset().unwrap(), Preset::Fig3b);

        let c = RunConfig::from_toml("[fields.detuning_mhz]\ndelta3 = 40.0\n[scenario.timing_us]\nt_end = 8.0\n").unwrap();
        assert_eq!(c.fields.detuning_mhz.delta3, 40.0);
        assert_eq!(c.fields.detuning_mhz.delta1, DetuningTable::default().delta1);
        assert_eq!(c.scenario.timing_us.t_on, TimingTable::default().t_on);
    }

    fn key_of(text: &str) -> String {
        let e = RunConfig::from_toml(text).unwrap().resolve().unwrap_err();
        match e {
            CliError::Validation(m) => m,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn violations_name_the_key() {
        assert!(key_of("[medium]\nspatial_points = 40\n").starts_with("medium.spatial_points"));
        assert!(key_of("[medium]\nspatial_points = 4\n").starts_with("medium.spatial_points"));
        assert!(key_of("[medium]\nlength_cm = -1.0\n").starts_with("medium.length_cm"));
        assert!(key_of("[fields.power_mw]\nomega = -1.0\nomega1 = 0.1\nomega2 = 1.0\nomega3 = 0.2\n").starts_with("fields.power_mw.omega"));
        assert!(key_of("[fields.detuning_mhz]\ndelta_l = 0.0\ndelta1 = 30.0\ndelta2 = -20.0\ndelta3 = 30.0\n")
            .starts_with("fields.detuning_mhz.delta2"));
        assert!(key_of("[fields.detuning_mhz]\ndelta3 = -1.0\n").starts_with("fields.detuning_mhz.delta3"));
        assert!(key_of("[scenario]\npreset = \"fig9\"\n").starts_with("scenario.preset"));
        assert!(key_of("[scenario]\nread_controls = [\"omega\"]\n").starts_with("scenario.read_controls"));
        assert!(key_of("[scenario]\nread_controls = [\"omega4\"]\n").starts_with("scenario.read_controls"));
        assert!(key_of("[scenario.timing_us]\nt0 = 4.3\nsigma = 0.0\nt_off = 5.0\nt_on = 13.0\nsigma_t = 0.1\nt_end = 20.0\n")
            .starts_with("scenario.timing_us.sigma"));
        assert!(key_of("[scenario.timing_us]\nt0 = 4.3\nsigma = 0.5\nt_off = 13.0\nt_on = 5.0\nsigma_t = 0.1\nt_end = 20.0\n")
            .starts_with("scenario.timing_us.t_on"));
        assert!(key_of("[solver]\nrel_tol = 0.0\n").starts_with("solver.rel_tol"));
        assert!(key_of("[solver]\nsamples = 1\n").starts_with("solver.samples"));
        assert!(key_of("[[atoms.branching]]\nupper = \"q\"\nlower = \"b\"\nfraction = 0.5\n").starts_with("atoms.branching[0].upper"));
    }

    #[test]
    fn optical_depth_guard_suggests_grid() {
        let m = key_of("[medium]\ndensity_per_m3 = 8e17\n");
        assert!(m.starts_with("medium.spatial_points") && m.contains("at least"), "{m}");
        let c = RunConfig::from_toml("[medium]\ndensity_per_m3 = 8e17\nspatial_points = 200\n").unwrap();
        c.resolve().unwrap();
    }

    #[test]
    fn resolved_copy_fills_preset_values() {
        let mut c = RunConfig::default();
        c.scenario.preset = "fig2c".into();
        let r = c.resolved_copy().unwrap();
        assert_eq!(r.scenario.read_controls.as_ref().unwrap().len(), 4);
        assert_eq!(r.scenario.probe_peak_power_pw, Some(280.0));
        assert_eq!(r.resolve().unwrap().scenario, c.resolve().unwrap().scenario);
    }
}
