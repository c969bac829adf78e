//! `validate`: independent oracles for the integrator, propagation and polariton layers.

use std::fmt;

use dualpol_core::atomic::{AtomicModel, Control, Level, MediumConfig, Probe};
use dualpol_core::constants::mhz_to_rad;
use dualpol_core::dynamics::{integrate_adaptive, integrate_rk4, max_abs, pure_state, steady_state, Dissipator, StepControl};
use dualpol_core::polariton::{analytic_dark_mode, build_polariton_matrix, find_dark_mode, group_velocity, PolaritonParams};
use dualpol_core::propagation::{co_integrate, CoState, Grid, Schedule, TimeSeries};
use dualpol_core::protocol::{peak_time, run_scenario, ControlSet, Scenario};
use dualpol_core::{Complex64, Mat6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analyze::base_params;
use crate::config::RunConfig;
use crate::{with_workers, CliError};

/// RK4 reference step, s.
pub const RK4_DT: f64 = 1e-10;
/// Length of the single-point comparison window, s.
pub const ETD_WINDOW: f64 = 1e-6;
/// Step cap for the single-point run; the tighter cap of the coupled solve guards the
/// atom/field splitting, which is absent here.
pub const ETD_DT_MAX: f64 = 1e-7;
pub const ETD_BOUND: f64 = 1e-6;
pub const BEER_LAMBERT_DEPTH: f64 = 2.0;
pub const BEER_LAMBERT_FIELD: f64 = 0.1;
pub const BEER_LAMBERT_BOUND: f64 = 1e-4;
pub const DARK_MODE_DRAWS: usize = 200;
pub const DARK_MODE_RATIO: f64 = 0.05;
/// Smallest Ω₃/Δ₃ drawn. Weaker dressing leaves g_d′ = g′cos θ comparable to the light shift
/// |Ω₁|²/Δ₁, where the closed-form mode no longer holds.
pub const MIN_DRESSING: f64 = 0.05;
pub const OVERLAP_BOUND: f64 = 0.999;
pub const RESIDUAL_BOUND: f64 = 1e-10;
pub const REFINEMENT_BOUND: f64 = 0.01;
pub const SLOW_LIGHT_DENSITY_FACTOR: f64 = 0.01;
pub const SLOW_LIGHT_BOUND: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, relation: Relation, bound: f64) -> Self {
        Self { name: name.into(), measured, relation, bound }
    }

    pub fn pass(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.measured <= self.bound,
            Relation::AtLeast => self.measured >= self.bound,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        let verdict = if self.pass() { "pass" } else { "FAIL" };
        write!(f, "{:<34} {:>12.4e} {rel} {:<10.3e} {verdict}", self.name, self.measured, self.bound)
    }
}

pub fn table(checks: &[Check]) -> String {
    let mut s = format!("{:<34} {:>12}    {:<10} result\n", "check", "measured", "bound");
    for c in checks {
        s.push_str(&c.to_string());
        s.push('\n');
    }
    s
}

/// Single-point drive: the configured scenario evaluated at z = 0.
fn point_hamiltonian<'a>(model: &'a AtomicModel, scenario: &Scenario) -> impl Fn(f64) -> Mat6 + 'a {
    let drive = scenario.drive(model);
    move |t: f64| model.hamiltonian(&drive.controls(t), &drive.probe_input(t))
}

/// Max-norm difference between the adaptive ETD and fixed-step RK4 trajectories of one atom
/// over the 1 µs window centred on the write-control switch-off.
///
/// Both start from the RK4 state at the window start.
pub fn etd_vs_rk4(model: &AtomicModel, scenario: &Scenario, ctrl: &StepControl) -> Result<f64, CliError> {
    let h = point_hamiltonian(model, scenario);
    let diss = Dissipator::new(&model.jumps);
    let t0 = (scenario.timing.t_off - 0.5 * ETD_WINDOW).max(0.0);
    let start = integrate_rk4(&pure_state(Level::B.index()), &h, &diss, 0.0, &[t0], RK4_DT)?[0];
    let samples: Vec<f64> = (1..=100).map(|k| t0 + ETD_WINDOW * k as f64 / 100.0).collect();
    let ctrl = StepControl { dt_max: ETD_DT_MAX, dt_initial: ctrl.dt_initial.min(ETD_DT_MAX), ..*ctrl };
    let etd = integrate_adaptive(&start, &h, &diss, t0, &samples, &ctrl)?;
    let rk4 = integrate_rk4(&start, &h, &diss, t0, &samples, RK4_DT)?;
    Ok(etd.iter().zip(&rk4).map(|(a, b)| max_abs(&(a - b))).fold(0.0, f64::max))
}

struct ConstantProbe {
    field: f64,
}

impl Schedule for ConstantProbe {
    fn controls(&self, _: f64) -> [f64; 4] {
        [0.0; 4]
    }

    fn probe_input(&self, _: f64) -> [Complex64; 2] {
        [Complex64::new(self.field, 0.0), Complex64::new(0.0, 0.0)]
    }
}

/// Two-level absorber model: controls off, a → b with branching 1, density set for
/// amplitude optical depth [`BEER_LAMBERT_DEPTH`].
pub fn two_level_model(cfg: &RunConfig) -> Result<AtomicModel, CliError> {
    let mut data = cfg.atomic_data()?;
    data.branching.retain(|&(u, _, _)| u != Level::A);
    data.branching.push((Level::A, Level::B, 1.0));
    let mut controls = cfg.control_settings()?;
    controls.power = [0.0; 4];
    let medium = cfg.medium()?;
    let probe = AtomicModel::new(data.clone(), controls, medium)?;
    let density = medium.density * BEER_LAMBERT_DEPTH / (probe.resonant_absorption(Probe::A) * medium.length);
    Ok(AtomicModel::new(data, controls, MediumConfig { density, ..medium })?)
}

/// Relative error of the steady CW transmission against exp(ik n d χ L / ε₀) with the
/// susceptibility χ = ρ_ab/𝓔 taken from the single-atom stationary state.
pub fn beer_lambert(cfg: &RunConfig) -> Result<(f64, f64, f64), CliError> {
    let model = two_level_model(cfg)?;
    let e0 = BEER_LAMBERT_FIELD;
    let h = model.hamiltonian(&[0.0; 4], &[Complex64::new(e0, 0.0), Complex64::new(0.0, 0.0)]);
    // Spectator levels relax into b so that the stationary state is unique; they stay empty
    // in the propagated medium.
    let mut ops = model.jumps.clone();
    let rate = model.scheme.total_decay(Level::A);
    for l in [Level::C, Level::E, Level::F, Level::D] {
        let mut op = Mat6::zeros();
        op[(Level::B.index(), l.index())] = Complex64::new((0.5 * rate).sqrt(), 0.0);
        ops.push(op);
    }
    let rho = steady_state(&h, &ops)?;
    let (u, l) = Probe::A.coherence();
    let chi = rho[(u, l)] / e0;
    let predicted = (model.source_coefficient(Probe::A) * chi * model.medium.length).exp().norm();

    let grid = Grid::new(model.medium.spatial_points, model.medium.length)?;
    let schedule = ConstantProbe { field: e0 };
    let mut state = CoState::initial(grid, &schedule, 0.0);
    let ts = co_integrate(&model, &mut state, &schedule, &StepControl::default(), 1e-6, 2, &mut ())
        .map_err(|f| CliError::from(f.error))?;
    let measured = ts.ea.last().copied().unwrap_or(f64::NAN) / e0;
    Ok(((measured - predicted).abs() / predicted, measured, predicted))
}

/// Random far-detuned polariton parameters with |Ω₁/Δ₁| ≤ `ratio`, Ω₃/Δ₃ ≥ [`MIN_DRESSING`]
/// and ω_c′ = ck = 0.
pub fn random_params(rng: &mut impl Rng, ratio: f64) -> PolaritonParams {
    let phase = |m: f64, rng: &mut dyn rand::RngCore| Complex64::from_polar(m, rng.gen_range(0.0..std::f64::consts::TAU));
    let delta1 = mhz_to_rad(rng.gen_range(20.0..200.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let omega1 = rng.gen_range(0.001..ratio) * delta1.abs();
    let delta3 = mhz_to_rad(rng.gen_range(5.0..100.0));
    PolaritonParams {
        omega: phase(mhz_to_rad(rng.gen_range(0.1..50.0)), rng),
        omega1: phase(omega1, rng),
        omega2: phase(mhz_to_rad(rng.gen_range(0.1..50.0)), rng),
        omega3: phase(rng.gen_range(MIN_DRESSING..1.0) * delta3, rng),
        delta1,
        delta3,
        g: mhz_to_rad(rng.gen_range(100.0..5000.0)),
        g_prime: mhz_to_rad(rng.gen_range(100.0..5000.0)),
        omega_c_prime: 0.0,
        ck: 0.0,
    }
}

/// (smallest overlap with the closed form, largest residual over ‖M‖₂) across `draws` sets.
pub fn dark_mode_oracle(draws: usize, seed: u64) -> Result<(f64, f64), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_overlap = f64::INFINITY;
    let mut max_residual = 0.0f64;
    for _ in 0..draws {
        let p = random_params(&mut rng, DARK_MODE_RATIO);
        let m = build_polariton_matrix(&p)?;
        let found = find_dark_mode(&m)?;
        let norm = found.spectrum.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let a = analytic_dark_mode(&p)?;
        min_overlap = min_overlap.min(found.mode.overlap(&a));
        max_residual = max_residual.max(found.mode.residual(&m) / norm);
    }
    Ok((min_overlap, max_residual))
}

fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// Largest max-norm change of any output trace (relative to that trace's peak).
pub fn trace_change(a: &TimeSeries, b: &TimeSeries) -> f64 {
    let pairs: [(&[f64], &[f64]); 4] = [(&a.ea, &b.ea), (&a.eb, &b.eb), (&a.rho_cb, &b.rho_cb), (&a.rho_ce, &b.rho_ce)];
    pairs.iter().map(|(x, y)| relative_change(x, y)).fold(0.0, f64::max)
}

/// Output change when the grid doubles, over the write stage of the configured scenario.
pub fn grid_refinement(cfg: &RunConfig) -> Result<f64, CliError> {
    let r = cfg.resolve()?;
    let mut scenario = r.scenario;
    scenario.timing.t_end = scenario.timing.t_end.min(scenario.timing.t_off + 1e-6);
    let fine_medium = MediumConfig { spatial_points: 2 * r.model.medium.spatial_points, ..r.model.medium };
    let fine = AtomicModel::new(r.model.data.clone(), r.model.controls, fine_medium)?;
    let samples = 500;
    let run = |m: &AtomicModel| {
        with_workers(r.workers, || run_scenario(m, &scenario, &r.ctrl, samples, &mut ()))?.map_err(|f| CliError::from(f.error))
    };
    let coarse = run(&r.model)?;
    let fine = run(&fine)?;
    Ok(trace_change(&coarse, &fine))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlowLight {
    pub delay: f64,
    pub predicted: f64,
    pub v_g: f64,
}

impl SlowLight {
    pub fn ratio(&self) -> f64 {
        self.delay / self.predicted
    }
}

/// Peak delay of a pulse through a reduced-density medium with CW Ω₃ and Ω, against L/v_g.
pub fn slow_light(cfg: &RunConfig) -> Result<SlowLight, CliError> {
    let r = cfg.resolve()?;
    let medium = MediumConfig { density: r.model.medium.density * SLOW_LIGHT_DENSITY_FACTOR, ..r.model.medium };
    let model = AtomicModel::new(r.model.data.clone(), r.model.controls, medium)?;
    let lambda = ControlSet::of(&[Control::Omega3, Control::Omega]);
    let mut scenario = Scenario {
        input_mode: Probe::A,
        write_controls: lambda,
        read_controls: lambda,
        continuous_controls: true,
        ..r.scenario
    };
    scenario.probe_peak_power = if r.scenario.input_mode == Probe::A { r.scenario.probe_peak_power } else { 280e-12 };
    scenario.timing.t_end = scenario.timing.t0 + 8.0 * scenario.timing.sigma;
    let ts = with_workers(r.workers, || run_scenario(&model, &scenario, &r.ctrl, 4001, &mut ()))?
        .map_err(|f| CliError::from(f.error))?;
    let t_in = peak_time(&ts.tau, &ts.input[0], f64::NEG_INFINITY, f64::INFINITY);
    let t_out = peak_time(&ts.tau, &ts.ea, f64::NEG_INFINITY, f64::INFINITY);
    let (Some(t_in), Some(t_out)) = (t_in, t_out) else {
        return Err(CliError::Numerical("slow-light run produced no output peak".into()));
    };
    let mut p = base_params(&model, 0.0, 0.0);
    p.omega1 = Complex64::new(0.0, 0.0);
    p.omega2 = Complex64::new(0.0, 0.0);
    let v_g = group_velocity(&p)?;
    Ok(SlowLight { delay: t_out - t_in, predicted: model.medium.length / v_g, v_g })
}

/// Runs every oracle. Fails with exit code 3 if any check fails.
pub fn run_all(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let r = cfg.resolve()?;
    let mut checks = Vec::new();
    log::info!("ETD vs RK4");
    checks.push(Check::new("etd_vs_rk4_max_norm", etd_vs_rk4(&r.model, &r.scenario, &r.ctrl)?, Relation::AtMost, ETD_BOUND));
    log::info!("Beer-Lambert");
    let (bl, _, _) = beer_lambert(cfg)?;
    checks.push(Check::new("beer_lambert_relative_error", bl, Relation::AtMost, BEER_LAMBERT_BOUND));
    log::info!("dark-mode eigen residuals");
    let (overlap, residual) = dark_mode_oracle(DARK_MODE_DRAWS, 7)?;
    checks.push(Check::new("dark_mode_min_overlap", overlap, Relation::AtLeast, OVERLAP_BOUND));
    checks.push(Check::new("dark_mode_residual_over_norm", residual, Relation::AtMost, RESIDUAL_BOUND));
    log::info!("grid refinement");
    checks.push(Check::new("grid_refinement_max_change", grid_refinement(cfg)?, Relation::AtMost, REFINEMENT_BOUND));
    log::info!("slow-light delay");
    let s = slow_light(cfg)?;
    checks.push(Check::new("slow_light_delay_ratio_error", (s.ratio() - 1.0).abs(), Relation::AtMost, SLOW_LIGHT_BOUND));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_relations() {
        assert!(Check::new("x", 1.0, Relation::AtMost, 1.0).pass());
        assert!(!Check::new("x", 1.1, Relation::AtMost, 1.0).pass());
        assert!(Check::new("x", 0.9995, Relation::AtLeast, 0.999).pass());
        assert!(!Check::new("x", f64::NAN, Relation::AtMost, 1.0).pass());
        assert!(table(&[Check::new("x", 2.0, Relation::AtMost, 1.0)]).contains("FAIL"));
    }

    #[test]
    fn random_params_respect_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let p = random_params(&mut rng, 0.05);
            assert!(p.omega1.norm() / p.delta1.abs() <= 0.05);
            p.validate().unwrap();
        }
    }

    #[test]
    fn relative_change_is_scaled_by_peak() {
        assert!((relative_change(&[0.0, 2.0], &[0.0, 1.9]) - 0.05).abs() < 1e-15);
        assert_eq!(relative_change(&[0.0; 3], &[0.0; 3]), 0.0);
    }

    #[test]
    fn two_level_model_has_requested_depth() {
        let m = two_level_model(&RunConfig::default()).unwrap();
        let depth = m.resonant_absorption(Probe::A) * m.medium.length;
        assert!((depth - BEER_LAMBERT_DEPTH).abs() < 1e-12);
        assert_eq!(m.controls.power, [0.0; 4]);
    }
}
